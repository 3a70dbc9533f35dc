//! Decision-boundary grid export for 2D classification tables.
//!
//! 10% of the table's rows become the support set; the query set is a
//! resolution×resolution lattice spanning [min - 0.5, max + 0.5] on each
//! axis. Output is one row per lattice point: x, y, per-class
//! probabilities, argmax.

use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;

use crate::data::{fmt_real, Episode, Table};
use crate::error::Error;
use crate::rng::Rng;
use crate::tfm::{icl_predict, TfmModel};
use crate::Result;

#[derive(Clone, Debug)]
pub struct DecisionGrid {
    pub resolution: usize,
    pub num_classes: usize,
    /// Lattice point coordinates, x outer and y inner, matching the CSV order.
    pub points: Vec<(f64, f64)>,
    /// Per-point class probabilities (resolution² × num_classes).
    pub probs: Array2<f64>,
    pub argmax: Vec<usize>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Evaluate ICL class probabilities over the lattice.
pub fn decision_grid(
    model: &TfmModel,
    table: &Table,
    resolution: usize,
    seed: u64,
) -> Result<DecisionGrid> {
    if table.num_features() != 2 {
        return Err(Error::Dim(format!(
            "decision grid needs d = 2, table has {}",
            table.num_features()
        )));
    }
    let Some(num_classes) = table.task.num_classes() else {
        return Err(Error::Dim("decision grid needs a classification table".into()));
    };
    if resolution == 0 {
        return Err(Error::Invalid("resolution must be >= 1".into()));
    }
    let n = table.num_rows();
    let n_sup = ((n as f64 * 0.1).round() as usize).clamp(1, n - 1);
    let mut rng = Rng::new(seed).child("grid");
    let support_rows = rng.choose_indices(n, n_sup);

    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        x_lo = x_lo.min(table.features[[i, 0]]);
        x_hi = x_hi.max(table.features[[i, 0]]);
        y_lo = y_lo.min(table.features[[i, 1]]);
        y_hi = y_hi.max(table.features[[i, 1]]);
    }
    let xs = linspace(x_lo - 0.5, x_hi + 0.5, resolution);
    let ys = linspace(y_lo - 0.5, y_hi + 0.5, resolution);

    // support rows followed by the lattice as query rows (dummy class 0)
    let total = n_sup + resolution * resolution;
    let mut features = Array2::zeros((total, 2));
    let mut target = vec![0.0; total];
    for (k, &i) in support_rows.iter().enumerate() {
        features[[k, 0]] = table.features[[i, 0]];
        features[[k, 1]] = table.features[[i, 1]];
        target[k] = table.target[i];
    }
    let mut points = Vec::with_capacity(resolution * resolution);
    for (ix, &x) in xs.iter().enumerate() {
        for (iy, &y) in ys.iter().enumerate() {
            let k = n_sup + ix * resolution + iy;
            features[[k, 0]] = x;
            features[[k, 1]] = y;
            points.push((x, y));
        }
    }
    let grid_table = Arc::new(Table::new(
        features,
        table.col_kinds.clone(),
        target,
        table.task,
        table.prior_tag,
    )?);
    let episode = Episode::from_indices(
        grid_table,
        (0..n_sup).collect(),
        (n_sup..total).collect(),
    )?;
    let pred = icl_predict(model, &episode)?;
    let probs = pred.probs.unwrap();
    let argmax = pred.classes.unwrap();
    Ok(DecisionGrid { resolution, num_classes, points, probs, argmax })
}

/// CSV emission: header `x,y,p_class0,...,argmax`.
pub fn write_grid_csv(grid: &DecisionGrid, path: &Path) -> Result<()> {
    let mut out = String::from("x,y");
    for c in 0..grid.num_classes {
        out.push_str(&format!(",p_class{c}"));
    }
    out.push_str(",argmax\n");
    for (i, (x, y)) in grid.points.iter().enumerate() {
        out.push_str(&fmt_real(*x));
        out.push(',');
        out.push_str(&fmt_real(*y));
        for c in 0..grid.num_classes {
            out.push(',');
            out.push_str(&fmt_real(grid.probs[[i, c]]));
        }
        out.push_str(&format!(",{}\n", grid.argmax[i]));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ColumnKind, TaskKind};
    use crate::tfm::TfmConfig;

    fn table_2d(seed: u64) -> Table {
        let mut rng = Rng::new(seed);
        let n = 80;
        let features = Array2::from_shape_fn((n, 2), |_| rng.normal());
        let target: Vec<f64> = (0..n)
            .map(|i| if features[[i, 0]] + features[[i, 1]] > 0.0 { 1.0 } else { 0.0 })
            .collect();
        Table::new(
            features,
            vec![ColumnKind::Continuous; 2],
            target,
            TaskKind::classification(2).unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn grid_has_resolution_squared_rows_and_probs_sum_to_one() {
        let model = TfmModel::init(
            &TfmConfig { layers: 1, model_dim: 16, heads: 2, mlp_ratio: 2.0, ..TfmConfig::default() },
            &mut Rng::new(0),
        );
        let table = table_2d(1);
        let grid = decision_grid(&model, &table, 9, 7).unwrap();
        assert_eq!(grid.points.len(), 81);
        assert_eq!(grid.probs.nrows(), 81);
        for i in 0..81 {
            let sum: f64 = grid.probs.row(i).sum();
            assert!((sum - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_non_2d_tables() {
        let model = TfmModel::init(
            &TfmConfig { layers: 1, model_dim: 16, heads: 2, mlp_ratio: 2.0, ..TfmConfig::default() },
            &mut Rng::new(0),
        );
        let mut rng = Rng::new(2);
        let features = Array2::from_shape_fn((10, 3), |_| rng.normal());
        let table = Table::new(
            features,
            vec![ColumnKind::Continuous; 3],
            (0..10).map(|i| (i % 2) as f64).collect(),
            TaskKind::classification(2).unwrap(),
            None,
        )
        .unwrap();
        assert!(matches!(decision_grid(&model, &table, 5, 0), Err(Error::Dim(_))));
    }
}
