//! Support-fitted feature and target normalization.
//!
//! Features go through a uniform quantile transform fitted on the support
//! rows (empirical-CDF interpolation over sorted support values, clipped to
//! [0, 1] outside the support range), then standardization by the mean and
//! standard deviation of the mapped support values. Every column takes the
//! same path: categorical codes are quantile-mapped and standardized exactly
//! like continuous values, which keeps one code path into the model.
//!
//! Regression targets are min-max normalized by the support extrema.

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

use super::{Table, TaskKind};

const STD_FLOOR: f64 = 1e-12;

/// Quantile map for one column: sorted unique support values paired with
/// their mean-rank ECDF positions in [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileMap {
    xs: Vec<f64>,
    qs: Vec<f64>,
}

impl QuantileMap {
    fn fit(values: &[f64]) -> Self {
        let s = values.len();
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut xs = Vec::new();
        let mut qs = Vec::new();
        let mut i = 0;
        while i < s {
            let mut j = i;
            while j + 1 < s && sorted[j + 1] == sorted[i] {
                j += 1;
            }
            // Mean of the 0-based ranks occupied by this value.
            let mean_rank = (i + j) as f64 / 2.0;
            xs.push(sorted[i]);
            qs.push(if s == 1 { 0.5 } else { mean_rank / (s - 1) as f64 });
            i = j + 1;
        }
        QuantileMap { xs, qs }
    }

    /// Map one value through the interpolated ECDF, clipping outside the
    /// support range.
    pub fn map(&self, v: f64) -> f64 {
        let m = self.xs.len();
        if v < self.xs[0] {
            return 0.0;
        }
        if v > self.xs[m - 1] {
            return 1.0;
        }
        match self.xs.binary_search_by(|x| x.partial_cmp(&v).unwrap()) {
            Ok(i) => self.qs[i],
            Err(i) => {
                // strictly between xs[i-1] and xs[i]
                let (x0, x1) = (self.xs[i - 1], self.xs[i]);
                let (q0, q1) = (self.qs[i - 1], self.qs[i]);
                q0 + (q1 - q0) * (v - x0) / (x1 - x0)
            }
        }
    }
}

/// Per-column normalization state for one column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnNorm {
    pub qmap: QuantileMap,
    pub mean: f64,
    pub std: f64,
}

/// Normalizer fitted from the support rows of an episode. Never reads query
/// statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub columns: Vec<ColumnNorm>,
    /// (min, max) of the support targets; regression only.
    pub target_range: Option<(f64, f64)>,
}

impl Normalizer {
    /// Fit from support rows only.
    pub fn fit(table: &Table, support_idx: &[usize]) -> Result<Self> {
        if support_idx.is_empty() {
            return Err(Error::Size("support must be nonempty".into()));
        }
        let d = table.num_features();
        let mut columns = Vec::with_capacity(d);
        for j in 0..d {
            let vals: Vec<f64> = support_idx.iter().map(|&i| table.features[[i, j]]).collect();
            let qmap = QuantileMap::fit(&vals);
            let mapped: Vec<f64> = vals.iter().map(|&v| qmap.map(v)).collect();
            let mean = mapped.iter().sum::<f64>() / mapped.len() as f64;
            let var = mapped.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>()
                / mapped.len() as f64;
            let mut std = var.sqrt();
            if std < STD_FLOOR {
                std = 1.0;
            }
            columns.push(ColumnNorm { qmap, mean, std });
        }
        let target_range = match table.task {
            TaskKind::Regression => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &i in support_idx {
                    lo = lo.min(table.target[i]);
                    hi = hi.max(table.target[i]);
                }
                Some((lo, hi))
            }
            TaskKind::Classification { .. } => None,
        };
        Ok(Normalizer { columns, target_range })
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Normalize one feature row. Errors on column-count mismatch.
    pub fn apply_row(&self, row: ArrayView1<f64>) -> Result<Vec<f64>> {
        if row.len() != self.columns.len() {
            return Err(Error::Schema(format!(
                "row has {} columns, normalizer fitted on {}",
                row.len(),
                self.columns.len()
            )));
        }
        Ok(row
            .iter()
            .zip(&self.columns)
            .map(|(&v, c)| (c.qmap.map(v) - c.mean) / c.std)
            .collect())
    }

    /// Min-max normalize a regression target; the degenerate support range
    /// maps everything to 0.
    pub fn normalize_target(&self, y: f64) -> f64 {
        match self.target_range {
            Some((lo, hi)) if hi > lo => (y - lo) / (hi - lo),
            Some(_) => 0.0,
            None => y,
        }
    }

    /// Inverse of [`Self::normalize_target`].
    pub fn denormalize_target(&self, v: f64) -> f64 {
        match self.target_range {
            Some((lo, hi)) if hi > lo => lo + v * (hi - lo),
            Some((lo, _)) => lo,
            None => v,
        }
    }
}
