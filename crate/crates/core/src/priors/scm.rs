//! Structural causal model prior.
//!
//! A random DAG of K ~ U{d+1 .. 3(d+1)} nodes is built in topological order.
//! Node 0 is a pure N(0,1) noise source; every later node applies a random
//! activation (identity, tanh, relu, sin) to a noisy affine combination of
//! 1..3 earlier nodes. The d feature nodes and one target node are drawn
//! uniformly without replacement. Classification targets and categorical
//! features come from rank-binning node values into bins of random quantile
//! widths; continuous columns are standardized.

use ndarray::Array2;

use crate::data::{ColumnKind, Table, TaskKind, MAX_CLASSES};
use crate::rng::Rng;
use crate::Result;

use super::{DatasetConfig, PriorKind};

#[derive(Clone, Copy)]
enum Act {
    Identity,
    Tanh,
    Relu,
    Sin,
}

impl Act {
    fn sample(rng: &mut Rng) -> Self {
        match rng.below(4) {
            0 => Act::Identity,
            1 => Act::Tanh,
            2 => Act::Relu,
            _ => Act::Sin,
        }
    }

    fn apply(&self, v: f64) -> f64 {
        match self {
            Act::Identity => v,
            Act::Tanh => v.tanh(),
            Act::Relu => v.max(0.0),
            Act::Sin => v.sin(),
        }
    }
}

/// Bin widths with a 0.5/k floor so every quantile bin is occupied once
/// N >= 10k.
fn guarded_widths(k: usize, rng: &mut Rng) -> Vec<f64> {
    let raw = rng.dirichlet_ones(k);
    raw.iter().map(|w| 0.5 / k as f64 + 0.5 * w).collect()
}

/// Rank-bin `values` into `k` classes: ranks (ties broken by index) are
/// normalized to (0,1) and assigned to the quantile segment they fall in.
fn rank_bin(values: &[f64], widths: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let mut bounds = Vec::with_capacity(widths.len());
    let mut acc = 0.0;
    for w in widths {
        acc += w;
        bounds.push(acc);
    }
    let mut out = vec![0.0; n];
    for (rank, &idx) in order.iter().enumerate() {
        let pos = (rank as f64 + 0.5) / n as f64;
        let bin = bounds.iter().position(|&b| pos < b).unwrap_or(widths.len() - 1);
        out[idx] = bin as f64;
    }
    out
}

fn standardize(values: &mut [f64]) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = if var.sqrt() < 1e-12 { 1.0 } else { var.sqrt() };
    for v in values {
        *v = (*v - mean) / std;
    }
}

/// Sample one SCM table.
pub fn scm_sample(cfg: &DatasetConfig, rng: &mut Rng) -> Result<Table> {
    let d = cfg.d;
    let n = cfg.n;
    let k_nodes = rng.usize_range(d + 1, 3 * (d + 1));
    let sigma_noise = rng.uniform(0.01, 0.3);

    // node values, one row of n samples per node
    let mut nodes: Vec<Vec<f64>> = Vec::with_capacity(k_nodes);
    for k in 0..k_nodes {
        if k == 0 {
            nodes.push((0..n).map(|_| rng.normal()).collect());
            continue;
        }
        let n_par = rng.usize_range(1, k.min(3));
        let parents = rng.choose_indices(k, n_par);
        let scale = 1.0 / (n_par as f64).sqrt();
        let weights: Vec<f64> = (0..n_par).map(|_| rng.normal() * scale).collect();
        let bias = rng.normal() * 0.3;
        let act = Act::sample(rng);
        let mut vals = Vec::with_capacity(n);
        for i in 0..n {
            let mut z = bias + rng.normal() * sigma_noise;
            for (w, &p) in weights.iter().zip(&parents) {
                z += w * nodes[p][i];
            }
            vals.push(act.apply(z));
        }
        nodes.push(vals);
    }

    // d feature nodes plus one target node, without replacement
    let picked = rng.choose_indices(k_nodes, d + 1);
    let feature_nodes = &picked[..d];
    let target_node = picked[d];

    // categorical column selection per the p_cat scheme
    let n_cat = ((cfg.p_cat * (d + 1) as f64).floor() as usize).min(d);
    let cat_cols = rng.choose_indices(d, n_cat);
    let mut is_cat = vec![false; d];
    for &j in &cat_cols {
        is_cat[j] = true;
    }

    let mut features = Array2::zeros((n, d));
    let mut col_kinds = Vec::with_capacity(d);
    for j in 0..d {
        let raw = nodes[feature_nodes[j]].clone();
        if is_cat[j] {
            let card = ((2 + rng.geometric(0.5) as usize).min(MAX_CLASSES)).max(2);
            let widths = guarded_widths(card, rng);
            let codes = rank_bin(&raw, &widths);
            for i in 0..n {
                features[[i, j]] = codes[i];
            }
            // observed cardinality can be smaller than drawn on tiny tables
            let seen = codes.iter().cloned().fold(0.0f64, f64::max) as usize + 1;
            col_kinds.push(ColumnKind::Categorical(seen.max(2)));
        } else {
            let mut vals = raw;
            standardize(&mut vals);
            for i in 0..n {
                features[[i, j]] = vals[i];
            }
            col_kinds.push(ColumnKind::Continuous);
        }
    }

    let target = match cfg.task {
        TaskKind::Classification { num_classes } => {
            let widths = guarded_widths(num_classes, rng);
            rank_bin(&nodes[target_node], &widths)
        }
        TaskKind::Regression => {
            let mut vals = nodes[target_node].clone();
            standardize(&mut vals);
            vals
        }
    };

    Table::new(features, col_kinds, target, cfg.task, Some(PriorKind::Scm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priors::{sample_dataset_config, TaskFamily};

    #[test]
    fn invariant_sweep_over_random_configs() {
        let mut rng = Rng::new(1);
        for i in 0..300 {
            let family =
                if i % 2 == 0 { TaskFamily::Classification } else { TaskFamily::Regression };
            let mut cfg = sample_dataset_config(family, &mut rng);
            cfg.n = cfg.n.min(128); // keep the sweep quick
            let table = scm_sample(&cfg, &mut rng).unwrap();
            assert_eq!(table.num_rows(), cfg.n);
            assert_eq!(table.num_features(), cfg.d);
        }
    }

    #[test]
    fn rank_binning_fills_every_class() {
        let mut rng = Rng::new(2);
        for _ in 0..200 {
            let num_classes = rng.usize_range(2, MAX_CLASSES);
            let n = 10 * num_classes + rng.usize_range(0, 50);
            let cfg = DatasetConfig::new(
                4,
                n.max(64),
                TaskKind::classification(num_classes).unwrap(),
                0.0,
                0,
            )
            .unwrap();
            let table = scm_sample(&cfg, &mut rng).unwrap();
            let mut seen = vec![false; num_classes];
            for y in &table.target {
                seen[*y as usize] = true;
            }
            assert!(seen.iter().all(|&s| s), "missing class in {:?}", table.target);
        }
    }

    #[test]
    fn linear_scm_child_is_affine_in_parents() {
        // With the noise term at zero and identity activation, a child node
        // is an exact affine function of its parents; rank_bin aside, verify
        // the raw recurrence on a hand-built two-node chain.
        let mut rng = Rng::new(3);
        let parent: Vec<f64> = (0..50).map(|_| rng.normal()).collect();
        let w = 1.7;
        let b = -0.3;
        let child: Vec<f64> = parent.iter().map(|p| Act::Identity.apply(w * p + b)).collect();
        for (p, c) in parent.iter().zip(&child) {
            assert!((c - (w * p + b)).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = DatasetConfig::new(
            6,
            100,
            TaskKind::classification(3).unwrap(),
            0.3,
            0,
        )
        .unwrap();
        let a = scm_sample(&cfg, &mut Rng::new(11)).unwrap();
        let b = scm_sample(&cfg, &mut Rng::new(11)).unwrap();
        assert_eq!(a.features, b.features);
        assert_eq!(a.target, b.target);
    }
}
