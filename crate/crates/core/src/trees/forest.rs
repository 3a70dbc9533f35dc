//! Random forests and extra trees over the CART base learner.
//!
//! RF fits each tree on a bootstrap resample with the `best` splitter over a
//! sqrt(d) feature subset. ET fits on the full sample with the `random`
//! splitter (one uniform threshold per candidate feature), also over sqrt(d)
//! features.

use ndarray::Array2;

use crate::data::TaskKind;
use crate::error::Error;
use crate::rng::Rng;
use crate::Result;

use super::cart::{argmax_lowest, cart_fit_unchecked, CartParams, CartTree, Splitter};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForestKind {
    Rf,
    Et,
}

#[derive(Clone, Debug)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
}

#[derive(Clone, Debug)]
pub struct ForestModel {
    pub kind: ForestKind,
    task: TaskKind,
    trees: Vec<CartTree>,
}

fn sqrt_features(d: usize) -> usize {
    ((d as f64).sqrt().floor() as usize).max(1)
}

pub fn forest_fit(
    x: &Array2<f64>,
    y: &[f64],
    task: TaskKind,
    kind: ForestKind,
    params: &ForestParams,
    rng: &mut Rng,
) -> Result<ForestModel> {
    if params.n_estimators == 0 {
        return Err(Error::Invalid("forest needs >= 1 tree".into()));
    }
    if let TaskKind::Classification { .. } = task {
        let first = y[0];
        if y.iter().all(|&v| v == first) {
            return Err(Error::DegenerateFit("single-class targets".into()));
        }
    }
    let n = x.nrows();
    let cart_params = CartParams {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        max_features: Some(sqrt_features(x.ncols())),
        splitter: match kind {
            ForestKind::Rf => Splitter::Best,
            ForestKind::Et => Splitter::Random,
        },
    };
    let mut trees = Vec::with_capacity(params.n_estimators);
    for _ in 0..params.n_estimators {
        match kind {
            ForestKind::Rf => {
                let idx: Vec<usize> = (0..n).map(|_| rng.below(n as u64) as usize).collect();
                let bx = Array2::from_shape_fn((n, x.ncols()), |(i, j)| x[[idx[i], j]]);
                let by: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
                trees.push(cart_fit_unchecked(&bx, &by, task, &cart_params, rng));
            }
            ForestKind::Et => {
                trees.push(cart_fit_unchecked(x, y, task, &cart_params, rng));
            }
        }
    }
    Ok(ForestModel { kind, task, trees })
}

impl ForestModel {
    pub fn num_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn trees(&self) -> &[CartTree] {
        &self.trees
    }

    /// Majority vote over tree predictions (ties to the lowest class) for
    /// classification; mean for regression.
    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<f64>> {
        let per_tree: Vec<Vec<f64>> =
            self.trees.iter().map(|t| t.predict(x)).collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(x.nrows());
        for i in 0..x.nrows() {
            let y = match self.task {
                TaskKind::Classification { num_classes } => {
                    let mut counts = vec![0.0; num_classes];
                    for preds in &per_tree {
                        counts[preds[i] as usize] += 1.0;
                    }
                    argmax_lowest(&counts) as f64
                }
                TaskKind::Regression => {
                    per_tree.iter().map(|p| p[i]).sum::<f64>() / per_tree.len() as f64
                }
            };
            out.push(y);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::cart_fit;

    fn cls(k: usize) -> TaskKind {
        TaskKind::classification(k).unwrap()
    }

    fn params(n_estimators: usize) -> ForestParams {
        ForestParams { n_estimators, max_depth: 8, min_samples_split: 2 }
    }

    #[test]
    fn ensemble_of_one_et_equals_its_tree() {
        // ET uses the full sample, so a single-tree forest must match the
        // tree fitted with the identical stream.
        let mut rng = Rng::new(3);
        let x = Array2::from_shape_fn((50, 4), |_| rng.normal());
        let y: Vec<f64> = (0..50).map(|_| rng.below(3) as f64).collect();
        let forest =
            forest_fit(&x, &y, cls(3), ForestKind::Et, &params(1), &mut Rng::new(10)).unwrap();
        let cart_params = CartParams {
            max_depth: 8,
            min_samples_split: 2,
            max_features: Some(2),
            splitter: Splitter::Random,
        };
        let tree = cart_fit(&x, &y, cls(3), &cart_params, &mut Rng::new(10)).unwrap();
        assert_eq!(forest.predict(&x).unwrap(), tree.predict(&x).unwrap());
    }

    #[test]
    fn rf_fits_separable_data() {
        let mut rng = Rng::new(4);
        let n = 200;
        let x = Array2::from_shape_fn((n, 2), |(i, _)| {
            if i < n / 2 { rng.normal() - 3.0 } else { rng.normal() + 3.0 }
        });
        let y: Vec<f64> = (0..n).map(|i| if i < n / 2 { 0.0 } else { 1.0 }).collect();
        let forest =
            forest_fit(&x, &y, cls(2), ForestKind::Rf, &params(11), &mut rng).unwrap();
        let preds = forest.predict(&x).unwrap();
        let acc =
            preds.iter().zip(&y).filter(|(p, t)| p == t).count() as f64 / n as f64;
        assert!(acc >= 0.95, "training accuracy {acc}");
    }

    #[test]
    fn et_thresholds_are_uniform_in_node_range() {
        // Root split of a depth-1 ET stump on one feature: the threshold is
        // uniform over the observed value range. Kolmogorov-Smirnov check
        // against U[lo, hi] at a loose level over many fits.
        let mut rng = Rng::new(5);
        let n = 64;
        let x = Array2::from_shape_fn((n, 1), |_| rng.uniform(0.0, 1.0));
        let lo = x.column(0).iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = x.column(0).iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let y: Vec<f64> = (0..n).map(|_| rng.below(2) as f64).collect();
        let fp = ForestParams { n_estimators: 1, max_depth: 1, min_samples_split: 2 };
        let mut samples = Vec::new();
        for seed in 0..400 {
            let forest =
                forest_fit(&x, &y, cls(2), ForestKind::Et, &fp, &mut Rng::new(seed)).unwrap();
            if let Some((_, t)) = forest.trees()[0].root_split() {
                samples.push((t - lo) / (hi - lo));
            }
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = samples.len() as f64;
        let ks = samples
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let f = (i + 1) as f64 / m;
                (f - s).abs().max((s - i as f64 / m).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value ~ 1.63 / sqrt(m)
        assert!(ks < 1.63 / m.sqrt(), "KS statistic {ks}");
    }

    #[test]
    fn training_accuracy_beats_majority_baseline() {
        let mut rng = Rng::new(6);
        for kind in [ForestKind::Rf, ForestKind::Et] {
            let n = 120;
            let x = Array2::from_shape_fn((n, 3), |_| rng.normal());
            let y: Vec<f64> =
                (0..n).map(|i| if x[[i, 0]] + x[[i, 1]] > 0.0 { 1.0 } else { 0.0 }).collect();
            if y.iter().all(|&v| v == y[0]) {
                continue;
            }
            let forest = forest_fit(&x, &y, cls(2), kind, &params(15), &mut rng).unwrap();
            let preds = forest.predict(&x).unwrap();
            let acc = preds.iter().zip(&y).filter(|(p, t)| p == t).count() as f64 / n as f64;
            let majority = {
                let ones = y.iter().filter(|&&v| v == 1.0).count() as f64;
                (ones / n as f64).max(1.0 - ones / n as f64)
            };
            assert!(acc >= majority, "{kind:?} acc {acc} < baseline {majority}");
        }
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let mut rng = Rng::new(7);
        let x = Array2::from_shape_fn((40, 3), |_| rng.normal());
        let y: Vec<f64> = (0..40).map(|_| rng.normal()).collect();
        let a = forest_fit(&x, &y, TaskKind::Regression, ForestKind::Rf, &params(5), &mut Rng::new(1))
            .unwrap();
        let b = forest_fit(&x, &y, TaskKind::Regression, ForestKind::Rf, &params(5), &mut Rng::new(1))
            .unwrap();
        assert_eq!(a.predict(&x).unwrap(), b.predict(&x).unwrap());
    }
}
