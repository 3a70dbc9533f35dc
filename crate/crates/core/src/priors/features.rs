//! Feature and label generation shared by the tree-based priors.
//!
//! The categorical column count is `floor(p_cat * (d + 1))` (capped at d),
//! with its column indices drawn uniformly without replacement. Continuous
//! cells are i.i.d. standard normal. Each categorical column draws its
//! cardinality as `min(2 + Geometric(0.5), 10)` and its cell values from a
//! per-column multinomial with Dirichlet(1,...,1) probabilities.

use ndarray::Array2;

use crate::data::{ColumnKind, MAX_CLASSES};
use crate::rng::Rng;

use super::DatasetConfig;

/// Column layout plus the multinomial cell distributions for categorical
/// columns. Sampled once per dataset so repeated value draws (the indirect
/// priors fill features twice) share one schema.
#[derive(Clone, Debug)]
pub struct FeatureSchema {
    pub col_kinds: Vec<ColumnKind>,
    cat_probs: Vec<Option<Vec<f64>>>,
}

impl FeatureSchema {
    pub fn sample(cfg: &DatasetConfig, rng: &mut Rng) -> Self {
        let d = cfg.d;
        let n_cat = ((cfg.p_cat * (d + 1) as f64).floor() as usize).min(d);
        let cat_cols = rng.choose_indices(d, n_cat);
        let mut col_kinds = vec![ColumnKind::Continuous; d];
        let mut cat_probs = vec![None; d];
        for &j in &cat_cols {
            let card = ((2 + rng.geometric(0.5) as usize).min(MAX_CLASSES)).max(2);
            col_kinds[j] = ColumnKind::Categorical(card);
            cat_probs[j] = Some(rng.dirichlet_ones(card));
        }
        FeatureSchema { col_kinds, cat_probs }
    }

    /// Draw an N×d feature matrix under this schema.
    pub fn fill(&self, n: usize, rng: &mut Rng) -> Array2<f64> {
        let d = self.col_kinds.len();
        let mut features = Array2::zeros((n, d));
        for i in 0..n {
            for j in 0..d {
                features[[i, j]] = match &self.cat_probs[j] {
                    None => rng.normal(),
                    Some(probs) => rng.multinomial(probs) as f64,
                };
            }
        }
        features
    }
}

/// Sample a feature matrix and its column kinds for one dataset.
pub fn gen_features(cfg: &DatasetConfig, rng: &mut Rng) -> (Array2<f64>, FeatureSchema) {
    let schema = FeatureSchema::sample(cfg, rng);
    let values = schema.fill(cfg.n, rng);
    (values, schema)
}

/// Classification labels via the multinomial scheme: class probabilities
/// ~ Dirichlet(1,...,1), labels drawn i.i.d.
pub fn gen_labels(n: usize, num_classes: usize, rng: &mut Rng) -> Vec<f64> {
    let probs = rng.dirichlet_ones(num_classes);
    (0..n).map(|_| rng.multinomial(&probs) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::TaskKind;

    fn cfg(d: usize, n: usize, p_cat: f64) -> DatasetConfig {
        DatasetConfig::new(d, n, TaskKind::Regression, p_cat, 0).unwrap()
    }

    #[test]
    fn zero_p_cat_means_all_continuous() {
        let (_, schema) = gen_features(&cfg(8, 64, 0.0), &mut Rng::new(1));
        assert!(schema.col_kinds.iter().all(|k| !k.is_categorical()));
    }

    #[test]
    fn cat_count_follows_floor_rule() {
        // d=9, p_cat=0.3 -> floor(0.3 * 10) = 3 categorical columns
        let (_, schema) = gen_features(&cfg(9, 64, 0.3), &mut Rng::new(2));
        let n_cat = schema.col_kinds.iter().filter(|k| k.is_categorical()).count();
        assert_eq!(n_cat, 3);
    }

    #[test]
    fn continuous_cells_are_standard_normal() {
        let mut rng = Rng::new(3);
        let mut vals = Vec::with_capacity(100_000);
        while vals.len() < 100_000 {
            let (features, schema) = gen_features(&cfg(10, 640, 0.0), &mut rng);
            for j in 0..10 {
                if !schema.col_kinds[j].is_categorical() {
                    vals.extend(features.column(j).iter().copied());
                }
            }
        }
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn categorical_cardinalities_in_range_and_codes_in_bounds() {
        let mut rng = Rng::new(4);
        for _ in 0..200 {
            let (features, schema) = gen_features(&cfg(12, 64, 0.9), &mut rng);
            for (j, kind) in schema.col_kinds.iter().enumerate() {
                if let ColumnKind::Categorical(card) = kind {
                    assert!((2..=MAX_CLASSES).contains(card));
                    for v in features.column(j) {
                        assert!(v.fract() == 0.0 && *v >= 0.0 && (*v as usize) < *card);
                    }
                }
            }
        }
    }

    #[test]
    fn labels_cover_only_valid_classes() {
        let mut rng = Rng::new(5);
        let labels = gen_labels(500, 4, &mut rng);
        assert!(labels.iter().all(|y| y.fract() == 0.0 && (0.0..4.0).contains(y)));
    }
}
