//! Indirectly sampled tree-based priors.
//!
//! A base training set (X, Y) is generated synthetically, the matching tree
//! learner is fitted on it, fresh features X2 are drawn under the same
//! column schema, and the fitted learner labels them: the returned table is
//! [X2, predict(X2)]. Base size B equals the output row count N.

use crate::data::{Table, TaskKind};
use crate::error::Error;
use crate::rng::Rng;
use crate::trees::{
    cart_fit, forest_fit, gbm_fit, CartParams, ForestKind, ForestParams, GbmParams, Splitter,
};
use crate::Result;

use super::features::{gen_labels, FeatureSchema};
use super::{DatasetConfig, PriorKind};

/// Learner hyper-parameters sampled per table, recorded for provenance.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IndirectInfo {
    pub kind: PriorKind,
    pub max_depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_estimators: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
}

const MAX_LABEL_ATTEMPTS: usize = 10;

/// Draw base labels, retrying when the multinomial collapses to one class.
fn base_labels(n: usize, task: TaskKind, rng: &mut Rng) -> Result<Vec<f64>> {
    match task {
        TaskKind::Regression => Ok((0..n).map(|_| rng.normal()).collect()),
        TaskKind::Classification { num_classes } => {
            for _ in 0..MAX_LABEL_ATTEMPTS {
                let y = gen_labels(n, num_classes, rng);
                let first = y[0];
                if y.iter().any(|&v| v != first) {
                    return Ok(y);
                }
            }
            Err(Error::DegenerateFit(format!(
                "single-class base labels after {MAX_LABEL_ATTEMPTS} attempts"
            )))
        }
    }
}

/// Sample one table from a fitted-tree prior (DT, ET, GB, or RF).
pub fn indirect_sample(kind: PriorKind, cfg: &DatasetConfig, rng: &mut Rng) -> Result<Table> {
    indirect_sample_info(kind, cfg, rng).map(|(table, _)| table)
}

pub fn indirect_sample_info(
    kind: PriorKind,
    cfg: &DatasetConfig,
    rng: &mut Rng,
) -> Result<(Table, IndirectInfo)> {
    if !kind.is_indirect() {
        return Err(Error::Invalid(format!("{kind} is not a fitted-tree prior")));
    }
    let schema = FeatureSchema::sample(cfg, rng);
    let x = schema.fill(cfg.n, rng);
    let y = base_labels(cfg.n, cfg.task, rng)?;

    let max_depth = rng.usize_range(2, 12);
    let (predictions, info) = match kind {
        PriorKind::Dt => {
            let params = CartParams {
                max_depth,
                min_samples_split: 2,
                max_features: None,
                splitter: Splitter::Best,
            };
            let tree = cart_fit(&x, &y, cfg.task, &params, rng)?;
            let x2 = schema.fill(cfg.n, rng);
            let preds = tree.predict(&x2)?;
            ((x2, preds), IndirectInfo { kind, max_depth, n_estimators: None, learning_rate: None })
        }
        PriorKind::Et | PriorKind::Rf => {
            let n_estimators = rng.usize_range(5, 50);
            let params = ForestParams { n_estimators, max_depth, min_samples_split: 2 };
            let fk = if kind == PriorKind::Et { ForestKind::Et } else { ForestKind::Rf };
            let forest = forest_fit(&x, &y, cfg.task, fk, &params, rng)?;
            let x2 = schema.fill(cfg.n, rng);
            let preds = forest.predict(&x2)?;
            (
                (x2, preds),
                IndirectInfo { kind, max_depth, n_estimators: Some(n_estimators), learning_rate: None },
            )
        }
        PriorKind::Gb => {
            let n_estimators = rng.usize_range(5, 50);
            // log-uniform learning rate in [0.03, 0.3]
            let learning_rate = (rng.uniform(0.03f64.ln(), 0.3f64.ln())).exp();
            let params = GbmParams {
                n_stages: n_estimators,
                max_depth,
                learning_rate,
                min_samples_split: 2,
            };
            let model = gbm_fit(&x, &y, cfg.task, &params, rng)?;
            let x2 = schema.fill(cfg.n, rng);
            let preds = model.predict(&x2)?;
            (
                (x2, preds),
                IndirectInfo {
                    kind,
                    max_depth,
                    n_estimators: Some(n_estimators),
                    learning_rate: Some(learning_rate),
                },
            )
        }
        _ => unreachable!(),
    };
    let (x2, preds) = predictions;
    let table = Table::new(x2, schema.col_kinds.clone(), preds, cfg.task, Some(kind))?;
    Ok((table, info))
}
