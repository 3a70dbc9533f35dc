//! Gradient boosting over regression CART trees.
//!
//! Regression boosts residuals from the mean. Classification uses one-vs-all
//! log-odds boosting: scores start at smoothed class log-priors, each stage
//! fits one regression tree per class to the softmax residual, and
//! prediction takes the argmax of summed scores.

use ndarray::Array2;

use crate::data::TaskKind;
use crate::error::Error;
use crate::rng::Rng;
use crate::Result;

use super::cart::{argmax_lowest, cart_fit_unchecked, CartParams, CartTree, Splitter};

#[derive(Clone, Debug)]
pub struct GbmParams {
    pub n_stages: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_split: usize,
}

impl Default for GbmParams {
    fn default() -> Self {
        GbmParams { n_stages: 20, max_depth: 3, learning_rate: 0.1, min_samples_split: 2 }
    }
}

#[derive(Clone, Debug)]
enum Init {
    Mean(f64),
    LogPriors(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct GbmModel {
    task: TaskKind,
    init: Init,
    /// One tree per stage (regression) or one tree per class per stage
    /// (classification).
    stages: Vec<Vec<CartTree>>,
    learning_rate: f64,
}

fn softmax_row(scores: &mut [f64]) {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        sum += *s;
    }
    for s in scores.iter_mut() {
        *s /= sum;
    }
}

pub fn gbm_fit(
    x: &Array2<f64>,
    y: &[f64],
    task: TaskKind,
    params: &GbmParams,
    rng: &mut Rng,
) -> Result<GbmModel> {
    if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
        return Err(Error::Invalid(format!(
            "learning_rate {} outside (0, 1]",
            params.learning_rate
        )));
    }
    let n = x.nrows();
    let cart_params = CartParams {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        max_features: None,
        splitter: Splitter::Best,
    };
    match task {
        TaskKind::Regression => {
            let mean = y.iter().sum::<f64>() / n as f64;
            let mut current: Vec<f64> = vec![mean; n];
            let mut stages = Vec::with_capacity(params.n_stages);
            for _ in 0..params.n_stages {
                let residuals: Vec<f64> =
                    y.iter().zip(&current).map(|(t, c)| t - c).collect();
                let tree =
                    cart_fit_unchecked(x, &residuals, TaskKind::Regression, &cart_params, rng);
                for i in 0..n {
                    current[i] += params.learning_rate * tree.predict_row(&x.row(i).to_vec());
                }
                stages.push(vec![tree]);
            }
            Ok(GbmModel { task, init: Init::Mean(mean), stages, learning_rate: params.learning_rate })
        }
        TaskKind::Classification { num_classes } => {
            let first = y[0];
            if y.iter().all(|&v| v == first) {
                return Err(Error::DegenerateFit("single-class targets".into()));
            }
            // Smoothed log-priors keep absent classes finite.
            let mut counts = vec![0.0; num_classes];
            for &label in y {
                counts[label as usize] += 1.0;
            }
            let priors: Vec<f64> = counts
                .iter()
                .map(|c| ((c + 1.0) / (n as f64 + num_classes as f64)).ln())
                .collect();
            let mut scores: Vec<Vec<f64>> = (0..n).map(|_| priors.clone()).collect();
            let mut stages = Vec::with_capacity(params.n_stages);
            for _ in 0..params.n_stages {
                let mut probs = scores.clone();
                for row in &mut probs {
                    softmax_row(row);
                }
                let mut stage = Vec::with_capacity(num_classes);
                for k in 0..num_classes {
                    let residuals: Vec<f64> = (0..n)
                        .map(|i| {
                            let indicator = if y[i] as usize == k { 1.0 } else { 0.0 };
                            indicator - probs[i][k]
                        })
                        .collect();
                    let tree = cart_fit_unchecked(
                        x,
                        &residuals,
                        TaskKind::Regression,
                        &cart_params,
                        rng,
                    );
                    for (i, row) in scores.iter_mut().enumerate() {
                        row[k] += params.learning_rate * tree.predict_row(&x.row(i).to_vec());
                    }
                    stage.push(tree);
                }
                stages.push(stage);
            }
            Ok(GbmModel {
                task,
                init: Init::LogPriors(priors),
                stages,
                learning_rate: params.learning_rate,
            })
        }
    }
}

impl GbmModel {
    pub fn num_stages(&self) -> usize {
        self.stages.len()
    }

    /// Raw scores after the first `upto` stages (`None` = all): length-1 rows
    /// for regression, per-class logits for classification.
    pub fn decision_scores(&self, x: &Array2<f64>, upto: Option<usize>) -> Result<Array2<f64>> {
        let n = x.nrows();
        let upto = upto.unwrap_or(self.stages.len()).min(self.stages.len());
        let mut scores = match &self.init {
            Init::Mean(m) => Array2::from_elem((n, 1), *m),
            Init::LogPriors(p) => {
                Array2::from_shape_fn((n, p.len()), |(_, k)| p[k])
            }
        };
        for stage in &self.stages[..upto] {
            for (k, tree) in stage.iter().enumerate() {
                for i in 0..n {
                    let row = x.row(i).to_vec();
                    scores[[i, k]] += self.learning_rate * tree.predict_row(&row);
                }
            }
        }
        Ok(scores)
    }

    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<f64>> {
        let scores = self.decision_scores(x, None)?;
        Ok(match self.task {
            TaskKind::Regression => scores.column(0).to_vec(),
            TaskKind::Classification { .. } => (0..x.nrows())
                .map(|i| argmax_lowest(&scores.row(i).to_vec()) as f64)
                .collect(),
        })
    }

    /// Class probabilities (classification only).
    pub fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        let mut scores = self.decision_scores(x, None)?;
        for mut row in scores.rows_mut() {
            softmax_row(row.as_slice_mut().unwrap());
        }
        Ok(scores)
    }
}
