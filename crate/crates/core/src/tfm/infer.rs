//! In-context prediction: one forward pass, no parameter update.

use crate::data::Episode;
use crate::Result;

use super::forward::{forward, EpisodeInputs};
use super::params::TfmModel;

/// Query predictions: renormalized class probabilities over the active
/// classes, or de-normalized regression values.
#[derive(Clone, Debug)]
pub struct Prediction {
    /// q × num_classes probabilities (classification only).
    pub probs: Option<ndarray::Array2<f64>>,
    /// Argmax classes (classification only).
    pub classes: Option<Vec<usize>>,
    /// De-normalized regression predictions (regression only).
    pub values: Option<Vec<f64>>,
}

pub fn icl_predict(model: &TfmModel, episode: &Episode) -> Result<Prediction> {
    let inputs = EpisodeInputs::from_episode(episode)?;
    let pass = forward(model, &inputs)?;
    match inputs.num_classes {
        Some(num_classes) => {
            let logits = pass.output.logits.as_ref().unwrap();
            let mut probs = ndarray::Array2::zeros((inputs.q, num_classes));
            let mut classes = Vec::with_capacity(inputs.q);
            for i in 0..inputs.q {
                let row = logits.row(i);
                let max = row
                    .iter()
                    .take(num_classes)
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                let mut sum = 0.0;
                for c in 0..num_classes {
                    let e = (row[c] - max).exp();
                    probs[[i, c]] = e;
                    sum += e;
                }
                let mut best = 0;
                for c in 0..num_classes {
                    probs[[i, c]] /= sum;
                    if probs[[i, c]] > probs[[i, best]] {
                        best = c;
                    }
                }
                classes.push(best);
            }
            Ok(Prediction { probs: Some(probs), classes: Some(classes), values: None })
        }
        None => {
            let scalars = pass.output.scalars.as_ref().unwrap();
            let values =
                scalars.iter().map(|&v| episode.normalizer.denormalize_target(v)).collect();
            Ok(Prediction { probs: None, classes: None, values: Some(values) })
        }
    }
}
