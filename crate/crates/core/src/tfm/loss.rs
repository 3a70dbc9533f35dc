//! Episode loss: mean cross-entropy over query rows for classification,
//! mean squared error in normalized target space for regression.

use ndarray::Array2;

use super::forward::{EpisodeInputs, Output};

/// Scalar loss for an output against the episode's query targets.
pub fn loss(output: &Output, inputs: &EpisodeInputs) -> f64 {
    loss_and_grad(output, inputs).0
}

/// Loss plus its gradient w.r.t. the raw model outputs. Masked (-inf) logits
/// carry exactly zero gradient.
pub(crate) fn loss_and_grad(
    output: &Output,
    inputs: &EpisodeInputs,
) -> (f64, Option<Array2<f64>>, Option<Vec<f64>>) {
    let q = inputs.q as f64;
    match (&output.logits, &output.scalars) {
        (Some(logits), None) => {
            let mut dlogits = Array2::zeros(logits.dim());
            let mut total = 0.0;
            for i in 0..inputs.q {
                let row = logits.row(i);
                let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let exps: Vec<f64> = row.iter().map(|&v| (v - max).exp()).collect();
                let sum: f64 = exps.iter().sum();
                let target = inputs.query_targets[i] as usize;
                let p_target = exps[target] / sum;
                total -= p_target.max(1e-300).ln();
                for c in 0..row.len() {
                    let p = exps[c] / sum;
                    let onehot = if c == target { 1.0 } else { 0.0 };
                    dlogits[[i, c]] = (p - onehot) / q;
                }
            }
            (total / q, Some(dlogits), None)
        }
        (None, Some(scalars)) => {
            let mut dscalars = Vec::with_capacity(inputs.q);
            let mut total = 0.0;
            for i in 0..inputs.q {
                let diff = scalars[i] - inputs.query_targets[i];
                total += diff * diff;
                dscalars.push(2.0 * diff / q);
            }
            (total / q, None, Some(dscalars))
        }
        _ => unreachable!("output carries exactly one head"),
    }
}
