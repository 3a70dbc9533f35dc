//! Aggregated metrics: one-vs-one AUC, accuracy, cross-entropy, R², RMSE,
//! and MAE.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Auc,
    Acc,
    Ce,
    R2,
    Rmse,
    Mae,
}

impl MetricKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auc" => Ok(MetricKind::Auc),
            "acc" => Ok(MetricKind::Acc),
            "ce" => Ok(MetricKind::Ce),
            "r2" => Ok(MetricKind::R2),
            "rmse" => Ok(MetricKind::Rmse),
            "mae" => Ok(MetricKind::Mae),
            other => Err(Error::Invalid(format!("unknown metric {other:?}"))),
        }
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, MetricKind::Auc | MetricKind::Acc | MetricKind::Ce)
    }

    /// Higher is better?
    pub fn ascending(&self) -> bool {
        matches!(self, MetricKind::Auc | MetricKind::Acc | MetricKind::R2)
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            MetricKind::Auc => "auc",
            MetricKind::Acc => "acc",
            MetricKind::Ce => "ce",
            MetricKind::R2 => "r2",
            MetricKind::Rmse => "rmse",
            MetricKind::Mae => "mae",
        };
        f.write_str(name)
    }
}

/// Binary AUC from scores via the rank statistic; ties contribute 0.5.
fn binary_auc(scores: &[f64], positives: &[bool]) -> f64 {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    // mean ranks (1-based) with ties averaged
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = mean_rank;
        }
        i = j + 1;
    }
    let n_pos = positives.iter().filter(|&&p| p).count();
    let n_neg = n - n_pos;
    debug_assert!(n_pos > 0 && n_neg > 0);
    let rank_sum: f64 = (0..n).filter(|&i| positives[i]).map(|i| ranks[i]).sum();
    (rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0) / (n_pos as f64 * n_neg as f64)
}

/// One-vs-one multiclass AUC.
///
/// For each unordered class pair {a, b} (a < b), rows of those two classes
/// are scored with the renormalized probability p_b / (p_a + p_b) treating b
/// as positive, and the rank-statistic AUC is averaged over all pairs.
/// Errors when fewer than two classes appear in `labels`.
pub fn auc_ovo(probs: ArrayView2<f64>, labels: &[usize]) -> Result<f64> {
    if probs.nrows() != labels.len() {
        return Err(Error::Schema(format!(
            "probs rows {} != labels {}",
            probs.nrows(),
            labels.len()
        )));
    }
    let mut present: Vec<usize> = labels.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::SingleClass("AUC needs at least two classes".into()));
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for ai in 0..present.len() {
        for bi in ai + 1..present.len() {
            let (a, b) = (present[ai], present[bi]);
            let mut scores = Vec::new();
            let mut positives = Vec::new();
            for (i, &y) in labels.iter().enumerate() {
                if y == a || y == b {
                    let pa = probs[[i, a]];
                    let pb = probs[[i, b]];
                    let score = if pa + pb > 0.0 { pb / (pa + pb) } else { 0.5 };
                    scores.push(score);
                    positives.push(y == b);
                }
            }
            total += binary_auc(&scores, &positives);
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

/// Fraction of rows whose argmax matches the label.
pub fn accuracy(probs: ArrayView2<f64>, labels: &[usize]) -> f64 {
    let mut correct = 0usize;
    for (i, &y) in labels.iter().enumerate() {
        let row = probs.row(i);
        let mut best = 0;
        for c in 0..row.len() {
            if row[c] > row[best] {
                best = c;
            }
        }
        if best == y {
            correct += 1;
        }
    }
    correct as f64 / labels.len() as f64
}

/// Mean negative log-likelihood with probabilities clipped to [1e-12, 1].
pub fn cross_entropy(probs: ArrayView2<f64>, labels: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        total -= probs[[i, y]].clamp(1e-12, 1.0).ln();
    }
    total / labels.len() as f64
}

pub fn r_squared(preds: &[f64], targets: &[f64]) -> f64 {
    let n = targets.len() as f64;
    let mean = targets.iter().sum::<f64>() / n;
    let ss_res: f64 = preds.iter().zip(targets).map(|(p, t)| (t - p) * (t - p)).sum();
    let ss_tot: f64 = targets.iter().map(|t| (t - mean) * (t - mean)).sum();
    if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

pub fn rmse(preds: &[f64], targets: &[f64]) -> f64 {
    let n = targets.len() as f64;
    (preds.iter().zip(targets).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / n).sqrt()
}

pub fn mae(preds: &[f64], targets: &[f64]) -> f64 {
    let n = targets.len() as f64;
    preds.iter().zip(targets).map(|(p, t)| (p - t).abs()).sum::<f64>() / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use ndarray::Array2;

    /// O(n²) pairwise-comparison oracle for the same OvO definition.
    fn auc_ovo_oracle(probs: &Array2<f64>, labels: &[usize]) -> f64 {
        let mut present: Vec<usize> = labels.to_vec();
        present.sort_unstable();
        present.dedup();
        let mut total = 0.0;
        let mut pairs = 0usize;
        for ai in 0..present.len() {
            for bi in ai + 1..present.len() {
                let (a, b) = (present[ai], present[bi]);
                let score = |i: usize| {
                    let pa = probs[[i, a]];
                    let pb = probs[[i, b]];
                    if pa + pb > 0.0 {
                        pb / (pa + pb)
                    } else {
                        0.5
                    }
                };
                let pos: Vec<usize> =
                    (0..labels.len()).filter(|&i| labels[i] == b).collect();
                let neg: Vec<usize> =
                    (0..labels.len()).filter(|&i| labels[i] == a).collect();
                let mut wins = 0.0;
                for &u in &pos {
                    for &v in &neg {
                        if score(u) > score(v) {
                            wins += 1.0;
                        } else if score(u) == score(v) {
                            wins += 0.5;
                        }
                    }
                }
                total += wins / (pos.len() * neg.len()) as f64;
                pairs += 1;
            }
        }
        total / pairs as f64
    }

    fn random_probs(n: usize, c: usize, rng: &mut Rng) -> Array2<f64> {
        let mut p = Array2::zeros((n, c));
        for i in 0..n {
            let row = rng.dirichlet_ones(c);
            for (j, v) in row.into_iter().enumerate() {
                p[[i, j]] = v;
            }
        }
        p
    }

    #[test]
    fn perfect_separation_gives_one() {
        let probs =
            ndarray::array![[0.9, 0.1], [0.8, 0.2], [0.2, 0.8], [0.3, 0.7]];
        let labels = vec![0, 0, 1, 1];
        assert_eq!(auc_ovo(probs.view(), &labels).unwrap(), 1.0);
    }

    #[test]
    fn label_independent_scores_sit_near_half() {
        let mut rng = Rng::new(1);
        let n = 4000;
        let probs = random_probs(n, 2, &mut rng);
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let auc = auc_ovo(probs.view(), &labels).unwrap();
        assert!((auc - 0.5).abs() < 0.02, "auc {auc}");
    }

    #[test]
    fn matches_quadratic_oracle_including_ties() {
        let mut rng = Rng::new(2);
        for _ in 0..300 {
            let n = rng.usize_range(4, 50);
            let c = rng.usize_range(2, 4);
            // quantized probabilities force plenty of ties
            let mut probs = random_probs(n, c, &mut rng);
            probs.mapv_inplace(|v| (v * 4.0).round() / 4.0);
            let mut labels: Vec<usize> = (0..n).map(|_| rng.usize_range(0, c - 1)).collect();
            labels[0] = 0;
            labels[1] = 1; // at least two classes
            let fast = auc_ovo(probs.view(), &labels).unwrap();
            let slow = auc_ovo_oracle(&probs, &labels);
            assert!((fast - slow).abs() < 1e-12, "fast {fast} slow {slow}");
        }
    }

    #[test]
    fn single_class_is_an_error() {
        let probs = ndarray::array![[0.9, 0.1], [0.8, 0.2]];
        assert!(matches!(
            auc_ovo(probs.view(), &[0, 0]),
            Err(Error::SingleClass(_))
        ));
    }

    #[test]
    fn basic_metrics_hand_example() {
        // 4-row worked example, evaluated by hand.
        let probs = ndarray::array![
            [0.7, 0.2, 0.1],
            [0.1, 0.8, 0.1],
            [0.3, 0.3, 0.4],
            [0.25, 0.5, 0.25]
        ];
        let labels = vec![0, 1, 2, 0];
        assert_eq!(accuracy(probs.view(), &labels), 0.75);
        let expected_ce =
            -(0.7f64.ln() + 0.8f64.ln() + 0.4f64.ln() + 0.25f64.ln()) / 4.0;
        assert!((cross_entropy(probs.view(), &labels) - expected_ce).abs() < 1e-15);

        let preds = vec![1.0, 2.0, 2.0, 5.0];
        let targets = vec![1.0, 2.0, 3.0, 4.0];
        // ss_res = 0 + 0 + 1 + 1 = 2; mean = 2.5; ss_tot = 2.25+0.25+0.25+2.25 = 5
        assert!((r_squared(&preds, &targets) - (1.0 - 2.0 / 5.0)).abs() < 1e-15);
        assert!((rmse(&preds, &targets) - (0.5f64).sqrt()).abs() < 1e-15);
        assert!((mae(&preds, &targets) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn all_correct_classification() {
        let probs = ndarray::array![[1.0, 0.0], [0.0, 1.0]];
        let labels = vec![0, 1];
        assert_eq!(accuracy(probs.view(), &labels), 1.0);
        // clipped log(1) = 0
        assert!(cross_entropy(probs.view(), &labels) < 1e-12);
    }

    #[test]
    fn constant_prediction_gives_zero_r2() {
        let targets = vec![1.0, 2.0, 3.0, 4.0];
        let mean = 2.5;
        let preds = vec![mean; 4];
        assert!((r_squared(&preds, &targets)).abs() < 1e-15);
    }
}
