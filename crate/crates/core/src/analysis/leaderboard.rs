//! Ranking metrics over a per-dataset error grid: average rank, Elo via a
//! Bradley-Terry fit, winrate, rescaled accuracy, and champion delta.
//!
//! Input is an M×D error grid (lower is better; E = 1 - AUC for
//! classification, 1 - R² for regression). Ties on a dataset contribute half
//! a win to each side and tied ranks receive the mean of the tied positions.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rng::Rng;
use crate::Result;

/// Elo point estimate with a bootstrap 95% interval.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EloRating {
    pub rating: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelScore {
    pub name: String,
    pub avg_rank: f64,
    pub elo: EloRating,
    pub winrate: f64,
    pub racc: f64,
    pub champion_delta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Leaderboard {
    pub models: Vec<ModelScore>,
    /// Raw per-dataset errors, models × datasets.
    pub errors: Vec<Vec<f64>>,
}

/// Per-dataset ranks (1 best) with tied ranks averaged.
fn ranks_with_ties(errors: &[f64]) -> Vec<f64> {
    let m = errors.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| errors[a].partial_cmp(&errors[b]).unwrap());
    let mut ranks = vec![0.0; m];
    let mut i = 0;
    while i < m {
        let mut j = i;
        while j + 1 < m && errors[order[j + 1]] == errors[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = mean_rank;
        }
        i = j + 1;
    }
    ranks
}

/// Bradley-Terry strengths via the Zermelo MM iteration on fractional win
/// counts (ties folded as half wins) with a weak symmetric prior so models
/// that lose every matchup keep a finite rating. Returns log-strengths
/// centered at zero.
fn bradley_terry(wins: &Array2<f64>) -> Vec<f64> {
    let m = wins.nrows();
    const PRIOR: f64 = 0.1;
    let mut w = wins.clone();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                w[[i, j]] += PRIOR;
            }
        }
    }
    let mut games = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            if i != j {
                games[[i, j]] = w[[i, j]] + w[[j, i]];
            }
        }
    }
    let total_wins: Vec<f64> = (0..m).map(|i| w.row(i).sum()).collect();
    let mut pi = vec![1.0f64; m];
    for _ in 0..10_000 {
        let mut next = vec![0.0f64; m];
        let mut delta = 0.0f64;
        for i in 0..m {
            let mut denom = 0.0;
            for j in 0..m {
                if i != j {
                    denom += games[[i, j]] / (pi[i] + pi[j]);
                }
            }
            next[i] = total_wins[i] / denom;
        }
        // renormalize to geometric mean 1
        let log_mean: f64 = next.iter().map(|p| p.ln()).sum::<f64>() / m as f64;
        let scale = (-log_mean).exp();
        for (n, p) in next.iter_mut().zip(pi.iter()) {
            *n *= scale;
            delta = delta.max((n.ln() - p.ln()).abs());
        }
        pi = next;
        if delta < 1e-12 {
            break;
        }
    }
    pi.iter().map(|p| p.ln()).collect()
}

/// Pairwise fractional win counts over a selection of dataset columns.
fn win_matrix(errors: ArrayView2<f64>, datasets: &[usize]) -> Array2<f64> {
    let m = errors.nrows();
    let mut wins = Array2::zeros((m, m));
    for &d in datasets {
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let (ei, ej) = (errors[[i, d]], errors[[j, d]]);
                if ei < ej {
                    wins[[i, j]] += 1.0;
                } else if ei == ej {
                    wins[[i, j]] += 0.5;
                }
            }
        }
    }
    wins
}

const ELO_SCALE: f64 = 400.0 / std::f64::consts::LN_10;
const ELO_ANCHOR: f64 = 1000.0;

fn elo_from_errors(errors: ArrayView2<f64>, datasets: &[usize]) -> Vec<f64> {
    let strengths = bradley_terry(&win_matrix(errors, datasets));
    let mean = strengths.iter().sum::<f64>() / strengths.len() as f64;
    strengths.iter().map(|s| ELO_ANCHOR + ELO_SCALE * (s - mean)).collect()
}

const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Build the leaderboard from an M×D error grid.
pub fn ranking_metrics(names: &[String], errors: &Array2<f64>, seed: u64) -> Result<Leaderboard> {
    let (m, d) = errors.dim();
    if names.len() != m {
        return Err(Error::Schema(format!("{} names for {m} rows", names.len())));
    }
    if m < 2 || d == 0 {
        return Err(Error::IncompleteGrid(format!("grid {m}x{d} too small")));
    }
    if errors.iter().any(|v| !v.is_finite()) {
        return Err(Error::IncompleteGrid("grid contains non-finite cells".into()));
    }

    // average rank
    let mut rank_sum = vec![0.0; m];
    for dcol in 0..d {
        let col: Vec<f64> = (0..m).map(|i| errors[[i, dcol]]).collect();
        for (i, r) in ranks_with_ties(&col).into_iter().enumerate() {
            rank_sum[i] += r;
        }
    }

    // winrate: half-credit ties, normalized by |D| * (|M| - 1)
    let mut winrate = vec![0.0; m];
    for i in 0..m {
        let mut score = 0.0;
        for dcol in 0..d {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let (ei, ej) = (errors[[i, dcol]], errors[[j, dcol]]);
                if ei < ej {
                    score += 1.0;
                } else if ei == ej {
                    score += 0.5;
                }
            }
        }
        winrate[i] = score / (d as f64 * (m as f64 - 1.0));
    }

    // rescaled accuracy, averaged per dataset
    let mut racc = vec![0.0; m];
    for dcol in 0..d {
        let col: Vec<f64> = (0..m).map(|i| errors[[i, dcol]]).collect();
        let best = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let worst = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = worst - best;
        for i in 0..m {
            let rescaled_err = if span > 0.0 { (col[i] - best) / span } else { 0.0 };
            racc[i] += 1.0 - rescaled_err;
        }
    }
    for r in &mut racc {
        *r /= d as f64;
    }

    // champion delta from mean errors
    let mean_err: Vec<f64> =
        (0..m).map(|i| errors.row(i).sum() / d as f64).collect();
    let champion_err = mean_err.iter().cloned().fold(f64::INFINITY, f64::min);
    let champion_delta: Vec<f64> = mean_err
        .iter()
        .map(|&e| if e > 0.0 { (1.0 - champion_err / e) * 100.0 } else { 0.0 })
        .collect();

    // Elo point estimate plus bootstrap CI over datasets
    let all: Vec<usize> = (0..d).collect();
    let point = elo_from_errors(errors.view(), &all);
    let mut lows = vec![Vec::with_capacity(BOOTSTRAP_RESAMPLES); m];
    let mut rng = Rng::new(seed);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let resample: Vec<usize> =
            (0..d).map(|_| rng.below(d as u64) as usize).collect();
        let ratings = elo_from_errors(errors.view(), &resample);
        for (i, r) in ratings.into_iter().enumerate() {
            lows[i].push(r);
        }
    }
    let elo: Vec<EloRating> = (0..m)
        .map(|i| {
            let mut samples = lows[i].clone();
            samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let lo_idx = ((BOOTSTRAP_RESAMPLES as f64) * 0.025) as usize;
            let hi_idx = (((BOOTSTRAP_RESAMPLES as f64) * 0.975) as usize)
                .min(BOOTSTRAP_RESAMPLES - 1);
            EloRating {
                rating: point[i],
                ci_low: samples[lo_idx],
                ci_high: samples[hi_idx],
            }
        })
        .collect();

    let models = (0..m)
        .map(|i| ModelScore {
            name: names[i].clone(),
            avg_rank: rank_sum[i] / d as f64,
            elo: elo[i],
            winrate: winrate[i],
            racc: racc[i],
            champion_delta: champion_delta[i],
        })
        .collect();
    Ok(Leaderboard {
        models,
        errors: (0..m).map(|i| errors.row(i).to_vec()).collect(),
    })
}
