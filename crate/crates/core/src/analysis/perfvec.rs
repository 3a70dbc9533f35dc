//! Performance vector: per-prior model scores on real datasets.
//!
//! Every model sees the identical support/query splits: splits are seeded
//! per (dataset, split index) and averaged.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::{make_episode, Episode};
use crate::error::Error;
use crate::jobs::ordered_map;
use crate::priors::PriorKind;
use crate::rng::Rng;
use crate::tfm::TfmModel;
use crate::Result;

use super::gmatrix::score_episode;
use super::ingest::RealDataset;
use super::metrics::MetricKind;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PerfProtocol {
    /// Random support/query splits per table, averaged.
    pub splits: usize,
    /// Support fraction of each split.
    pub support_frac: f64,
    pub metric: MetricKind,
    pub seed: u64,
}

impl Default for PerfProtocol {
    fn default() -> Self {
        PerfProtocol { splits: 10, support_frac: 0.8, metric: MetricKind::Auc, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerfVector {
    pub priors: Vec<PriorKind>,
    pub values: Vec<f64>,
    pub datasets: Vec<String>,
}

/// Detailed result: the vector plus the per-dataset score grid feeding
/// leaderboards.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerfDetail {
    pub vector: PerfVector,
    /// scores[i][d]: model i's mean metric on dataset d.
    pub per_dataset: Vec<Vec<f64>>,
}

fn split_episodes(dataset: &RealDataset, protocol: &PerfProtocol) -> Result<Vec<Episode>> {
    let table = Arc::new(dataset.table.clone());
    let n = table.num_rows();
    let s = ((protocol.support_frac * n as f64).round() as usize).clamp(1, n - 1);
    let q = n - s;
    let root = Rng::new(protocol.seed).child("perfvec").child(&dataset.name);
    let mut episodes = Vec::with_capacity(protocol.splits);
    for split in 0..protocol.splits {
        for attempt in 0..2u64 {
            let mut rng = root.child_idx("split", split as u64 * 2 + attempt);
            let episode = make_episode(&table, s, q, &mut rng)?;
            if table.task.is_classification() {
                let first = table.target[episode.query_idx[0]];
                if episode.query_idx.iter().all(|&i| table.target[i] == first) {
                    continue;
                }
            }
            episodes.push(episode);
            break;
        }
    }
    if episodes.is_empty() {
        return Err(Error::SingleClass(format!(
            "dataset {}: every split produced single-class queries",
            dataset.name
        )));
    }
    Ok(episodes)
}

/// Per-dataset mean scores for arbitrary named models under the shared split
/// protocol; rows follow the input model order.
pub fn score_models(
    models: &[(&str, &TfmModel)],
    datasets: &[RealDataset],
    protocol: &PerfProtocol,
    jobs: usize,
) -> Result<Vec<Vec<f64>>> {
    if datasets.is_empty() {
        return Err(Error::Invalid("no datasets given".into()));
    }
    let mut per_dataset = vec![vec![0.0; datasets.len()]; models.len()];
    for (dix, dataset) in datasets.iter().enumerate() {
        let episodes = split_episodes(dataset, protocol)?;
        for (mix, (_, model)) in models.iter().enumerate() {
            let scores: Vec<Result<f64>> =
                ordered_map(jobs, episodes.iter().collect(), |_, ep| {
                    score_episode(model, ep, protocol.metric)
                });
            let scores: Vec<f64> = scores.into_iter().collect::<Result<_>>()?;
            per_dataset[mix][dix] = scores.iter().sum::<f64>() / scores.len() as f64;
        }
    }
    Ok(per_dataset)
}

pub fn perf_vector(
    models: &BTreeMap<PriorKind, TfmModel>,
    datasets: &[RealDataset],
    protocol: &PerfProtocol,
    jobs: usize,
) -> Result<PerfDetail> {
    let priors: Vec<PriorKind> = models.keys().copied().collect();
    let named: Vec<(&str, &TfmModel)> =
        models.iter().map(|(k, m)| (k.name(), m)).collect();
    let per_dataset = score_models(&named, datasets, protocol, jobs)?;
    let values: Vec<f64> = per_dataset
        .iter()
        .map(|row| row.iter().sum::<f64>() / row.len() as f64)
        .collect();
    Ok(PerfDetail {
        vector: PerfVector {
            priors,
            values,
            datasets: datasets.iter().map(|d| d.name.clone()).collect(),
        },
        per_dataset,
    })
}
