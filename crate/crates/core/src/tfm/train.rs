//! The mixture pretraining loop.
//!
//! Per step: draw a batch of tables from the prior mixture, partition each
//! into a random support/query episode, accumulate the mean episode loss
//! gradient, clip, and take one Adam step. Fully deterministic under a fixed
//! seed: every table derives its own labeled child stream, and batch items
//! are reduced in order regardless of the job count.

use std::sync::Arc;

use crate::data::make_episode;
use crate::jobs::ordered_map;
use crate::priors::{mixture_sample_in, Mixture};
use crate::rng::Rng;
use crate::Result;

use super::adam::Adam;
use super::config::{TfmConfig, TrainHp};
use super::forward::{backward, forward, EpisodeInputs};
use super::params::TfmModel;

#[derive(Clone, Debug)]
pub struct TrainResult {
    pub model: TfmModel,
    /// Mean batch loss per step.
    pub loss_history: Vec<f64>,
}

/// Sample one pretraining episode: a mixture table with s ~ U{lo..hi} from
/// the support-fraction range and q = N - s.
fn sample_episode(mix: &Mixture, hp: &TrainHp, rng: &mut Rng) -> Result<EpisodeInputs> {
    let table = Arc::new(mixture_sample_in(mix, hp.task, &hp.ranges, rng)?);
    let n = table.num_rows();
    let lo = ((hp.support_frac.0 * n as f64).ceil() as usize).clamp(1, n - 1);
    let hi = ((hp.support_frac.1 * n as f64).floor() as usize).clamp(lo, n - 1);
    let s = rng.usize_range(lo, hi);
    let episode = make_episode(&table, s, n - s, rng)?;
    EpisodeInputs::from_episode(&episode)
}

/// Pretrain a model on the mixture for `hp.steps` steps.
pub fn pretrain(
    mix: &Mixture,
    config: &TfmConfig,
    hp: &TrainHp,
    rng: &Rng,
    jobs: usize,
) -> Result<TrainResult> {
    config.validate()?;
    hp.validate()?;
    let mut model = TfmModel::init(config, &mut rng.child("init"));
    let mut adam = Adam::new(&model);
    let mut loss_history = Vec::with_capacity(hp.steps);
    for step in 0..hp.steps {
        let episodes: Vec<Result<EpisodeInputs>> = ordered_map(
            jobs,
            (0..hp.batch).collect(),
            |_, b| {
                let mut item_rng = rng.child_idx("table", (step * hp.batch + b) as u64);
                sample_episode(mix, hp, &mut item_rng)
            },
        );
        let episodes: Vec<EpisodeInputs> = episodes.into_iter().collect::<Result<_>>()?;
        let model_ref = &model;
        let results: Vec<Result<(f64, TfmModel)>> =
            ordered_map(jobs, episodes, |_, inputs| {
                let pass = forward(model_ref, &inputs)?;
                Ok(backward(model_ref, &pass))
            });
        let mut grads = model.zeros_like();
        let mut batch_loss = 0.0;
        for r in results {
            let (loss, g) = r?;
            batch_loss += loss;
            grads.add_scaled(&g, 1.0 / hp.batch as f64);
        }
        adam.update(&mut model, &grads, hp);
        loss_history.push(batch_loss / hp.batch as f64);
        debug_assert!(model.all_finite(), "non-finite parameters at step {step}");
    }
    Ok(TrainResult { model, loss_history })
}
