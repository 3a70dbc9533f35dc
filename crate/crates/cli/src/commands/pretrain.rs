//! `priorforge pretrain`: train a toy model on a prior mixture and write a
//! checkpoint.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::{Deserialize, Serialize};

use priorforge_core::priors::Mixture;
use priorforge_core::tfm::{pretrain, save_checkpoint, TrainHp};
use priorforge_core::{Rng, TfmConfig};

use crate::manifest::{effective_seed, guard_output, write_run_manifest};
use crate::CliError;

#[derive(Args)]
pub struct PretrainArgs {
    /// Mixture JSON (prior name -> weight).
    #[arg(long)]
    mixture: PathBuf,
    /// Model/training configuration JSON; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pretraining steps (overrides the config file).
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Checkpoint output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = false)]
    force: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// On-disk shape of --config: both sections optional.
#[derive(Default, Serialize, Deserialize)]
pub struct PretrainFile {
    #[serde(default)]
    pub tfm: Option<TfmConfig>,
    #[serde(default)]
    pub train: Option<TrainHp>,
}

#[derive(Serialize)]
struct EffectiveConfig {
    mixture: Mixture,
    tfm: TfmConfig,
    train: TrainHp,
    seed: u64,
}

pub fn run(args: PretrainArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mixture: Mixture =
        serde_json::from_str(&std::fs::read_to_string(&args.mixture).map_err(|e| {
            CliError::config(format!("--mixture {}: {e}", args.mixture.display()))
        })?)?;
    let file: PretrainFile = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("--config {}: {e}", path.display()))
        })?)?,
        None => PretrainFile::default(),
    };
    let tfm = file.tfm.unwrap_or_default();
    let mut train = file.train.unwrap_or_default();
    if let Some(steps) = args.steps {
        train.steps = steps;
    }
    tfm.validate().map_err(|e| CliError::config(e.to_string()))?;
    train.validate().map_err(|e| CliError::config(e.to_string()))?;
    let seed = effective_seed(args.seed)?;
    guard_output(&args.out, args.force)?;

    let result = pretrain(&mixture, &tfm, &train, &Rng::new(seed), args.jobs)?;
    save_checkpoint(&args.out, &result.model, train.steps, seed)?;
    std::fs::write(
        args.out.join("loss_history.json"),
        serde_json::to_string(&result.loss_history)? + "\n",
    )?;

    let config = EffectiveConfig { mixture, tfm, train, seed };
    write_run_manifest(&args.out, "pretrain", &config, seed, started)?;
    let last = result.loss_history.last().copied().unwrap_or(f64::NAN);
    println!(
        "pretrained {} steps; final batch loss {last:.4}; checkpoint at {}",
        train.steps,
        args.out.display()
    );
    Ok(())
}
