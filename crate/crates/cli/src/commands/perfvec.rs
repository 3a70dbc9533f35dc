//! `priorforge perfvec`: score per-prior checkpoints on real CSV tables.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;

use priorforge_core::analysis::{load_suite, perf_vector, IngestOptions, MetricKind, PerfProtocol};

use crate::manifest::{effective_seed, guard_output, write_run_manifest};
use crate::CliError;

#[derive(Args)]
pub struct PerfvecArgs {
    /// Directory holding one checkpoint subdirectory per prior.
    #[arg(long)]
    models: PathBuf,
    /// Suite directory: suite.json plus the CSV files it names.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "auc")]
    metric: String,
    /// Random support/query splits per table.
    #[arg(long, default_value_t = 10)]
    splits: usize,
    #[arg(long, default_value_t = 0.8)]
    support_frac: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Row cap for ingested tables.
    #[arg(long, default_value_t = 1000)]
    max_rows: usize,
    /// Subsample wide tables down to the 16-feature cap instead of failing.
    #[arg(long, default_value_t = false)]
    subsample_columns: bool,
    /// Output JSON file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = false)]
    force: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Serialize)]
struct EffectiveConfig {
    protocol: PerfProtocol,
    ingest: IngestOptions,
    data: String,
}

pub fn run(args: PerfvecArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let metric = MetricKind::parse(&args.metric).map_err(|e| CliError::config(e.to_string()))?;
    let seed = effective_seed(args.seed)?;
    if !args.data.is_dir() {
        return Err(CliError::config(format!("--data {} is not a directory", args.data.display())));
    }
    let protocol = PerfProtocol { splits: args.splits, support_frac: args.support_frac, metric, seed };
    let ingest = IngestOptions {
        max_rows: args.max_rows,
        subsample_columns: args.subsample_columns,
        seed,
    };
    let models = super::load_model_dir(&args.models)?;
    guard_output(&args.out, args.force)?;

    let datasets = load_suite(&args.data, &ingest)?;
    let detail = perf_vector(&models, &datasets, &protocol, args.jobs)?;
    std::fs::write(&args.out, serde_json::to_string_pretty(&detail)? + "\n")?;
    let config = EffectiveConfig {
        protocol,
        ingest,
        data: args.data.display().to_string(),
    };
    write_run_manifest(&args.out, "perfvec", &config, seed, started)?;
    println!(
        "scored {} models on {} datasets -> {}",
        detail.vector.priors.len(),
        detail.vector.datasets.len(),
        args.out.display()
    );
    Ok(())
}
