//! `priorforge eval`: metrics for one checkpoint on one CSV table.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::Args;
use serde::Serialize;

use priorforge_core::analysis::{
    accuracy, auc_ovo, cross_entropy, ingest_csv, mae, r_squared, rmse, IngestOptions,
};
use priorforge_core::data::make_episode;
use priorforge_core::tfm::{icl_predict, load_checkpoint};
use priorforge_core::Rng;

use crate::manifest::{effective_seed, guard_output, write_run_manifest};
use crate::CliError;

#[derive(Args)]
pub struct EvalArgs {
    /// Checkpoint directory.
    #[arg(long)]
    model: PathBuf,
    /// CSV table (header row, target in the last column).
    #[arg(long)]
    data: PathBuf,
    /// Task family: cls or reg.
    #[arg(long, default_value = "cls")]
    task: String,
    /// Random support/query splits, averaged.
    #[arg(long, default_value_t = 10)]
    splits: usize,
    #[arg(long, default_value_t = 0.8)]
    support_frac: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_rows: usize,
    #[arg(long, default_value_t = false)]
    subsample_columns: bool,
    /// Output JSON file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = false)]
    force: bool,
}

#[derive(Serialize)]
struct EvalReport {
    data: String,
    task: String,
    splits_used: usize,
    metrics: BTreeMap<String, f64>,
}

pub fn run(args: EvalArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let task = super::parse_task_family(&args.task)?;
    let seed = effective_seed(args.seed)?;
    if args.splits == 0 {
        return Err(CliError::config("--splits must be >= 1"));
    }
    let (model, _) = load_checkpoint(&args.model)?;
    let ingest =
        IngestOptions { max_rows: args.max_rows, subsample_columns: args.subsample_columns, seed };
    let table = Arc::new(ingest_csv(&args.data, task, &ingest)?);
    let n = table.num_rows();
    let s = ((args.support_frac * n as f64).round() as usize).clamp(1, n - 1);

    let root = Rng::new(seed).child("eval");
    let mut sums: BTreeMap<String, f64> = BTreeMap::new();
    let mut used = 0usize;
    for split in 0..args.splits {
        let mut rng = root.child_idx("split", split as u64);
        let episode = make_episode(&table, s, n - s, &mut rng)?;
        let pred = icl_predict(&model, &episode)?;
        if table.task.is_classification() {
            let labels: Vec<usize> =
                episode.query_idx.iter().map(|&i| table.target[i] as usize).collect();
            let mut present = labels.clone();
            present.sort_unstable();
            present.dedup();
            if present.len() < 2 {
                continue;
            }
            let probs = pred.probs.as_ref().unwrap();
            *sums.entry("auc".into()).or_default() += auc_ovo(probs.view(), &labels)?;
            *sums.entry("acc".into()).or_default() += accuracy(probs.view(), &labels);
            *sums.entry("ce".into()).or_default() += cross_entropy(probs.view(), &labels);
        } else {
            let targets: Vec<f64> =
                episode.query_idx.iter().map(|&i| table.target[i]).collect();
            let values = pred.values.as_ref().unwrap();
            *sums.entry("r2".into()).or_default() += r_squared(values, &targets);
            *sums.entry("rmse".into()).or_default() += rmse(values, &targets);
            *sums.entry("mae".into()).or_default() += mae(values, &targets);
        }
        used += 1;
    }
    if used == 0 {
        return Err(CliError {
            code: 1,
            kind: "single_class".into(),
            message: "every split produced single-class queries".into(),
        });
    }
    let metrics = sums.into_iter().map(|(k, v)| (k, v / used as f64)).collect();
    let report = EvalReport {
        data: args.data.display().to_string(),
        task: args.task.clone(),
        splits_used: used,
        metrics,
    };
    let json = serde_json::to_string_pretty(&report)? + "\n";
    match &args.out {
        Some(path) => {
            guard_output(path, args.force)?;
            std::fs::write(path, &json)?;
            write_run_manifest(path, "eval", &report, seed, started)?;
        }
        None => print!("{json}"),
    }
    Ok(())
}
