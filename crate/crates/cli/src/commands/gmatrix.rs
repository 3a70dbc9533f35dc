//! `priorforge gmatrix`: evaluate per-prior checkpoints across priors.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;

use priorforge_core::analysis::{gen_matrix, GmatrixProtocol, MetricKind};

use crate::manifest::{effective_seed, guard_output, write_run_manifest};
use crate::CliError;

#[derive(Args)]
pub struct GmatrixArgs {
    /// Directory holding one checkpoint subdirectory per prior.
    #[arg(long)]
    models: PathBuf,
    #[arg(long, default_value = "auc")]
    metric: String,
    /// Evaluation tables per matrix cell.
    #[arg(long, default_value_t = 100)]
    tables: usize,
    /// Rows per evaluation table.
    #[arg(long, default_value_t = 1000)]
    rows: usize,
    /// Support rows per episode.
    #[arg(long, default_value_t = 800)]
    support: usize,
    /// Query rows per episode.
    #[arg(long, default_value_t = 200)]
    query: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSON file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = false)]
    force: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

pub fn run(args: GmatrixArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let metric = MetricKind::parse(&args.metric).map_err(|e| CliError::config(e.to_string()))?;
    let seed = effective_seed(args.seed)?;
    let protocol = GmatrixProtocol {
        tables_per_cell: args.tables,
        rows: args.rows,
        support: args.support,
        query: args.query,
        metric,
        seed,
    };
    protocol.validate().map_err(|e| CliError::config(e.to_string()))?;
    let models = super::load_model_dir(&args.models)?;
    guard_output(&args.out, args.force)?;

    let g = gen_matrix(&models, &protocol, args.jobs)?;
    std::fs::write(&args.out, serde_json::to_string_pretty(&g)? + "\n")?;
    write_run_manifest(&args.out, "gmatrix", &protocol, seed, started)?;
    println!("wrote {}x{} matrix to {}", g.priors.len(), g.priors.len(), args.out.display());
    Ok(())
}
