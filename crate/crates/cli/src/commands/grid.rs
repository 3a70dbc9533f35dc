//! `priorforge grid`: decision-boundary probability lattice for a 2D table.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;

use priorforge_core::analysis::{decision_grid, ingest_csv, write_grid_csv, IngestOptions};
use priorforge_core::priors::TaskFamily;
use priorforge_core::tfm::load_checkpoint;

use crate::manifest::{effective_seed, guard_output, write_run_manifest};
use crate::CliError;

#[derive(Args)]
pub struct GridArgs {
    /// Checkpoint directory.
    #[arg(long)]
    model: PathBuf,
    /// 2D classification table (CSV with header, target last).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = false)]
    force: bool,
}

#[derive(Serialize)]
struct EffectiveConfig {
    model: String,
    data: String,
    resolution: usize,
    seed: u64,
}

pub fn run(args: GridArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let seed = effective_seed(args.seed)?;
    let (model, _) = load_checkpoint(&args.model)?;
    let ingest = IngestOptions { max_rows: usize::MAX, subsample_columns: false, seed };
    let table = ingest_csv(&args.data, TaskFamily::Classification, &ingest)?;
    guard_output(&args.out, args.force)?;

    let grid = decision_grid(&model, &table, args.resolution, seed)?;
    write_grid_csv(&grid, &args.out)?;
    let config = EffectiveConfig {
        model: args.model.display().to_string(),
        data: args.data.display().to_string(),
        resolution: args.resolution,
        seed,
    };
    write_run_manifest(&args.out, "grid", &config, seed, started)?;
    println!(
        "wrote {}x{} grid ({} classes) to {}",
        args.resolution,
        args.resolution,
        grid.num_classes,
        args.out.display()
    );
    Ok(())
}
