//! `priorforge select`: greedy forward prior selection from G and P.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;

use priorforge_core::analysis::{select_priors, GenMatrix, PerfDetail, PerfVector};

use crate::manifest::{guard_output, write_run_manifest};
use crate::CliError;

#[derive(Args)]
pub struct SelectArgs {
    /// Generalizability matrix JSON (output of `gmatrix`).
    #[arg(long)]
    g: PathBuf,
    /// Performance vector JSON (output of `perfvec`).
    #[arg(long)]
    p: PathBuf,
    /// Number of priors to select.
    #[arg(long)]
    k: usize,
    /// Output JSON file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = false)]
    force: bool,
}

#[derive(Serialize)]
struct Selection {
    order: Vec<String>,
    k: usize,
}

fn load_perf_vector(path: &PathBuf) -> Result<PerfVector, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("--p {}: {e}", path.display())))?;
    if let Ok(detail) = serde_json::from_str::<PerfDetail>(&text) {
        return Ok(detail.vector);
    }
    Ok(serde_json::from_str::<PerfVector>(&text)?)
}

pub fn run(args: SelectArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let g: GenMatrix = serde_json::from_str(
        &std::fs::read_to_string(&args.g)
            .map_err(|e| CliError::config(format!("--g {}: {e}", args.g.display())))?,
    )?;
    let p = load_perf_vector(&args.p)?;
    let order = select_priors(&g, &p, args.k)?;
    let selection = Selection {
        order: order.iter().map(|k| k.name().to_string()).collect(),
        k: args.k,
    };
    let json = serde_json::to_string_pretty(&selection)? + "\n";
    match &args.out {
        Some(path) => {
            guard_output(path, args.force)?;
            std::fs::write(path, &json)?;
            write_run_manifest(path, "select", &selection, 0, started)?;
            println!("selection order: {}", selection.order.join(" > "));
        }
        None => print!("{json}"),
    }
    Ok(())
}
