//! `priorforge`: synthetic tabular prior generation, toy TFM pretraining,
//! and cross-prior analysis from the command line.
//!
//! Exit codes: 0 success, 1 runtime error (single-line JSON on stderr),
//! 2 configuration or usage error.

mod commands;
mod manifest;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "priorforge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic tables into a priorforge-v1 archive.
    Generate(commands::generate::GenerateArgs),
    /// Pretrain a toy tabular transformer on a prior mixture.
    Pretrain(commands::pretrain::PretrainArgs),
    /// Compute the cross-prior generalizability matrix.
    Gmatrix(commands::gmatrix::GmatrixArgs),
    /// Score per-prior models on a suite of real CSV tables.
    Perfvec(commands::perfvec::PerfvecArgs),
    /// Greedy forward prior selection from G and P.
    Select(commands::select::SelectArgs),
    /// Export a decision-boundary probability grid for a 2D table.
    Grid(commands::grid::GridArgs),
    /// Evaluate one checkpoint on one CSV table.
    Eval(commands::eval::EvalArgs),
    /// End-to-end analysis: pretrain per-prior models, compute G, P,
    /// the selection order, and a leaderboard.
    Experiment(commands::experiment::ExperimentArgs),
}

/// Runtime failure (exit 1) or config failure (exit 2), reported as a single
/// machine-parsable JSON line on stderr.
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError { code: 2, kind: "config".into(), message: message.into() }
    }
}

impl From<priorforge_core::Error> for CliError {
    fn from(e: priorforge_core::Error) -> Self {
        use priorforge_core::Error as E;
        let kind = match &e {
            E::Size(_) => "size",
            E::Schema(_) => "schema",
            E::DegenerateFit(_) => "degenerate_fit",
            E::SingleClass(_) => "single_class",
            E::IncompleteGrid(_) => "incomplete_grid",
            E::Ingest(_) => "ingest",
            E::Cap(_) => "cap",
            E::Dim(_) => "dim",
            E::Invalid(_) => "invalid",
            E::Io(_) => "io",
            E::Json(_) => "json",
        };
        let code = if matches!(e, E::Invalid(_)) { 2 } else { 1 };
        CliError { code, kind: kind.into(), message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { code: 1, kind: "io".into(), message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError { code: 2, kind: "json".into(), message: e.to_string() }
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Pretrain(args) => commands::pretrain::run(args),
        Command::Gmatrix(args) => commands::gmatrix::run(args),
        Command::Perfvec(args) => commands::perfvec::run(args),
        Command::Select(args) => commands::select::run(args),
        Command::Grid(args) => commands::grid::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Experiment(args) => commands::experiment::run(args),
    };
    if let Err(e) = result {
        eprintln!(
            "{}",
            serde_json::json!({ "error": e.kind, "message": e.message })
        );
        std::process::exit(e.code);
    }
}
