//! `priorforge experiment`: the end-to-end analysis driver.
//!
//! Pretrains one toy model per prior plus the full-mixture model, computes
//! the generalizability matrix and performance vector, runs forward prior
//! selection, builds a leaderboard over the suite datasets, and writes one
//! byte-reproducible report directory. The run manifest (which carries wall
//! time) lives next to the report, not inside it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use priorforge_core::analysis::{
    gen_matrix, load_suite, perf_vector, ranking_metrics, score_models, select_priors,
    GenMatrix, GmatrixProtocol, IngestOptions, Leaderboard, MetricKind, PerfDetail,
    PerfProtocol,
};
use priorforge_core::priors::{Mixture, PriorKind};
use priorforge_core::tfm::{pretrain, save_checkpoint, TfmModel, TrainHp};
use priorforge_core::{Rng, TfmConfig};

use crate::manifest::{effective_seed, guard_output, write_run_manifest};
use crate::CliError;

#[derive(Args)]
pub struct ExperimentArgs {
    /// Run configuration JSON.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = false)]
    force: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn default_priors() -> Vec<PriorKind> {
    PriorKind::ALL.to_vec()
}

fn default_select_k() -> usize {
    0 // 0 = all priors
}

#[derive(Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    #[serde(default = "default_priors")]
    pub priors: Vec<PriorKind>,
    /// Weights for the full-mixture model.
    #[serde(default = "Mixture::default_mix")]
    pub mixture: Mixture,
    #[serde(default)]
    pub tfm: TfmConfig,
    #[serde(default)]
    pub train: TrainHp,
    pub gmatrix: GmatrixSection,
    pub perfvec: PerfSection,
    #[serde(default = "default_select_k")]
    pub select_k: usize,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
pub struct GmatrixSection {
    pub tables_per_cell: usize,
    pub rows: usize,
    pub support: usize,
    pub query: usize,
    #[serde(default = "default_metric")]
    pub metric: MetricKind,
}

fn default_metric() -> MetricKind {
    MetricKind::Auc
}

#[derive(Clone, Serialize, Deserialize)]
pub struct PerfSection {
    pub suite_dir: PathBuf,
    #[serde(default = "default_splits")]
    pub splits: usize,
    #[serde(default = "default_support_frac")]
    pub support_frac: f64,
    #[serde(default = "default_max_rows")]
    pub max_rows: usize,
    #[serde(default)]
    pub subsample_columns: bool,
}

fn default_splits() -> usize {
    10
}
fn default_support_frac() -> f64 {
    0.8
}
fn default_max_rows() -> usize {
    1000
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.priors.is_empty() {
            return Err(CliError::config("priors list is empty"));
        }
        let mut dedup = self.priors.clone();
        dedup.sort_unstable();
        dedup.dedup();
        if dedup.len() != self.priors.len() {
            return Err(CliError::config("priors list has duplicates"));
        }
        self.tfm.validate().map_err(|e| CliError::config(e.to_string()))?;
        self.train.validate().map_err(|e| CliError::config(e.to_string()))?;
        if !self.perfvec.suite_dir.is_dir() {
            return Err(CliError::config(format!(
                "suite_dir {} does not exist",
                self.perfvec.suite_dir.display()
            )));
        }
        if !self.perfvec.suite_dir.join("suite.json").is_file() {
            return Err(CliError::config(format!(
                "{} has no suite.json",
                self.perfvec.suite_dir.display()
            )));
        }
        Ok(())
    }

    fn select_k_effective(&self) -> usize {
        if self.select_k == 0 {
            self.priors.len()
        } else {
            self.select_k.min(self.priors.len())
        }
    }
}

/// Markdown summary: G with the P column appended, selection order, and the
/// leaderboard.
fn summary_markdown(
    g: &GenMatrix,
    p: &PerfDetail,
    selection: &[PriorKind],
    leaderboard: &Leaderboard,
) -> String {
    let mut out = String::new();
    out.push_str("# Cross-prior analysis\n\n");
    out.push_str(&format!(
        "## Generalizability matrix ({}) and performance vector\n\n",
        g.metric
    ));
    out.push_str("Rows: pretraining prior. Columns: evaluation prior, then real-suite P.\n\n");
    out.push_str("| train \\ test |");
    for prior in &g.priors {
        out.push_str(&format!(" {prior} |"));
    }
    out.push_str(" P |\n|---|");
    for _ in 0..=g.priors.len() {
        out.push_str("---|");
    }
    out.push('\n');
    for (i, prior) in g.priors.iter().enumerate() {
        out.push_str(&format!("| {prior} |"));
        for j in 0..g.priors.len() {
            out.push_str(&format!(" {:.3} |", g.values[i][j]));
        }
        out.push_str(&format!(" {:.3} |\n", p.vector.values[i]));
    }
    out.push_str("\n## Forward selection order\n\n");
    for (i, prior) in selection.iter().enumerate() {
        out.push_str(&format!("{}. {prior}\n", i + 1));
    }
    out.push_str("\n## Leaderboard over the real suite\n\n");
    out.push_str("| model | avg rank | elo | winrate | racc | champion delta |\n");
    out.push_str("|---|---|---|---|---|---|\n");
    let mut order: Vec<usize> = (0..leaderboard.models.len()).collect();
    order.sort_by(|&a, &b| {
        leaderboard.models[a]
            .avg_rank
            .partial_cmp(&leaderboard.models[b].avg_rank)
            .unwrap()
    });
    for i in order {
        let m = &leaderboard.models[i];
        out.push_str(&format!(
            "| {} | {:.2} | {:.0} (+{:.0}/-{:.0}) | {:.3} | {:.3} | {:.2} |\n",
            m.name,
            m.avg_rank,
            m.elo.rating,
            m.elo.ci_high - m.elo.rating,
            m.elo.rating - m.elo.ci_low,
            m.winrate,
            m.racc,
            m.champion_delta
        ));
    }
    out
}

/// Pretrain every model and run the full analysis into `report_dir`.
pub fn run_experiment(config: &RunConfig, jobs: usize, report_dir: &Path) -> Result<(), CliError> {
    let root = Rng::new(config.seed);
    std::fs::create_dir_all(report_dir)?;
    // the report describes the experiment, not where it happens to live
    let mut report_config = config.clone();
    report_config.out = PathBuf::new();
    std::fs::write(
        report_dir.join("config.json"),
        serde_json::to_string_pretty(&report_config)? + "\n",
    )?;

    // one model per prior, identical budgets
    let mut models: BTreeMap<PriorKind, TfmModel> = BTreeMap::new();
    for &prior in &config.priors {
        let rng = root.child("pretrain").child(prior.name());
        let result = pretrain(&Mixture::point(prior), &config.tfm, &config.train, &rng, jobs)?;
        save_checkpoint(
            &report_dir.join("models").join(prior.name()),
            &result.model,
            config.train.steps,
            config.seed,
        )?;
        models.insert(prior, result.model);
    }
    // plus the full-mixture model
    let mixture_model = {
        let rng = root.child("pretrain").child("mixture");
        let result = pretrain(&config.mixture, &config.tfm, &config.train, &rng, jobs)?;
        save_checkpoint(
            &report_dir.join("models").join("mixture"),
            &result.model,
            config.train.steps,
            config.seed,
        )?;
        result.model
    };

    let g_protocol = GmatrixProtocol {
        tables_per_cell: config.gmatrix.tables_per_cell,
        rows: config.gmatrix.rows,
        support: config.gmatrix.support,
        query: config.gmatrix.query,
        metric: config.gmatrix.metric,
        seed: root.child("gmatrix").seed(),
    };
    g_protocol.validate().map_err(|e| CliError::config(e.to_string()))?;
    let g = gen_matrix(&models, &g_protocol, jobs)?;
    std::fs::write(
        report_dir.join("g_matrix.json"),
        serde_json::to_string_pretty(&g)? + "\n",
    )?;

    let ingest = IngestOptions {
        max_rows: config.perfvec.max_rows,
        subsample_columns: config.perfvec.subsample_columns,
        seed: root.child("ingest").seed(),
    };
    let datasets = load_suite(&config.perfvec.suite_dir, &ingest)?;
    let p_protocol = PerfProtocol {
        splits: config.perfvec.splits,
        support_frac: config.perfvec.support_frac,
        metric: g_protocol.metric,
        seed: root.child("perfvec").seed(),
    };
    let p = perf_vector(&models, &datasets, &p_protocol, jobs)?;
    std::fs::write(
        report_dir.join("p_vector.json"),
        serde_json::to_string_pretty(&p)? + "\n",
    )?;

    let selection = select_priors(&g, &p.vector, config.select_k_effective())?;
    std::fs::write(
        report_dir.join("selection.json"),
        serde_json::to_string_pretty(
            &selection.iter().map(|k| k.name()).collect::<Vec<_>>(),
        )? + "\n",
    )?;

    // leaderboard over the per-prior models plus the mixture model
    let mut named: Vec<(&str, &TfmModel)> =
        models.iter().map(|(k, m)| (k.name(), m)).collect();
    named.push(("mixture", &mixture_model));
    let scores = score_models(&named, &datasets, &p_protocol, jobs)?;
    let metric = p_protocol.metric;
    let errors = Array2::from_shape_fn((named.len(), datasets.len()), |(i, d)| {
        if metric.ascending() {
            1.0 - scores[i][d]
        } else {
            scores[i][d]
        }
    });
    let names: Vec<String> = named.iter().map(|(n, _)| n.to_string()).collect();
    let leaderboard = ranking_metrics(&names, &errors, root.child("elo").seed())?;
    std::fs::write(
        report_dir.join("leaderboard.json"),
        serde_json::to_string_pretty(&leaderboard)? + "\n",
    )?;

    std::fs::write(
        report_dir.join("summary.md"),
        summary_markdown(&g, &p, &selection, &leaderboard),
    )?;
    Ok(())
}

pub fn run(args: ExperimentArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut config: RunConfig = serde_json::from_str(
        &std::fs::read_to_string(&args.config)
            .map_err(|e| CliError::config(format!("--config {}: {e}", args.config.display())))?,
    )?;
    config.seed = effective_seed(config.seed)?;
    config.validate()?;
    let out = config.out.clone();
    guard_output(&out, args.force)?;
    std::fs::create_dir_all(&out)?;

    let report_dir = out.join("report");
    run_experiment(&config, args.jobs, &report_dir)?;
    write_run_manifest(&out.join("report"), "experiment", &config, config.seed, started)?;
    println!("report written to {}", report_dir.display());
    Ok(())
}
