//! Metrics, the cross-prior generalizability matrix and performance vector,
//! greedy forward prior selection, and decision-boundary grid export.

mod gmatrix;
mod grid;
mod ingest;
mod leaderboard;
mod metrics;
mod perfvec;
mod select;

pub use gmatrix::{gen_matrix, GenMatrix, GmatrixProtocol};
pub use grid::{decision_grid, write_grid_csv, DecisionGrid};
pub use ingest::{ingest_csv, load_suite, IngestOptions, RealDataset, SuiteEntry};
pub use leaderboard::{ranking_metrics, EloRating, Leaderboard, ModelScore};
pub use metrics::{accuracy, auc_ovo, cross_entropy, mae, r_squared, rmse, MetricKind};
pub use perfvec::{perf_vector, score_models, PerfDetail, PerfProtocol, PerfVector};
pub use select::select_priors;
