//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Episode partition sizes do not fit the table.
    #[error("size error: {0}")]
    Size(String),

    /// Row or column layout does not match the fitted schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A fitted-tree prior received single-class targets after all retries.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// AUC requested on labels containing a single class.
    #[error("single class: {0}")]
    SingleClass(String),

    /// Leaderboard input grid has missing cells.
    #[error("incomplete grid: {0}")]
    IncompleteGrid(String),

    /// A real-data CSV could not be ingested.
    #[error("ingest error: {0}")]
    Ingest(String),

    /// Dataset exceeds a dimension cap and no reduction was requested.
    #[error("cap exceeded: {0}")]
    Cap(String),

    /// Tensor or episode dimensions outside what the model supports.
    #[error("dimension error: {0}")]
    Dim(String),

    /// Construction-time invariant violation (weights, configs, tables).
    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
