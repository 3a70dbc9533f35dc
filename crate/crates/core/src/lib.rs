//! Synthetic tabular data-generating priors, from-scratch tree learners, a
//! toy-scale in-context-learning tabular transformer trained on a weighted
//! mixture of those priors, and the cross-prior analysis tooling built on top
//! (generalizability matrix, performance vector, greedy prior selection).
//!
//! Everything is 64-bit and deterministic: all randomness flows through the
//! splittable [`rng::Rng`], so any artifact is reproducible from its seed.

pub mod analysis;
pub mod data;
pub mod error;
pub mod jobs;
pub mod priors;
pub mod rng;
pub mod tfm;
pub mod trees;

pub use data::{ColumnKind, Episode, Normalizer, Table, TaskKind, MAX_CLASSES, MAX_FEATURES};
pub use error::Error;
pub use priors::{DatasetConfig, DsrfParams, Mixture, PriorKind};
pub use rng::Rng;
pub use tfm::{Arch, TfmConfig, TfmModel, TrainHp};

/// Crate result alias used across all modules.
pub type Result<T> = std::result::Result<T, Error>;
