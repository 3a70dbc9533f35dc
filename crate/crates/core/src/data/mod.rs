//! Dataset, episode, and normalization primitives shared by every other
//! module.

mod archive;
mod episode;
mod normalizer;
mod table;

pub use archive::{fmt_real, read_archive, write_archive, ArchiveEntry, Manifest};
pub use episode::{make_episode, Episode};
pub use normalizer::Normalizer;
pub use table::{ColumnKind, Table, TaskKind};

/// Feature-count ceiling the model and generators honor.
pub const MAX_FEATURES: usize = 16;
/// Class-count ceiling for classification tasks.
pub const MAX_CLASSES: usize = 10;
/// Row ceiling for generated pretraining tables.
pub const MAX_GEN_ROWS: usize = 640;
