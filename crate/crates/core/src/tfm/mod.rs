//! Toy-scale tabular foundation model: cell/row embeddings, 1D row-attention
//! and 2D row+column-attention transformer blocks, exact reverse-mode
//! gradients, the mixture pretraining loop, and in-context inference.

mod adam;
mod checkpoint;
mod config;
mod forward;
mod infer;
mod loss;
mod ops;
mod params;
mod train;

pub use adam::Adam;
pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
pub use config::{Arch, TfmConfig, TrainHp};
pub use forward::{backward, embed_episode, forward, EpisodeInputs, ForwardPass, Output};
pub use infer::{icl_predict, Prediction};
pub use loss::loss;
pub use params::TfmModel;
pub use train::{pretrain, TrainResult};
