//! Model and training configuration.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::priors::{ConfigRanges, TaskFamily};
use crate::Result;

/// Attention layout: one token per row, or one token per cell with
/// alternating column and row attention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arch {
    OneD,
    TwoD,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfmConfig {
    pub arch: Arch,
    pub layers: usize,
    pub model_dim: usize,
    pub heads: usize,
    pub mlp_ratio: f64,
}

impl Default for TfmConfig {
    fn default() -> Self {
        TfmConfig { arch: Arch::OneD, layers: 3, model_dim: 64, heads: 4, mlp_ratio: 4.0 }
    }
}

impl TfmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::Invalid("layers must be >= 1".into()));
        }
        if self.heads == 0 || self.model_dim % self.heads != 0 {
            return Err(Error::Invalid(format!(
                "model_dim {} must be divisible by heads {}",
                self.model_dim, self.heads
            )));
        }
        if self.mlp_ratio <= 0.0 {
            return Err(Error::Invalid("mlp_ratio must be positive".into()));
        }
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.model_dim / self.heads
    }

    pub fn mlp_hidden(&self) -> usize {
        ((self.model_dim as f64 * self.mlp_ratio).round() as usize).max(1)
    }
}

/// Pretraining hyper-parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainHp {
    pub steps: usize,
    pub batch: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
    pub grad_clip: f64,
    /// Support fraction range; s ~ U{ceil(lo*N) .. floor(hi*N)}, q = N - s.
    pub support_frac: (f64, f64),
    pub task: TaskFamily,
    /// Dataset-configuration sampling ranges for generated tables.
    pub ranges: ConfigRanges,
}

impl Default for TrainHp {
    fn default() -> Self {
        TrainHp {
            steps: 2000,
            batch: 16,
            lr: 3e-4,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
            grad_clip: 1.0,
            support_frac: (0.5, 0.9),
            task: TaskFamily::Classification,
            ranges: ConfigRanges::default(),
        }
    }
}

impl TrainHp {
    pub fn validate(&self) -> Result<()> {
        if self.batch == 0 {
            return Err(Error::Invalid("batch must be >= 1".into()));
        }
        if !(self.lr > 0.0) {
            return Err(Error::Invalid("lr must be positive".into()));
        }
        let (lo, hi) = self.support_frac;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(Error::Invalid(format!(
                "support_frac ({lo}, {hi}) outside 0 < lo <= hi < 1"
            )));
        }
        Ok(())
    }
}
