pub mod eval;
pub mod experiment;
pub mod generate;
pub mod gmatrix;
pub mod grid;
pub mod perfvec;
pub mod select;
pub mod pretrain;

use std::collections::BTreeMap;
use std::path::Path;

use priorforge_core::priors::PriorKind;
use priorforge_core::tfm::{load_checkpoint, TfmModel};

use crate::CliError;

/// Parse `--task cls|reg`.
pub fn parse_task_family(s: &str) -> Result<priorforge_core::priors::TaskFamily, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "cls" | "classification" => Ok(priorforge_core::priors::TaskFamily::Classification),
        "reg" | "regression" => Ok(priorforge_core::priors::TaskFamily::Regression),
        other => Err(CliError::config(format!("unknown task {other:?}; use cls or reg"))),
    }
}

/// Load per-prior checkpoints from `DIR/<prior-name>/`.
pub fn load_model_dir(dir: &Path) -> Result<BTreeMap<PriorKind, TfmModel>, CliError> {
    let mut models = BTreeMap::new();
    for kind in PriorKind::ALL {
        let path = dir.join(kind.name());
        if path.is_dir() {
            let (model, _) = load_checkpoint(&path)?;
            models.insert(kind, model);
        }
    }
    if models.is_empty() {
        return Err(CliError::config(format!(
            "no per-prior checkpoints found under {} (expected subdirectories {})",
            dir.display(),
            PriorKind::ALL.map(|k| k.name()).join(", ")
        )));
    }
    Ok(models)
}
