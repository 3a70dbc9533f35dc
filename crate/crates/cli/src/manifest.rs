//! Run manifests: every command records what it ran next to its artifact so
//! the artifact can be replayed exactly. The manifest carries the wall time
//! and therefore lives OUTSIDE the artifact itself, which stays
//! byte-reproducible.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    config_hash: String,
    seed: u64,
    wall_time_ms: u128,
    version: &'a str,
}

/// Sibling path for an artifact's run manifest.
pub fn manifest_path(artifact: &Path) -> PathBuf {
    let name = artifact
        .file_name()
        .map(|n| n.to_string_lossy().to_string())
        .unwrap_or_else(|| "out".into());
    artifact.with_file_name(format!("{name}.run_manifest.json"))
}

/// Hash of the effective command configuration (canonical JSON).
pub fn config_hash<T: Serialize>(config: &T) -> Result<String, CliError> {
    let json = serde_json::to_vec(config)?;
    let mut hasher = Sha256::new();
    hasher.update(&json);
    Ok(format!("{:x}", hasher.finalize()))
}

pub fn write_run_manifest<T: Serialize>(
    artifact: &Path,
    command: &str,
    config: &T,
    seed: u64,
    started: Instant,
) -> Result<(), CliError> {
    let manifest = RunManifest {
        command,
        config_hash: config_hash(config)?,
        seed,
        wall_time_ms: started.elapsed().as_millis(),
        version: env!("CARGO_PKG_VERSION"),
    };
    std::fs::write(
        manifest_path(artifact),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(())
}

/// Refuse to clobber an existing artifact unless `force` is set.
pub fn guard_output(path: &Path, force: bool) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::config(format!(
            "output {} exists; pass --force to overwrite",
            path.display()
        )));
    }
    if path.exists() {
        if path.is_dir() {
            std::fs::remove_dir_all(path)?;
        } else {
            std::fs::remove_file(path)?;
        }
    }
    Ok(())
}

/// Environment override for seeds: PRIORFORGE_SEED wins over flags/config.
pub fn effective_seed(flag_seed: u64) -> Result<u64, CliError> {
    match std::env::var("PRIORFORGE_SEED") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| CliError::config(format!("PRIORFORGE_SEED {v:?} is not a u64"))),
        Err(_) => Ok(flag_seed),
    }
}
