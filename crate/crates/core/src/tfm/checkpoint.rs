//! Model checkpoints: a manifest JSON (config, step, seed, named-tensor
//! index) plus one blob of raw little-endian f64 tensor data.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rng::Rng;
use crate::Result;

use super::config::TfmConfig;
use super::params::TfmModel;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorIndexEntry {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    /// Offset into the blob, in f64 elements.
    pub offset: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub config: TfmConfig,
    pub step: usize,
    pub seed: u64,
    pub tensors: Vec<TensorIndexEntry>,
}

const META_FILE: &str = "model.json";
const BLOB_FILE: &str = "tensors.bin";

pub fn save_checkpoint(dir: &Path, model: &TfmModel, step: usize, seed: u64) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut tensors = Vec::new();
    let mut blob: Vec<u8> = Vec::new();
    let mut offset = 0usize;
    model.for_each_param(&mut |name, p| {
        let (rows, cols) = p.dim();
        tensors.push(TensorIndexEntry { name, rows, cols, offset });
        for v in p.iter() {
            blob.extend_from_slice(&v.to_le_bytes());
        }
        offset += rows * cols;
    });
    let meta = CheckpointMeta { config: model.config, step, seed, tensors };
    fs::write(dir.join(META_FILE), serde_json::to_string_pretty(&meta)? + "\n")?;
    fs::write(dir.join(BLOB_FILE), blob)?;
    Ok(())
}

pub fn load_checkpoint(dir: &Path) -> Result<(TfmModel, CheckpointMeta)> {
    let meta: CheckpointMeta =
        serde_json::from_str(&fs::read_to_string(dir.join(META_FILE))?)?;
    let blob = fs::read(dir.join(BLOB_FILE))?;
    let mut model = TfmModel::init(&meta.config, &mut Rng::new(0));
    let mut err: Option<Error> = None;
    let mut i = 0;
    model.for_each_param_mut(&mut |name, p| {
        if err.is_some() {
            return;
        }
        let Some(entry) = meta.tensors.get(i) else {
            err = Some(Error::Invalid("checkpoint tensor index too short".into()));
            return;
        };
        if entry.name != name || entry.rows != p.nrows() || entry.cols != p.ncols() {
            err = Some(Error::Invalid(format!(
                "checkpoint tensor mismatch: expected {name} {:?}, found {} {}x{}",
                p.dim(),
                entry.name,
                entry.rows,
                entry.cols
            )));
            return;
        }
        let start = entry.offset * 8;
        let end = start + entry.rows * entry.cols * 8;
        if end > blob.len() {
            err = Some(Error::Invalid("checkpoint blob too short".into()));
            return;
        }
        for (k, v) in p.iter_mut().enumerate() {
            let o = start + k * 8;
            *v = f64::from_le_bytes(blob[o..o + 8].try_into().unwrap());
        }
        i += 1;
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok((model, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let config = TfmConfig { layers: 2, model_dim: 16, heads: 2, ..TfmConfig::default() };
        let model = TfmModel::init(&config, &mut Rng::new(7));
        let dir = std::env::temp_dir().join(format!("pf_ckpt_{}", std::process::id()));
        save_checkpoint(&dir, &model, 42, 7).unwrap();
        let (loaded, meta) = load_checkpoint(&dir).unwrap();
        assert_eq!(meta.step, 42);
        assert_eq!(meta.seed, 7);
        let a = model.param_list();
        let b = loaded.param_list();
        assert_eq!(a.len(), b.len());
        for ((na, x), (nb, y)) in a.iter().zip(b.iter()) {
            assert_eq!(na, nb);
            assert_eq!(x, y);
        }
        fs::remove_dir_all(&dir).unwrap();
    }
}
