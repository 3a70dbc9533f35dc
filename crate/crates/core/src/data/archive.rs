//! The `priorforge-v1` dataset archive format.
//!
//! An archive is a directory holding `manifest.json` plus one CSV per table.
//! Each CSV has a header row `f0,...,f{d-1},target`; real values carry 17
//! significant digits so they round-trip f64 exactly, and categorical cells
//! (and class labels) are written as bare integers.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::priors::PriorKind;
use crate::Result;

use super::{ColumnKind, Table, TaskKind};

pub const FORMAT_NAME: &str = "priorforge-v1";

/// Per-table manifest record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub file: String,
    pub n: usize,
    pub d: usize,
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_classes: Option<usize>,
    pub col_kinds: Vec<ColumnKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior_tag: Option<PriorKind>,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub tables: Vec<ArchiveEntry>,
}

/// 17-significant-digit text form of an f64 (exact round trip).
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_cell(v: f64, kind: &ColumnKind) -> String {
    match kind {
        ColumnKind::Continuous => fmt_real(v),
        ColumnKind::Categorical(_) => format!("{}", v as i64),
    }
}

fn table_csv(table: &Table) -> String {
    let d = table.num_features();
    let mut out = String::new();
    for j in 0..d {
        out.push_str(&format!("f{j},"));
    }
    out.push_str("target\n");
    for i in 0..table.num_rows() {
        for j in 0..d {
            out.push_str(&fmt_cell(table.features[[i, j]], &table.col_kinds[j]));
            out.push(',');
        }
        match table.task {
            TaskKind::Classification { .. } => {
                out.push_str(&format!("{}", table.target[i] as i64))
            }
            TaskKind::Regression => out.push_str(&fmt_real(table.target[i])),
        }
        out.push('\n');
    }
    out
}

/// Write tables (with their generation seeds) as a priorforge-v1 archive.
pub fn write_archive(dir: &Path, tables: &[(Table, u64)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(tables.len());
    for (i, (table, seed)) in tables.iter().enumerate() {
        let file = format!("table_{i:05}.csv");
        fs::write(dir.join(&file), table_csv(table))?;
        let (task, num_classes) = match table.task {
            TaskKind::Classification { num_classes } => {
                ("classification".to_string(), Some(num_classes))
            }
            TaskKind::Regression => ("regression".to_string(), None),
        };
        entries.push(ArchiveEntry {
            file,
            n: table.num_rows(),
            d: table.num_features(),
            task,
            num_classes,
            col_kinds: table.col_kinds.clone(),
            prior_tag: table.prior_tag,
            seed: *seed,
        });
    }
    let manifest = Manifest { format: FORMAT_NAME.to_string(), tables: entries };
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(dir.join("manifest.json"), json + "\n")?;
    Ok(())
}

fn parse_table(dir: &Path, entry: &ArchiveEntry) -> Result<Table> {
    let text = fs::read_to_string(dir.join(&entry.file))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Ingest(format!("{}: empty file", entry.file)))?;
    let expected: Vec<String> =
        (0..entry.d).map(|j| format!("f{j}")).chain(["target".to_string()]).collect();
    if header.split(',').map(str::trim).ne(expected.iter().map(String::as_str)) {
        return Err(Error::Ingest(format!("{}: unexpected header", entry.file)));
    }
    let mut features = Vec::with_capacity(entry.n * entry.d);
    let mut target = Vec::with_capacity(entry.n);
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != entry.d + 1 {
            return Err(Error::Ingest(format!("{}: ragged row", entry.file)));
        }
        for cell in &cells[..entry.d] {
            features.push(
                cell.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Ingest(format!("{}: {e}", entry.file)))?,
            );
        }
        target.push(
            cells[entry.d]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Ingest(format!("{}: {e}", entry.file)))?,
        );
    }
    let task = match (entry.task.as_str(), entry.num_classes) {
        ("classification", Some(k)) => TaskKind::classification(k)?,
        ("regression", _) => TaskKind::Regression,
        _ => return Err(Error::Ingest(format!("{}: bad task descriptor", entry.file))),
    };
    let features = ndarray::Array2::from_shape_vec((target.len(), entry.d), features)
        .map_err(|e| Error::Ingest(e.to_string()))?;
    Table::new(features, entry.col_kinds.clone(), target, task, entry.prior_tag)
}

/// Read a priorforge-v1 archive back into tables.
pub fn read_archive(dir: &Path) -> Result<(Manifest, Vec<Table>)> {
    let manifest: Manifest =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    if manifest.format != FORMAT_NAME {
        return Err(Error::Ingest(format!(
            "unsupported archive format {:?}",
            manifest.format
        )));
    }
    let tables = manifest
        .tables
        .iter()
        .map(|entry| parse_table(dir, entry))
        .collect::<Result<Vec<_>>>()?;
    Ok((manifest, tables))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use ndarray::Array2;

    fn sample_table(seed: u64) -> Table {
        let mut rng = Rng::new(seed);
        let n = 12;
        let mut features = Array2::zeros((n, 3));
        for i in 0..n {
            features[[i, 0]] = rng.normal();
            features[[i, 1]] = rng.below(4) as f64;
            features[[i, 2]] = rng.normal() * 1e-7;
        }
        Table::new(
            features,
            vec![ColumnKind::Continuous, ColumnKind::Categorical(4), ColumnKind::Continuous],
            (0..n).map(|_| rng.below(3) as f64).collect(),
            TaskKind::classification(3).unwrap(),
            Some(PriorKind::Dsrf),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = std::env::temp_dir().join(format!("pfv1_test_{}", std::process::id()));
        let tables = vec![(sample_table(1), 1u64), (sample_table(2), 2u64)];
        write_archive(&dir, &tables).unwrap();
        let (manifest, back) = read_archive(&dir).unwrap();
        assert_eq!(manifest.tables.len(), 2);
        for ((orig, _), got) in tables.iter().zip(&back) {
            assert_eq!(orig.features, got.features);
            assert_eq!(orig.target, got.target);
            assert_eq!(orig.col_kinds, got.col_kinds);
            assert_eq!(orig.task, got.task);
            assert_eq!(orig.prior_tag, got.prior_tag);
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn fmt_real_has_17_significant_digits() {
        assert_eq!(fmt_real(1.0), "1.0000000000000000e0");
        let v = std::f64::consts::PI * 1e-5;
        assert_eq!(fmt_real(v).parse::<f64>().unwrap(), v);
    }
}
