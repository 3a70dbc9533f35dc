//! Real-table ingestion: CSV files with a header row, features in all but
//! the last column and the target in the last. Non-numeric columns are
//! label-encoded by first appearance; rows with missing cells are dropped.

use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::{ColumnKind, Table, TaskKind, MAX_CLASSES, MAX_FEATURES};
use crate::error::Error;
use crate::priors::TaskFamily;
use crate::rng::Rng;
use crate::Result;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IngestOptions {
    /// Row cap; larger tables are subsampled with this seed.
    pub max_rows: usize,
    /// Reduce wide tables to MAX_FEATURES columns by seeded subsampling
    /// instead of failing.
    pub subsample_columns: bool,
    pub seed: u64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { max_rows: 1000, subsample_columns: false, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct RealDataset {
    pub name: String,
    pub table: Table,
}

/// One entry of a suite manifest (`suite.json`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub name: String,
    pub file: String,
    pub task: TaskFamily,
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t == "?" || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan")
}

/// Label-encode by first appearance.
fn encode_column(cells: &[&str]) -> (Vec<f64>, usize) {
    let mut seen: Vec<&str> = Vec::new();
    let codes = cells
        .iter()
        .map(|c| {
            let t = c.trim();
            match seen.iter().position(|s| *s == t) {
                Some(i) => i as f64,
                None => {
                    seen.push(t);
                    (seen.len() - 1) as f64
                }
            }
        })
        .collect();
    (codes, seen.len())
}

pub fn ingest_csv(path: &Path, task: TaskFamily, opts: &IngestOptions) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| Error::Ingest(format!("{}: {e}", path.display())))?;
    let width = reader
        .headers()
        .map_err(|e| Error::Ingest(e.to_string()))?
        .len();
    if width < 2 {
        return Err(Error::Ingest(format!("{}: needs >= 2 columns", path.display())));
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Ingest(e.to_string()))?;
        if record.iter().any(is_missing) {
            continue;
        }
        rows.push(record.iter().map(str::to_string).collect());
    }
    if rows.len() < 2 {
        return Err(Error::Ingest(format!(
            "{}: fewer than 2 complete rows",
            path.display()
        )));
    }
    let mut rng = Rng::new(opts.seed).child("ingest");
    if rows.len() > opts.max_rows {
        let keep = rng.choose_indices(rows.len(), opts.max_rows);
        let mut keep_sorted = keep;
        keep_sorted.sort_unstable();
        rows = keep_sorted.into_iter().map(|i| std::mem::take(&mut rows[i])).collect();
    }

    let d_full = width - 1;
    let feature_cols: Vec<usize> = if d_full > MAX_FEATURES {
        if !opts.subsample_columns {
            return Err(Error::Cap(format!(
                "{}: {d_full} feature columns exceed the cap of {MAX_FEATURES}; \
                 re-run with column subsampling enabled to select a seeded subset",
                path.display()
            )));
        }
        let mut keep = rng.choose_indices(d_full, MAX_FEATURES);
        keep.sort_unstable();
        keep
    } else {
        (0..d_full).collect()
    };

    let n = rows.len();
    let d = feature_cols.len();
    let mut features = Array2::zeros((n, d));
    let mut col_kinds = Vec::with_capacity(d);
    for (jj, &j) in feature_cols.iter().enumerate() {
        let cells: Vec<&str> = rows.iter().map(|r| r[j].as_str()).collect();
        let numeric: Option<Vec<f64>> =
            cells.iter().map(|c| c.trim().parse::<f64>().ok()).collect();
        match numeric {
            Some(vals) if vals.iter().all(|v| v.is_finite()) => {
                for (i, v) in vals.into_iter().enumerate() {
                    features[[i, jj]] = v;
                }
                col_kinds.push(ColumnKind::Continuous);
            }
            _ => {
                let (codes, cardinality) = encode_column(&cells);
                for (i, v) in codes.into_iter().enumerate() {
                    features[[i, jj]] = v;
                }
                // constant text columns carry no signal; keep them numeric 0
                if cardinality < 2 {
                    col_kinds.push(ColumnKind::Continuous);
                } else {
                    col_kinds.push(ColumnKind::Categorical(cardinality));
                }
            }
        }
    }

    let target_cells: Vec<&str> = rows.iter().map(|r| r[d_full].as_str()).collect();
    let (target, task) = match task {
        TaskFamily::Regression => {
            let vals: Vec<f64> = target_cells
                .iter()
                .map(|c| {
                    c.trim().parse::<f64>().map_err(|e| {
                        Error::Ingest(format!("{}: target {e}", path.display()))
                    })
                })
                .collect::<Result<_>>()?;
            (vals, TaskKind::Regression)
        }
        TaskFamily::Classification => {
            let (codes, num_classes) = encode_column(&target_cells);
            if num_classes < 2 {
                return Err(Error::Ingest(format!(
                    "{}: classification target has one class",
                    path.display()
                )));
            }
            if num_classes > MAX_CLASSES {
                return Err(Error::Cap(format!(
                    "{}: {num_classes} classes exceed the cap of {MAX_CLASSES}",
                    path.display()
                )));
            }
            (codes, TaskKind::classification(num_classes)?)
        }
    };
    Table::new(features, col_kinds, target, task, None)
}

/// Load a directory holding `suite.json` plus the CSV files it names.
pub fn load_suite(dir: &Path, opts: &IngestOptions) -> Result<Vec<RealDataset>> {
    let manifest_path = dir.join("suite.json");
    let entries: Vec<SuiteEntry> =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path)?)?;
    entries
        .into_iter()
        .map(|e| {
            let table = ingest_csv(&dir.join(&e.file), e.task, opts)?;
            Ok(RealDataset { name: e.name, table })
        })
        .collect()
}
