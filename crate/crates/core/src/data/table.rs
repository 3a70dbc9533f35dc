//! The `Table` type: one synthetic or ingested dataset.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::priors::PriorKind;
use crate::Result;

use super::{MAX_CLASSES, MAX_FEATURES};

/// Prediction task attached to a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Classification { num_classes: usize },
    Regression,
}

impl TaskKind {
    pub fn classification(num_classes: usize) -> Result<Self> {
        if !(2..=MAX_CLASSES).contains(&num_classes) {
            return Err(Error::Invalid(format!(
                "num_classes {num_classes} outside [2, {MAX_CLASSES}]"
            )));
        }
        Ok(TaskKind::Classification { num_classes })
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, TaskKind::Classification { .. })
    }

    pub fn num_classes(&self) -> Option<usize> {
        match self {
            TaskKind::Classification { num_classes } => Some(*num_classes),
            TaskKind::Regression => None,
        }
    }
}

/// Kind of a feature column. Categorical values are stored as integer codes
/// in `[0, cardinality)` inside the f64 feature matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    Categorical(usize),
}

impl ColumnKind {
    pub fn is_categorical(&self) -> bool {
        matches!(self, ColumnKind::Categorical(_))
    }
}

/// One dataset: an N×d feature matrix, per-column kinds, a length-N target
/// vector (class indices for classification), and the task descriptor.
#[derive(Clone, Debug)]
pub struct Table {
    pub features: Array2<f64>,
    pub col_kinds: Vec<ColumnKind>,
    pub target: Vec<f64>,
    pub task: TaskKind,
    pub prior_tag: Option<PriorKind>,
}

impl Table {
    /// Validating constructor; every invariant is checked here so the rest of
    /// the crate can trust any `Table` it receives.
    pub fn new(
        features: Array2<f64>,
        col_kinds: Vec<ColumnKind>,
        target: Vec<f64>,
        task: TaskKind,
        prior_tag: Option<PriorKind>,
    ) -> Result<Self> {
        let (n, d) = features.dim();
        if n < 2 {
            return Err(Error::Invalid(format!("table needs N >= 2, got {n}")));
        }
        if d == 0 || d > MAX_FEATURES {
            return Err(Error::Invalid(format!(
                "feature count {d} outside [1, {MAX_FEATURES}]"
            )));
        }
        if col_kinds.len() != d {
            return Err(Error::Schema(format!(
                "col_kinds length {} != d {}",
                col_kinds.len(),
                d
            )));
        }
        if target.len() != n {
            return Err(Error::Schema(format!(
                "target length {} != N {}",
                target.len(),
                n
            )));
        }
        if features.iter().any(|v| !v.is_finite()) || target.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite value in table".into()));
        }
        for (j, kind) in col_kinds.iter().enumerate() {
            if let ColumnKind::Categorical(card) = kind {
                if *card < 2 {
                    return Err(Error::Invalid(format!("column {j} cardinality {card} < 2")));
                }
                for v in features.column(j) {
                    if v.fract() != 0.0 || *v < 0.0 || *v >= *card as f64 {
                        return Err(Error::Invalid(format!(
                            "column {j} value {v} outside categorical range [0, {card})"
                        )));
                    }
                }
            }
        }
        if let TaskKind::Classification { num_classes } = task {
            for y in &target {
                if y.fract() != 0.0 || *y < 0.0 || *y >= num_classes as f64 {
                    return Err(Error::Invalid(format!(
                        "class label {y} outside [0, {num_classes})"
                    )));
                }
            }
        }
        Ok(Table { features, col_kinds, target, task, prior_tag })
    }

    pub fn num_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    /// Class label of row `i`; panics on regression tables.
    pub fn class_of(&self, i: usize) -> usize {
        debug_assert!(self.task.is_classification());
        self.target[i] as usize
    }
}
