//! Prior kinds, dataset configurations, DSRF parameters, and mixtures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{TaskKind, MAX_CLASSES, MAX_FEATURES, MAX_GEN_ROWS};
use crate::error::Error;
use crate::rng::Rng;
use crate::Result;

/// The six data-generating priors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorKind {
    Scm,
    Dt,
    Et,
    Gb,
    Rf,
    Dsrf,
}

impl PriorKind {
    pub const ALL: [PriorKind; 6] = [
        PriorKind::Scm,
        PriorKind::Dt,
        PriorKind::Et,
        PriorKind::Gb,
        PriorKind::Rf,
        PriorKind::Dsrf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PriorKind::Scm => "scm",
            PriorKind::Dt => "dt",
            PriorKind::Et => "et",
            PriorKind::Gb => "gb",
            PriorKind::Rf => "rf",
            PriorKind::Dsrf => "dsrf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "scm" => Ok(PriorKind::Scm),
            "dt" => Ok(PriorKind::Dt),
            "et" => Ok(PriorKind::Et),
            "gb" => Ok(PriorKind::Gb),
            "rf" => Ok(PriorKind::Rf),
            "dsrf" => Ok(PriorKind::Dsrf),
            other => Err(Error::Invalid(format!("unknown prior kind {other:?}"))),
        }
    }

    /// True for the fitted-tree priors dispatched through the tree learners.
    pub fn is_indirect(&self) -> bool {
        matches!(self, PriorKind::Dt | PriorKind::Et | PriorKind::Gb | PriorKind::Rf)
    }
}

impl std::fmt::Display for PriorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Task family used when sampling configurations (the concrete class count is
/// drawn per dataset).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskFamily {
    Classification,
    Regression,
}

/// Hyper-parameters of one generated dataset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub d: usize,
    pub n: usize,
    pub task: TaskKind,
    pub p_cat: f64,
    pub seed: u64,
}

/// Row ceiling for explicitly constructed evaluation configs. Pretraining
/// draws stay within [64, MAX_GEN_ROWS]; evaluation protocols may ask for
/// larger tables (the paper-scale grid uses N=1000).
pub const MAX_EVAL_ROWS: usize = 4096;

impl DatasetConfig {
    pub fn new(d: usize, n: usize, task: TaskKind, p_cat: f64, seed: u64) -> Result<Self> {
        if !(2..=MAX_FEATURES).contains(&d) {
            return Err(Error::Invalid(format!("d {d} outside [2, {MAX_FEATURES}]")));
        }
        if !(2..=MAX_EVAL_ROWS).contains(&n) {
            return Err(Error::Invalid(format!("n {n} outside [2, {MAX_EVAL_ROWS}]")));
        }
        if !(0.0..=1.0).contains(&p_cat) {
            return Err(Error::Invalid(format!("p_cat {p_cat} outside [0, 1]")));
        }
        if let TaskKind::Classification { num_classes } = task {
            if !(2..=MAX_CLASSES).contains(&num_classes) {
                return Err(Error::Invalid(format!(
                    "num_classes {num_classes} outside [2, {MAX_CLASSES}]"
                )));
            }
        }
        Ok(DatasetConfig { d, n, task, p_cat, seed })
    }

    pub fn num_classes(&self) -> usize {
        self.task.num_classes().unwrap_or(0)
    }
}

/// Sampling ranges for dataset configurations. Defaults match the pretraining
/// generation ceilings; individual runs may narrow them (e.g. d <= 8).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigRanges {
    pub d: (usize, usize),
    pub n: (usize, usize),
    pub num_classes: (usize, usize),
    pub p_cat_max: f64,
}

impl Default for ConfigRanges {
    fn default() -> Self {
        ConfigRanges {
            d: (2, MAX_FEATURES),
            n: (64, MAX_GEN_ROWS),
            num_classes: (2, MAX_CLASSES),
            p_cat_max: 0.4,
        }
    }
}

/// Uniformly sample a dataset configuration: d ~ U{2..16}, N ~ U{64..640},
/// p_cat ~ U[0, 0.4], and for classification num_classes ~ U{2..10}.
pub fn sample_dataset_config(task: TaskFamily, rng: &mut Rng) -> DatasetConfig {
    sample_dataset_config_in(task, &ConfigRanges::default(), rng)
}

pub fn sample_dataset_config_in(
    task: TaskFamily,
    ranges: &ConfigRanges,
    rng: &mut Rng,
) -> DatasetConfig {
    let d = rng.usize_range(ranges.d.0, ranges.d.1);
    let n = rng.usize_range(ranges.n.0, ranges.n.1);
    let p_cat = rng.uniform(0.0, ranges.p_cat_max);
    let task = match task {
        TaskFamily::Classification => TaskKind::Classification {
            num_classes: rng.usize_range(ranges.num_classes.0, ranges.num_classes.1),
        },
        TaskFamily::Regression => TaskKind::Regression,
    };
    let seed = rng.next_u64();
    DatasetConfig { d, n, task, p_cat, seed }
}

/// Parameters of the directly sampled random forest prior.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsrfParams {
    pub num_estimators: usize,
    pub d_min: usize,
    pub d_max: usize,
    pub thres_int: (f64, f64),
    pub p_nc: f64,
    pub leaf_mu: f64,
    pub leaf_sigma: f64,
}

impl DsrfParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_estimators == 0 {
            return Err(Error::Invalid("num_estimators must be >= 1".into()));
        }
        if self.d_min == 0 || self.d_min > self.d_max {
            return Err(Error::Invalid(format!(
                "need 1 <= d_min <= d_max, got ({}, {})",
                self.d_min, self.d_max
            )));
        }
        if self.thres_int.0 >= self.thres_int.1 {
            return Err(Error::Invalid("threshold interval must have lb < ub".into()));
        }
        if !(0.0..=1.0).contains(&self.p_nc) {
            return Err(Error::Invalid(format!("p_nc {} outside [0, 1]", self.p_nc)));
        }
        Ok(())
    }

    /// Per-table parameter draw used by the mixture: N_e ~ U{1..8},
    /// d_min ~ U{1..3}, d_max ~ U{d_min..8}, thres_int = [-3, 3] (matching
    /// the N(0,1) feature support), p_nc = 0.3, leaves ~ N(0, 1).
    pub fn sample(rng: &mut Rng) -> Self {
        let d_min = rng.usize_range(1, 3);
        DsrfParams {
            num_estimators: rng.usize_range(1, 8),
            d_min,
            d_max: rng.usize_range(d_min, 8),
            thres_int: (-3.0, 3.0),
            p_nc: 0.3,
            leaf_mu: 0.0,
            leaf_sigma: 1.0,
        }
    }
}

/// Mixture weights over prior kinds; weights are nonnegative and sum to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<PriorKind, f64>", into = "BTreeMap<PriorKind, f64>")]
pub struct Mixture {
    weights: Vec<(PriorKind, f64)>,
}

impl Mixture {
    pub fn new(weights: &[(PriorKind, f64)]) -> Result<Self> {
        let mut by_kind: BTreeMap<PriorKind, f64> = BTreeMap::new();
        for (kind, w) in weights {
            if *w < 0.0 || !w.is_finite() {
                return Err(Error::Invalid(format!("weight {w} for {kind} invalid")));
            }
            *by_kind.entry(*kind).or_insert(0.0) += w;
        }
        let total: f64 = by_kind.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("mixture weights sum to {total}, need 1")));
        }
        Ok(Mixture { weights: by_kind.into_iter().collect() })
    }

    /// Point mass on a single prior.
    pub fn point(kind: PriorKind) -> Self {
        Mixture { weights: vec![(kind, 1.0)] }
    }

    /// The default mixture: 50% SCM and the five tree-based priors at 10%
    /// each.
    pub fn default_mix() -> Self {
        Mixture::new(&[
            (PriorKind::Scm, 0.5),
            (PriorKind::Dt, 0.1),
            (PriorKind::Et, 0.1),
            (PriorKind::Gb, 0.1),
            (PriorKind::Rf, 0.1),
            (PriorKind::Dsrf, 0.1),
        ])
        .unwrap()
    }

    pub fn weights(&self) -> &[(PriorKind, f64)] {
        &self.weights
    }

    /// Draw a prior kind with probability proportional to its weight.
    pub fn draw_kind(&self, rng: &mut Rng) -> PriorKind {
        let u = rng.f64();
        let mut acc = 0.0;
        for (kind, w) in &self.weights {
            acc += w;
            if u < acc {
                return *kind;
            }
        }
        self.weights.last().unwrap().0
    }
}

impl TryFrom<BTreeMap<PriorKind, f64>> for Mixture {
    type Error = Error;
    fn try_from(map: BTreeMap<PriorKind, f64>) -> Result<Self> {
        let entries: Vec<(PriorKind, f64)> = map.into_iter().collect();
        Mixture::new(&entries)
    }
}

impl From<Mixture> for BTreeMap<PriorKind, f64> {
    fn from(m: Mixture) -> Self {
        m.weights.into_iter().collect()
    }
}
