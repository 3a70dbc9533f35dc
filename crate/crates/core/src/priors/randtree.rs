//! Random decision trees sampled directly from parameter space, with no
//! fitting step, and their traversal.
//!
//! Construction draws a split feature uniformly and a threshold uniformly
//! from the interval the path has already carved out for that feature (or
//! from the global threshold interval the first time a feature is seen).
//! Children are added while the depth is below `d_min`, and otherwise with
//! probability `1 - p_nc` until `d_max`. Classification leaves take labels
//! cyclically from a per-tree random starting class; regression leaves are
//! Gaussian.

use std::collections::BTreeMap;

use crate::data::TaskKind;
use crate::rng::Rng;

use super::DsrfParams;

#[derive(Clone, Debug)]
pub enum RandNodeKind {
    Internal { split_index: usize, threshold: f64, left: Box<RandNode>, right: Box<RandNode> },
    Leaf { target: f64 },
}

#[derive(Clone, Debug)]
pub struct RandNode {
    pub depth: usize,
    /// Per-feature interval the path constrains thresholds to.
    pub ranges: BTreeMap<usize, (f64, f64)>,
    pub kind: RandNodeKind,
}

#[derive(Clone, Debug)]
pub struct RandTree {
    pub root: RandNode,
}

struct Builder<'a> {
    d: usize,
    task: TaskKind,
    params: &'a DsrfParams,
    start_class: usize,
    leaf_counter: usize,
}

impl Builder<'_> {
    fn build(&mut self, depth: usize, ranges: BTreeMap<usize, (f64, f64)>, rng: &mut Rng) -> RandNode {
        let p = self.params;
        let grow = if depth < p.d_min {
            true
        } else if depth < p.d_max {
            rng.f64() >= p.p_nc
        } else {
            false
        };
        let kind = if grow {
            let split_index = rng.below(self.d as u64) as usize;
            let (lb, ub) = ranges.get(&split_index).copied().unwrap_or(p.thres_int);
            let threshold = rng.uniform(lb, ub);
            let mut left_ranges = ranges.clone();
            left_ranges.insert(split_index, (lb, threshold));
            let mut right_ranges = ranges.clone();
            right_ranges.insert(split_index, (threshold, ub));
            // Left subtree first: the leaf counter walks leaves in DFS order.
            let left = Box::new(self.build(depth + 1, left_ranges, rng));
            let right = Box::new(self.build(depth + 1, right_ranges, rng));
            RandNodeKind::Internal { split_index, threshold, left, right }
        } else {
            let target = match self.task {
                TaskKind::Classification { num_classes } => {
                    let label = (self.start_class + self.leaf_counter) % num_classes;
                    self.leaf_counter += 1;
                    label as f64
                }
                TaskKind::Regression => rng.normal_with(p.leaf_mu, p.leaf_sigma),
            };
            RandNodeKind::Leaf { target }
        };
        RandNode { depth, ranges, kind }
    }
}

/// Construct one random decision tree over `d` features.
pub fn rand_dt(d: usize, task: TaskKind, params: &DsrfParams, rng: &mut Rng) -> RandTree {
    debug_assert!(params.validate().is_ok());
    let start_class = match task {
        TaskKind::Classification { num_classes } => rng.below(num_classes as u64) as usize,
        TaskKind::Regression => 0,
    };
    let mut builder = Builder { d, task, params, start_class, leaf_counter: 0 };
    RandTree { root: builder.build(0, BTreeMap::new(), rng) }
}

/// Descend left while `x[split_index] <= threshold`, right otherwise, until a
/// leaf; return its target.
pub fn dt_traverse(x: &[f64], tree: &RandTree) -> f64 {
    fn descend(x: &[f64], node: &RandNode) -> f64 {
        match &node.kind {
            RandNodeKind::Leaf { target } => *target,
            RandNodeKind::Internal { split_index, threshold, left, right } => {
                if x[*split_index] <= *threshold {
                    descend(x, left)
                } else {
                    descend(x, right)
                }
            }
        }
    }
    descend(x, &tree.root)
}

impl RandTree {
    /// Leaf targets in construction (DFS, left-first) order.
    pub fn leaf_targets(&self) -> Vec<f64> {
        let mut out = Vec::new();
        fn walk(node: &RandNode, out: &mut Vec<f64>) {
            match &node.kind {
                RandNodeKind::Leaf { target } => out.push(*target),
                RandNodeKind::Internal { left, right, .. } => {
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        walk(&self.root, &mut out);
        out
    }

    pub fn max_depth(&self) -> usize {
        fn walk(node: &RandNode) -> usize {
            match &node.kind {
                RandNodeKind::Leaf { .. } => node.depth,
                RandNodeKind::Internal { left, right, .. } => walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }

    pub fn min_leaf_depth(&self) -> usize {
        fn walk(node: &RandNode) -> usize {
            match &node.kind {
                RandNodeKind::Leaf { .. } => node.depth,
                RandNodeKind::Internal { left, right, .. } => walk(left).min(walk(right)),
            }
        }
        walk(&self.root)
    }
}
