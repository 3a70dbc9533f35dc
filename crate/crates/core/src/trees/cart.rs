//! CART decision trees with greedy recursive partitioning.
//!
//! Split criterion is Gini impurity for classification and variance
//! reduction for regression. The `best` splitter scans midpoints of
//! consecutive sorted unique values over a random feature subset; the
//! `random` splitter draws one uniform threshold per candidate feature.
//! Equal-impurity splits resolve to the lowest (feature, threshold) pair.

use ndarray::Array2;

use crate::data::TaskKind;
use crate::error::Error;
use crate::rng::Rng;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitter {
    Best,
    Random,
}

#[derive(Clone, Debug)]
pub struct CartParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Number of features considered per node; `None` means all.
    pub max_features: Option<usize>,
    pub splitter: Splitter,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            max_depth: usize::MAX,
            min_samples_split: 2,
            max_features: None,
            splitter: Splitter::Best,
        }
    }
}

#[derive(Clone, Debug)]
pub enum LeafValue {
    /// Class-probability vector (sums to 1).
    Probs(Vec<f64>),
    /// Mean target value.
    Mean(f64),
}

#[derive(Clone, Debug)]
enum Node {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf(LeafValue),
}

#[derive(Clone, Debug)]
pub struct CartTree {
    nodes: Vec<Node>,
    task: TaskKind,
    num_features: usize,
}

struct Fitter<'a> {
    x: &'a Array2<f64>,
    y: &'a [f64],
    task: TaskKind,
    params: &'a CartParams,
    nodes: Vec<Node>,
}

/// Candidate split chosen at a node.
struct Split {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn gini(counts: &[f64], total: f64) -> f64 {
    if total == 0.0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|c| (c / total) * (c / total)).sum::<f64>()
}

impl Fitter<'_> {
    fn leaf(&self, rows: &[usize]) -> LeafValue {
        match self.task {
            TaskKind::Classification { num_classes } => {
                let mut counts = vec![0.0; num_classes];
                for &i in rows {
                    counts[self.y[i] as usize] += 1.0;
                }
                let total = rows.len() as f64;
                for c in &mut counts {
                    *c /= total;
                }
                LeafValue::Probs(counts)
            }
            TaskKind::Regression => {
                let mean = rows.iter().map(|&i| self.y[i]).sum::<f64>() / rows.len() as f64;
                LeafValue::Mean(mean)
            }
        }
    }

    fn is_pure(&self, rows: &[usize]) -> bool {
        let first = self.y[rows[0]];
        rows.iter().all(|&i| self.y[i] == first)
    }

    /// Weighted impurity of splitting `rows` on `feature` at `threshold`.
    fn split_impurity(&self, rows: &[usize], feature: usize, threshold: f64) -> f64 {
        match self.task {
            TaskKind::Classification { num_classes } => {
                let mut left = vec![0.0; num_classes];
                let mut right = vec![0.0; num_classes];
                for &i in rows {
                    let side = if self.x[[i, feature]] <= threshold { &mut left } else { &mut right };
                    side[self.y[i] as usize] += 1.0;
                }
                let nl: f64 = left.iter().sum();
                let nr: f64 = right.iter().sum();
                let n = nl + nr;
                (nl / n) * gini(&left, nl) + (nr / n) * gini(&right, nr)
            }
            TaskKind::Regression => {
                let mut nl = 0.0;
                let mut sl = 0.0;
                let mut ql = 0.0;
                let mut nr = 0.0;
                let mut sr = 0.0;
                let mut qr = 0.0;
                for &i in rows {
                    let v = self.y[i];
                    if self.x[[i, feature]] <= threshold {
                        nl += 1.0;
                        sl += v;
                        ql += v * v;
                    } else {
                        nr += 1.0;
                        sr += v;
                        qr += v * v;
                    }
                }
                let n = nl + nr;
                let var = |cnt: f64, sum: f64, sq: f64| {
                    if cnt == 0.0 {
                        0.0
                    } else {
                        (sq / cnt - (sum / cnt) * (sum / cnt)).max(0.0)
                    }
                };
                (nl / n) * var(nl, sl, ql) + (nr / n) * var(nr, sr, qr)
            }
        }
    }

    fn candidate_features(&self, rng: &mut Rng) -> Vec<usize> {
        let d = self.x.ncols();
        match self.params.max_features {
            Some(k) if k < d => {
                let mut picked = rng.choose_indices(d, k.max(1));
                // Ascending scan keeps the lowest-feature tie-break stable.
                picked.sort_unstable();
                picked
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&self, rows: &[usize], rng: &mut Rng) -> Option<Split> {
        let mut best: Option<Split> = None;
        for feature in self.candidate_features(rng) {
            let mut vals: Vec<f64> = rows.iter().map(|&i| self.x[[i, feature]]).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup();
            if vals.len() < 2 {
                continue;
            }
            match self.params.splitter {
                Splitter::Best => {
                    for w in vals.windows(2) {
                        let threshold = 0.5 * (w[0] + w[1]);
                        if threshold >= w[1] {
                            continue; // midpoint collapsed onto the upper value
                        }
                        let impurity = self.split_impurity(rows, feature, threshold);
                        if best.as_ref().map_or(true, |b| impurity < b.impurity) {
                            best = Some(Split { feature, threshold, impurity });
                        }
                    }
                }
                Splitter::Random => {
                    let lo = vals[0];
                    let hi = *vals.last().unwrap();
                    let threshold = rng.uniform(lo, hi);
                    let impurity = self.split_impurity(rows, feature, threshold);
                    if best.as_ref().map_or(true, |b| impurity < b.impurity) {
                        best = Some(Split { feature, threshold, impurity });
                    }
                }
            }
        }
        best
    }

    fn build(&mut self, rows: Vec<usize>, depth: usize, rng: &mut Rng) -> usize {
        let stop = depth >= self.params.max_depth
            || rows.len() < self.params.min_samples_split
            || self.is_pure(&rows);
        if !stop {
            if let Some(split) = self.best_split(&rows, rng) {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&i| self.x[[i, split.feature]] <= split.threshold);
                if !left_rows.is_empty() && !right_rows.is_empty() {
                    let id = self.nodes.len();
                    self.nodes.push(Node::Leaf(LeafValue::Mean(0.0))); // placeholder
                    let left = self.build(left_rows, depth + 1, rng);
                    let right = self.build(right_rows, depth + 1, rng);
                    self.nodes[id] = Node::Split {
                        feature: split.feature,
                        threshold: split.threshold,
                        left,
                        right,
                    };
                    return id;
                }
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(self.leaf(&rows)));
        id
    }
}

/// Fit a CART tree. Classification input must contain at least two classes.
pub fn cart_fit(
    x: &Array2<f64>,
    y: &[f64],
    task: TaskKind,
    params: &CartParams,
    rng: &mut Rng,
) -> Result<CartTree> {
    if let TaskKind::Classification { .. } = task {
        let first = y[0];
        if y.iter().all(|&v| v == first) {
            return Err(Error::DegenerateFit("single-class targets".into()));
        }
    }
    Ok(cart_fit_unchecked(x, y, task, params, rng))
}

/// Internal fit without the single-class guard; ensemble members may
/// legitimately see single-class bootstrap samples.
pub(crate) fn cart_fit_unchecked(
    x: &Array2<f64>,
    y: &[f64],
    task: TaskKind,
    params: &CartParams,
    rng: &mut Rng,
) -> CartTree {
    assert_eq!(x.nrows(), y.len());
    assert!(x.nrows() > 0, "empty training set");
    let mut fitter = Fitter { x, y, task, params, nodes: Vec::new() };
    let rows: Vec<usize> = (0..x.nrows()).collect();
    let root = fitter.build(rows, 0, rng);
    debug_assert_eq!(root, 0);
    CartTree { nodes: fitter.nodes, task, num_features: x.ncols() }
}

impl CartTree {
    pub fn task(&self) -> TaskKind {
        self.task
    }

    fn leaf_for(&self, row: &[f64]) -> &LeafValue {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf(value) => return value,
                Node::Split { feature, threshold, left, right } => {
                    id = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Class-probability vector at the leaf reached by `row`.
    pub fn predict_proba_row(&self, row: &[f64]) -> &[f64] {
        match self.leaf_for(row) {
            LeafValue::Probs(p) => p,
            LeafValue::Mean(_) => panic!("predict_proba on regression tree"),
        }
    }

    /// Prediction for one row: argmax class (lowest index on ties) or leaf
    /// mean.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self.leaf_for(row) {
            LeafValue::Probs(p) => argmax_lowest(p) as f64,
            LeafValue::Mean(m) => *m,
        }
    }

    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<f64>> {
        if x.nrows() > 0 && x.ncols() != self.num_features {
            return Err(Error::Schema(format!(
                "predict input has {} features, tree fitted on {}",
                x.ncols(),
                self.num_features
            )));
        }
        Ok((0..x.nrows()).map(|i| self.predict_row(&x.row(i).to_vec())).collect())
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    /// (feature, threshold) of the root split, if any.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match &self.nodes[0] {
            Node::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            Node::Leaf(_) => None,
        }
    }

    /// Leaf probability vectors (classification trees).
    pub fn leaf_probs(&self) -> Vec<&[f64]> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf(LeafValue::Probs(p)) => Some(p.as_slice()),
                _ => None,
            })
            .collect()
    }
}

pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn cls(k: usize) -> TaskKind {
        TaskKind::classification(k).unwrap()
    }

    #[test]
    fn separable_pair_is_memorized() {
        let x = array![[0.0], [1.0]];
        let y = vec![0.0, 1.0];
        let tree = cart_fit(&x, &y, cls(2), &CartParams::default(), &mut Rng::new(0)).unwrap();
        assert_eq!(tree.predict(&x).unwrap(), y);
    }

    #[test]
    fn xor_needs_depth_two() {
        let x = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = vec![0.0, 1.0, 1.0, 0.0];
        let params = CartParams { max_depth: 2, ..CartParams::default() };
        let tree = cart_fit(&x, &y, cls(2), &params, &mut Rng::new(0)).unwrap();
        assert_eq!(tree.predict(&x).unwrap(), y);
        assert!(tree.depth() <= 2);
    }

    #[test]
    fn depth_zero_is_majority_stump() {
        let x = array![[0.0], [1.0], [2.0]];
        let y = vec![0.0, 1.0, 1.0];
        let params = CartParams { max_depth: 0, ..CartParams::default() };
        let tree = cart_fit(&x, &y, cls(2), &params, &mut Rng::new(0)).unwrap();
        assert_eq!(tree.predict(&x).unwrap(), vec![1.0, 1.0, 1.0]);
        // regression stump predicts the mean
        let treer = cart_fit(&x, &[1.0, 2.0, 6.0], TaskKind::Regression, &params, &mut Rng::new(0))
            .unwrap();
        assert_eq!(treer.predict(&x).unwrap(), vec![3.0, 3.0, 3.0]);
    }

    #[test]
    fn single_class_is_degenerate() {
        let x = array![[0.0], [1.0]];
        assert!(matches!(
            cart_fit(&x, &[1.0, 1.0], cls(2), &CartParams::default(), &mut Rng::new(0)),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn memorizes_training_rows_when_fully_grown() {
        let mut rng = Rng::new(1);
        for _ in 0..20 {
            let n = rng.usize_range(5, 40);
            let x = Array2::from_shape_fn((n, 3), |_| rng.normal());
            let y: Vec<f64> = (0..n).map(|_| rng.below(3) as f64).collect();
            if y.iter().all(|&v| v == y[0]) {
                continue;
            }
            let tree = cart_fit(&x, &y, cls(3), &CartParams::default(), &mut rng).unwrap();
            // Distinct feature rows are almost sure under the normal draw.
            assert_eq!(tree.predict(&x).unwrap(), y);
        }
    }

    #[test]
    fn boundary_routes_left() {
        // Split lands at midpoint 0.5 between 0 and 1.
        let x = array![[0.0], [1.0]];
        let y = vec![0.0, 1.0];
        let tree = cart_fit(&x, &y, cls(2), &CartParams::default(), &mut Rng::new(0)).unwrap();
        let (f, t) = tree.root_split().unwrap();
        assert_eq!(f, 0);
        assert_eq!(tree.predict_row(&[t]), 0.0);
    }

    #[test]
    fn empty_prediction_input() {
        let x = array![[0.0], [1.0]];
        let tree =
            cart_fit(&x, &[0.0, 1.0], cls(2), &CartParams::default(), &mut Rng::new(0)).unwrap();
        let empty = Array2::<f64>::zeros((0, 1));
        assert!(tree.predict(&empty).unwrap().is_empty());
    }

    #[test]
    fn schema_mismatch_on_predict() {
        let x = array![[0.0], [1.0]];
        let tree =
            cart_fit(&x, &[0.0, 1.0], cls(2), &CartParams::default(), &mut Rng::new(0)).unwrap();
        let bad = Array2::<f64>::zeros((1, 2));
        assert!(tree.predict(&bad).is_err());
    }

    #[test]
    fn leaf_probs_sum_to_one() {
        let mut rng = Rng::new(9);
        let x = Array2::from_shape_fn((60, 2), |_| rng.normal());
        let y: Vec<f64> = (0..60).map(|_| rng.below(4) as f64).collect();
        let params = CartParams { max_depth: 3, ..CartParams::default() };
        let tree = cart_fit(&x, &y, cls(4), &params, &mut rng).unwrap();
        for p in tree.leaf_probs() {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    /// Exhaustive-enumeration oracle: the fitted root split must attain the
    /// global minimum weighted impurity over all (feature, midpoint) pairs.
    #[test]
    fn gini_split_matches_exhaustive_minimum() {
        let mut rng = Rng::new(42);
        for round in 0..500 {
            let n = rng.usize_range(2, 8);
            let d = rng.usize_range(1, 3);
            let x = Array2::from_shape_fn((n, d), |_| rng.int_range(-2, 2) as f64);
            let (task, y): (TaskKind, Vec<f64>) = if round % 2 == 0 {
                (cls(2), (0..n).map(|_| rng.below(2) as f64).collect())
            } else {
                (TaskKind::Regression, (0..n).map(|_| rng.int_range(-3, 3) as f64).collect())
            };
            if task.is_classification() && y.iter().all(|&v| v == y[0]) {
                continue;
            }
            let params = CartParams { max_depth: 1, ..CartParams::default() };
            let tree = match cart_fit(&x, &y, task, &params, &mut rng) {
                Ok(t) => t,
                Err(_) => continue,
            };
            let Some((feat, thres)) = tree.root_split() else {
                continue;
            };
            // oracle: enumerate every candidate split
            let fitter = Fitter { x: &x, y: &y, task, params: &params, nodes: Vec::new() };
            let rows: Vec<usize> = (0..n).collect();
            let mut best = f64::INFINITY;
            for f in 0..d {
                let mut vals: Vec<f64> = (0..n).map(|i| x[[i, f]]).collect();
                vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                vals.dedup();
                for w in vals.windows(2) {
                    let t = 0.5 * (w[0] + w[1]);
                    best = best.min(fitter.split_impurity(&rows, f, t));
                }
            }
            let got = fitter.split_impurity(&rows, feat, thres);
            assert!(
                (got - best).abs() < 1e-12,
                "chosen split impurity {got} vs exhaustive best {best}"
            );
        }
    }

    #[test]
    fn equal_impurity_ties_pick_lowest_feature_threshold() {
        // Duplicate column: feature 0 and 1 give identical impurities, and
        // the scan must keep feature 0 with its lowest winning threshold.
        let x = array![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]];
        let y = vec![0.0, 1.0, 0.0, 1.0];
        let params = CartParams { max_depth: 1, ..CartParams::default() };
        let tree = cart_fit(&x, &y, cls(2), &params, &mut Rng::new(0)).unwrap();
        let (f, t) = tree.root_split().unwrap();
        assert_eq!(f, 0);
        assert_eq!(t, 0.5);
    }
}
