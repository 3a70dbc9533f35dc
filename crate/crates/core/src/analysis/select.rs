//! Greedy forward prior selection.
//!
//! The set is seeded with the best-P prior; each following pick minimizes,
//! over the not-yet-selected priors j, the maximum G[i][j] across the
//! already-selected priors i (the prior hardest for the current mixture to
//! cover). Ties break to the higher P, then to list order.

use crate::error::Error;
use crate::priors::PriorKind;
use crate::Result;

use super::gmatrix::GenMatrix;
use super::perfvec::PerfVector;

pub fn select_priors(g: &GenMatrix, p: &PerfVector, k: usize) -> Result<Vec<PriorKind>> {
    if g.priors != p.priors {
        return Err(Error::Schema("G and P prior lists differ".into()));
    }
    let m = g.priors.len();
    if k == 0 || k > m {
        return Err(Error::Invalid(format!("k {k} outside [1, {m}]")));
    }
    let mut selected: Vec<usize> = Vec::with_capacity(k);
    // seed: argmax P (list order on ties)
    let mut best = 0;
    for i in 1..m {
        if p.values[i] > p.values[best] {
            best = i;
        }
    }
    selected.push(best);
    while selected.len() < k {
        let mut pick: Option<(usize, f64)> = None;
        for j in 0..m {
            if selected.contains(&j) {
                continue;
            }
            let coverage = selected
                .iter()
                .map(|&i| g.values[i][j])
                .fold(f64::NEG_INFINITY, f64::max);
            let better = match pick {
                None => true,
                Some((cur, cur_cov)) => {
                    coverage < cur_cov
                        || (coverage == cur_cov && p.values[j] > p.values[cur])
                }
            };
            if better {
                pick = Some((j, coverage));
            }
        }
        selected.push(pick.unwrap().0);
    }
    Ok(selected.into_iter().map(|i| g.priors[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::metrics::MetricKind;
    use crate::analysis::GmatrixProtocol;
    use crate::rng::Rng;

    fn fixture(priors: Vec<PriorKind>, values: Vec<Vec<f64>>, p: Vec<f64>) -> (GenMatrix, PerfVector) {
        let m = priors.len();
        let g = GenMatrix {
            priors: priors.clone(),
            values,
            table_counts: vec![vec![1; m]; m],
            metric: MetricKind::Auc,
            protocol: GmatrixProtocol::default(),
        };
        let pv = PerfVector { priors, values: p, datasets: vec![] };
        (g, pv)
    }

    /// Literal re-implementation of the selection rule, as an oracle.
    fn select_oracle(g: &GenMatrix, p: &PerfVector, k: usize) -> Vec<PriorKind> {
        let m = g.priors.len();
        let mut selected: Vec<usize> = vec![];
        let mut remaining: Vec<usize> = (0..m).collect();
        // argmax P
        let seed = *remaining
            .iter()
            .max_by(|&&a, &&b| {
                p.values[a]
                    .partial_cmp(&p.values[b])
                    .unwrap()
                    .then(b.cmp(&a)) // earlier index wins ties
            })
            .unwrap();
        selected.push(seed);
        remaining.retain(|&j| j != seed);
        while selected.len() < k {
            let mut best_j = remaining[0];
            let mut best_cov = f64::INFINITY;
            for &j in &remaining {
                let cov = selected
                    .iter()
                    .map(|&i| g.values[i][j])
                    .fold(f64::NEG_INFINITY, f64::max);
                if cov < best_cov || (cov == best_cov && p.values[j] > p.values[best_j]) {
                    best_cov = cov;
                    best_j = j;
                }
            }
            selected.push(best_j);
            remaining.retain(|&j| j != best_j);
        }
        selected.into_iter().map(|i| g.priors[i]).collect()
    }

    #[test]
    fn k1_returns_best_p() {
        let (g, p) = fixture(
            vec![PriorKind::Scm, PriorKind::Et, PriorKind::Dsrf],
            vec![vec![0.9; 3]; 3],
            vec![0.8, 0.85, 0.7],
        );
        assert_eq!(select_priors(&g, &p, 1).unwrap(), vec![PriorKind::Et]);
    }

    #[test]
    fn hand_grid_second_pick() {
        // P = [0.9, 0.8, 0.85]: seed = prior 0. Column maxima over
        // selected {0}: m_1 = 0.95, m_2 = 0.70 -> second pick is prior 2.
        let (g, p) = fixture(
            vec![PriorKind::Scm, PriorKind::Et, PriorKind::Dsrf],
            vec![
                vec![0.90, 0.95, 0.70],
                vec![0.50, 0.90, 0.60],
                vec![0.55, 0.65, 0.90],
            ],
            vec![0.9, 0.8, 0.85],
        );
        let order = select_priors(&g, &p, 3).unwrap();
        assert_eq!(order[0], PriorKind::Scm);
        assert_eq!(order[1], PriorKind::Dsrf);
        assert_eq!(order[2], PriorKind::Et);
    }

    #[test]
    fn dominated_column_is_selected_last() {
        // A prior whose column entries all exceed every other column entry
        // is the easiest to cover and lands last, whatever the grid.
        let mut rng = Rng::new(1);
        for _ in 0..200 {
            let kinds = vec![PriorKind::Scm, PriorKind::Dt, PriorKind::Et, PriorKind::Gb];
            let dominated = rng.usize_range(0, 3);
            let mut values = vec![vec![0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    values[i][j] = if j == dominated {
                        rng.uniform(0.8, 0.9)
                    } else {
                        rng.uniform(0.1, 0.7)
                    };
                }
            }
            let mut p: Vec<f64> = (0..4).map(|_| rng.uniform(0.3, 0.9)).collect();
            // dominated prior must not be the seed
            p[dominated] = 0.0;
            let (g, pv) = fixture(kinds.clone(), values, p);
            let order = select_priors(&g, &pv, 4).unwrap();
            assert_eq!(*order.last().unwrap(), kinds[dominated]);
        }
    }

    #[test]
    fn matches_literal_oracle_on_random_grids() {
        let mut rng = Rng::new(2);
        for _ in 0..300 {
            let kinds = vec![
                PriorKind::Scm,
                PriorKind::Dt,
                PriorKind::Et,
                PriorKind::Gb,
                PriorKind::Rf,
            ];
            let values: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..5).map(|_| rng.uniform(0.0, 1.0)).collect())
                .collect();
            let p: Vec<f64> = (0..5).map(|_| rng.uniform(0.0, 1.0)).collect();
            let (g, pv) = fixture(kinds, values, p);
            for k in 1..=5 {
                assert_eq!(
                    select_priors(&g, &pv, k).unwrap(),
                    select_oracle(&g, &pv, k),
                    "k={k}"
                );
            }
        }
    }

    #[test]
    fn mismatched_lists_rejected() {
        let (g, _) = fixture(vec![PriorKind::Scm], vec![vec![1.0]], vec![1.0]);
        let p = PerfVector { priors: vec![PriorKind::Dt], values: vec![1.0], datasets: vec![] };
        assert!(select_priors(&g, &p, 1).is_err());
    }
}
