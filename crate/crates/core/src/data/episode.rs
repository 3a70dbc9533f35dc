//! Support/query episodes: the unit fed to the transformer.

use std::sync::Arc;

use crate::error::Error;
use crate::rng::Rng;
use crate::Result;

use super::{Normalizer, Table};

/// A support/query partition of a table plus the normalizer fitted on the
/// support rows. Index lists are sorted ascending and disjoint.
#[derive(Clone, Debug)]
pub struct Episode {
    pub table: Arc<Table>,
    pub support_idx: Vec<usize>,
    pub query_idx: Vec<usize>,
    pub normalizer: Normalizer,
}

impl Episode {
    pub fn num_support(&self) -> usize {
        self.support_idx.len()
    }

    pub fn num_query(&self) -> usize {
        self.query_idx.len()
    }

    /// Build an episode from explicit index lists (sorted internally).
    pub fn from_indices(
        table: Arc<Table>,
        mut support_idx: Vec<usize>,
        mut query_idx: Vec<usize>,
    ) -> Result<Self> {
        if support_idx.is_empty() || query_idx.is_empty() {
            return Err(Error::Size("support and query must both be nonempty".into()));
        }
        if support_idx.len() + query_idx.len() > table.num_rows() {
            return Err(Error::Size(format!(
                "s + q = {} exceeds N = {}",
                support_idx.len() + query_idx.len(),
                table.num_rows()
            )));
        }
        support_idx.sort_unstable();
        query_idx.sort_unstable();
        for w in support_idx.windows(2).chain(query_idx.windows(2)) {
            if w[0] == w[1] {
                return Err(Error::Size("duplicate index in episode".into()));
            }
        }
        if support_idx.iter().any(|i| query_idx.binary_search(i).is_ok()) {
            return Err(Error::Size("support and query overlap".into()));
        }
        let normalizer = Normalizer::fit(&table, &support_idx)?;
        Ok(Episode { table, support_idx, query_idx, normalizer })
    }
}

/// Uniform random partition of `table` into `s` support and `q` query rows,
/// without replacement. The normalizer is fitted on the support rows.
pub fn make_episode(table: &Arc<Table>, s: usize, q: usize, rng: &mut Rng) -> Result<Episode> {
    let n = table.num_rows();
    if s == 0 || q == 0 {
        return Err(Error::Size("s and q must both be >= 1".into()));
    }
    if s + q > n {
        return Err(Error::Size(format!("s + q = {} exceeds N = {n}", s + q)));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut idx);
    let support_idx = idx[..s].to_vec();
    let query_idx = idx[s..s + q].to_vec();
    Episode::from_indices(Arc::clone(table), support_idx, query_idx)
}
