//! From-scratch fitted tree models: CART decision trees, random forests,
//! extra trees, and gradient boosting. These exist to serve the indirectly
//! sampled priors; they share the `<=` goes-left traversal convention with
//! the random trees.

mod cart;
mod forest;
mod gbm;

pub use cart::{cart_fit, CartParams, CartTree, LeafValue, Splitter};
pub use forest::{forest_fit, ForestKind, ForestModel, ForestParams};
pub use gbm::{gbm_fit, GbmModel, GbmParams};
