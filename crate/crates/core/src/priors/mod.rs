//! Data-generating priors: a structural causal model, four fitted tree-based
//! priors (DT, ET, GB, RF), the directly sampled random forest (DSRF), and
//! the weighted mixture sampler over all six.

mod config;
mod dsrf;
mod features;
mod indirect;
mod mixture;
mod randtree;
mod scm;

pub use config::{
    sample_dataset_config, sample_dataset_config_in, ConfigRanges, DatasetConfig, DsrfParams,
    Mixture, PriorKind, TaskFamily, MAX_EVAL_ROWS,
};
pub use dsrf::{dsrf_sample, majority_vote};
pub use features::{gen_features, gen_labels, FeatureSchema};
pub use indirect::{indirect_sample, indirect_sample_info, IndirectInfo};
pub use mixture::{mixture_sample, mixture_sample_in, sample_from_prior};
pub use randtree::{dt_traverse, rand_dt, RandNode, RandNodeKind, RandTree};
pub use scm::scm_sample;
