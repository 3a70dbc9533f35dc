//! Weighted mixture over the six priors.

use crate::data::Table;
use crate::rng::Rng;
use crate::Result;

use super::{
    dsrf_sample, indirect_sample, sample_dataset_config_in, scm_sample, ConfigRanges,
    DatasetConfig, DsrfParams, Mixture, PriorKind, TaskFamily,
};

/// Dispatch one dataset configuration to the sampler for `kind`.
pub fn sample_from_prior(kind: PriorKind, cfg: &DatasetConfig, rng: &mut Rng) -> Result<Table> {
    match kind {
        PriorKind::Scm => scm_sample(cfg, rng),
        PriorKind::Dsrf => {
            let params = DsrfParams::sample(rng);
            dsrf_sample(cfg, &params, rng)
        }
        _ => indirect_sample(kind, cfg, rng),
    }
}

/// Draw a prior kind by weight, sample a dataset configuration, and dispatch.
pub fn mixture_sample(mix: &Mixture, task: TaskFamily, rng: &mut Rng) -> Result<Table> {
    mixture_sample_in(mix, task, &ConfigRanges::default(), rng)
}

pub fn mixture_sample_in(
    mix: &Mixture,
    task: TaskFamily,
    ranges: &ConfigRanges,
    rng: &mut Rng,
) -> Result<Table> {
    let kind = mix.draw_kind(rng);
    let cfg = sample_dataset_config_in(task, ranges, rng);
    sample_from_prior(kind, &cfg, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_always_tags_scm() {
        let mix = Mixture::point(PriorKind::Scm);
        let mut rng = Rng::new(1);
        let ranges = ConfigRanges { n: (64, 96), ..ConfigRanges::default() };
        for _ in 0..20 {
            let t = mixture_sample_in(&mix, TaskFamily::Classification, &ranges, &mut rng)
                .unwrap();
            assert_eq!(t.prior_tag, Some(PriorKind::Scm));
        }
    }

    #[test]
    fn every_prior_kind_produces_valid_tables() {
        let mut rng = Rng::new(2);
        let ranges = ConfigRanges { n: (64, 96), ..ConfigRanges::default() };
        for kind in PriorKind::ALL {
            let mix = Mixture::point(kind);
            for i in 0..6 {
                let family = if i % 2 == 0 {
                    TaskFamily::Classification
                } else {
                    TaskFamily::Regression
                };
                let t = mixture_sample_in(&mix, family, &ranges, &mut rng).unwrap();
                assert_eq!(t.prior_tag, Some(kind));
            }
        }
    }
}
