//! Manual trainability probe (not part of the suite).
//! cargo test -p priorforge-core --test train_probe -- --ignored --nocapture

use std::sync::Arc;
use std::time::Instant;

use priorforge_core::data::make_episode;
use priorforge_core::priors::{
    sample_dataset_config_in, ConfigRanges, Mixture, PriorKind, TaskFamily,
};
use priorforge_core::tfm::{icl_predict, pretrain, TrainHp};
use priorforge_core::{Rng, TfmConfig, TfmModel};

fn eval_dsrf_accuracy(model: &TfmModel, tables: usize, seed: u64) -> f64 {
    let rng = Rng::new(seed);
    let ranges = ConfigRanges { d: (2, 8), n: (256, 256), num_classes: (2, 2), p_cat_max: 0.4 };
    let mut correct = 0usize;
    let mut total = 0usize;
    for t in 0..tables {
        let mut trng = rng.child_idx("eval", t as u64);
        let cfg = sample_dataset_config_in(TaskFamily::Classification, &ranges, &mut trng);
        let table = Arc::new(
            priorforge_core::priors::sample_from_prior(PriorKind::Dsrf, &cfg, &mut trng).unwrap(),
        );
        let episode = make_episode(&table, 200, 56, &mut trng).unwrap();
        let pred = icl_predict(model, &episode).unwrap();
        let classes = pred.classes.unwrap();
        for (i, &qi) in episode.query_idx.iter().enumerate() {
            if classes[i] == table.target[qi] as usize {
                correct += 1;
            }
            total += 1;
        }
    }
    correct as f64 / total as f64
}

#[test]
#[ignore]
fn train_probe() {
    let mix = Mixture::point(PriorKind::Dsrf);
    let config = TfmConfig::default();
    for (steps, batch) in [(300usize, 4usize), (600, 2), (600, 4)] {
        let hp = TrainHp {
            steps,
            batch,
            task: TaskFamily::Classification,
            ranges: ConfigRanges {
                d: (2, 8),
                n: (64, 640),
                num_classes: (2, 2),
                p_cat_max: 0.4,
            },
            ..TrainHp::default()
        };
        let t0 = Instant::now();
        let result = pretrain(&mix, &config, &hp, &Rng::new(1000), 1).unwrap();
        let train_time = t0.elapsed().as_secs_f64();
        let acc = eval_dsrf_accuracy(&result.model, 20, 555);
        let early: f64 = result.loss_history[..20.min(steps)].iter().sum::<f64>()
            / 20f64.min(steps as f64);
        let late: f64 = result.loss_history[steps.saturating_sub(20)..].iter().sum::<f64>()
            / 20f64.min(steps as f64);
        println!(
            "steps={steps} batch={batch}: {train_time:.0}s, loss {early:.3} -> {late:.3}, eval acc {acc:.3}"
        );
    }
}
