use std::sync::Arc;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use priorforge_core::data::make_episode;
use priorforge_core::priors::{
    dsrf_sample, mixture_sample, DatasetConfig, DsrfParams, Mixture, TaskFamily,
};
use priorforge_core::tfm::{backward, forward, EpisodeInputs, TfmModel};
use priorforge_core::{Rng, TaskKind, TfmConfig};

fn dsrf_table(n: usize, d: usize, seed: u64) -> priorforge_core::Table {
    let mut rng = Rng::new(seed);
    let cfg = DatasetConfig::new(d, n, TaskKind::classification(2).unwrap(), 0.2, 0).unwrap();
    let params = DsrfParams::sample(&mut rng);
    dsrf_sample(&cfg, &params, &mut rng).unwrap()
}

fn bench_generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("generation");
    group.measurement_time(Duration::from_secs(5));
    group.bench_function("dsrf_table_n320_d8", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            dsrf_table(320, 8, seed)
        });
    });
    group.bench_function("mixture_table", |b| {
        let mix = Mixture::default_mix();
        let mut rng = Rng::new(1);
        b.iter(|| mixture_sample(&mix, TaskFamily::Classification, &mut rng).unwrap());
    });
    group.finish();
}

fn bench_tfm(c: &mut Criterion) {
    let mut group = c.benchmark_group("tfm");
    group.sample_size(10);
    group.measurement_time(Duration::from_secs(10));
    let config = TfmConfig::default();
    let model = TfmModel::init(&config, &mut Rng::new(0));
    for &n in &[256usize, 640] {
        let table = Arc::new(dsrf_table(n, 8, 7));
        let s = (n as f64 * 0.7) as usize;
        let episode = make_episode(&table, s, n - s, &mut Rng::new(3)).unwrap();
        let inputs = EpisodeInputs::from_episode(&episode).unwrap();
        group.bench_with_input(BenchmarkId::new("forward", n), &inputs, |b, inputs| {
            b.iter(|| forward(&model, inputs).unwrap());
        });
        group.bench_with_input(BenchmarkId::new("forward_backward", n), &inputs, |b, inputs| {
            b.iter(|| {
                let pass = forward(&model, inputs).unwrap();
                backward(&model, &pass)
            });
        });
    }
    group.finish();
}

criterion_group!(benches, bench_generation, bench_tfm);
criterion_main!(benches);
