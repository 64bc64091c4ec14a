//! Throughput of the hot paths, benchmarked as built (parallel by
//! default; `--no-default-features` measures the sequential fallback).

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use imbal_core::balance::{plan_balanced_subsets, smote, SamplingMode, SmoteConfig};
use imbal_core::classifier::{fit_logistic, LogisticConfig};
use imbal_core::data::{generate_synthetic, Dataset, GeneratorConfig};
use imbal_core::ensemble::{train_ensemble, SoftCombine, VoteSpec};
use imbal_core::metrics::{auprc, auroc, ScoredPredictions};

fn training_data(n: usize, dim: usize, ratio: f64) -> Dataset {
    generate_synthetic(&GeneratorConfig {
        n_total: n,
        dim,
        ratio,
        separation: 1.0,
        seed: 42,
    })
    .unwrap()
}

fn bench_logistic(c: &mut Criterion) {
    let data = training_data(20_000, 16, 0.25);
    let config = LogisticConfig { epochs: 20, ..Default::default() };
    c.bench_function("fit_logistic_20k_x16_20ep", |b| {
        b.iter(|| fit_logistic(black_box(&data), black_box(&config)).unwrap())
    });
}

fn bench_smote(c: &mut Criterion) {
    let data = training_data(2_400, 8, 0.2);
    let config = SmoteConfig { k_neighbors: 5, seed: 7 };
    c.bench_function("smote_400_minority_x8", |b| {
        b.iter(|| smote(black_box(&data), black_box(&config)).unwrap())
    });
}

fn bench_ensemble(c: &mut Criterion) {
    let data = training_data(5_000, 8, 0.1);
    let plan = plan_balanced_subsets(&data, SamplingMode::WithoutReplacement, 0.05, 3).unwrap();
    let base = LogisticConfig { epochs: 50, ..Default::default() };
    c.bench_function("train_ensemble_k10_5k_x8", |b| {
        b.iter(|| {
            train_ensemble(
                black_box(&data),
                black_box(&plan),
                black_box(&base),
                VoteSpec::Soft(SoftCombine::Mean),
            )
            .unwrap()
        })
    });
}

fn bench_ranking_metrics(c: &mut Criterion) {
    let data = training_data(200_000, 1, 0.25);
    let scores: Vec<f64> = (0..data.n_samples())
        .map(|i| ((i * 2654435761) % 1_000_003) as f64 / 1_000_003.0)
        .collect();
    let sp = ScoredPredictions::new(scores, data.labels().to_vec()).unwrap();
    c.bench_function("auprc_200k", |b| b.iter(|| auprc(black_box(&sp)).unwrap()));
    c.bench_function("auroc_200k", |b| b.iter(|| auroc(black_box(&sp)).unwrap()));
}

criterion_group!(
    benches,
    bench_logistic,
    bench_smote,
    bench_ensemble,
    bench_ranking_metrics
);
criterion_main!(benches);
