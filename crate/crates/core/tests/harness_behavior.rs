//! Pipeline-level behavior of the experiment harness on synthetic data.

use imbal_core::classifier::{fit_logistic, LogisticConfig, ProbabilisticClassifier};
use imbal_core::data::{generate_synthetic, GeneratorConfig};
use imbal_core::ensemble::{SoftCombine, VoteSpec};
use imbal_core::experiment::{
    cross_validate, result_rows_to_csv, run_ratio_sweep, ExperimentConfig, HarnessParams, Method,
    Model, ResultRow,
};
use imbal_core::metrics::{auroc, ScoredPredictions};

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn mean_f1(rows: &[ResultRow], r: f64) -> f64 {
    mean(
        rows.iter()
            .filter(|row| row.r == r)
            .map(|row| row.metrics.as_ref().unwrap().f1),
    )
}

#[test]
fn uniform_dummy_cv_auprc_tracks_the_law() {
    // 10-fold CV of the uniform dummy on unbalanced data at r = 0.25:
    // mean fold AUPRC approaches r/(1+r) = 0.2
    let data = generate_synthetic(&GeneratorConfig {
        n_total: 100_000,
        dim: 1,
        ratio: 0.25,
        separation: 0.0,
        seed: 5,
    })
    .unwrap();
    let reports = cross_validate(
        &data,
        Method::Unbalanced,
        Model::DummyUniform,
        &HarnessParams::default(),
        10,
        17,
    )
    .unwrap();
    assert_eq!(reports.len(), 10);
    let auprc = mean(reports.iter().map(|m| m.auprc));
    assert!((auprc - 0.2).abs() < 0.02, "mean fold AUPRC {auprc}");
}

#[test]
fn sweep_mean_f1_increases_with_r_for_uniform_dummy() {
    let config = ExperimentConfig {
        r_grid: vec![0.1, 0.5, 1.0],
        n_total: 100_000,
        dim: 1,
        separation: 0.0,
        seeds: vec![0],
        cv_folds: 5,
        models: vec![Model::DummyUniform],
        ..Default::default()
    };
    let out = run_ratio_sweep(&config).unwrap();
    let f1s: Vec<f64> = config.r_grid.iter().map(|&r| mean_f1(&out.rows, r)).collect();
    assert!(
        f1s[0] < f1s[1] && f1s[1] < f1s[2],
        "mean F1 not strictly increasing: {f1s:?}"
    );
}

#[test]
fn sweep_logreg_peaks_at_balanced_data() {
    let config = ExperimentConfig {
        r_grid: vec![0.1, 0.5, 1.0],
        n_total: 4000,
        dim: 4,
        separation: 1.0,
        seeds: vec![0, 1, 2, 3, 4],
        cv_folds: 5,
        models: vec![Model::LogReg],
        ..Default::default()
    };
    let out = run_ratio_sweep(&config).unwrap();
    let f1s: Vec<f64> = config.r_grid.iter().map(|&r| mean_f1(&out.rows, r)).collect();
    assert!(
        f1s[0] <= f1s[1] && f1s[1] <= f1s[2],
        "mean F1 not non-decreasing in r: {f1s:?}"
    );
    let auprcs: Vec<f64> = config
        .r_grid
        .iter()
        .map(|&r| {
            mean(
                out.rows
                    .iter()
                    .filter(|row| row.r == r)
                    .map(|row| row.metrics.as_ref().unwrap().auprc),
            )
        })
        .collect();
    assert!(
        auprcs.iter().all(|&a| a <= auprcs[2]),
        "AUPRC not peaked at r=1: {auprcs:?}"
    );
}

#[test]
fn zero_separation_gives_chance_level_auroc() {
    let train = generate_synthetic(&GeneratorConfig {
        n_total: 20_000,
        dim: 4,
        ratio: 0.5,
        separation: 0.0,
        seed: 21,
    })
    .unwrap();
    let test = generate_synthetic(&GeneratorConfig {
        n_total: 20_000,
        dim: 4,
        ratio: 0.5,
        separation: 0.0,
        seed: 22,
    })
    .unwrap();
    let model = fit_logistic(&train, &LogisticConfig::default()).unwrap();
    let scores = model.predict_proba(&test).unwrap();
    let value = auroc(&ScoredPredictions::new(scores, test.labels().to_vec()).unwrap()).unwrap();
    assert!((value - 0.5).abs() < 0.02, "AUROC {value} should be chance level");
}

#[test]
fn library_pipeline_is_byte_deterministic() {
    let config = ExperimentConfig {
        r_grid: vec![0.2, 0.4],
        n_total: 800,
        dim: 3,
        separation: 1.2,
        seeds: vec![3, 9],
        cv_folds: 4,
        methods: vec![Method::Unbalanced, Method::Smote],
        models: vec![Model::LogReg],
        vote: VoteSpec::Soft(SoftCombine::Mean),
        ..Default::default()
    };
    let a = run_ratio_sweep(&config).unwrap();
    let b = run_ratio_sweep(&config).unwrap();
    assert_eq!(result_rows_to_csv(&a.rows), result_rows_to_csv(&b.rows));
}
