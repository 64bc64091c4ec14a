//! Probabilistic classifiers: trainable logistic regression and the
//! non-learning dummy baselines.

use crate::data::{ClassCounts, Dataset};
use crate::error::{Error, Result};
use crate::exec::chunked_map;
use crate::rng::rng_from_seed;
use rand::Rng as _;

/// Rows per gradient chunk. Fixed so per-chunk partial sums merge to the
/// same total regardless of thread count.
const GRAD_CHUNK: usize = 1024;

/// Contract for classifiers that emit `P(y=1 | x)`.
pub trait ProbabilisticClassifier {
    fn predict_proba(&self, dataset: &Dataset) -> Result<Vec<f64>>;

    /// Labels are 1 exactly where the probability reaches `threshold`.
    fn predict(&self, dataset: &Dataset, threshold: f64) -> Result<Vec<u8>> {
        predict_labels(&self.predict_proba(dataset)?, threshold)
    }
}

/// Thresholds probabilities into labels: 1 iff `p >= threshold`.
pub fn predict_labels(probs: &[f64], threshold: f64) -> Result<Vec<u8>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::param("threshold", "must lie in [0, 1]"));
    }
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::param("probs", "probabilities must lie in [0, 1]"));
    }
    Ok(probs.iter().map(|&p| u8::from(p >= threshold)).collect())
}

/// Hyperparameters for [`fit_logistic`].
///
/// Training is full-batch gradient descent on L2-regularized log-loss with
/// zero-initialized weights, so it is deterministic; the seed is carried
/// for uniformity with the other stochastic operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_penalty: f64,
    pub seed: u64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            learning_rate: 0.1,
            epochs: 300,
            l2_penalty: 1e-3,
            seed: 0,
        }
    }
}

/// Fitted logistic regression with its training standardization baked in,
/// so prediction is self-contained.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    weights: Vec<f64>,
    bias: f64,
    feature_means: Vec<f64>,
    feature_stds: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Fits logistic regression by full-batch gradient descent.
pub fn fit_logistic(dataset: &Dataset, config: &LogisticConfig) -> Result<LogisticModel> {
    Ok(fit_logistic_traced(dataset, config, false)?.0)
}

/// As [`fit_logistic`], optionally recording the regularized objective
/// after every epoch (index 0 is the pre-training objective).
pub fn fit_logistic_traced(
    dataset: &Dataset,
    config: &LogisticConfig,
    record_loss: bool,
) -> Result<(LogisticModel, Vec<f64>)> {
    if !(config.learning_rate > 0.0) {
        return Err(Error::param("learning_rate", "must be > 0"));
    }
    if !(config.l2_penalty >= 0.0) {
        return Err(Error::param("l2_penalty", "must be >= 0"));
    }
    let counts = crate::data::class_counts(dataset);
    if counts.n_majority == 0 || counts.n_minority == 0 {
        return Err(Error::DegenerateClasses {
            n_minority: counts.n_minority,
            n_majority: counts.n_majority,
        });
    }

    let n = dataset.n_samples();
    let p = dataset.n_features();
    let (means, stds) = standardization(dataset);
    // standardized design matrix, row-major
    let mut x = Vec::with_capacity(n * p);
    for i in 0..n {
        for (j, &v) in dataset.row(i).iter().enumerate() {
            x.push((v - means[j]) / stds[j]);
        }
    }
    let y: Vec<f64> = dataset.labels().iter().map(|&l| l as f64).collect();

    let mut weights = vec![0.0_f64; p];
    let mut bias = 0.0_f64;
    let indices: Vec<usize> = (0..n).collect();
    let mut losses = Vec::new();
    if record_loss {
        losses.push(objective(&x, &y, p, &weights, bias, config.l2_penalty));
    }

    for _ in 0..config.epochs {
        let partials = chunked_map(&indices, GRAD_CHUNK, |chunk| {
            let mut grad = vec![0.0_f64; p + 1];
            for &i in chunk {
                let row = &x[i * p..(i + 1) * p];
                let z = dot(&weights, row) + bias;
                let err = sigmoid(z) - y[i];
                for (g, &v) in grad[..p].iter_mut().zip(row) {
                    *g += err * v;
                }
                grad[p] += err;
            }
            grad
        });
        let mut grad = vec![0.0_f64; p + 1];
        for partial in &partials {
            for (g, &v) in grad.iter_mut().zip(partial) {
                *g += v;
            }
        }
        let inv_n = 1.0 / n as f64;
        for j in 0..p {
            weights[j] -= config.learning_rate * (grad[j] * inv_n + config.l2_penalty * weights[j]);
        }
        bias -= config.learning_rate * grad[p] * inv_n;
        if record_loss {
            losses.push(objective(&x, &y, p, &weights, bias, config.l2_penalty));
        }
    }

    Ok((
        LogisticModel {
            weights,
            bias,
            feature_means: means,
            feature_stds: stds,
        },
        losses,
    ))
}

fn standardization(dataset: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let n = dataset.n_samples() as f64;
    let p = dataset.n_features();
    let mut means = vec![0.0_f64; p];
    for i in 0..dataset.n_samples() {
        for (j, &v) in dataset.row(i).iter().enumerate() {
            means[j] += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut vars = vec![0.0_f64; p];
    for i in 0..dataset.n_samples() {
        for (j, &v) in dataset.row(i).iter().enumerate() {
            let d = v - means[j];
            vars[j] += d * d;
        }
    }
    let stds = vars
        .into_iter()
        .map(|v| {
            let s = (v / n).sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    (means, stds)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean log-loss plus (l2/2)*||w||^2 over pre-standardized rows.
fn objective(x: &[f64], y: &[f64], p: usize, weights: &[f64], bias: f64, l2: f64) -> f64 {
    let n = y.len();
    let mut loss = 0.0;
    for i in 0..n {
        let z = dot(weights, &x[i * p..(i + 1) * p]) + bias;
        // log(1 + e^-|z|) + max(z,0) - z*y, the stable log-loss form
        loss += (-z.abs()).exp().ln_1p() + z.max(0.0) - z * y[i];
    }
    loss / n as f64 + 0.5 * l2 * dot(weights, weights)
}

impl LogisticModel {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// Serializes to four CSV lines: weights, bias, means, stds.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "{}\n{}\n{}\n{}\n",
            join(&self.weights),
            self.bias,
            join(&self.feature_means),
            join(&self.feature_stds)
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let parse_line = |line: Option<&str>, what: &str| -> Result<Vec<f64>> {
            let line = line.ok_or_else(|| Error::param("model", format!("missing {what} line")))?;
            line.split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::param("model", format!("bad value `{c}` in {what}")))
                })
                .collect()
        };
        let mut lines = text.lines();
        let weights = parse_line(lines.next(), "weights")?;
        let bias_line = parse_line(lines.next(), "bias")?;
        let means = parse_line(lines.next(), "means")?;
        let stds = parse_line(lines.next(), "stds")?;
        if bias_line.len() != 1 {
            return Err(Error::param("model", "bias line must hold one value"));
        }
        if means.len() != weights.len() || stds.len() != weights.len() {
            return Err(Error::param("model", "inconsistent vector lengths"));
        }
        if stds.iter().any(|&s| s <= 0.0) {
            return Err(Error::param("model", "stds must be positive"));
        }
        Ok(LogisticModel {
            weights,
            bias: bias_line[0],
            feature_means: means,
            feature_stds: stds,
        })
    }
}

impl ProbabilisticClassifier for LogisticModel {
    fn predict_proba(&self, dataset: &Dataset) -> Result<Vec<f64>> {
        if dataset.n_features() != self.weights.len() {
            return Err(Error::param(
                "dataset",
                format!(
                    "model expects {} features, dataset has {}",
                    self.weights.len(),
                    dataset.n_features()
                ),
            ));
        }
        let probs = (0..dataset.n_samples())
            .map(|i| {
                let z: f64 = dataset
                    .row(i)
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| self.weights[j] * (v - self.feature_means[j]) / self.feature_stds[j])
                    .sum::<f64>()
                    + self.bias;
                sigmoid(z)
            })
            .collect();
        Ok(probs)
    }
}

/// Non-learning baseline strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DummyKind {
    /// Predicts 1 with the training minority fraction `N1/(N0+N1)`.
    Stratified,
    /// Predicts each class with probability 0.5.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DummyStrategy {
    pub kind: DummyKind,
    pub seed: u64,
}

/// Labels and scores from a dummy classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct DummyPredictions {
    pub scores: Vec<f64>,
    pub labels: Vec<u8>,
}

/// Draws `n_eval` predictions. Each label is a Bernoulli draw with the
/// strategy's class-1 probability; the emitted score is that probability
/// plus a per-sample uniform jitter in (-1e-6, 1e-6), which makes score
/// rankings random while keeping scores within a vanishing distance of
/// the Bernoulli parameter.
pub fn dummy_predict(
    strategy: &DummyStrategy,
    train_counts: ClassCounts,
    n_eval: usize,
) -> Result<DummyPredictions> {
    let p1 = match strategy.kind {
        DummyKind::Stratified => {
            if train_counts.n_majority == 0 || train_counts.n_minority == 0 {
                return Err(Error::DegenerateClasses {
                    n_minority: train_counts.n_minority,
                    n_majority: train_counts.n_majority,
                });
            }
            train_counts.n_minority as f64 / train_counts.total() as f64
        }
        DummyKind::Uniform => 0.5,
    };

    let mut rng = rng_from_seed(strategy.seed);
    let mut scores = Vec::with_capacity(n_eval);
    let mut labels = Vec::with_capacity(n_eval);
    for _ in 0..n_eval {
        let u: f64 = rng.random();
        labels.push(u8::from(u < p1));
        let jitter = (rng.random::<f64>() * 2.0 - 1.0) * 1e-6;
        scores.push(p1 + jitter);
    }
    Ok(DummyPredictions { scores, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{class_counts, generate_synthetic, GeneratorConfig};

    fn separable_1d() -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..50 {
            rows.push(vec![-1.0]);
            labels.push(0);
            rows.push(vec![1.0]);
            labels.push(1);
        }
        Dataset::from_rows(&rows, &labels).unwrap()
    }

    #[test]
    fn zero_epochs_predicts_half() {
        let d = separable_1d();
        let cfg = LogisticConfig { epochs: 0, ..Default::default() };
        let m = fit_logistic(&d, &cfg).unwrap();
        let probs = m.predict_proba(&d).unwrap();
        assert!(probs.iter().all(|&p| p == 0.5));
    }

    #[test]
    fn separable_set_reaches_full_accuracy() {
        let d = separable_1d();
        let cfg = LogisticConfig {
            learning_rate: 0.1,
            epochs: 500,
            l2_penalty: 0.0,
            seed: 0,
        };
        let m = fit_logistic(&d, &cfg).unwrap();
        let pred = m.predict(&d, 0.5).unwrap();
        let correct = pred
            .iter()
            .zip(d.labels())
            .filter(|(p, t)| p == t)
            .count();
        assert_eq!(correct, d.n_samples());
    }

    #[test]
    fn training_is_bit_deterministic() {
        let d = generate_synthetic(&GeneratorConfig {
            n_total: 300,
            dim: 5,
            ratio: 0.5,
            separation: 1.0,
            seed: 4,
        })
        .unwrap();
        let cfg = LogisticConfig::default();
        let a = fit_logistic(&d, &cfg).unwrap();
        let b = fit_logistic(&d, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn loss_is_non_increasing_at_small_lr() {
        let d = generate_synthetic(&GeneratorConfig {
            n_total: 400,
            dim: 4,
            ratio: 0.5,
            separation: 1.0,
            seed: 7,
        })
        .unwrap();
        let cfg = LogisticConfig {
            learning_rate: 0.01,
            epochs: 120,
            l2_penalty: 1e-3,
            seed: 0,
        };
        let (_, losses) = fit_logistic_traced(&d, &cfg, true).unwrap();
        assert_eq!(losses.len(), 121);
        for w in losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "loss increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn one_class_dataset_is_rejected() {
        let d = Dataset::from_rows(&[vec![1.0], vec![2.0]], &[0, 0]).unwrap();
        assert!(matches!(
            fit_logistic(&d, &LogisticConfig::default()),
            Err(Error::DegenerateClasses { .. })
        ));
    }

    #[test]
    fn model_text_round_trip() {
        let d = separable_1d();
        let m = fit_logistic(&d, &LogisticConfig::default()).unwrap();
        let back = LogisticModel::from_text(&m.to_text()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn predict_labels_boundary_uses_geq() {
        assert_eq!(predict_labels(&[0.4, 0.5, 0.6], 0.5).unwrap(), vec![0, 1, 1]);
        assert_eq!(predict_labels(&[0.0, 0.3, 1.0], 0.0).unwrap(), vec![1, 1, 1]);
        assert!(predict_labels(&[0.5], 1.0 + 1e-9).is_err());
        assert!(predict_labels(&[1.5], 0.5).is_err());
    }

    #[test]
    fn trait_predict_matches_thresholded_proba() {
        let d = separable_1d();
        let m = fit_logistic(&d, &LogisticConfig::default()).unwrap();
        let probs = m.predict_proba(&d).unwrap();
        for &t in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let direct = m.predict(&d, t).unwrap();
            let via_probs = predict_labels(&probs, t).unwrap();
            assert_eq!(direct, via_probs);
        }
    }

    #[test]
    fn uniform_dummy_label_fraction_near_half() {
        let strategy = DummyStrategy { kind: DummyKind::Uniform, seed: 3 };
        let counts = ClassCounts { n_majority: 1, n_minority: 1 };
        let out = dummy_predict(&strategy, counts, 100_000).unwrap();
        let frac = out.labels.iter().filter(|&&l| l == 1).count() as f64 / 100_000.0;
        assert!((frac - 0.5).abs() < 0.005, "fraction {frac}");
    }

    #[test]
    fn stratified_dummy_matches_train_prior() {
        let strategy = DummyStrategy { kind: DummyKind::Stratified, seed: 5 };
        let counts = ClassCounts { n_majority: 900, n_minority: 100 };
        let out = dummy_predict(&strategy, counts, 100_000).unwrap();
        let frac = out.labels.iter().filter(|&&l| l == 1).count() as f64 / 100_000.0;
        assert!((frac - 0.1).abs() < 0.005, "fraction {frac}");
    }

    #[test]
    fn dummy_empty_and_degenerate_cases() {
        let strategy = DummyStrategy { kind: DummyKind::Uniform, seed: 0 };
        let counts = ClassCounts { n_majority: 0, n_minority: 0 };
        let out = dummy_predict(&strategy, counts, 0).unwrap();
        assert!(out.scores.is_empty() && out.labels.is_empty());

        let strategy = DummyStrategy { kind: DummyKind::Stratified, seed: 0 };
        assert!(dummy_predict(&strategy, counts, 10).is_err());
    }

    #[test]
    fn uniform_dummy_f1_converges_to_law() {
        // against true labels at ratio r, F1 of a coin-flip classifier
        // approaches 2r/(3r+1)
        let r = 0.25;
        let d = generate_synthetic(&GeneratorConfig {
            n_total: 200_000,
            dim: 1,
            ratio: r,
            separation: 0.0,
            seed: 11,
        })
        .unwrap();
        let counts = class_counts(&d);
        let strategy = DummyStrategy { kind: DummyKind::Uniform, seed: 13 };
        let out = dummy_predict(&strategy, counts, d.n_samples()).unwrap();
        let c = crate::metrics::confusion(d.labels(), &out.labels).unwrap();
        let f1 = crate::metrics::point_metrics(&c).f1;
        let expected = 2.0 * r / (3.0 * r + 1.0);
        assert!((f1 - expected).abs() < 0.01, "f1 {f1} vs {expected}");
    }
}
