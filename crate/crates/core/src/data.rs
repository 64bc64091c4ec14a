//! Datasets, class counts, synthetic generation, and stratified folds.
//!
//! Label convention: `1` is the minority/positive class, `0` the
//! majority/negative class. Operations that need a well-formed imbalance
//! ratio reject datasets where the minority outnumbers the majority
//! instead of silently relabeling.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Immutable feature matrix with binary labels.
///
/// Features are stored row-major; rows are samples, columns are features.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<u8>,
}

impl Dataset {
    /// Builds a dataset from row-major features, validating invariants:
    /// all values finite, labels in {0, 1}, at least one row and column.
    pub fn new(features: Vec<f64>, n_features: usize, labels: Vec<u8>) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::InvalidDataset("zero feature columns".into()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidDataset("zero rows".into()));
        }
        if features.len() != n_features * labels.len() {
            return Err(Error::InvalidDataset(format!(
                "feature row count {} does not match label count {}",
                features.len() / n_features,
                labels.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite feature at row {}, column {}",
                pos / n_features,
                pos % n_features
            )));
        }
        if let Some(pos) = labels.iter().position(|&l| l > 1) {
            return Err(Error::InvalidDataset(format!(
                "label outside {{0,1}} at row {pos}"
            )));
        }
        Ok(Dataset {
            features,
            n_features,
            labels,
        })
    }

    /// Builds a dataset from explicit rows.
    pub fn from_rows(rows: &[Vec<f64>], labels: &[u8]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidDataset("zero rows".into()));
        }
        let p = rows[0].len();
        if let Some(bad) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::InvalidDataset(format!(
                "row {bad} has {} columns, expected {p}",
                rows[bad].len()
            )));
        }
        let features = rows.iter().flatten().copied().collect();
        Dataset::new(features, p, labels.to_vec())
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    /// Indices of rows with the given label.
    pub fn indices_of(&self, label: u8) -> Vec<usize> {
        (0..self.n_samples())
            .filter(|&i| self.labels[i] == label)
            .collect()
    }

    /// New dataset containing `indices` in the given order (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidDataset("empty row selection".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n_samples()) {
            return Err(Error::InvalidDataset(format!(
                "row index {bad} out of bounds for {} rows",
                self.n_samples()
            )));
        }
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset::new(features, self.n_features, labels)
    }
}

/// Per-class sample counts. Label 0 is the majority by convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassCounts {
    pub n_majority: usize,
    pub n_minority: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.n_majority + self.n_minority
    }

    fn require_both(&self) -> Result<()> {
        if self.n_majority == 0 || self.n_minority == 0 {
            return Err(Error::DegenerateClasses {
                n_minority: self.n_minority,
                n_majority: self.n_majority,
            });
        }
        Ok(())
    }
}

/// Tallies labels; degenerate (single-class) datasets still tally.
pub fn class_counts(dataset: &Dataset) -> ClassCounts {
    let n_minority = dataset.labels().iter().filter(|&&l| l == 1).count();
    ClassCounts {
        n_majority: dataset.n_samples() - n_minority,
        n_minority,
    }
}

/// Minority-to-majority ratio `r = N1/N0`, in (0, 1].
pub fn imbalance_ratio(counts: ClassCounts) -> Result<f64> {
    counts.require_both()?;
    if counts.n_minority > counts.n_majority {
        return Err(Error::MinorityConvention {
            n_minority: counts.n_minority,
            n_majority: counts.n_majority,
        });
    }
    Ok(counts.n_minority as f64 / counts.n_majority as f64)
}

/// Configuration for the two-Gaussian synthetic generator.
///
/// Classes are isotropic unit-variance Gaussians in `dim` dimensions; the
/// minority mean sits `separation` away from the majority mean along the
/// first axis, so difficulty is a single scalar (0 = indistinguishable).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub n_total: usize,
    pub dim: usize,
    pub ratio: f64,
    pub separation: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        if self.n_total == 0 {
            return Err(Error::param("n_total", "must be >= 1"));
        }
        if self.dim == 0 {
            return Err(Error::param("dim", "must be >= 1"));
        }
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(Error::param("ratio", "must lie in (0, 1]"));
        }
        if !(self.separation >= 0.0) {
            return Err(Error::param("separation", "must be >= 0"));
        }
        Ok(())
    }

    /// Minority count implied by the target ratio, rounded half-to-even.
    pub fn minority_count(&self) -> usize {
        let exact = self.n_total as f64 * self.ratio / (1.0 + self.ratio);
        exact.round_ties_even() as usize
    }
}

/// Draws a synthetic dataset: majority rows first (label 0), then minority
/// rows (label 1). Pure function of the config, bit-identical across runs.
pub fn generate_synthetic(config: &GeneratorConfig) -> Result<Dataset> {
    config.validate()?;
    let n_minority = config.minority_count();
    let n_majority = config.n_total - n_minority;
    if n_minority == 0 || n_majority == 0 {
        return Err(Error::UnrealizableRatio {
            n_total: config.n_total,
            ratio: config.ratio,
        });
    }

    let mut rng = rng_from_seed(config.seed);
    let normal = StandardNormal;
    let mut features = Vec::with_capacity(config.n_total * config.dim);
    let mut labels = Vec::with_capacity(config.n_total);
    for _ in 0..n_majority {
        for _ in 0..config.dim {
            features.push(normal.sample(&mut rng));
        }
        labels.push(0);
    }
    for _ in 0..n_minority {
        for d in 0..config.dim {
            let offset = if d == 0 { config.separation } else { 0.0 };
            let v: f64 = normal.sample(&mut rng);
            features.push(v + offset);
        }
        labels.push(1);
    }
    Dataset::new(features, config.dim, labels)
}

/// Assignment of every sample to one of `n_folds` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    n_folds: usize,
}

impl FoldAssignment {
    pub fn n_folds(&self) -> usize {
        self.n_folds
    }

    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    /// Row indices held out in fold `f`.
    pub fn validation_indices(&self, f: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == f)
            .collect()
    }

    /// Row indices used for training in fold `f`.
    pub fn training_indices(&self, f: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != f)
            .collect()
    }
}

/// Stratified k-fold split: per-class round-robin dealing after a seeded
/// shuffle, so per-fold class counts differ from exact proportionality by
/// at most one sample.
pub fn stratified_kfold(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::param("k", "must be >= 2"));
    }
    let counts = class_counts(dataset);
    for class_size in [counts.n_minority, counts.n_majority] {
        if class_size < k {
            return Err(Error::InsufficientForFolds { class_size, k });
        }
    }

    let mut rng = rng_from_seed(seed);
    let mut fold_of = vec![0usize; dataset.n_samples()];
    for label in [1u8, 0u8] {
        let mut indices = dataset.indices_of(label);
        indices.shuffle(&mut rng);
        for (pos, idx) in indices.into_iter().enumerate() {
            fold_of[idx] = pos % k;
        }
    }
    Ok(FoldAssignment { fold_of, n_folds: k })
}

/// Shuffles `0..n` with the given seed. Shared by the balancing transforms.
pub(crate) fn shuffled_indices(n: usize, rng: &mut impl rand::Rng) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    indices
}

/// Uniform draw from `0..n`.
pub(crate) fn draw_index(n: usize, rng: &mut impl rand::Rng) -> usize {
    rng.random_range(0..n)
}
