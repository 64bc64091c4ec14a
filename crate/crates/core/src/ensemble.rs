//! Bagging ensembles over balanced subsets, with hard and soft voting.

use std::fmt;
use std::str::FromStr;

use crate::balance::SubsetPlan;
use crate::classifier::{fit_logistic, LogisticConfig, LogisticModel, ProbabilisticClassifier};
use crate::data::{class_counts, ClassCounts, Dataset};
use crate::error::{Error, Result};
use crate::exec::indexed_map;
use crate::rng::derive_seed;

/// Probability cutoff for each base classifier's label vote.
const BASE_LABEL_THRESHOLD: f64 = 0.5;

/// How base predictions combine into the ensemble prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VoteSpec {
    Hard(HardThreshold),
    Soft(SoftCombine),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HardThreshold {
    /// Positive when the vote fraction reaches a fixed q in [0, 1].
    Fixed(f64),
    /// Positive when the vote fraction reaches the training majority
    /// fraction `N0 / (N0 + N1)`.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoftCombine {
    Mean,
    Max,
}

impl VoteSpec {
    pub fn validate(&self) -> Result<()> {
        if let VoteSpec::Hard(HardThreshold::Fixed(q)) = self {
            if !(0.0..=1.0).contains(q) {
                return Err(Error::param("vote", "fixed hard threshold must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for VoteSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VoteSpec::Hard(HardThreshold::Adaptive) => write!(f, "hard-adaptive"),
            VoteSpec::Hard(HardThreshold::Fixed(q)) => write!(f, "hard-{q}"),
            VoteSpec::Soft(SoftCombine::Mean) => write!(f, "soft-mean"),
            VoteSpec::Soft(SoftCombine::Max) => write!(f, "soft-max"),
        }
    }
}

impl FromStr for VoteSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = match s {
            "hard-adaptive" => VoteSpec::Hard(HardThreshold::Adaptive),
            "soft-mean" => VoteSpec::Soft(SoftCombine::Mean),
            "soft-max" => VoteSpec::Soft(SoftCombine::Max),
            other => {
                let q = other
                    .strip_prefix("hard-")
                    .and_then(|q| q.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::param(
                            "vote",
                            format!("`{other}` is not hard-adaptive, hard-<q>, soft-mean, or soft-max"),
                        )
                    })?;
                VoteSpec::Hard(HardThreshold::Fixed(q))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Voting threshold tied to the training class balance:
/// `V = N0 / (N0 + N1)`, the majority fraction.
pub fn adaptive_threshold(counts: ClassCounts) -> Result<f64> {
    if counts.n_majority == 0 || counts.n_minority == 0 {
        return Err(Error::DegenerateClasses {
            n_minority: counts.n_minority,
            n_majority: counts.n_majority,
        });
    }
    Ok(counts.n_majority as f64 / counts.total() as f64)
}

/// Hard vote: sample is positive iff the fraction of positive base votes
/// reaches `threshold`.
pub fn hard_vote(base_labels: &[Vec<u8>], threshold: f64) -> Result<Vec<u8>> {
    if base_labels.is_empty() {
        return Err(Error::param("base_labels", "need at least one base classifier"));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::param("threshold", "must lie in [0, 1]"));
    }
    let n = base_labels[0].len();
    if base_labels.iter().any(|row| row.len() != n) {
        return Err(Error::param("base_labels", "ragged vote matrix"));
    }
    if base_labels.iter().flatten().any(|&v| v > 1) {
        return Err(Error::param("base_labels", "votes must be 0 or 1"));
    }
    let k = base_labels.len() as f64;
    Ok((0..n)
        .map(|i| {
            let votes: u32 = base_labels.iter().map(|row| row[i] as u32).sum();
            u8::from(votes as f64 / k >= threshold)
        })
        .collect())
}

/// Soft vote: combines base probabilities per sample by mean or max.
pub fn soft_vote(base_probs: &[Vec<f64>], combine: SoftCombine) -> Result<Vec<f64>> {
    if base_probs.is_empty() {
        return Err(Error::param("base_probs", "need at least one base classifier"));
    }
    let n = base_probs[0].len();
    if base_probs.iter().any(|row| row.len() != n) {
        return Err(Error::param("base_probs", "ragged probability matrix"));
    }
    if base_probs.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::param("base_probs", "probabilities must lie in [0, 1]"));
    }
    let k = base_probs.len() as f64;
    Ok((0..n)
        .map(|i| match combine {
            SoftCombine::Mean => base_probs.iter().map(|row| row[i]).sum::<f64>() / k,
            SoftCombine::Max => base_probs
                .iter()
                .map(|row| row[i])
                .fold(f64::NEG_INFINITY, f64::max),
        })
        .collect())
}

/// K base classifiers plus the voting rule and the class counts of the
/// original (unbalanced) training data, which drive the adaptive threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    base_models: Vec<LogisticModel>,
    vote: VoteSpec,
    train_counts: ClassCounts,
}

/// Per-sample ensemble outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsemblePrediction {
    /// Fraction of base classifiers voting positive.
    pub vote_fraction: Vec<f64>,
    pub soft_mean: Vec<f64>,
    pub soft_max: Vec<f64>,
    /// Final labels under the model's vote spec.
    pub labels: Vec<u8>,
    /// Ranking score under the model's vote spec: the vote fraction for
    /// hard voting, the combined probability for soft voting.
    pub scores: Vec<f64>,
}

impl EnsemblePrediction {
    /// Prediction CSV: `sample_id,base_vote_fraction,soft_mean,soft_max,final_label`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_id,base_vote_fraction,soft_mean,soft_max,final_label\n");
        for i in 0..self.labels.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i, self.vote_fraction[i], self.soft_mean[i], self.soft_max[i], self.labels[i]
            ));
        }
        out
    }
}

/// Trains one base classifier per planned subset. Base k's training set is
/// all minority rows plus the subset's majority rows; its seed derives
/// from `(base_config.seed, k)`.
pub fn train_ensemble(
    dataset: &Dataset,
    plan: &SubsetPlan,
    base_config: &LogisticConfig,
    vote: VoteSpec,
) -> Result<EnsembleModel> {
    vote.validate()?;
    if plan.subsets.is_empty() {
        return Err(Error::param("plan", "no subsets"));
    }
    let n = dataset.n_samples();
    for subset in &plan.subsets {
        for &idx in subset {
            if idx >= n {
                return Err(Error::InvalidPlanIndex { index: idx, n_rows: n });
            }
            if dataset.label(idx) != 0 {
                return Err(Error::param(
                    "plan",
                    format!("row {idx} is not a majority row"),
                ));
            }
        }
    }
    let minority = dataset.indices_of(1);
    let results = indexed_map(plan.subsets.len(), |k| {
        let mut rows = minority.clone();
        rows.extend_from_slice(&plan.subsets[k]);
        let subset_data = dataset.select(&rows)?;
        let config = LogisticConfig {
            seed: derive_seed(base_config.seed, k as u64),
            ..*base_config
        };
        fit_logistic(&subset_data, &config)
    });
    let base_models = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EnsembleModel {
        base_models,
        vote,
        train_counts: class_counts(dataset),
    })
}

impl EnsembleModel {
    pub fn n_bases(&self) -> usize {
        self.base_models.len()
    }

    pub fn vote(&self) -> VoteSpec {
        self.vote
    }

    pub fn train_counts(&self) -> ClassCounts {
        self.train_counts
    }

    /// The hard-vote cutoff this model would apply, if it hard-votes.
    pub fn resolved_hard_threshold(&self) -> Result<Option<f64>> {
        match self.vote {
            VoteSpec::Hard(HardThreshold::Fixed(q)) => Ok(Some(q)),
            VoteSpec::Hard(HardThreshold::Adaptive) => {
                Ok(Some(adaptive_threshold(self.train_counts)?))
            }
            VoteSpec::Soft(_) => Ok(None),
        }
    }

    /// True when the hard threshold is so high that `K * (1 - V) < 1`,
    /// i.e. a positive prediction needs every base classifier to agree.
    pub fn requires_unanimity(&self) -> Result<bool> {
        match self.resolved_hard_threshold()? {
            Some(v) => Ok((self.base_models.len() as f64) * (1.0 - v) < 1.0),
            None => Ok(false),
        }
    }

    /// Runs every base classifier and combines votes and probabilities.
    pub fn predict_detail(&self, dataset: &Dataset) -> Result<EnsemblePrediction> {
        let base_probs = self
            .base_models
            .iter()
            .map(|m| m.predict_proba(dataset))
            .collect::<Result<Vec<_>>>()?;
        let base_labels: Vec<Vec<u8>> = base_probs
            .iter()
            .map(|probs| {
                probs
                    .iter()
                    .map(|&p| u8::from(p >= BASE_LABEL_THRESHOLD))
                    .collect()
            })
            .collect();
        let k = self.base_models.len() as f64;
        let vote_fraction: Vec<f64> = (0..dataset.n_samples())
            .map(|i| base_labels.iter().map(|row| row[i] as u32).sum::<u32>() as f64 / k)
            .collect();
        let soft_mean = soft_vote(&base_probs, SoftCombine::Mean)?;
        let soft_max = soft_vote(&base_probs, SoftCombine::Max)?;

        let (labels, scores) = match self.vote {
            VoteSpec::Hard(_) => {
                let threshold = self.resolved_hard_threshold()?.unwrap();
                let labels = hard_vote(&base_labels, threshold)?;
                (labels, vote_fraction.clone())
            }
            VoteSpec::Soft(combine) => {
                let combined = match combine {
                    SoftCombine::Mean => soft_mean.clone(),
                    SoftCombine::Max => soft_max.clone(),
                };
                let labels = crate::classifier::predict_labels(&combined, BASE_LABEL_THRESHOLD)?;
                (labels, combined)
            }
        };
        Ok(EnsemblePrediction {
            vote_fraction,
            soft_mean,
            soft_max,
            labels,
            scores,
        })
    }
}
