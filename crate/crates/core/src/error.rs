//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A class has zero samples where both are required.
    #[error("degenerate class distribution: N1={n_minority}, N0={n_majority}")]
    DegenerateClasses {
        n_minority: usize,
        n_majority: usize,
    },

    /// The minority class (label 1) outnumbers the majority class (label 0).
    #[error("minority label convention violated: N1={n_minority} > N0={n_majority}")]
    MinorityConvention {
        n_minority: usize,
        n_majority: usize,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("ratio unrealizable at this n: n_total={n_total}, ratio={ratio}")]
    UnrealizableRatio { n_total: usize, ratio: f64 },

    #[error("insufficient samples for stratified folds: class with {class_size} samples, k={k}")]
    InsufficientForFolds { class_size: usize, k: usize },

    #[error("SMOTE requires >= 2 minority samples, got {0}")]
    SmoteTooFewMinority(usize),

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("invalid plan index {index} for dataset of {n_rows} rows")]
    InvalidPlanIndex { index: usize, n_rows: usize },

    #[error("{metric} undefined: {reason}")]
    UndefinedMetric {
        metric: &'static str,
        reason: String,
    },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("test undefined: {0}")]
    UndefinedTest(String),

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
