//! Imbalanced binary classification toolkit.
//!
//! Everything revolves around the minority-to-majority ratio `r = N1/N0` of a
//! binary dataset. The crate provides:
//!
//! - dataset handling: synthetic Gaussian generators, CSV I/O, class counts,
//!   and stratified k-fold splitting ([`data`], [`io`]);
//! - balancing transforms: undersampling, oversampling, SMOTE, and balanced
//!   majority-subset plans for bagging ([`balance`]);
//! - classifiers: a from-scratch logistic regression plus stratified/uniform
//!   dummy baselines ([`classifier`]);
//! - bagging ensembles with hard (fixed or adaptive threshold) and soft
//!   (mean/max) voting ([`ensemble`]);
//! - evaluation: confusion counts, point metrics, AUROC, and AUPRC with
//!   strict tie handling ([`metrics`]);
//! - the analytic ratio-law curves `F1 = 2r/(3r+1)` and `AUPRC = r/(1+r)`
//!   for an ideal random classifier, their derivatives, small-r error bounds,
//!   and through-origin fits ([`ratio_law`]);
//! - statistical tests: Pearson correlation, paired and Welch t-tests, built
//!   on an in-crate incomplete beta function ([`stats`]);
//! - an experiment harness for ratio sweeps, cross-validated method
//!   comparison, and curve tabulation ([`experiment`]).
//!
//! All stochastic operations take explicit 64-bit seeds and are driven by a
//! single fixed generator (ChaCha8); see [`rng`]. With the default `parallel`
//! feature, data-parallel loops run on rayon while producing bit-identical
//! results to the sequential fallback (`--no-default-features`).

pub mod balance;
pub mod classifier;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod io;
pub mod metrics;
pub mod ratio_law;
pub mod rng;
pub mod stats;

pub(crate) mod exec;

pub use error::{Error, Result};
