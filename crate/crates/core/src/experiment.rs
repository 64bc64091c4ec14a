//! Experiment harness: cross-validated method comparison, ratio sweeps,
//! and analytic curve tabulation, all emitting deterministic CSV.
//!
//! Balancing always happens inside cross-validation, on the training
//! split only: every resampled or synthetic training row derives from
//! training-fold rows, so validation data can never leak into training.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::balance::{oversample, plan_balanced_subsets, smote, undersample, SamplingMode, SmoteConfig};
use crate::classifier::{
    dummy_predict, fit_logistic, DummyKind, DummyStrategy, LogisticConfig,
    ProbabilisticClassifier,
};
use crate::data::{class_counts, generate_synthetic, stratified_kfold, Dataset, GeneratorConfig};
use crate::ensemble::{train_ensemble, VoteSpec};
use crate::error::{Error, Result};
use crate::exec::indexed_map;
use crate::metrics::{evaluate, MetricsReport};
use crate::ratio_law::{auprc_random, auprc_random_deriv, f1_random, f1_random_deriv};
use crate::rng::derive_seed;
use crate::stats::paired_ttest;

// Seed-stream tags for deriving independent child seeds per work item.
const TAG_CELL_GEN: u64 = 1 << 32;
const TAG_CELL_CV: u64 = 2 << 32;
const TAG_FOLD_BALANCE: u64 = 3 << 32;
const TAG_FOLD_MODEL: u64 = 4 << 32;
const TAG_FOLD_DUMMY: u64 = 5 << 32;
const TAG_FOLD_PLAN: u64 = 6 << 32;

/// Dataset treatment applied to each training split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Unbalanced,
    Undersample,
    Oversample,
    Smote,
    /// Balanced-subset bagging, majority rows sampled without replacement.
    Ensemble1,
    /// Balanced-subset bagging, majority rows sampled with replacement.
    Ensemble2,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Unbalanced,
        Method::Undersample,
        Method::Oversample,
        Method::Smote,
        Method::Ensemble1,
        Method::Ensemble2,
    ];

    fn is_ensemble(self) -> bool {
        matches!(self, Method::Ensemble1 | Method::Ensemble2)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Unbalanced => "unbalanced",
            Method::Undersample => "undersample",
            Method::Oversample => "oversample",
            Method::Smote => "smote",
            Method::Ensemble1 => "ensemble1",
            Method::Ensemble2 => "ensemble2",
        };
        f.write_str(s)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unbalanced" => Ok(Method::Unbalanced),
            "undersample" => Ok(Method::Undersample),
            "oversample" => Ok(Method::Oversample),
            "smote" => Ok(Method::Smote),
            "ensemble1" => Ok(Method::Ensemble1),
            "ensemble2" => Ok(Method::Ensemble2),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// Classifier family evaluated by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Model {
    LogReg,
    DummyStratified,
    DummyUniform,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Model::LogReg => "logreg",
            Model::DummyStratified => "dummy_stratified",
            Model::DummyUniform => "dummy_uniform",
        };
        f.write_str(s)
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logreg" => Ok(Model::LogReg),
            "dummy_stratified" => Ok(Model::DummyStratified),
            "dummy_uniform" => Ok(Model::DummyUniform),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

/// Harness task, named after the CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Sweep,
    Compare,
    Curves,
    FitLaw,
    Ttest,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Task::Sweep => "sweep",
            Task::Compare => "compare",
            Task::Curves => "curves",
            Task::FitLaw => "fit-law",
            Task::Ttest => "ttest",
        };
        f.write_str(s)
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(Task::Sweep),
            "compare" => Ok(Task::Compare),
            "curves" => Ok(Task::Curves),
            "fit-law" => Ok(Task::FitLaw),
            "ttest" => Ok(Task::Ttest),
            other => Err(Error::Config(format!("unknown task `{other}`"))),
        }
    }
}

/// Full experiment configuration. Every field maps one-to-one onto a
/// `key = value` line of the config file and onto a CLI flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub task: Option<Task>,
    pub r_grid: Vec<f64>,
    pub n_total: usize,
    pub dim: usize,
    pub separation: f64,
    pub seeds: Vec<u64>,
    pub cv_folds: usize,
    pub methods: Vec<Method>,
    pub models: Vec<Model>,
    pub vote: VoteSpec,
    pub theta: f64,
    pub smote_k: usize,
    pub output_path: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            task: None,
            r_grid: vec![0.1],
            n_total: 5000,
            dim: 8,
            separation: 1.0,
            seeds: vec![0],
            cv_folds: 10,
            methods: vec![Method::Unbalanced],
            models: vec![Model::LogReg],
            vote: VoteSpec::Hard(crate::ensemble::HardThreshold::Adaptive),
            theta: 0.05,
            smote_k: 5,
            output_path: None,
        }
    }
}

/// Parses a float list: either comma-separated values or a linspace
/// shorthand `lin:<start>:<stop>:<count>`.
pub fn parse_f64_list(value: &str) -> Result<Vec<f64>> {
    if let Some(spec) = value.strip_prefix("lin:") {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("bad linspace `{value}`, want lin:start:stop:count")));
        }
        let start: f64 = parts[0].parse().map_err(|_| Error::Config(format!("bad linspace start `{}`", parts[0])))?;
        let stop: f64 = parts[1].parse().map_err(|_| Error::Config(format!("bad linspace stop `{}`", parts[1])))?;
        let count: usize = parts[2].parse().map_err(|_| Error::Config(format!("bad linspace count `{}`", parts[2])))?;
        if count < 2 {
            return Err(Error::Config("linspace count must be >= 2".into()));
        }
        let step = (stop - start) / (count - 1) as f64;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    value
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{c}`")))
        })
        .collect()
}

fn parse_list<T: FromStr<Err = Error>>(value: &str) -> Result<Vec<T>> {
    value.split(',').map(|c| c.trim().parse::<T>()).collect()
}

impl ExperimentConfig {
    /// Applies one `key = value` assignment.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "task" => self.task = Some(value.parse()?),
            "r_grid" => self.r_grid = parse_f64_list(value)?,
            "n_total" => {
                self.n_total = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad n_total `{value}`")))?
            }
            "dim" => {
                self.dim = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad dim `{value}`")))?
            }
            "separation" => {
                self.separation = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad separation `{value}`")))?
            }
            "seeds" => {
                self.seeds = value
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<u64>()
                            .map_err(|_| Error::Config(format!("bad seed `{c}`")))
                    })
                    .collect::<Result<_>>()?
            }
            "cv_folds" => {
                self.cv_folds = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad cv_folds `{value}`")))?
            }
            "methods" => self.methods = parse_list(value)?,
            "models" => self.models = parse_list(value)?,
            "vote" => self.vote = value.parse()?,
            "theta" => {
                self.theta = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad theta `{value}`")))?
            }
            "smote_k" => {
                self.smote_k = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad smote_k `{value}`")))?
            }
            "output_path" => self.output_path = Some(value.to_string()),
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Parses a flat key-value config text: one `key = value` per line,
    /// `#` comments and blank lines ignored.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            config.apply_kv(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn from_kv_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_kv_text(&text)
    }

    fn validate_common(&self) -> Result<()> {
        if self.r_grid.is_empty() {
            return Err(Error::Config("r_grid must not be empty".into()));
        }
        if self.r_grid.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(Error::Config("every r in r_grid must lie in (0, 1]".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        if self.cv_folds < 2 {
            return Err(Error::Config("cv_folds must be >= 2".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("models must not be empty".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must not be empty".into()));
        }
        self.vote.validate()?;
        if self
            .methods
            .iter()
            .any(|m| m.is_ensemble())
            && self.models.iter().any(|m| *m != Model::LogReg)
        {
            return Err(Error::Config(
                "ensemble methods require the logreg model".into(),
            ));
        }
        Ok(())
    }

    fn harness_params(&self) -> HarnessParams {
        HarnessParams {
            vote: self.vote,
            theta: self.theta,
            smote_k: self.smote_k,
            base: LogisticConfig::default(),
        }
    }
}

/// Per-fold knobs shared by every method/model combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnessParams {
    pub vote: VoteSpec,
    pub theta: f64,
    pub smote_k: usize,
    pub base: LogisticConfig,
}

impl Default for HarnessParams {
    fn default() -> Self {
        HarnessParams {
            vote: VoteSpec::Hard(crate::ensemble::HardThreshold::Adaptive),
            theta: 0.05,
            smote_k: 5,
            base: LogisticConfig::default(),
        }
    }
}

/// One fold's evaluation: a report, or the reason the method could not
/// run on this fold (for example SMOTE with a single minority sample).
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub fold: usize,
    pub report: std::result::Result<MetricsReport, String>,
}

/// Which original-dataset rows fed each fold, for leakage auditing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldTrace {
    pub fold: usize,
    pub validation_indices: Vec<usize>,
    /// Rows the balanced training set was built from; always disjoint
    /// from `validation_indices`.
    pub training_sources: Vec<usize>,
}

/// Cross-validates one (method, model) combination. Per-fold method
/// failures are reported in the outcome rather than aborting the run.
pub fn cross_validate_detailed(
    dataset: &Dataset,
    method: Method,
    model: Model,
    params: &HarnessParams,
    k: usize,
    seed: u64,
) -> Result<(Vec<FoldOutcome>, Vec<FoldTrace>)> {
    if method.is_ensemble() && model != Model::LogReg {
        return Err(Error::Config("ensemble methods require the logreg model".into()));
    }
    let folds = stratified_kfold(dataset, k, seed)?;
    let per_fold = indexed_map(k, |f| {
        let validation_indices = folds.validation_indices(f);
        let training_indices = folds.training_indices(f);
        let outcome = run_fold(
            dataset,
            &training_indices,
            &validation_indices,
            method,
            model,
            params,
            seed,
            f,
        );
        (
            FoldOutcome { fold: f, report: outcome },
            FoldTrace {
                fold: f,
                validation_indices,
                training_sources: training_indices,
            },
        )
    });
    Ok(per_fold.into_iter().unzip())
}

/// As [`cross_validate_detailed`], but any per-fold failure becomes an
/// error and only the reports are returned.
pub fn cross_validate(
    dataset: &Dataset,
    method: Method,
    model: Model,
    params: &HarnessParams,
    k: usize,
    seed: u64,
) -> Result<Vec<MetricsReport>> {
    let (outcomes, _) = cross_validate_detailed(dataset, method, model, params, k, seed)?;
    outcomes
        .into_iter()
        .map(|o| o.report.map_err(Error::Config))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn run_fold(
    dataset: &Dataset,
    training_indices: &[usize],
    validation_indices: &[usize],
    method: Method,
    model: Model,
    params: &HarnessParams,
    seed: u64,
    fold: usize,
) -> std::result::Result<MetricsReport, String> {
    let fail = |e: Error| e.to_string();
    let train = dataset.select(training_indices).map_err(fail)?;
    let val = dataset.select(validation_indices).map_err(fail)?;
    let balance_seed = derive_seed(seed, TAG_FOLD_BALANCE + fold as u64);
    let model_seed = derive_seed(seed, TAG_FOLD_MODEL + fold as u64);

    let (pred_labels, scores) = match (method, model) {
        (Method::Ensemble1 | Method::Ensemble2, Model::LogReg) => {
            let mode = if method == Method::Ensemble1 {
                SamplingMode::WithoutReplacement
            } else {
                SamplingMode::WithReplacement
            };
            let plan_seed = derive_seed(seed, TAG_FOLD_PLAN + fold as u64);
            let plan =
                plan_balanced_subsets(&train, mode, params.theta, plan_seed).map_err(fail)?;
            let base = LogisticConfig { seed: model_seed, ..params.base };
            let ensemble = train_ensemble(&train, &plan, &base, params.vote).map_err(fail)?;
            let pred = ensemble.predict_detail(&val).map_err(fail)?;
            (pred.labels, pred.scores)
        }
        _ => {
            let balanced = match method {
                Method::Unbalanced => train,
                Method::Undersample => undersample(&train, balance_seed).map_err(fail)?,
                Method::Oversample => oversample(&train, balance_seed).map_err(fail)?,
                Method::Smote => {
                    let config = SmoteConfig { k_neighbors: params.smote_k, seed: balance_seed };
                    smote(&train, &config).map_err(fail)?.dataset
                }
                Method::Ensemble1 | Method::Ensemble2 => unreachable!(),
            };
            match model {
                Model::LogReg => {
                    let config = LogisticConfig { seed: model_seed, ..params.base };
                    let fitted = fit_logistic(&balanced, &config).map_err(fail)?;
                    let probs = fitted.predict_proba(&val).map_err(fail)?;
                    let labels =
                        crate::classifier::predict_labels(&probs, 0.5).map_err(fail)?;
                    (labels, probs)
                }
                Model::DummyStratified | Model::DummyUniform => {
                    let kind = if model == Model::DummyStratified {
                        DummyKind::Stratified
                    } else {
                        DummyKind::Uniform
                    };
                    let strategy = DummyStrategy {
                        kind,
                        seed: derive_seed(seed, TAG_FOLD_DUMMY + fold as u64),
                    };
                    let counts = class_counts(&balanced);
                    let out =
                        dummy_predict(&strategy, counts, val.n_samples()).map_err(fail)?;
                    (out.labels, out.scores)
                }
            }
        }
    };
    evaluate(val.labels(), &pred_labels, &scores).map_err(fail)
}

/// One output row of a sweep or comparison run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub task: Task,
    pub method: Method,
    pub model: Model,
    pub r: f64,
    pub seed: u64,
    pub fold: usize,
    pub metrics: Option<MetricsReport>,
}

pub const RESULT_CSV_HEADER: &str =
    "task,method,model,r,seed,fold,accuracy,precision,recall,fpr,f1,auroc,auprc";

/// Renders rows in their (already sorted) order.
pub fn result_rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(RESULT_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let metrics = match &row.metrics {
            Some(m) => m.to_csv_row(),
            None => ",,,,,,".to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.task, row.method, row.model, row.r, row.seed, row.fold, metrics
        ));
    }
    out
}

fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.method
            .cmp(&b.method)
            .then(a.model.cmp(&b.model))
            .then(a.r.partial_cmp(&b.r).unwrap())
            .then(a.seed.cmp(&b.seed))
            .then(a.fold.cmp(&b.fold))
    });
}

/// Sweep or comparison output: sorted rows plus any warnings (skipped
/// cells, flagged folds). Warnings go to the caller, not into the CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub warnings: Vec<String>,
}

/// Evaluates every (r, seed, model, method) combination on freshly
/// generated synthetic data. Cells whose ratio is unrealizable at the
/// configured size are skipped with a warning.
pub fn run_ratio_sweep(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate_common()?;
    let params = config.harness_params();
    let cells: Vec<(usize, u64)> = (0..config.r_grid.len())
        .flat_map(|r_idx| config.seeds.iter().map(move |&s| (r_idx, s)))
        .collect();

    let cell_outputs = indexed_map(cells.len(), |c| {
        let (r_idx, seed) = cells[c];
        run_cell(config, &params, Task::Sweep, r_idx, seed)
    });

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for out in cell_outputs {
        let out = out?;
        rows.extend(out.rows);
        warnings.extend(out.warnings);
    }
    sort_rows(&mut rows);
    Ok(RunOutput { rows, warnings })
}

fn run_cell(
    config: &ExperimentConfig,
    params: &HarnessParams,
    task: Task,
    r_idx: usize,
    seed: u64,
) -> Result<RunOutput> {
    let r = config.r_grid[r_idx];
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    let gen_config = GeneratorConfig {
        n_total: config.n_total,
        dim: config.dim,
        ratio: r,
        separation: config.separation,
        seed: derive_seed(seed, TAG_CELL_GEN + r_idx as u64),
    };
    let dataset = match generate_synthetic(&gen_config) {
        Ok(d) => d,
        Err(e @ Error::UnrealizableRatio { .. }) => {
            warnings.push(format!("skipping r={r} seed={seed}: {e}"));
            return Ok(RunOutput { rows, warnings });
        }
        Err(e) => return Err(e),
    };
    let cv_seed = derive_seed(seed, TAG_CELL_CV + r_idx as u64);
    for &model in &config.models {
        for &method in &config.methods {
            let (outcomes, _) =
                match cross_validate_detailed(&dataset, method, model, params, config.cv_folds, cv_seed)
                {
                    Ok(v) => v,
                    Err(e @ Error::InsufficientForFolds { .. }) => {
                        warnings.push(format!(
                            "skipping r={r} seed={seed} model={model} method={method}: {e}"
                        ));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
            for outcome in outcomes {
                let metrics = match outcome.report {
                    Ok(m) => Some(m),
                    Err(reason) => {
                        warnings.push(format!(
                            "flagged fold {} for r={r} seed={seed} model={model} method={method}: {reason}",
                            outcome.fold
                        ));
                        None
                    }
                };
                rows.push(ResultRow {
                    task,
                    method,
                    model,
                    r,
                    seed,
                    fold: outcome.fold,
                    metrics,
                });
            }
        }
    }
    Ok(RunOutput { rows, warnings })
}

/// One t-test row of the comparison report. `None` statistics mark tests
/// that were undefined (zero variance or incomplete metrics); they render
/// as `NA` in the CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TtestRow {
    pub comparison: String,
    pub metric: String,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
}

pub const TTEST_CSV_HEADER: &str = "comparison,metric,statistic,p_value";

pub fn ttest_rows_to_csv(rows: &[TtestRow]) -> String {
    let mut out = String::from(TTEST_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let fmt_opt = |v: Option<f64>| v.map_or("NA".to_string(), |x| x.to_string());
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.comparison,
            row.metric,
            fmt_opt(row.statistic),
            fmt_opt(row.p_value)
        ));
    }
    out
}

pub const METRIC_NAMES: [&str; 7] =
    ["accuracy", "precision", "recall", "fpr", "f1", "auroc", "auprc"];

/// Comparison output: per-fold rows plus paired t-tests between every
/// method pair on per-fold means (averaged over seeds and grid ratios).
#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutput {
    pub rows: Vec<ResultRow>,
    pub ttests: Vec<TtestRow>,
    pub warnings: Vec<String>,
}

/// Cross-validates every configured method on identical folds and runs
/// paired t-tests between every method pair.
pub fn run_balancing_comparison(config: &ExperimentConfig) -> Result<CompareOutput> {
    config.validate_common()?;
    if config.methods.len() < 2 {
        return Err(Error::Config("compare needs at least 2 methods".into()));
    }
    let params = config.harness_params();
    let cells: Vec<(usize, u64)> = (0..config.r_grid.len())
        .flat_map(|r_idx| config.seeds.iter().map(move |&s| (r_idx, s)))
        .collect();
    let cell_outputs = indexed_map(cells.len(), |c| {
        let (r_idx, seed) = cells[c];
        run_cell(config, &params, Task::Compare, r_idx, seed)
    });
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for out in cell_outputs {
        let out = out?;
        rows.extend(out.rows);
        warnings.extend(out.warnings);
    }
    sort_rows(&mut rows);

    let mut ttests = Vec::new();
    for &model in &config.models {
        for (i, &method_a) in config.methods.iter().enumerate() {
            for &method_b in &config.methods[i + 1..] {
                for metric in METRIC_NAMES {
                    let comparison = format!("{model}:{method_a}_vs_{method_b}");
                    let a = fold_means(&rows, model, method_a, metric, config.cv_folds);
                    let b = fold_means(&rows, model, method_b, metric, config.cv_folds);
                    let (statistic, p_value) = match (a, b) {
                        (Some(a), Some(b)) => match paired_ttest(&a, &b) {
                            Ok(t) => (Some(t.statistic), Some(t.p_value)),
                            Err(e) => {
                                warnings.push(format!("{comparison}/{metric}: {e}"));
                                (None, None)
                            }
                        },
                        _ => {
                            warnings.push(format!(
                                "{comparison}/{metric}: incomplete per-fold metrics"
                            ));
                            (None, None)
                        }
                    };
                    ttests.push(TtestRow {
                        comparison,
                        metric: metric.to_string(),
                        statistic,
                        p_value,
                    });
                }
            }
        }
    }
    Ok(CompareOutput { rows, ttests, warnings })
}

/// Mean metric per fold index across all (r, seed) runs; `None` if any
/// fold has no complete metrics.
fn fold_means(
    rows: &[ResultRow],
    model: Model,
    method: Method,
    metric: &str,
    cv_folds: usize,
) -> Option<Vec<f64>> {
    let mut sums = vec![0.0_f64; cv_folds];
    let mut counts = vec![0usize; cv_folds];
    for row in rows {
        if row.model != model || row.method != method {
            continue;
        }
        let m = row.metrics.as_ref()?;
        sums[row.fold] += m.get(metric).unwrap();
        counts[row.fold] += 1;
    }
    if counts.iter().any(|&c| c == 0) {
        return None;
    }
    Some(
        sums.iter()
            .zip(&counts)
            .map(|(&s, &c)| s / c as f64)
            .collect(),
    )
}

/// One row of the analytic curve table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub r: f64,
    pub f1_random: f64,
    pub auprc_random: f64,
    pub f1_deriv: f64,
    pub auprc_deriv: f64,
}

pub const CURVE_CSV_HEADER: &str = "r,f1_random,auprc_random,f1_deriv,auprc_deriv";

/// Tabulates the ideal-random-classifier curves over an r grid.
pub fn tabulate_curves(r_grid: &[f64]) -> Result<Vec<CurveRow>> {
    if r_grid.is_empty() {
        return Err(Error::Config("r_grid must not be empty".into()));
    }
    r_grid
        .iter()
        .map(|&r| {
            Ok(CurveRow {
                r,
                f1_random: f1_random(r)?,
                auprc_random: auprc_random(r)?,
                f1_deriv: f1_random_deriv(r)?,
                auprc_deriv: auprc_random_deriv(r)?,
            })
        })
        .collect()
}

pub fn curve_rows_to_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.r, row.f1_random, row.auprc_random, row.f1_deriv, row.auprc_deriv
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing_round_trip() {
        let text = "\
# comparison run
task = compare
r_grid = 0.1,0.25
n_total = 2000
dim = 4
separation = 1.5
seeds = 1,2,3
cv_folds = 5
methods = unbalanced,ensemble1
models = logreg
vote = soft-mean
theta = 0.1
smote_k = 3
output_path = out.csv
";
        let config = ExperimentConfig::from_kv_text(text).unwrap();
        assert_eq!(config.task, Some(Task::Compare));
        assert_eq!(config.r_grid, vec![0.1, 0.25]);
        assert_eq!(config.n_total, 2000);
        assert_eq!(config.seeds, vec![1, 2, 3]);
        assert_eq!(config.methods, vec![Method::Unbalanced, Method::Ensemble1]);
        assert_eq!(config.vote.to_string(), "soft-mean");
        assert_eq!(config.output_path.as_deref(), Some("out.csv"));
    }

    #[test]
    fn config_rejects_unknown_keys_and_values() {
        assert!(ExperimentConfig::from_kv_text("bogus = 1\n").is_err());
        assert!(ExperimentConfig::from_kv_text("methods = teleport\n").is_err());
        assert!(ExperimentConfig::from_kv_text("r_grid = lin:0:1\n").is_err());
    }

    #[test]
    fn linspace_shorthand() {
        let grid = parse_f64_list("lin:0.1:0.5:5").unwrap();
        assert_eq!(grid.len(), 5);
        assert!((grid[0] - 0.1).abs() < 1e-12);
        assert!((grid[4] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cross_validate_returns_k_reports_deterministically() {
        let d = generate_synthetic(&GeneratorConfig {
            n_total: 500,
            dim: 3,
            ratio: 0.25,
            separation: 1.5,
            seed: 1,
        })
        .unwrap();
        let params = HarnessParams {
            base: LogisticConfig { epochs: 60, ..Default::default() },
            ..Default::default()
        };
        let a = cross_validate(&d, Method::Unbalanced, Model::LogReg, &params, 5, 42).unwrap();
        assert_eq!(a.len(), 5);
        let b = cross_validate(&d, Method::Unbalanced, Model::LogReg, &params, 5, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validation_rows_never_feed_training() {
        let d = generate_synthetic(&GeneratorConfig {
            n_total: 300,
            dim: 2,
            ratio: 0.2,
            separation: 1.0,
            seed: 9,
        })
        .unwrap();
        let params = HarnessParams {
            base: LogisticConfig { epochs: 10, ..Default::default() },
            ..Default::default()
        };
        for method in [Method::Undersample, Method::Oversample, Method::Smote, Method::Ensemble1] {
            let (_, traces) =
                cross_validate_detailed(&d, method, Model::LogReg, &params, 4, 3).unwrap();
            for trace in traces {
                let val: std::collections::HashSet<_> =
                    trace.validation_indices.iter().collect();
                assert!(trace.training_sources.iter().all(|i| !val.contains(i)));
                assert_eq!(
                    trace.validation_indices.len() + trace.training_sources.len(),
                    d.n_samples()
                );
            }
        }
    }

    #[test]
    fn sweep_rows_are_sorted_and_complete() {
        let config = ExperimentConfig {
            r_grid: vec![0.5, 0.2],
            n_total: 400,
            dim: 2,
            separation: 1.0,
            seeds: vec![1, 0],
            cv_folds: 3,
            models: vec![Model::DummyUniform],
            ..Default::default()
        };
        let out = run_ratio_sweep(&config).unwrap();
        assert_eq!(out.rows.len(), 2 * 2 * 3);
        assert!(out.warnings.is_empty());
        let mut resorted = out.rows.clone();
        sort_rows(&mut resorted);
        assert_eq!(out.rows, resorted);
        assert!(out.rows.iter().all(|r| r.metrics.is_some()));
        // sorted: r ascending within (method, model), seeds ascending within r
        assert!(out.rows[0].r <= out.rows.last().unwrap().r);
    }

    #[test]
    fn sweep_skips_unrealizable_cells_with_warning() {
        let config = ExperimentConfig {
            r_grid: vec![0.001, 0.5],
            n_total: 100,
            dim: 2,
            cv_folds: 2,
            models: vec![Model::DummyUniform],
            ..Default::default()
        };
        let out = run_ratio_sweep(&config).unwrap();
        assert!(!out.warnings.is_empty());
        assert!(out.rows.iter().all(|row| row.r == 0.5));
    }

    #[test]
    fn compare_requires_two_methods() {
        let config = ExperimentConfig {
            methods: vec![Method::Unbalanced],
            ..Default::default()
        };
        assert!(matches!(
            run_balancing_comparison(&config),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn compare_produces_pairwise_ttests() {
        let config = ExperimentConfig {
            r_grid: vec![0.25],
            n_total: 400,
            dim: 2,
            separation: 1.5,
            seeds: vec![0, 1],
            cv_folds: 4,
            methods: vec![Method::Unbalanced, Method::Undersample, Method::Oversample],
            models: vec![Model::LogReg],
            ..Default::default()
        };
        let out = run_balancing_comparison(&config).unwrap();
        // 3 methods -> 3 pairs, 7 metrics each
        assert_eq!(out.ttests.len(), 3 * 7);
        assert_eq!(out.rows.len(), 3 * 2 * 4);
        let csv = ttest_rows_to_csv(&out.ttests);
        assert!(csv.starts_with(TTEST_CSV_HEADER));
    }

    #[test]
    fn ensemble_methods_reject_dummy_models() {
        let config = ExperimentConfig {
            methods: vec![Method::Unbalanced, Method::Ensemble1],
            models: vec![Model::DummyUniform],
            ..Default::default()
        };
        assert!(matches!(
            run_balancing_comparison(&config),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn curve_tabulation_matches_law_modules() {
        let rows = tabulate_curves(&[0.25, 0.5, 1.0]).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].f1_random, 0.5);
        assert_eq!(rows[2].auprc_random, 0.5);
        assert!(rows[0].f1_random < rows[1].f1_random);
        assert!(rows[0].auprc_random < rows[1].auprc_random);
        assert!(tabulate_curves(&[0.0]).is_err());
        assert!(tabulate_curves(&[]).is_err());
    }

    #[test]
    fn result_csv_layout() {
        let rows = vec![ResultRow {
            task: Task::Sweep,
            method: Method::Unbalanced,
            model: Model::DummyUniform,
            r: 0.5,
            seed: 7,
            fold: 0,
            metrics: None,
        }];
        let csv = result_rows_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(RESULT_CSV_HEADER));
        assert_eq!(lines.next(), Some("sweep,unbalanced,dummy_uniform,0.5,7,0,,,,,,,"));
    }
}
