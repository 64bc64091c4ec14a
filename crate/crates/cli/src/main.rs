//! `imbal` — imbalanced-classification experiments from the command line.
//!
//! Every stochastic subcommand takes an explicit seed and produces
//! byte-identical output across runs. Exit codes: 0 success, 1 config
//! error, 2 data error, 3 numeric failure; warnings go to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use imbal_core::balance::{oversample, plan_balanced_subsets, smote, undersample, SamplingMode, SmoteConfig};
use imbal_core::classifier::{fit_logistic, LogisticConfig, LogisticModel, ProbabilisticClassifier};
use imbal_core::data::{generate_synthetic, GeneratorConfig};
use imbal_core::ensemble::{train_ensemble, VoteSpec};
use imbal_core::error::Error;
use imbal_core::experiment::{
    curve_rows_to_csv, parse_f64_list, result_rows_to_csv, run_balancing_comparison,
    run_ratio_sweep, tabulate_curves, ttest_rows_to_csv, ExperimentConfig, Task,
};
use imbal_core::fixtures;
use imbal_core::io::{load_csv, save_csv};
use imbal_core::metrics::{evaluate, MetricsReport};
use imbal_core::ratio_law::{fit_ols, fit_ratio_law};
use imbal_core::stats::{paired_ttest, pooled_ttest, welch_ttest};
use imbal_core::Result;

#[derive(Parser)]
#[command(name = "imbal", version, about = "Imbalanced-classification toolkit and ratio-law experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic two-Gaussian binary dataset as CSV.
    Gen(GenArgs),
    /// Balance a dataset by undersampling, oversampling, or SMOTE.
    Balance(BalanceArgs),
    /// Fit a logistic regression model and save it as text.
    Train(TrainArgs),
    /// Train a balanced-subset bagging ensemble and emit its predictions.
    Ensemble(EnsembleArgs),
    /// Evaluate a saved model on a labeled dataset.
    Eval(EvalArgs),
    /// Sweep the imbalance ratio on synthetic data with cross-validation.
    Sweep(ExperimentArgs),
    /// Compare balancing methods on shared folds, with paired t-tests.
    Compare(ExperimentArgs),
    /// Tabulate the analytic random-classifier curves over an r grid.
    Curves(CurvesArgs),
    /// Fit the linear law metric = coefficient * r to (r, metric) points.
    FitLaw(FitLawArgs),
    /// Run a t-test between metric columns of two CSV files.
    Ttest(TtestArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n_total: usize,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    #[arg(long)]
    ratio: f64,
    #[arg(long, default_value_t = 1.0)]
    separation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output_path: PathBuf,
}

#[derive(Args)]
struct BalanceArgs {
    #[arg(long)]
    method: String,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output_path: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    smote_k: usize,
    /// Where to write SMOTE parent provenance CSV.
    #[arg(long)]
    provenance_path: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    model_path: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    l2_penalty: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EnsembleArgs {
    #[arg(long)]
    input: PathBuf,
    /// Dataset to predict on; defaults to the training input.
    #[arg(long)]
    eval: Option<PathBuf>,
    /// without-replacement (ensemble1) or with-replacement (ensemble2).
    #[arg(long, default_value = "without-replacement")]
    mode: String,
    #[arg(long, default_value_t = 0.05)]
    theta: f64,
    #[arg(long, default_value = "hard-adaptive")]
    vote: String,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    l2_penalty: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    plan_path: Option<PathBuf>,
    #[arg(long)]
    pred_path: Option<PathBuf>,
    /// Where to write the metrics of the predictions against eval labels.
    #[arg(long)]
    metrics_path: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long)]
    output_path: Option<PathBuf>,
}

/// Flags mirror the config-file keys one-to-one and override them.
#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    r_grid: Option<String>,
    #[arg(long)]
    n_total: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    separation: Option<f64>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    cv_folds: Option<usize>,
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    models: Option<String>,
    #[arg(long)]
    vote: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    smote_k: Option<usize>,
    #[arg(long)]
    output_path: Option<PathBuf>,
    /// Where compare writes its paired t-test table.
    #[arg(long)]
    ttest_path: Option<PathBuf>,
}

#[derive(Args)]
struct CurvesArgs {
    /// Comma-separated r values or lin:<start>:<stop>:<count>.
    #[arg(long)]
    r_grid: String,
    #[arg(long)]
    output_path: Option<PathBuf>,
}

#[derive(Args)]
struct FitLawArgs {
    /// CSV with an `r` column and the metric column to fit.
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Use the bundled ten-task benchmark table instead of a file.
    #[arg(long)]
    fixture: bool,
    #[arg(long, default_value = "f1")]
    metric: String,
    #[arg(long)]
    output_path: Option<PathBuf>,
}

#[derive(Args)]
struct TtestArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Metric column to extract from both files.
    #[arg(long)]
    column: String,
    /// paired, welch, or pooled.
    #[arg(long, default_value = "paired")]
    kind: String,
    #[arg(long)]
    output_path: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameter { .. } => 1,
        Error::UndefinedMetric { .. }
        | Error::UndefinedCorrelation(_)
        | Error::UndefinedTest(_) => 3,
        _ => 2,
    }
}

fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(args) => {
            let dataset = generate_synthetic(&GeneratorConfig {
                n_total: args.n_total,
                dim: args.dim,
                ratio: args.ratio,
                separation: args.separation,
                seed: args.seed,
            })?;
            save_csv(&dataset, &args.output_path)
        }
        Command::Balance(args) => {
            let dataset = load_csv(&args.input)?;
            match args.method.as_str() {
                "undersample" => save_csv(&undersample(&dataset, args.seed)?, &args.output_path),
                "oversample" => save_csv(&oversample(&dataset, args.seed)?, &args.output_path),
                "smote" => {
                    let out = smote(
                        &dataset,
                        &SmoteConfig { k_neighbors: args.smote_k, seed: args.seed },
                    )?;
                    if out.effective_k < args.smote_k {
                        eprintln!(
                            "warning: smote k_neighbors clamped from {} to {}",
                            args.smote_k, out.effective_k
                        );
                    }
                    if let Some(p) = &args.provenance_path {
                        fs::write(p, out.provenance_csv())?;
                    }
                    save_csv(&out.dataset, &args.output_path)
                }
                other => Err(Error::Config(format!(
                    "unknown balance method `{other}` (undersample, oversample, smote)"
                ))),
            }
        }
        Command::Train(args) => {
            let dataset = load_csv(&args.input)?;
            let model = fit_logistic(
                &dataset,
                &LogisticConfig {
                    learning_rate: args.learning_rate,
                    epochs: args.epochs,
                    l2_penalty: args.l2_penalty,
                    seed: args.seed,
                },
            )?;
            fs::write(&args.model_path, model.to_text())?;
            Ok(())
        }
        Command::Ensemble(args) => {
            let mode = match args.mode.as_str() {
                "without-replacement" => SamplingMode::WithoutReplacement,
                "with-replacement" => SamplingMode::WithReplacement,
                other => {
                    return Err(Error::Config(format!(
                        "unknown mode `{other}` (without-replacement, with-replacement)"
                    )))
                }
            };
            let vote: VoteSpec = args.vote.parse()?;
            let dataset = load_csv(&args.input)?;
            let plan = plan_balanced_subsets(&dataset, mode, args.theta, args.seed)?;
            let base = LogisticConfig {
                learning_rate: args.learning_rate,
                epochs: args.epochs,
                l2_penalty: args.l2_penalty,
                seed: args.seed,
            };
            let ensemble = train_ensemble(&dataset, &plan, &base, vote)?;
            if ensemble.requires_unanimity()? {
                let v = ensemble.resolved_hard_threshold()?.unwrap();
                eprintln!(
                    "warning: hard-vote threshold {v} with K={} bases requires a unanimous \
                     positive vote (K*(1-V) < 1)",
                    ensemble.n_bases()
                );
            }
            if let Some(p) = &args.plan_path {
                fs::write(p, plan.to_csv())?;
            }
            let eval_data = match &args.eval {
                Some(p) => load_csv(p)?,
                None => dataset,
            };
            let pred = ensemble.predict_detail(&eval_data)?;
            if let Some(p) = &args.pred_path {
                fs::write(p, pred.to_csv())?;
            }
            if let Some(p) = &args.metrics_path {
                let report = evaluate(eval_data.labels(), &pred.labels, &pred.scores)?;
                fs::write(p, metrics_csv(&report))?;
            }
            Ok(())
        }
        Command::Eval(args) => {
            let model = LogisticModel::from_text(&fs::read_to_string(&args.model)?)?;
            let dataset = load_csv(&args.data)?;
            let probs = model.predict_proba(&dataset)?;
            let labels = imbal_core::classifier::predict_labels(&probs, args.threshold)?;
            let report = evaluate(dataset.labels(), &labels, &probs)?;
            emit(args.output_path.as_deref(), &metrics_csv(&report))
        }
        Command::Sweep(args) => {
            let config = build_experiment_config(&args, Task::Sweep)?;
            let out = run_ratio_sweep(&config)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            emit(
                resolved_output(&args, &config).as_deref(),
                &result_rows_to_csv(&out.rows),
            )
        }
        Command::Compare(args) => {
            let config = build_experiment_config(&args, Task::Compare)?;
            let out = run_balancing_comparison(&config)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            emit(
                resolved_output(&args, &config).as_deref(),
                &result_rows_to_csv(&out.rows),
            )?;
            emit(args.ttest_path.as_deref(), &ttest_rows_to_csv(&out.ttests))
        }
        Command::Curves(args) => {
            let grid = parse_f64_list(&args.r_grid)?;
            let rows = tabulate_curves(&grid)?;
            emit(args.output_path.as_deref(), &curve_rows_to_csv(&rows))
        }
        Command::FitLaw(args) => {
            let points = if args.fixture {
                match args.metric.as_str() {
                    "f1" => fixtures::benchmark_f1_points(),
                    "auprc" => fixtures::benchmark_auprc_points(),
                    other => {
                        return Err(Error::Config(format!(
                            "fixture provides metrics f1 and auprc, not `{other}`"
                        )))
                    }
                }
            } else {
                let input = args.input.as_ref().ok_or_else(|| {
                    Error::Config("fit-law needs --input or --fixture".into())
                })?;
                let rs = read_column(input, "r")?;
                let ms = read_column(input, &args.metric)?;
                rs.into_iter().zip(ms).collect()
            };
            let law = fit_ratio_law(&points)?;
            let ols = fit_ols(&points)?;
            let mut csv = String::from("metric,fit,coefficient,intercept,pearson_r,p_value,n_points\n");
            csv.push_str(&format!(
                "{},through_origin,{},0,{},{},{}\n",
                args.metric, law.coefficient, law.pearson_r, law.p_value, law.n_points
            ));
            csv.push_str(&format!(
                "{},ols_diagnostic,{},{},{},{},{}\n",
                args.metric, ols.slope, ols.intercept, law.pearson_r, law.p_value, law.n_points
            ));
            emit(args.output_path.as_deref(), &csv)
        }
        Command::Ttest(args) => {
            let a = read_column(&args.a, &args.column)?;
            let b = read_column(&args.b, &args.column)?;
            let result = match args.kind.as_str() {
                "paired" => paired_ttest(&a, &b)?,
                "welch" => welch_ttest(&a, &b)?,
                "pooled" => pooled_ttest(&a, &b)?,
                other => {
                    return Err(Error::Config(format!(
                        "unknown test kind `{other}` (paired, welch, pooled)"
                    )))
                }
            };
            let comparison = format!("{}_vs_{}", file_stem(&args.a), file_stem(&args.b));
            let csv = format!(
                "comparison,metric,statistic,p_value\n{},{},{},{}\n",
                comparison, args.column, result.statistic, result.p_value
            );
            emit(args.output_path.as_deref(), &csv)
        }
    }
}

fn metrics_csv(report: &MetricsReport) -> String {
    format!("{}\n{}\n", MetricsReport::CSV_HEADER, report.to_csv_row())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".to_string())
}

/// Config file first, then every present flag overrides its key.
fn build_experiment_config(args: &ExperimentArgs, task: Task) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_kv_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(declared) = config.task {
        if declared != task {
            return Err(Error::Config(format!(
                "config declares task `{declared}` but the `{task}` subcommand was invoked"
            )));
        }
    }
    config.task = Some(task);
    if let Some(v) = &args.r_grid {
        config.apply_kv("r_grid", v)?;
    }
    if let Some(v) = args.n_total {
        config.apply_kv("n_total", &v.to_string())?;
    }
    if let Some(v) = args.dim {
        config.apply_kv("dim", &v.to_string())?;
    }
    if let Some(v) = args.separation {
        config.apply_kv("separation", &v.to_string())?;
    }
    if let Some(v) = &args.seeds {
        config.apply_kv("seeds", v)?;
    }
    if let Some(v) = args.cv_folds {
        config.apply_kv("cv_folds", &v.to_string())?;
    }
    if let Some(v) = &args.methods {
        config.apply_kv("methods", v)?;
    }
    if let Some(v) = &args.models {
        config.apply_kv("models", v)?;
    }
    if let Some(v) = &args.vote {
        config.apply_kv("vote", v)?;
    }
    if let Some(v) = args.theta {
        config.apply_kv("theta", &v.to_string())?;
    }
    if let Some(v) = args.smote_k {
        config.apply_kv("smote_k", &v.to_string())?;
    }
    if let Some(v) = &args.output_path {
        config.apply_kv("output_path", &v.to_string_lossy())?;
    }
    Ok(config)
}

fn resolved_output(args: &ExperimentArgs, config: &ExperimentConfig) -> Option<PathBuf> {
    args.output_path
        .clone()
        .or_else(|| config.output_path.as_ref().map(PathBuf::from))
}

/// Reads one named numeric column from a headed CSV; blank cells are
/// skipped (they mark flagged rows).
fn read_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        line: 1,
        message: "empty file".into(),
    })?;
    let idx = header
        .split(',')
        .position(|c| c.trim() == column)
        .ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("missing column `{column}`"),
        })?;
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cell = line.split(',').nth(idx).unwrap_or("");
        if cell.is_empty() {
            continue;
        }
        let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            line: i + 2,
            message: format!("bad number `{cell}` in column `{column}`"),
        })?;
        values.push(v);
    }
    Ok(values)
}
