//! Command-line interface for the `tadeval` binary.
//!
//! Every subcommand reads its settings from three layers, highest precedence
//! first: explicit command-line flags, then the TOML file passed via
//! `--config`, then built-in defaults.  The config file mirrors the flags of
//! each subcommand: either a `[subcommand]` table per command (keys are the
//! flag names with `-` replaced by `_`) or, when no known section name is
//! present, a flat table applied to whichever subcommand runs.
//!
//! Exit codes: `0` success, `1` usage error (bad or missing flags), `2` data
//! error (unreadable files, malformed values, infeasible parameters).
//!
//! `TADEVAL_THREADS` caps the rayon thread pool; results are identical for
//! any thread count.

use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use tadeval::{
    build_report, case1_random_scores, case2_input_norm_scores, case3_untrained_model_scores,
    correlate, dataset_stats, default_delta_grid, default_weight_sigma, evaluate_with_segments,
    expected_f1_pa_curve_form, expected_precision_pa_form, expected_recall_pa, format_sig9,
    k_sweep, load_labels, load_scores, load_series, monte_carlo_pa, roc_pr, save_labels,
    save_scores, save_series, sweep_best_f1, sweep_best_f1_naive, write_text_atomic, Alignment,
    AnalyticParams, BaseSignal, Error, InjectionKind, InjectionSpec, LabelSeries,
    NormalizationSpec, PrecisionForm, ProtocolConfig, RandomModelConfig, ReportInputs, ScoreForm,
    ScoreSeries, SegmentLayout, SegmentSet, SweepResult, SynthSpec, ThresholdCandidates,
    WindowSpec, DEFAULT_HIDDEN_SIZE, DEFAULT_TAU,
};

const ENV_THREADS: &str = "TADEVAL_THREADS";
const DEFAULT_REPEATS: usize = 5;
const DEFAULT_TRIALS: usize = 10_000;

// ---------------------------------------------------------------------------
// Error handling: usage errors exit 1, data errors exit 2.
// ---------------------------------------------------------------------------

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Data(err)
    }
}

type CResult<T> = Result<T, CliError>;

fn require<T>(value: Option<T>, flag: &str) -> CResult<T> {
    value.ok_or_else(|| {
        CliError::Usage(format!(
            "missing required --{flag} (flag or config key `{}`)",
            flag.replace('-', "_")
        ))
    })
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Entry point used by `main`; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            eprintln!("run `{} help` for details", Cli::command().get_name());
            1
        }
        Err(CliError::Data(err)) => {
            eprintln!("error: {err}");
            2
        }
    }
}

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "tadeval",
    version,
    about = "Evaluation toolkit for time-series anomaly detection: point-wise, \
             point-adjusted, and PA%K protocols, threshold sweeps, ROC/PR, \
             trivial baselines, closed-form and Monte Carlo analysis."
)]
struct Cli {
    /// TOML config file mirroring the flags of the chosen subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate scores against labels at a fixed threshold.
    Eval(EvalArgs),
    /// Sweep thresholds and report the best F1.
    Sweep(SweepArgs),
    /// Sweep the PA%K parameter K at a fixed threshold.
    Ksweep(KsweepArgs),
    /// Compute ROC and precision-recall curves with AUROC/AUPR.
    Roc(RocArgs),
    /// Emit trivial baseline scores (case1 random, case2 input norm,
    /// case3 untrained model).
    Baseline(BaselineArgs),
    /// Closed-form expected precision/recall/F1 under uniform random scores
    /// with point adjustment.
    Analytic(AnalyticArgs),
    /// Monte Carlo simulation of random scoring, cross-checked against the
    /// closed forms.
    Simulate(SimulateArgs),
    /// Generate a synthetic train/test dataset with injected anomalies.
    Synth(SynthArgs),
    /// Summarize a label file (length, segments, anomaly rate).
    Stats(StatsArgs),
    /// Pearson and Kendall correlation between two value columns.
    Correlate(CorrelateArgs),
    /// Full comparison report: baselines vs. method scores, Markdown + CSV.
    Report(ReportArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ProtocolArg {
    /// Point-wise: predictions are compared sample by sample.
    Point,
    /// Point adjustment: one hit marks a whole true segment detected.
    Pa,
    /// PA%K: a segment counts only if more than K percent of it is hit.
    Pak,
}

#[derive(Copy, Clone, Debug, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum NormArg {
    Minmax,
    Zscore,
    None,
}

#[derive(Copy, Clone, Debug, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FormArg {
    /// Scaled L2 norm of the normalized window.
    L2,
    /// Mean of squared entries of the normalized window.
    Mse,
}

#[derive(Copy, Clone, Debug, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AlignArg {
    Last,
    First,
}

#[derive(Copy, Clone, Debug, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CaseArg {
    Case1,
    Case2,
    Case3,
}

#[derive(Copy, Clone, Debug, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BaseArg {
    Sine,
    Walk,
}

#[derive(Copy, Clone, Debug, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PrecisionFormArg {
    Bayes,
    Alternative,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvalArgs {
    /// Anomaly score file (single column, optional header).
    #[arg(long, value_name = "FILE")]
    scores: Option<PathBuf>,
    /// Binary label file (single column of 0/1).
    #[arg(long, value_name = "FILE")]
    labels: Option<PathBuf>,
    /// Evaluation protocol.
    #[arg(long, value_enum)]
    protocol: Option<ProtocolArg>,
    /// K percentage in [0, 100] for the pak protocol.
    #[arg(long)]
    k: Option<f64>,
    /// Decision threshold; predictions are `score > delta`.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepArgs {
    #[arg(long, value_name = "FILE")]
    scores: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    labels: Option<PathBuf>,
    #[arg(long, value_enum)]
    protocol: Option<ProtocolArg>,
    #[arg(long)]
    k: Option<f64>,
    /// Use a quantile grid with this many candidates instead of every
    /// unique score.
    #[arg(long, value_name = "N")]
    quantiles: Option<usize>,
    /// Explicit comma-separated threshold list (overrides --quantiles).
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    thresholds: Option<String>,
    /// Cross-check with the reference per-threshold implementation.
    #[arg(long)]
    naive: Option<bool>,
    /// Write the full threshold/precision/recall/F1 curve as CSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct KsweepArgs {
    #[arg(long, value_name = "FILE")]
    scores: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    labels: Option<PathBuf>,
    /// Fixed threshold; defaults to the best point-wise F1 threshold.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// K grid as `start:end:step` or a comma-separated list (percent).
    #[arg(long, value_name = "GRID")]
    k: Option<String>,
    /// Write the K/F1 curve as CSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RocArgs {
    #[arg(long, value_name = "FILE")]
    scores: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    labels: Option<PathBuf>,
    /// Write the ROC curve (fpr,tpr) as CSV.
    #[arg(long, value_name = "FILE")]
    out_roc: Option<PathBuf>,
    /// Write the PR curve (recall,precision) as CSV.
    #[arg(long, value_name = "FILE")]
    out_pr: Option<PathBuf>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaselineArgs {
    /// Which trivial baseline to emit.
    #[arg(long, value_enum)]
    case: Option<CaseArg>,
    /// Series to score (cases 2 and 3); CSV with one column per channel.
    #[arg(long, value_name = "FILE")]
    series: Option<PathBuf>,
    /// Reference series for normalization statistics (defaults to --series).
    #[arg(long, value_name = "FILE")]
    train: Option<PathBuf>,
    /// Output length for case1 (otherwise taken from --series or --labels).
    #[arg(long)]
    length: Option<usize>,
    /// Optional labels; when present, best point-wise and point-adjusted F1
    /// are reported (mean +/- std over repeats for randomized cases).
    #[arg(long, value_name = "FILE")]
    labels: Option<PathBuf>,
    /// Sliding-window length.
    #[arg(long)]
    tau: Option<usize>,
    /// Which end of the window a score is aligned to.
    #[arg(long, value_enum)]
    alignment: Option<AlignArg>,
    /// Per-channel normalization fitted on the reference series.
    #[arg(long, value_enum)]
    norm: Option<NormArg>,
    /// Score functional applied to each window.
    #[arg(long, value_enum)]
    form: Option<FormArg>,
    /// Hidden size of the untrained case3 model.
    #[arg(long)]
    hidden: Option<usize>,
    /// Weight standard deviation of the untrained case3 model.
    #[arg(long)]
    sigma: Option<f64>,
    /// Base RNG seed for randomized cases.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeds (seed, seed+1, ...) for randomized cases.
    #[arg(long)]
    repeats: Option<usize>,
    /// Score output file; repeats > 1 appends `-seedN` before the extension.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyticArgs {
    /// Anomaly rate gamma in (0, 1).
    #[arg(long)]
    gamma: Option<f64>,
    /// True segment length L (contiguous anomaly length).
    #[arg(long = "segment-length", alias = "L", value_name = "L")]
    segment_length: Option<usize>,
    /// Evaluate the closed forms at this single delta-prime in [0, 1].
    #[arg(long)]
    delta: Option<f64>,
    /// Delta-prime grid as `start:end:step` or a comma-separated list.
    #[arg(long, value_name = "GRID")]
    grid: Option<String>,
    /// Precision denominator: `bayes` (consistent form) or `alternative`.
    #[arg(long, value_enum)]
    precision_form: Option<PrecisionFormArg>,
    /// Write the delta/precision/recall/F1 curve as CSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateArgs {
    /// Anomaly rate gamma in (0, 1).
    #[arg(long)]
    gamma: Option<f64>,
    /// Segment length for the single-segment layout.
    #[arg(long = "segment-length", alias = "L", value_name = "L")]
    segment_length: Option<usize>,
    /// Probability that a uniform random score is NOT flagged (delta-prime).
    #[arg(long)]
    delta: Option<f64>,
    /// Number of Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Master RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation protocol for the simulated predictions.
    #[arg(long, value_enum)]
    protocol: Option<ProtocolArg>,
    /// K percentage for the pak protocol.
    #[arg(long)]
    k: Option<f64>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthArgs {
    /// Length of each half (train and test) in samples.
    #[arg(long)]
    t_len: Option<usize>,
    /// Number of channels.
    #[arg(long)]
    channels: Option<usize>,
    /// Base signal family.
    #[arg(long, value_enum)]
    base: Option<BaseArg>,
    /// Additive Gaussian noise standard deviation.
    #[arg(long)]
    noise_std: Option<f64>,
    /// Master RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Injection spec `kind:start:end:channels:magnitude`, repeatable
    /// (e.g. `point:100:140:0,1:8`); start/end index the test half.
    #[arg(long, value_name = "SPEC")]
    inject: Option<Vec<String>>,
    /// Output directory for train.csv, test.csv, labels.csv.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatsArgs {
    #[arg(long, value_name = "FILE")]
    labels: Option<PathBuf>,
    /// Write the summary as a one-row CSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorrelateArgs {
    /// First value column.
    #[arg(long, value_name = "FILE")]
    xs: Option<PathBuf>,
    /// Second value column.
    #[arg(long, value_name = "FILE")]
    ys: Option<PathBuf>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportArgs {
    /// Test series to score (CSV, one column per channel).
    #[arg(long, value_name = "FILE")]
    test: Option<PathBuf>,
    /// Training series for normalization statistics.
    #[arg(long, value_name = "FILE")]
    train: Option<PathBuf>,
    /// Labels for the test series.
    #[arg(long, value_name = "FILE")]
    labels: Option<PathBuf>,
    /// Method score file as `name=path`, repeatable.
    #[arg(long, value_name = "NAME=FILE")]
    method: Option<Vec<String>>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long, value_enum)]
    alignment: Option<AlignArg>,
    #[arg(long, value_enum)]
    norm: Option<NormArg>,
    #[arg(long, value_enum)]
    form: Option<FormArg>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Seeds per randomized baseline (mean +/- std is reported).
    #[arg(long)]
    repeats: Option<usize>,
    /// K grid for the PA%K AUC column (`start:end:step` or list).
    #[arg(long, value_name = "GRID")]
    k: Option<String>,
    /// Threshold candidates: quantile grid size (default: all unique scores).
    #[arg(long, value_name = "N")]
    quantiles: Option<usize>,
    /// Markdown output file.
    #[arg(long, value_name = "FILE")]
    out_md: Option<PathBuf>,
    /// CSV output file.
    #[arg(long, value_name = "FILE")]
    out_csv: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Config loading and merging
// ---------------------------------------------------------------------------

const SECTION_NAMES: [&str; 11] = [
    "eval",
    "sweep",
    "ksweep",
    "roc",
    "baseline",
    "analytic",
    "simulate",
    "synth",
    "stats",
    "correlate",
    "report",
];

fn load_config_section<T>(config: Option<&Path>, section: &str) -> CResult<T>
where
    T: serde::de::DeserializeOwned + Default,
{
    let Some(path) = config else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let table: toml::Table = text.parse().map_err(|err: toml::de::Error| {
        let line = err
            .span()
            .map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        Error::Parse {
            path: path.to_path_buf(),
            line,
            message: err.message().to_string(),
        }
    })?;
    let has_sections = SECTION_NAMES.iter().any(|name| table.contains_key(*name));
    let value = if has_sections {
        match table.get(section) {
            Some(v) => v.clone(),
            None => return Ok(T::default()),
        }
    } else {
        toml::Value::Table(table)
    };
    value.try_into().map_err(|err: toml::de::Error| {
        CliError::Data(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: format!("[{section}]: {}", err.message()),
        })
    })
}

macro_rules! overlay {
    ($cli:expr, $cfg:expr; $($field:ident),+ $(,)?) => {{
        let mut cli = $cli;
        let cfg = $cfg;
        $( if cli.$field.is_none() { cli.$field = cfg.$field; } )+
        cli
    }};
}

// ---------------------------------------------------------------------------
// Shared small helpers
// ---------------------------------------------------------------------------

fn configure_threads() -> CResult<()> {
    match std::env::var(ENV_THREADS) {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => Err(CliError::Data(Error::invalid_param(
            ENV_THREADS,
            "value is not valid unicode",
        ))),
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| {
                Error::invalid_param(
                    ENV_THREADS,
                    format!("expected a positive integer, got {raw:?}"),
                )
            })?;
            if n == 0 {
                return Err(CliError::Data(Error::invalid_param(
                    ENV_THREADS,
                    "thread count must be at least 1",
                )));
            }
            // Ignore AlreadyInitialized: tests may call `run` repeatedly.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
            Ok(())
        }
    }
}

fn protocol_config(protocol: Option<ProtocolArg>, k: Option<f64>) -> CResult<ProtocolConfig> {
    match protocol.unwrap_or(ProtocolArg::Point) {
        ProtocolArg::Point => Ok(ProtocolConfig::point()),
        ProtocolArg::Pa => Ok(ProtocolConfig::point_adjust()),
        ProtocolArg::Pak => {
            let k = k.ok_or_else(|| usage("--protocol pak requires --k"))?;
            Ok(ProtocolConfig::percent_k(k)?)
        }
    }
}

fn protocol_label(config: &ProtocolConfig) -> String {
    match config.protocol {
        tadeval::Protocol::Point => "point".to_string(),
        tadeval::Protocol::PointAdjust => "pa".to_string(),
        tadeval::Protocol::PointAdjustPercentK => format!("pak(k={})", config.k_percent),
    }
}

/// Parses `start:end:step` (inclusive of `end`) or a comma-separated list.
fn parse_grid(text: &str, flag: &'static str) -> CResult<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(CliError::Data(Error::invalid_param(flag, "empty grid")));
    }
    let parse_one = |piece: &str| -> CResult<f64> {
        piece.trim().parse::<f64>().map_err(|_| {
            CliError::Data(Error::invalid_param(
                flag,
                format!("could not parse number {piece:?}"),
            ))
        })
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Data(Error::invalid_param(
                flag,
                format!("range must be start:end:step, got {text:?}"),
            )));
        }
        let start = parse_one(parts[0])?;
        let end = parse_one(parts[1])?;
        let step = parse_one(parts[2])?;
        if step <= 0.0 || !step.is_finite() {
            return Err(CliError::Data(Error::invalid_param(
                flag,
                format!("step must be positive and finite, got {step}"),
            )));
        }
        if end < start {
            return Err(CliError::Data(Error::invalid_param(
                flag,
                format!("range end {end} is below start {start}"),
            )));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        let mut values = Vec::with_capacity(count + 1);
        for i in 0..=count {
            let mut v = start + i as f64 * step;
            // Guard against the last accumulated value drifting past `end`.
            if v > end {
                v = end;
            }
            values.push(v);
        }
        Ok(values)
    } else {
        text.split(',').map(parse_one).collect()
    }
}

fn window_spec(tau: Option<usize>, alignment: Option<AlignArg>) -> CResult<WindowSpec> {
    let tau = tau.unwrap_or(DEFAULT_TAU);
    let alignment = match alignment.unwrap_or(AlignArg::Last) {
        AlignArg::Last => Alignment::Last,
        AlignArg::First => Alignment::First,
    };
    Ok(WindowSpec::new(tau, alignment)?)
}

fn norm_spec(norm: Option<NormArg>) -> NormalizationSpec {
    match norm.unwrap_or(NormArg::Minmax) {
        NormArg::Minmax => NormalizationSpec::minmax(),
        NormArg::Zscore => NormalizationSpec::zscore(),
        NormArg::None => NormalizationSpec::none(),
    }
}

fn score_form(form: Option<FormArg>) -> ScoreForm {
    match form.unwrap_or(FormArg::L2) {
        FormArg::L2 => ScoreForm::ScaledL2,
        FormArg::Mse => ScoreForm::MeanSquares,
    }
}

fn candidates_from(
    quantiles: Option<usize>,
    thresholds: Option<&str>,
) -> CResult<ThresholdCandidates> {
    if let Some(list) = thresholds {
        let values = parse_grid(list, "thresholds")?;
        return Ok(ThresholdCandidates::Explicit(values));
    }
    Ok(match quantiles {
        Some(n) => ThresholdCandidates::Quantiles(n),
        None => ThresholdCandidates::AllUniqueScores,
    })
}

fn load_pair(
    scores: Option<PathBuf>,
    labels: Option<PathBuf>,
) -> CResult<(ScoreSeries, LabelSeries)> {
    let scores_path = require(scores, "scores")?;
    let labels_path = require(labels, "labels")?;
    let scores = load_scores(&scores_path)?;
    let labels = load_labels(&labels_path)?;
    Ok((scores, labels))
}

fn curve_csv(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format_sig9(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn write_csv(path: &Path, content: &str) -> CResult<()> {
    write_text_atomic(path, content)?;
    Ok(())
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn seeded_path(base: &Path, seed: u64, repeats: usize) -> PathBuf {
    if repeats <= 1 {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scores".to_string());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".to_string());
    base.with_file_name(format!("{stem}-seed{seed}.{ext}"))
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn execute(cli: Cli) -> CResult<()> {
    configure_threads()?;
    let config = cli.config.as_deref();
    match cli.command {
        Command::Eval(args) => cmd_eval(overlay!(
            args, load_config_section::<EvalArgs>(config, "eval")?;
            scores, labels, protocol, k, delta
        )),
        Command::Sweep(args) => cmd_sweep(overlay!(
            args, load_config_section::<SweepArgs>(config, "sweep")?;
            scores, labels, protocol, k, quantiles, thresholds, naive, out
        )),
        Command::Ksweep(args) => cmd_ksweep(overlay!(
            args, load_config_section::<KsweepArgs>(config, "ksweep")?;
            scores, labels, delta, k, out
        )),
        Command::Roc(args) => cmd_roc(overlay!(
            args, load_config_section::<RocArgs>(config, "roc")?;
            scores, labels, out_roc, out_pr
        )),
        Command::Baseline(args) => cmd_baseline(overlay!(
            args, load_config_section::<BaselineArgs>(config, "baseline")?;
            case, series, train, length, labels, tau, alignment, norm, form,
            hidden, sigma, seed, repeats, out
        )),
        Command::Analytic(args) => cmd_analytic(overlay!(
            args, load_config_section::<AnalyticArgs>(config, "analytic")?;
            gamma, segment_length, delta, grid, precision_form, out
        )),
        Command::Simulate(args) => cmd_simulate(overlay!(
            args, load_config_section::<SimulateArgs>(config, "simulate")?;
            gamma, segment_length, delta, trials, seed, protocol, k
        )),
        Command::Synth(args) => cmd_synth(overlay!(
            args, load_config_section::<SynthArgs>(config, "synth")?;
            t_len, channels, base, noise_std, seed, inject, out_dir
        )),
        Command::Stats(args) => cmd_stats(overlay!(
            args, load_config_section::<StatsArgs>(config, "stats")?;
            labels, out
        )),
        Command::Correlate(args) => cmd_correlate(overlay!(
            args, load_config_section::<CorrelateArgs>(config, "correlate")?;
            xs, ys
        )),
        Command::Report(args) => cmd_report(overlay!(
            args, load_config_section::<ReportArgs>(config, "report")?;
            test, train, labels, method, tau, alignment, norm, form, hidden,
            sigma, seed, repeats, k, quantiles, out_md, out_csv
        )),
    }
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

fn cmd_eval(args: EvalArgs) -> CResult<()> {
    let (scores, labels) = load_pair(args.scores, args.labels)?;
    let delta = require(args.delta, "delta")?;
    let config = protocol_config(args.protocol, args.k)?;
    let segments = SegmentSet::from_labels(&labels);
    let eval = evaluate_with_segments(&scores, &labels, &segments, delta, &config)?;
    println!("protocol: {}", protocol_label(&eval.config));
    println!("delta: {}", delta);
    println!(
        "tp: {}  fp: {}  tn: {}  fn: {}",
        eval.counts.tp, eval.counts.fp, eval.counts.tn, eval.counts.fn_
    );
    println!("precision: {:.6}", eval.metrics.precision);
    println!("recall: {:.6}", eval.metrics.recall);
    println!("f1: {:.6}", eval.metrics.f1);
    Ok(())
}

fn run_sweep(
    scores: &ScoreSeries,
    labels: &LabelSeries,
    config: &ProtocolConfig,
    candidates: &ThresholdCandidates,
    naive: bool,
) -> CResult<SweepResult> {
    let result = if naive {
        sweep_best_f1_naive(scores, labels, config, candidates)?
    } else {
        sweep_best_f1(scores, labels, config, candidates)?
    };
    Ok(result)
}

fn cmd_sweep(args: SweepArgs) -> CResult<()> {
    let (scores, labels) = load_pair(args.scores, args.labels)?;
    let config = protocol_config(args.protocol, args.k)?;
    let candidates = candidates_from(args.quantiles, args.thresholds.as_deref())?;
    let naive = args.naive.unwrap_or(false);
    let result = run_sweep(&scores, &labels, &config, &candidates, naive)?;
    println!("protocol: {}", protocol_label(&result.config));
    println!("engine: {}", if naive { "naive" } else { "optimized" });
    println!("thresholds: {}", result.thresholds.len());
    println!("best_threshold: {}", result.best_threshold);
    let best = result.best_metrics();
    println!("best_precision: {:.6}", best.precision);
    println!("best_recall: {:.6}", best.recall);
    println!("best_f1: {:.6}", best.f1);
    if let Some(out) = args.out {
        let csv = curve_csv(
            "threshold,precision,recall,f1",
            result
                .thresholds
                .iter()
                .zip(result.metrics.iter())
                .map(|(t, m)| vec![*t, m.precision, m.recall, m.f1]),
        );
        write_csv(&out, &csv)?;
        println!("curve: {}", out.display());
    }
    Ok(())
}

fn cmd_ksweep(args: KsweepArgs) -> CResult<()> {
    let (scores, labels) = load_pair(args.scores, args.labels)?;
    let k_grid = match args.k.as_deref() {
        Some(text) => parse_grid(text, "k")?,
        None => tadeval::default_k_grid(),
    };
    let (delta, delta_origin) = match args.delta {
        Some(d) => (d, "fixed"),
        None => {
            let sweep = sweep_best_f1(
                &scores,
                &labels,
                &ProtocolConfig::point(),
                &ThresholdCandidates::AllUniqueScores,
            )?;
            (sweep.best_threshold, "best point-wise F1")
        }
    };
    let curve = k_sweep(&scores, &labels, delta, &k_grid)?;
    println!("delta: {} ({delta_origin})", delta);
    println!("k_values: {}", curve.k_values.len());
    println!("auc: {:.6}", curve.auc);
    for (k, f1) in curve.k_values.iter().zip(curve.f1_values.iter()) {
        println!("k={:>5.1}  f1={:.6}", k, f1);
    }
    if let Some(out) = args.out {
        let csv = curve_csv(
            "k,f1",
            curve
                .k_values
                .iter()
                .zip(curve.f1_values.iter())
                .map(|(k, f1)| vec![*k, *f1]),
        );
        write_csv(&out, &csv)?;
        println!("curve: {}", out.display());
    }
    Ok(())
}

fn cmd_roc(args: RocArgs) -> CResult<()> {
    let (scores, labels) = load_pair(args.scores, args.labels)?;
    let curves = roc_pr(&scores, &labels)?;
    println!("auroc: {:.6}", curves.auroc);
    println!("aupr: {:.6}", curves.aupr);
    println!("roc_points: {}", curves.roc_points.len());
    println!("pr_points: {}", curves.pr_points.len());
    if let Some(out) = args.out_roc {
        let csv = curve_csv("fpr,tpr", curves.roc_points.iter().map(|p| vec![p.0, p.1]));
        write_csv(&out, &csv)?;
        println!("roc_curve: {}", out.display());
    }
    if let Some(out) = args.out_pr {
        let csv = curve_csv(
            "recall,precision",
            curves.pr_points.iter().map(|p| vec![p.0, p.1]),
        );
        write_csv(&out, &csv)?;
        println!("pr_curve: {}", out.display());
    }
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> CResult<()> {
    let case = require(args.case, "case")?;
    let out = require(args.out, "out")?;
    let seed = args.seed.unwrap_or(0);
    let labels = match &args.labels {
        Some(path) => Some(load_labels(path)?),
        None => None,
    };
    let wspec = window_spec(args.tau, args.alignment)?;
    let nspec = norm_spec(args.norm);
    let form = score_form(args.form);

    // Case 2 is deterministic, so extra repeats would write identical files.
    let randomized = !matches!(case, CaseArg::Case2);
    let repeats = if randomized {
        args.repeats.unwrap_or(DEFAULT_REPEATS).max(1)
    } else {
        1
    };

    let series = match &args.series {
        Some(path) => Some(load_series(path)?),
        None => None,
    };
    let train = match &args.train {
        Some(path) => Some(load_series(path)?),
        None => None,
    };

    let length = match case {
        CaseArg::Case1 => match args.length {
            Some(n) => n,
            None => {
                if let Some(series) = &series {
                    series.len()
                } else if let Some(labels) = &labels {
                    labels.len()
                } else {
                    return Err(usage(
                        "case1 needs --length, or --series/--labels to infer it from",
                    ));
                }
            }
        },
        _ => 0,
    };

    let mut point_f1 = Vec::with_capacity(repeats);
    let mut pa_f1 = Vec::with_capacity(repeats);
    for i in 0..repeats {
        let run_seed = seed + i as u64;
        let scores = match case {
            CaseArg::Case1 => case1_random_scores(length, run_seed)?,
            CaseArg::Case2 => {
                let series = series
                    .as_ref()
                    .ok_or_else(|| usage("case2 requires --series"))?;
                case2_input_norm_scores(series, train.as_ref(), &wspec, &nspec, form)?
            }
            CaseArg::Case3 => {
                let series = series
                    .as_ref()
                    .ok_or_else(|| usage("case3 requires --series"))?;
                let mconfig = RandomModelConfig::new(
                    args.hidden.unwrap_or(DEFAULT_HIDDEN_SIZE),
                    args.sigma.unwrap_or_else(default_weight_sigma),
                    run_seed,
                )?;
                case3_untrained_model_scores(
                    series,
                    train.as_ref(),
                    &wspec,
                    &nspec,
                    form,
                    &mconfig,
                )?
            }
        };
        let path = seeded_path(&out, run_seed, repeats);
        save_scores(&path, &scores)?;
        println!("wrote: {}", path.display());
        if let Some(labels) = &labels {
            let point = sweep_best_f1(
                &scores,
                labels,
                &ProtocolConfig::point(),
                &ThresholdCandidates::AllUniqueScores,
            )?;
            let pa = sweep_best_f1(
                &scores,
                labels,
                &ProtocolConfig::point_adjust(),
                &ThresholdCandidates::AllUniqueScores,
            )?;
            point_f1.push(point.best_f1);
            pa_f1.push(pa.best_f1);
        }
    }
    if !point_f1.is_empty() {
        let (pm, ps) = mean_std(&point_f1);
        let (am, as_) = mean_std(&pa_f1);
        println!("best_f1_point: {:.6} +/- {:.6}", pm, ps);
        println!("best_f1_pa: {:.6} +/- {:.6}", am, as_);
    }
    Ok(())
}

fn cmd_analytic(args: AnalyticArgs) -> CResult<()> {
    let gamma = require(args.gamma, "gamma")?;
    let length = require(args.segment_length, "segment-length")?;
    let form = match args.precision_form.unwrap_or(PrecisionFormArg::Bayes) {
        PrecisionFormArg::Bayes => PrecisionForm::BayesConsistent,
        PrecisionFormArg::Alternative => PrecisionForm::Alternative,
    };
    println!("gamma: {}", gamma);
    println!("segment_length: {}", length);
    if let Some(delta) = args.delta {
        let params = AnalyticParams::new(gamma, length, delta)?;
        let recall = expected_recall_pa(&params);
        let precision = expected_precision_pa_form(&params, form);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        println!("delta_prime: {}", delta);
        println!("expected_recall: {:.6}", recall);
        println!("expected_precision: {:.6}", precision);
        println!("expected_f1: {:.6}", f1);
    }
    let grid = match args.grid.as_deref() {
        Some(text) => parse_grid(text, "grid")?,
        None => default_delta_grid(),
    };
    let curve = expected_f1_pa_curve_form(gamma, length, &grid, form)?;
    println!("grid_points: {}", curve.delta_grid.len());
    println!("max_expected_f1: {:.6}", curve.max_f1);
    println!("argmax_delta_prime: {}", curve.argmax_delta);
    if let Some(out) = args.out {
        let csv = curve_csv(
            "delta_prime,precision,recall,f1",
            (0..curve.delta_grid.len()).map(|i| {
                vec![
                    curve.delta_grid[i],
                    curve.precision[i],
                    curve.recall[i],
                    curve.f1[i],
                ]
            }),
        );
        write_csv(&out, &csv)?;
        println!("curve: {}", out.display());
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> CResult<()> {
    let gamma = require(args.gamma, "gamma")?;
    let length = require(args.segment_length, "segment-length")?;
    let delta = require(args.delta, "delta")?;
    let trials = args.trials.unwrap_or(DEFAULT_TRIALS);
    let seed = args.seed.unwrap_or(0);
    let config = protocol_config(args.protocol.or(Some(ProtocolArg::Pa)), args.k)?;
    let layout = SegmentLayout::single_for(gamma, length)?;
    let report = monte_carlo_pa(&layout, delta, trials, seed, &config)?;
    println!(
        "layout: T={} segments=1 L={}",
        layout.total_length(),
        length
    );
    println!("protocol: {}", protocol_label(&config));
    println!("trials: {}", report.trials);
    println!(
        "mc_precision: {:.6} (stderr {:.2e})",
        report.mean_precision, report.stderr_precision
    );
    println!(
        "mc_recall: {:.6} (stderr {:.2e})",
        report.mean_recall, report.stderr_recall
    );
    println!(
        "mc_f1: {:.6} (stderr {:.2e})",
        report.mean_f1, report.stderr_f1
    );
    println!(
        "per_trial_f1: {:.6} +/- {:.6}",
        report.per_trial_mean_f1, report.per_trial_std_f1
    );
    if matches!(config.protocol, tadeval::Protocol::PointAdjust) {
        let params = AnalyticParams::new(layout.gamma(), length, delta)?;
        let recall = expected_recall_pa(&params);
        let precision = expected_precision_pa_form(&params, PrecisionForm::BayesConsistent);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        println!("closed_form_precision: {:.6}", precision);
        println!("closed_form_recall: {:.6}", recall);
        println!("closed_form_f1: {:.6}", f1);
        let z = |mc: f64, cf: f64, stderr: f64| {
            if stderr > 0.0 {
                format!("{:.2}", (mc - cf).abs() / stderr)
            } else {
                "n/a (stderr 0)".to_string()
            }
        };
        println!(
            "z_precision: {}",
            z(report.mean_precision, precision, report.stderr_precision)
        );
        println!(
            "z_recall: {}",
            z(report.mean_recall, recall, report.stderr_recall)
        );
    }
    Ok(())
}

fn parse_injection(text: &str) -> CResult<InjectionSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 5 {
        return Err(CliError::Data(Error::invalid_param(
            "inject",
            format!("expected kind:start:end:channels:magnitude, got {text:?}"),
        )));
    }
    let kind = match parts[0].trim().to_ascii_lowercase().as_str() {
        "point" => InjectionKind::Point,
        "contextual" => InjectionKind::Contextual,
        "collective" => InjectionKind::Collective,
        other => {
            return Err(CliError::Data(Error::invalid_param(
                "inject",
                format!("unknown kind {other:?} (point|contextual|collective)"),
            )))
        }
    };
    let parse_usize = |piece: &str, what: &str| -> CResult<usize> {
        piece.trim().parse::<usize>().map_err(|_| {
            CliError::Data(Error::invalid_param(
                "inject",
                format!("could not parse {what} {piece:?}"),
            ))
        })
    };
    let start = parse_usize(parts[1], "start")?;
    let end = parse_usize(parts[2], "end")?;
    let channels: Vec<usize> = parts[3]
        .split(',')
        .map(|c| parse_usize(c, "channel"))
        .collect::<CResult<_>>()?;
    let magnitude: f64 = parts[4].trim().parse().map_err(|_| {
        CliError::Data(Error::invalid_param(
            "inject",
            format!("could not parse magnitude {:?}", parts[4]),
        ))
    })?;
    Ok(InjectionSpec {
        kind,
        start,
        end,
        channels,
        magnitude,
    })
}

fn cmd_synth(args: SynthArgs) -> CResult<()> {
    let t_len = require(args.t_len, "t-len")?;
    let channels = args.channels.unwrap_or(1);
    let base_signal = match args.base.unwrap_or(BaseArg::Sine) {
        BaseArg::Sine => BaseSignal::SineMix,
        BaseArg::Walk => BaseSignal::RandomWalk,
    };
    let injections = args
        .inject
        .unwrap_or_default()
        .iter()
        .map(|s| parse_injection(s))
        .collect::<CResult<Vec<_>>>()?;
    let spec = SynthSpec {
        t_len,
        channels,
        base_signal,
        noise_std: args.noise_std.unwrap_or(0.1),
        seed: args.seed.unwrap_or(0),
        injections,
    };
    let dataset = tadeval::generate(&spec)?;
    let dir = args.out_dir.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    let train_path = dir.join("train.csv");
    let test_path = dir.join("test.csv");
    let labels_path = dir.join("labels.csv");
    save_series(&train_path, &dataset.train)?;
    save_series(&test_path, &dataset.test)?;
    save_labels(&labels_path, &dataset.test_labels)?;
    let stats = dataset_stats(&dataset.test_labels);
    println!("wrote: {}", train_path.display());
    println!("wrote: {}", test_path.display());
    println!("wrote: {}", labels_path.display());
    println!("train_length: {}", dataset.train.len());
    println!("test_length: {}", dataset.test.len());
    println!("channels: {}", dataset.test.channels());
    println!("anomaly_segments: {}", stats.num_segments);
    println!("anomaly_rate: {:.6}", stats.anomaly_rate);
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> CResult<()> {
    let labels_path = require(args.labels, "labels")?;
    let labels = load_labels(&labels_path)?;
    let stats = dataset_stats(&labels);
    let fmt_len = |len: Option<usize>| match len {
        Some(v) => v.to_string(),
        None => "n/a".to_string(),
    };
    println!("total_length: {}", stats.total_length);
    println!("num_segments: {}", stats.num_segments);
    println!("anomaly_rate: {:.6}", stats.anomaly_rate);
    println!("mean_segment_length: {:.6}", stats.mean_segment_length);
    println!("min_segment_length: {}", fmt_len(stats.min_segment_length));
    println!("max_segment_length: {}", fmt_len(stats.max_segment_length));
    if let Some(out) = args.out {
        let csv_len = |len: Option<usize>| match len {
            Some(v) => v.to_string(),
            None => String::new(),
        };
        let csv = format!(
            "total_length,num_segments,anomaly_rate,mean_segment_length,min_segment_length,max_segment_length\n{},{},{},{},{},{}\n",
            stats.total_length,
            stats.num_segments,
            format_sig9(stats.anomaly_rate),
            format_sig9(stats.mean_segment_length),
            csv_len(stats.min_segment_length),
            csv_len(stats.max_segment_length),
        );
        write_csv(&out, &csv)?;
        println!("summary: {}", out.display());
    }
    Ok(())
}

fn cmd_correlate(args: CorrelateArgs) -> CResult<()> {
    let xs_path = require(args.xs, "xs")?;
    let ys_path = require(args.ys, "ys")?;
    let xs = load_scores(&xs_path)?;
    let ys = load_scores(&ys_path)?;
    let report = correlate(xs.as_slice(), ys.as_slice())?;
    println!("n_points: {}", report.n_points);
    match report.pearson_pcc {
        Some(v) => println!("pearson_pcc: {:.6}", v),
        None => println!("pearson_pcc: undefined (zero variance)"),
    }
    match report.kendall_krc {
        Some(v) => println!("kendall_krc: {:.6}", v),
        None => println!("kendall_krc: undefined (all pairs tied)"),
    }
    Ok(())
}

fn cmd_report(args: ReportArgs) -> CResult<()> {
    let test_path = require(args.test, "test")?;
    let labels_path = require(args.labels, "labels")?;
    let out_md = args.out_md.unwrap_or_else(|| PathBuf::from("report.md"));
    let out_csv = args.out_csv.unwrap_or_else(|| PathBuf::from("report.csv"));
    let test = load_series(&test_path)?;
    let labels = load_labels(&labels_path)?;
    let train = match &args.train {
        Some(path) => Some(load_series(path)?),
        None => None,
    };
    let mut methods = Vec::new();
    for entry in args.method.unwrap_or_default() {
        let (name, path) = entry
            .split_once('=')
            .ok_or_else(|| usage(format!("--method expects NAME=FILE, got {entry:?}")))?;
        let scores = load_scores(Path::new(path))?;
        methods.push((name.to_string(), scores));
    }
    let wspec = window_spec(args.tau, args.alignment)?;
    let nspec = norm_spec(args.norm);
    let form = score_form(args.form);
    let k_grid = match args.k.as_deref() {
        Some(text) => parse_grid(text, "k")?,
        None => tadeval::default_k_grid(),
    };
    let candidates = candidates_from(args.quantiles, None)?;
    let inputs = ReportInputs {
        test: &test,
        train: train.as_ref(),
        labels: &labels,
        methods: &methods,
        wspec,
        nspec,
        form,
        hidden_size: args.hidden.unwrap_or(DEFAULT_HIDDEN_SIZE),
        weight_sigma: args.sigma.unwrap_or_else(default_weight_sigma),
        seed: args.seed.unwrap_or(0),
        repeats: args.repeats.unwrap_or(DEFAULT_REPEATS).max(1),
        k_grid: &k_grid,
        candidates,
    };
    let report = build_report(&inputs)?;
    let markdown = tadeval::to_markdown(&report);
    let csv = tadeval::to_csv(&report);
    write_csv(&out_md, &markdown)?;
    write_csv(&out_csv, &csv)?;
    print!("{markdown}");
    println!();
    println!("report_markdown: {}", out_md.display());
    println!("report_csv: {}", out_csv.display());
    Ok(())
}
