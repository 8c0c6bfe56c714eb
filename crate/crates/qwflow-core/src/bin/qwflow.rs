//! Command-line surface of the toolkit.
//!
//! Every run resolves its parameters with the precedence
//! flags > config file > defaults, echoes the resolved set into the JSON
//! summary, and exits with 0 on success, 2 on usage/configuration errors,
//! 3 on numeric failures, and 4 on I/O failures. Data outputs are
//! deterministic: identical invocations produce byte-identical files.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qwflow_core::analysis::{default_peak_window, detect_peaks, mixing_time};
use qwflow_core::export::{
    save_json, save_series_csv, series_to_csv, series_to_json, to_json_string, Summary,
};
use qwflow_core::graph::{evolve, ModelConfig, TailMode};
use qwflow_core::reduced::{evolve_reduced, Epsilon};
use qwflow_core::series::TimeSeries;
use qwflow_core::spectral::{decompose, fit_perturbation, Branch};
use qwflow_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qwflow",
    version,
    about = "Simulator and spectral analysis for the flow-fed search walk on a complete graph"
)]
struct Cli {
    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full arc-space simulation on the tailed complete graph.
    Simulate(SimulateArgs),
    /// Reduced three-component recursion (fast path).
    Reduced(ReducedArgs),
    /// Eigenvalues, eigenprojections, and perturbation-series fits.
    Spectrum(SpectrumArgs),
    /// Mixing time to accuracy e^(-theta) with a certified horizon.
    MixingTime(MixingTimeArgs),
    /// Peak structure of the marked-vertex probability.
    Pulsation(PulsationArgs),
    /// Parallel sweep of an analysis over several graph sizes.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum TailModeArg {
    /// Explicit tail arcs, truncated beyond the causal horizon.
    Truncated,
    /// Constant re-injected inflow, discarded outflow.
    SourceSink,
}

impl TailModeArg {
    fn to_model(self) -> TailMode {
        match self {
            TailModeArg::Truncated => TailMode::TruncatedTails,
            TailModeArg::SourceSink => TailMode::SourceSink,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            TailModeArg::Truncated => "truncated",
            TailModeArg::SourceSink => "source-sink",
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of internal vertices N.
    #[arg(long)]
    n: Option<usize>,

    /// Number of steps; defaults to ceil(N ln N).
    #[arg(long)]
    t_max: Option<usize>,

    /// Index of the marked vertex.
    #[arg(long)]
    marked: Option<usize>,

    /// Tail realization.
    #[arg(long, value_enum)]
    tail_mode: Option<TailModeArg>,

    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ReducedArgs {
    /// Number of internal vertices N.
    #[arg(long)]
    n: Option<usize>,

    /// Number of steps; defaults to ceil(N ln N).
    #[arg(long)]
    t_max: Option<usize>,

    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Number of internal vertices N.
    #[arg(long)]
    n: Option<usize>,

    /// Comma-separated perturbation strengths; when given, eigenvalue-series
    /// coefficients are fitted over them.
    #[arg(long, value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,

    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct MixingTimeArgs {
    /// Number of internal vertices N.
    #[arg(long)]
    n: Option<usize>,

    /// Accuracy exponent; the target distance is e^(-theta).
    #[arg(long)]
    theta: Option<f64>,

    /// Iteration horizon as a multiple of N ln N (at least 2).
    #[arg(long)]
    horizon_factor: Option<f64>,

    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct PulsationArgs {
    /// Number of internal vertices N.
    #[arg(long)]
    n: Option<usize>,

    /// Number of steps; defaults to ceil(N ln N).
    #[arg(long)]
    t_max: Option<usize>,

    /// Peak-detection window; defaults to half the predicted period.
    #[arg(long)]
    window: Option<usize>,

    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Analysis to sweep (only mixing-time is supported).
    #[arg(long)]
    command: Option<String>,

    /// Comma-separated list of graph sizes.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,

    /// Accuracy exponent; the target distance is e^(-theta).
    #[arg(long)]
    theta: Option<f64>,

    /// Iteration horizon as a multiple of N ln N (at least 2).
    #[arg(long)]
    horizon_factor: Option<f64>,

    /// Worker threads; 0 means one per processor.
    #[arg(long)]
    jobs: Option<usize>,

    #[command(flatten)]
    out: OutputArgs,
}

/// Config-file schema. Unknown keys are rejected so a typo cannot silently
/// fall back to a default.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    t_max: Option<usize>,
    marked: Option<usize>,
    tail_mode: Option<TailModeArg>,
    theta: Option<f64>,
    horizon_factor: Option<f64>,
    window: Option<usize>,
    eps_list: Option<Vec<f64>>,
    n_list: Option<Vec<usize>>,
    command: Option<String>,
    jobs: Option<usize>,
    output: Option<PathBuf>,
    format: Option<Format>,
}

fn load_config(path: Option<&PathBuf>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))
}

fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file)
        .ok_or_else(|| Error::InvalidArgument(format!("missing required parameter --{name}")))
}

fn default_t_max(n: usize) -> usize {
    let nf = n as f64;
    (nf * nf.ln()).ceil() as usize
}

fn path_json(path: &Option<PathBuf>) -> Value {
    match path {
        Some(p) => json!(p.display().to_string()),
        None => Value::Null,
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

/// Writes a series in the selected format. With `--output`, the data goes
/// to the file and a summary document to stdout; without it, the data
/// itself goes to stdout.
fn emit_series(
    command: &str,
    params: Value,
    method: &str,
    series: &TimeSeries,
    output: &Option<PathBuf>,
    format: Format,
) -> Result<()> {
    match format {
        Format::Csv => {
            let text = series_to_csv(series)?;
            match output {
                Some(path) => {
                    save_series_csv(series, path)?;
                    let results = json!({"rows": series.len(), "data": path.display().to_string()});
                    print!("{}", to_json_string(&Summary::new(command, params, results, method))?);
                }
                None => print!("{text}"),
            }
        }
        Format::Json => {
            let doc = Summary::new(command, params, series_to_json(series)?, method);
            match output {
                Some(path) => save_json(&doc, path)?,
                None => print!("{}", to_json_string(&doc)?),
            }
        }
    }
    Ok(())
}

/// Writes a non-series result document (JSON only).
fn emit_doc(
    command: &str,
    params: Value,
    method: &str,
    results: Value,
    output: &Option<PathBuf>,
    format: Format,
) -> Result<()> {
    if format == Format::Csv {
        return Err(Error::InvalidArgument(format!(
            "{command} emits a result document, not a time series; use --format json"
        )));
    }
    let doc = Summary::new(command, params, results, method);
    match output {
        Some(path) => save_json(&doc, path)?,
        None => print!("{}", to_json_string(&doc)?),
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs, file: FileConfig) -> Result<()> {
    let n = require(args.n, file.n, "n")?;
    let t_max = args.t_max.or(file.t_max).unwrap_or_else(|| default_t_max(n));
    let marked = args.marked.or(file.marked).unwrap_or(0);
    let tail_mode = args
        .tail_mode
        .or(file.tail_mode)
        .unwrap_or(TailModeArg::Truncated);
    let output = args.out.output.or(file.output);
    let format = args.out.format.or(file.format).unwrap_or(Format::Csv);

    let config = ModelConfig::new(n, marked, t_max, tail_mode.to_model())?;
    let series = evolve(&config)?;
    let params = json!({
        "n": n,
        "t_max": t_max,
        "marked": marked,
        "tail_mode": tail_mode.as_str(),
        "output": path_json(&output),
        "format": format.as_str(),
    });
    emit_series("simulate", params, "full", &series, &output, format)
}

fn run_reduced(args: ReducedArgs, file: FileConfig) -> Result<()> {
    let n = require(args.n, file.n, "n")?;
    let t_max = args.t_max.or(file.t_max).unwrap_or_else(|| default_t_max(n));
    let output = args.out.output.or(file.output);
    let format = args.out.format.or(file.format).unwrap_or(Format::Csv);

    let series = evolve_reduced(&Epsilon::from_n(n)?, t_max);
    let params = json!({
        "n": n,
        "t_max": t_max,
        "output": path_json(&output),
        "format": format.as_str(),
    });
    emit_series("reduced", params, "reduced", &series, &output, format)
}

fn run_spectrum(args: SpectrumArgs, file: FileConfig) -> Result<()> {
    let n = require(args.n, file.n, "n")?;
    let eps_list = args.eps_list.or(file.eps_list);
    let output = args.out.output.or(file.output);
    let format = args.out.format.or(file.format).unwrap_or(Format::Json);

    let eps = Epsilon::from_n(n)?;
    let decomp = decompose(eps.value())?;
    let mut results = json!({
        "n_vertices": n,
        "eps": eps.value(),
        "eigenvalues": {
            "minus1": complex_json(decomp.eigenvalue(Branch::Minus1)),
            "plus1_pos": complex_json(decomp.eigenvalue(Branch::Plus1Pos)),
            "plus1_neg": complex_json(decomp.eigenvalue(Branch::Plus1Neg)),
        },
        "spectral_radius": decomp.spectral_radius(),
        "defects": {
            "completeness": decomp.completeness_defect(),
            "orthogonality": decomp.orthogonality_defect(),
            "reconstruction": decomp.reconstruction_defect(),
        },
    });
    if let Some(list) = &eps_list {
        let mut fits = serde_json::Map::new();
        for branch in Branch::ALL {
            let fit = fit_perturbation(branch, list)?;
            fits.insert(
                branch.label().to_string(),
                json!({
                    "coeff1": complex_json(fit.coeff1),
                    "coeff2": complex_json(fit.coeff2),
                    "residual": fit.residual,
                }),
            );
        }
        results["fits"] = Value::Object(fits);
    }

    let params = json!({
        "n": n,
        "eps_list": eps_list,
        "output": path_json(&output),
        "format": format.as_str(),
    });
    emit_doc("spectrum", params, "closed-form", results, &output, format)
}

fn run_mixing_time(args: MixingTimeArgs, file: FileConfig) -> Result<()> {
    let n = require(args.n, file.n, "n")?;
    let theta = args.theta.or(file.theta).unwrap_or(3.0);
    let horizon_factor = args.horizon_factor.or(file.horizon_factor).unwrap_or(4.0);
    let output = args.out.output.or(file.output);
    let format = args.out.format.or(file.format).unwrap_or(Format::Json);

    let result = mixing_time(n, theta, horizon_factor)?;
    let params = json!({
        "n": n,
        "theta": theta,
        "horizon_factor": horizon_factor,
        "output": path_json(&output),
        "format": format.as_str(),
    });
    let results = serde_json::to_value(&result)
        .map_err(|e| Error::Numeric(format!("JSON serialization failed: {e}")))?;
    emit_doc("mixing-time", params, "reduced", results, &output, format)
}

fn run_pulsation(args: PulsationArgs, file: FileConfig) -> Result<()> {
    let n = require(args.n, file.n, "n")?;
    let t_max = args.t_max.or(file.t_max).unwrap_or_else(|| default_t_max(n));
    let window = args
        .window
        .or(file.window)
        .unwrap_or_else(|| default_peak_window(n));
    let output = args.out.output.or(file.output);
    let format = args.out.format.or(file.format).unwrap_or(Format::Json);

    let series = evolve_reduced(&Epsilon::from_n(n)?, t_max);
    let report = detect_peaks(&series, window)?;
    let params = json!({
        "n": n,
        "t_max": t_max,
        "window": window,
        "output": path_json(&output),
        "format": format.as_str(),
    });
    let results = serde_json::to_value(&report)
        .map_err(|e| Error::Numeric(format!("JSON serialization failed: {e}")))?;
    emit_doc("pulsation", params, "reduced", results, &output, format)
}

fn run_sweep(args: SweepArgs, file: FileConfig) -> Result<()> {
    let command = args
        .command
        .or(file.command)
        .unwrap_or_else(|| "mixing-time".to_string());
    if command != "mixing-time" {
        return Err(Error::InvalidArgument(format!(
            "unsupported sweep command {command:?}; only mixing-time can be swept"
        )));
    }
    let n_list = require(args.n_list, file.n_list, "n-list")?;
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("--n-list must not be empty".into()));
    }
    let theta = args.theta.or(file.theta).unwrap_or(3.0);
    let horizon_factor = args.horizon_factor.or(file.horizon_factor).unwrap_or(4.0);
    let jobs = args.jobs.or(file.jobs).unwrap_or(0);
    let output = args.out.output.or(file.output);
    let format = args.out.format.or(file.format).unwrap_or(Format::Json);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let outcomes: Result<Vec<_>> = pool.install(|| {
        n_list
            .par_iter()
            .map(|&n| mixing_time(n, theta, horizon_factor))
            .collect()
    });
    let outcomes = outcomes?;

    let mut rows = Vec::with_capacity(outcomes.len());
    let mut ratios = Vec::with_capacity(outcomes.len());
    for result in &outcomes {
        let nf = result.n_vertices as f64;
        let ratio = result.t_theta as f64 / (nf * nf.ln());
        ratios.push(ratio);
        let mut row = serde_json::to_value(result)
            .map_err(|e| Error::Numeric(format!("JSON serialization failed: {e}")))?;
        row["ratio"] = json!(ratio);
        rows.push(row);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max_dev = ratios
        .iter()
        .map(|r| (r - mean).abs() / mean)
        .fold(0.0, f64::max);

    let params = json!({
        "command": command,
        "n_list": n_list,
        "theta": theta,
        "horizon_factor": horizon_factor,
        "jobs": jobs,
        "output": path_json(&output),
        "format": format.as_str(),
    });
    let results = json!({
        "rows": rows,
        "ratio_mean": mean,
        "max_ratio_deviation": max_dev,
    });
    emit_doc("sweep", params, "reduced", results, &output, format)
}

fn run(cli: Cli) -> Result<()> {
    let file = load_config(cli.config.as_ref())?;
    match cli.command {
        Command::Simulate(args) => run_simulate(args, file),
        Command::Reduced(args) => run_reduced(args, file),
        Command::Spectrum(args) => run_spectrum(args, file),
        Command::MixingTime(args) => run_mixing_time(args, file),
        Command::Pulsation(args) => run_pulsation(args, file),
        Command::Sweep(args) => run_sweep(args, file),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
