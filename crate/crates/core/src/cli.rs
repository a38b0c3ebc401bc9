//! `simulate`, `fit`, `filter` and `stats` commands.
//!
//! Settings resolve as flags, then the config file (`--config` or the
//! `SENTIMENT_MARKET_CONFIG` environment variable), then built-in defaults.
//! Failures print a JSON object `{code, message, context}` on stderr and
//! return a distinct non-zero exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Error;
use crate::estimation::{maximize_likelihood, Bounds, FitConfig, StartRegion};
use crate::filter::filter;
use crate::io::{self, ReturnSource};
use crate::model::{simulate_path, uniform_weights, ModelParams};
use crate::stats::{ReportConfig, StylizedFactsReport, VolatilityProxy, DEFAULT_MAX_LAG, DEFAULT_TAIL_FRACTION};

pub const CONFIG_ENV: &str = "SENTIMENT_MARKET_CONFIG";

pub const PATH_FILE: &str = "path.csv";
pub const STATS_FILE: &str = "stylized_facts.json";
pub const FIT_FILE: &str = "fit.json";
pub const FILTER_FILE: &str = "filter.csv";

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Usage = 2,
    Input = 3,
    Io = 4,
    Model = 5,
    Fit = 6,
}

#[derive(Debug, Parser)]
#[command(name = "sentiment-market", version, about = "Sentiment-driven market model: simulate, fit, filter, stats")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a path and report its stylized facts.
    Simulate(SimulateArgs),
    /// Maximum-likelihood fit of (lambda, sigma0, beta, alpha) to a series.
    Fit(FitArgs),
    /// Filter an observed series: bullishness, volatility, log-likelihood terms.
    Filter(FilterArgs),
    /// Stylized-facts report for a price or return series.
    Stats(StatsArgs),
}

#[derive(Debug, Args, Default)]
struct CommonArgs {
    /// TOML config file; overrides the SENTIMENT_MARKET_CONFIG variable.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
struct ModelArgs {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    sigma0: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest group size.
    #[arg(long = "L")]
    max_group: Option<usize>,
    /// Initial bullishness.
    #[arg(long = "B0")]
    b0: Option<f64>,
}

#[derive(Debug, Args, Default)]
struct StatsOptions {
    #[arg(long)]
    tail_fraction: Option<f64>,
    #[arg(long)]
    max_lag: Option<usize>,
    /// Use squared instead of absolute returns as the volatility proxy.
    #[arg(long)]
    squared_proxy: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    stats: StatsOptions,
    /// Number of steps.
    #[arg(long = "T")]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Initial price.
    #[arg(long = "P0")]
    p0: Option<f64>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol_g: Option<f64>,
    #[arg(long)]
    tol_f: Option<f64>,
    /// Draw starts within this many decades of the model flags instead of the whole box.
    #[arg(long)]
    start_decades: Option<f64>,
    /// Lower bounds `lambda,sigma0,beta,alpha`.
    #[arg(long, value_delimiter = ',', num_args = 4)]
    lower: Option<Vec<f64>>,
    /// Upper bounds `lambda,sigma0,beta,alpha`.
    #[arg(long, value_delimiter = ',', num_args = 4)]
    upper: Option<Vec<f64>>,
    /// Estimate B0 as a fifth parameter.
    #[arg(long)]
    estimate_b0: bool,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    stats: StatsOptions,
    #[arg(long)]
    input: Option<PathBuf>,
}

/// Values a config file may set. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lambda: Option<f64>,
    pub sigma0: Option<f64>,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(rename = "L")]
    pub max_group: Option<usize>,
    #[serde(rename = "B0")]
    pub b0: Option<f64>,
    pub group_weights: Option<Vec<f64>>,
    #[serde(rename = "T")]
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    #[serde(rename = "P0")]
    pub p0: Option<f64>,
    pub starts: Option<usize>,
    pub tol_g: Option<f64>,
    pub tol_f: Option<f64>,
    pub start_decades: Option<f64>,
    pub lower: Option<[f64; 4]>,
    pub upper: Option<[f64; 4]>,
    pub estimate_b0: Option<bool>,
    pub tail_fraction: Option<f64>,
    pub max_lag: Option<usize>,
    pub squared_proxy: Option<bool>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub steps: usize,
    pub seed: u64,
    pub p0: f64,
    pub starts: usize,
    pub tol_g: f64,
    pub tol_f: f64,
    pub start_decades: Option<f64>,
    pub bounds: Bounds,
    pub estimate_b0: bool,
    pub report: ReportConfig,
    pub input: Option<PathBuf>,
    pub output: PathBuf,
}

struct CliError {
    code: ExitCode,
    message: String,
    context: serde_json::Value,
}

impl CliError {
    fn new(code: ExitCode, message: impl Into<String>) -> Self {
        Self { code, message: message.into(), context: json!({}) }
    }

    fn with_context(mut self, context: serde_json::Value) -> Self {
        self.context = context;
        self
    }

    fn code_name(&self) -> &'static str {
        match self.code {
            ExitCode::Success => "ok",
            ExitCode::Usage => "usage",
            ExitCode::Input => "input",
            ExitCode::Io => "io",
            ExitCode::Model => "model",
            ExitCode::Fit => "fit",
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Domain(_) | Error::InvalidParameter { .. } => ExitCode::Usage,
            Error::Input(_)
            | Error::NonFiniteReturn { .. }
            | Error::InsufficientData(_)
            | Error::ConstantSeries
            | Error::Csv(_) => ExitCode::Input,
            Error::File { .. } | Error::Io(_) | Error::Json(_) => ExitCode::Io,
            Error::Collapse { .. } | Error::Divergence { .. } => ExitCode::Model,
            Error::FitFailed(_) | Error::NonFiniteGradient { .. } => ExitCode::Fit,
        };
        let context = match &err {
            Error::Collapse { step, bullishness, .. } => json!({ "step": step, "bullishness": bullishness }),
            Error::Divergence { step, quantity, .. } => json!({ "step": step, "quantity": quantity }),
            Error::InvalidParameter { name, .. } => json!({ "parameter": name }),
            Error::NonFiniteReturn { index } => json!({ "index": index }),
            Error::NonFiniteGradient { parameter } => json!({ "parameter": parameter }),
            Error::File { path, .. } => json!({ "path": path }),
            _ => json!({}),
        };
        CliError::new(code, err.to_string()).with_context(context)
    }
}

/// Runs the command line with the process's stdout and stderr.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line, writing help and summaries to `stdout` and the
/// error object to `stderr`. Returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{err}");
                return ExitCode::Success as i32;
            }
            let e = CliError::new(ExitCode::Usage, err.to_string().trim().to_string())
                .with_context(json!({ "kind": err.kind().to_string() }));
            return report_error(e, stderr);
        }
    };
    let outcome = match cli.command {
        Command::Simulate(args) => simulate_cmd(args, stdout),
        Command::Fit(args) => fit_cmd(args, stdout),
        Command::Filter(args) => filter_cmd(args, stdout),
        Command::Stats(args) => stats_cmd(args, stdout),
    };
    match outcome {
        Ok(()) => ExitCode::Success as i32,
        Err(e) => report_error(e, stderr),
    }
}

fn report_error(e: CliError, stderr: &mut dyn Write) -> i32 {
    let body = json!({ "code": e.code_name(), "message": e.message, "context": e.context });
    let _ = writeln!(stderr, "{body}");
    e.code as i32
}

fn load_file_config(explicit: Option<&Path>) -> Result<FileConfig, CliError> {
    let path = match explicit {
        Some(p) => p.to_owned(),
        None => match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => PathBuf::from(p),
            _ => return Ok(FileConfig::default()),
        },
    };
    let text = fs::read_to_string(&path).map_err(|e| {
        CliError::new(ExitCode::Io, format!("cannot read config {}: {e}", path.display()))
            .with_context(json!({ "path": path }))
    })?;
    toml::from_str(&text).map_err(|e| {
        CliError::new(ExitCode::Usage, format!("invalid config {}: {e}", path.display()))
            .with_context(json!({ "path": path }))
    })
}

impl RunConfig {
    fn resolve(
        common: &CommonArgs,
        model: Option<&ModelArgs>,
        stats: Option<&StatsOptions>,
        file: &FileConfig,
    ) -> Result<Self, CliError> {
        let defaults = ModelParams::default();
        let empty = ModelArgs::default();
        let model = model.unwrap_or(&empty);
        let max_group = model.max_group.or(file.max_group).unwrap_or(defaults.max_group);
        let weights = match (&file.group_weights, model.max_group) {
            (Some(w), None) => w.clone(),
            (Some(w), Some(l)) if w.len() == l => w.clone(),
            _ => uniform_weights(max_group.max(1)),
        };
        let params = ModelParams {
            lambda: model.lambda.or(file.lambda).unwrap_or(defaults.lambda),
            sigma0: model.sigma0.or(file.sigma0).unwrap_or(defaults.sigma0),
            beta: model.beta.or(file.beta).unwrap_or(defaults.beta),
            alpha: model.alpha.or(file.alpha).unwrap_or(defaults.alpha),
            max_group: weights.len(),
            group_weights: weights,
            b0: model.b0.or(file.b0).unwrap_or(defaults.b0),
        };
        if max_group != params.max_group {
            return Err(CliError::new(ExitCode::Usage, "L does not match the number of group_weights"));
        }
        params.validate()?;

        let empty_stats = StatsOptions::default();
        let stats = stats.unwrap_or(&empty_stats);
        let squared = stats.squared_proxy || file.squared_proxy.unwrap_or(false);
        let report = ReportConfig {
            max_lag: stats.max_lag.or(file.max_lag).unwrap_or(DEFAULT_MAX_LAG),
            tail_fraction: stats.tail_fraction.or(file.tail_fraction).unwrap_or(DEFAULT_TAIL_FRACTION),
            proxy: if squared { VolatilityProxy::Squared } else { VolatilityProxy::Absolute },
        };
        if !(report.tail_fraction > 0.0 && report.tail_fraction <= 0.2) {
            return Err(CliError::new(ExitCode::Usage, "--tail-fraction must lie in (0, 0.2]"));
        }
        if report.max_lag < 1 {
            return Err(CliError::new(ExitCode::Usage, "--max-lag must be at least 1"));
        }

        let mut bounds = Bounds::default();
        if let Some(lower) = file.lower {
            bounds.lower = lower;
        }
        if let Some(upper) = file.upper {
            bounds.upper = upper;
        }
        Ok(Self {
            params,
            steps: file.steps.unwrap_or(10_000),
            seed: file.seed.unwrap_or(0),
            p0: file.p0.unwrap_or(100.0),
            starts: file.starts.unwrap_or(5),
            tol_g: file.tol_g.unwrap_or(1e-3),
            tol_f: file.tol_f.unwrap_or(1e-4),
            start_decades: file.start_decades,
            bounds,
            estimate_b0: file.estimate_b0.unwrap_or(false),
            report,
            input: file.input.clone(),
            output: common.output.clone().or_else(|| file.output.clone()).unwrap_or_else(|| PathBuf::from(".")),
        })
    }

    fn input_path(&self) -> Result<&Path, CliError> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::new(ExitCode::Usage, "missing required --input <path>"))
    }

    fn output_file(&self, name: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.output).map_err(|e| {
            CliError::new(ExitCode::Io, format!("cannot create output directory {}: {e}", self.output.display()))
                .with_context(json!({ "path": self.output }))
        })?;
        Ok(self.output.join(name))
    }
}

fn simulate_cmd(args: SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = load_file_config(args.common.config.as_deref())?;
    let mut cfg = RunConfig::resolve(&args.common, Some(&args.model), Some(&args.stats), &file)?;
    cfg.steps = args.steps.unwrap_or(cfg.steps);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.p0 = args.p0.unwrap_or(cfg.p0);

    let path_file = cfg.output_file(PATH_FILE)?;
    let path = match simulate_path(&cfg.params, cfg.steps, cfg.seed, cfg.p0) {
        Ok(path) => path,
        Err(err) => {
            // keep whatever was simulated before the failure
            if let Some(partial) = err.partial_path() {
                io::write_file(&path_file, |w| io::write_path_csv(partial, w))?;
            }
            return Err(CliError::from(err));
        }
    };
    io::write_file(&path_file, |w| io::write_path_csv(&path, w))?;
    let report = StylizedFactsReport::compute(&path.r, &cfg.report)?;
    let stats_file = cfg.output_file(STATS_FILE)?;
    io::write_file(&stats_file, |w| io::write_json(&report, w))?;
    let _ = writeln!(stdout, "wrote {} and {}", path_file.display(), stats_file.display());
    Ok(())
}

fn fit_cmd(args: FitArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = load_file_config(args.common.config.as_deref())?;
    let mut cfg = RunConfig::resolve(&args.common, Some(&args.model), None, &file)?;
    cfg.input = args.input.or(cfg.input);
    cfg.starts = args.starts.unwrap_or(cfg.starts);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.tol_g = args.tol_g.unwrap_or(cfg.tol_g);
    cfg.tol_f = args.tol_f.unwrap_or(cfg.tol_f);
    cfg.start_decades = args.start_decades.or(cfg.start_decades);
    cfg.estimate_b0 |= args.estimate_b0;
    if let Some(lower) = args.lower {
        cfg.bounds.lower.copy_from_slice(&lower);
    }
    if let Some(upper) = args.upper {
        cfg.bounds.upper.copy_from_slice(&upper);
    }

    let (returns, _) = io::load_returns(cfg.input_path()?)?;
    let fit_config = FitConfig {
        template: cfg.params.clone(),
        starts: cfg.starts,
        seed: cfg.seed,
        bounds: cfg.bounds,
        start_region: match cfg.start_decades {
            Some(decades) => StartRegion::AroundReference { decades },
            None => StartRegion::Bounds,
        },
        tol_g: cfg.tol_g,
        tol_f: cfg.tol_f,
        estimate_b0: cfg.estimate_b0,
        ..FitConfig::default()
    };
    let result = maximize_likelihood(&returns, &fit_config)?;
    let out = cfg.output_file(FIT_FILE)?;
    io::write_file(&out, |w| io::write_json(&result, w))?;
    let _ = writeln!(
        stdout,
        "wrote {} (loglik {:.6}, converged {})",
        out.display(),
        result.loglik,
        result.converged
    );
    Ok(())
}

fn filter_cmd(args: FilterArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = load_file_config(args.common.config.as_deref())?;
    let mut cfg = RunConfig::resolve(&args.common, Some(&args.model), None, &file)?;
    cfg.input = args.input.or(cfg.input);
    let (returns, _) = io::load_returns(cfg.input_path()?)?;
    let output = filter(&cfg.params, &returns)?;
    let out = cfg.output_file(FILTER_FILE)?;
    io::write_file(&out, |w| io::write_filter_csv(&returns, &output, w))?;
    let _ = writeln!(stdout, "wrote {} (loglik {:.6})", out.display(), output.loglik);
    Ok(())
}

fn stats_cmd(args: StatsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = load_file_config(args.common.config.as_deref())?;
    let mut cfg = RunConfig::resolve(&args.common, None, Some(&args.stats), &file)?;
    cfg.input = args.input.or(cfg.input);
    let (returns, source) = io::load_returns(cfg.input_path()?)?;
    let report = StylizedFactsReport::compute(&returns, &cfg.report)?;
    let out = cfg.output_file(STATS_FILE)?;
    io::write_file(&out, |w| io::write_json(&report, w))?;
    let kind = match source {
        ReturnSource::Prices(_) => "prices",
        ReturnSource::Returns => "returns",
    };
    let _ = writeln!(stdout, "wrote {} from {} {kind}", out.display(), report.n);
    Ok(())
}
