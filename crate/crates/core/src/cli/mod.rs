//! Command-line front end. The `sglv` binary only forwards to [`main`].

mod commands;
mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::Renormalize;

pub use svg::{render_predictions_svg, render_series_svg};

#[derive(Debug, Parser)]
#[command(
    name = "sglv",
    version,
    about = "Stochastic generalized Lotka-Volterra simulation and inference"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an irregularly observed SGLV path.
    Simulate(SimulateArgs),
    /// Fit SGLV (and the GLV baseline) to a series; write CIs, network and assumption report.
    Fit(FitArgs),
    /// Check the four stability assumptions for a parameter file.
    Check(CheckArgs),
    /// Monte Carlo comparison of the two estimators.
    Mc(McArgs),
    /// Random-split cross-validated one-step prediction error.
    Crossval(CrossvalArgs),
    /// Turn OTU counts and taxonomy into a proportion series.
    Ingest(IngestArgs),
    /// One-step log-abundance predictions along a series.
    Predict(PredictArgs),
    /// Render a series (and one-step predictions) as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScheduleArgs {
    /// Candidate observation gaps.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5])]
    pub gaps: Vec<f64>,
    /// Probabilities of the gaps.
    #[arg(long, value_delimiter = ',', default_values_t = [0.7, 0.2, 0.1])]
    pub probs: Vec<f64>,
    /// Euler-Maruyama step.
    #[arg(long, default_value_t = 0.01)]
    pub fine_dt: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Number of observations.
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Multiplies every sigma; 0 gives the deterministic log-Euler path.
    #[arg(long)]
    pub sigma_scale: Option<f64>,
    /// Initial state, overriding `x0` in the parameter file.
    #[arg(long, value_delimiter = ',')]
    pub x0: Option<Vec<f64>>,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FitArgs {
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Residual-bootstrap replicates for GLV intervals (0 disables).
    #[arg(long, default_value_t = 0)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip the GLV baseline.
    #[arg(long)]
    pub no_glv: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CheckArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Initial state, overriding `x0` in the parameter file.
    #[arg(long, value_delimiter = ',')]
    pub x0: Option<Vec<f64>>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum BenchmarkCase {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct McArgs {
    /// Parameter file with `x0`; defaults to the built-in benchmark case.
    #[arg(long, conflicts_with = "case")]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "1")]
    pub case: BenchmarkCase,
    /// Sample sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [300, 500, 1000])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    #[serde(skip)]
    pub jobs: usize,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CrossvalArgs {
    #[arg(long)]
    pub series: PathBuf,
    /// Fold counts; each split holds out a 1/k share.
    #[arg(long, value_delimiter = ',', default_values_t = [24, 12, 8])]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub splits: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long, default_value_t = 1)]
    #[serde(skip)]
    pub jobs: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenormalizeArg {
    Top,
    Full,
}

impl From<RenormalizeArg> for Renormalize {
    fn from(r: RenormalizeArg) -> Self {
        match r {
            RenormalizeArg::Top => Renormalize::Top,
            RenormalizeArg::Full => Renormalize::Full,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct IngestArgs {
    #[arg(long)]
    pub counts: PathBuf,
    #[arg(long)]
    pub taxonomy: PathBuf,
    /// Taxonomic rank to aggregate at.
    #[arg(long, default_value = "family")]
    pub rank: String,
    /// Number of most abundant groups kept.
    #[arg(long, default_value_t = 5)]
    pub top: usize,
    #[arg(long, default_value_t = 0.5)]
    pub pseudocount: f64,
    #[arg(long, value_enum, default_value = "full")]
    pub renormalize: RenormalizeArg,
    /// Drop samples before this time.
    #[arg(long)]
    pub start: Option<f64>,
    /// Drop samples after this time.
    #[arg(long)]
    pub end: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Sglv,
    Glv,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub series: PathBuf,
    /// Use these parameters instead of fitting the series.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sglv")]
    pub model: ModelKind,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PlotArgs {
    #[arg(long)]
    pub series: PathBuf,
    /// Use these parameters for the prediction overlay instead of fitting.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Output envelope shared by every JSON artifact.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub meta: Meta<'a, C>,
    pub result: R,
}

#[derive(Debug, Serialize)]
pub struct Meta<'a, C: Serialize> {
    pub artifact: &'a str,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub config: &'a C,
    /// SHA-256 of the compact JSON encoding of `config`.
    pub config_hash: String,
}

pub fn config_hash(config: &impl Serialize) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub(crate) fn write_json<C: Serialize, R: Serialize>(
    dir: &Path,
    artifact: &str,
    seed: Option<u64>,
    config: &C,
    result: &R,
) -> Result<PathBuf> {
    let envelope = Envelope {
        meta: Meta {
            artifact,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            config_hash: config_hash(config)?,
        },
        result,
    };
    let path = dir.join(format!("{artifact}.json"));
    let mut text = serde_json::to_string_pretty(&envelope)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Runs a parsed command and returns the files it wrote.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Fit(a) => commands::fit(&a),
        Command::Check(a) => commands::check(&a),
        Command::Mc(a) => commands::mc(&a),
        Command::Crossval(a) => commands::crossval(&a),
        Command::Ingest(a) => commands::ingest(&a),
        Command::Predict(a) => commands::predict(&a),
        Command::Plot(a) => commands::plot(&a),
    }
}

/// Parses `args`, runs, prints written paths; errors go to stderr as
/// `error[CODE]: message`.
pub fn main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}
