mod commands;
mod input;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::Format;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "paretocal", version, about = "Generalised Pareto tail calibration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a price series into non-overlapping returns.
    Returns(ReturnsArgs),
    /// Empirical mean-excess series over a threshold grid.
    MeanExcess(MeanExcessArgs),
    /// Fit a sample of GPD excesses or inverted-Pareto observations.
    Fit(FitArgs),
    /// Peaks over threshold: tail fits with shape, Gini and VaR per method.
    Pot(PotArgs),
    /// Monte Carlo bias/MSE study of the shape estimators on Pareto data.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args, Serialize)]
struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Log,
    Simple,
}

#[derive(Debug, Args, Serialize)]
struct ReturnsArgs {
    /// CSV of prices (`date,price` or a single column).
    #[arg(long, short)]
    input: PathBuf,
    /// Trading days per return.
    #[arg(long, default_value_t = 1)]
    horizon: usize,
    #[arg(long, value_enum, default_value_t = Kind::Log)]
    kind: Kind,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct MeanExcessArgs {
    /// CSV of sample values, or of prices with `--prices`.
    #[arg(long, short)]
    input: PathBuf,
    /// Treat the input as prices and use the losses `-r` of their returns.
    #[arg(long)]
    prices: bool,
    #[arg(long, default_value_t = 1)]
    horizon: usize,
    #[arg(long, value_enum, default_value_t = Kind::Log)]
    kind: Kind,
    /// Explicit comma-separated thresholds; overrides the grid options.
    #[arg(long)]
    thresholds: Option<String>,
    /// Grid start; defaults to the sample minimum.
    #[arg(long)]
    from: Option<f64>,
    /// Grid end; defaults to the sample 98% quantile.
    #[arg(long)]
    to: Option<f64>,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Model {
    /// Excesses over a threshold, fitted by MLE, PWM or the Jeffreys chain.
    Gpd,
    /// Observations on `(0, σ]`, fitted by BRI or MLE.
    InvPareto,
}

#[derive(Debug, Args, Serialize)]
struct ChainArgs {
    /// Chain length, including burn-in (Jeffreys only).
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
struct FitArgs {
    /// Single-column CSV of the sample.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Model::Gpd)]
    model: Model,
    /// Comma-separated subset of bri, mle, pwm, jeffreys.
    #[arg(long, visible_alias = "method", default_value = "mle,pwm")]
    methods: String,
    /// Interval probability or confidence level.
    #[arg(long, default_value_t = 0.95)]
    probability: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum InputKind {
    Prices,
    Returns,
}

#[derive(Debug, Args, Serialize)]
struct PotArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputKind::Prices)]
    input_kind: InputKind,
    #[arg(long, default_value_t = 1)]
    horizon: usize,
    #[arg(long, value_enum, default_value_t = Kind::Log)]
    kind: Kind,
    /// Loss threshold `u`; losses are `-r` for returns `r < -u`.
    #[arg(long)]
    threshold: f64,
    /// VaR level.
    #[arg(long, default_value_t = 0.99)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.95)]
    probability: f64,
    #[arg(long, default_value = "bri,mle,pwm,jeffreys")]
    methods: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ErrorScaleArg {
    GpdShape,
    ParetoShape,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    /// Pareto shapes; fractions such as `1/3` are accepted.
    #[arg(long, default_value = "1/3,3,7")]
    kappa: String,
    #[arg(long, default_value_t = 4.0)]
    sigma: f64,
    /// Sample sizes.
    #[arg(long, default_value = "15,50,100")]
    n: String,
    #[arg(long, default_value_t = 5000)]
    reps: usize,
    #[arg(long, default_value = "bri,mle,pwm")]
    methods: String,
    #[arg(long, value_enum, default_value_t = ErrorScaleArg::GpdShape)]
    error_scale: ErrorScaleArg,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    /// Inconsistent or malformed arguments; exit status 2.
    Usage(String),
    /// Bad data or a numerical failure; exit status 1.
    Data(String),
}

impl From<paretocal::Error> for CliError {
    fn from(e: paretocal::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
