use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};

use crate::process::{ComponentSpec, ProcessKind};
use crate::scalar::{parse_rational, Rational};
use crate::weaver_core::Construction;

#[derive(Debug, Parser)]
#[command(
    name = "weaver",
    version,
    about = "Weaver's distribution W(n,p): tables, moments, limit measure and simulation"
)]
pub(crate) struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub(crate) enum Command {
    /// Probability vector: k, bits, support point y_k, p_k.
    Pmf(PmfArgs),
    /// Distribution function F_n at dyadic points or at the support.
    Cdf(CdfArgs),
    /// Mean, variance, per-bit variance terms and the variance ratio.
    Moments(MomentsArgs),
    /// Exponent row of the geometric triangle and its sum.
    Triangle(TriangleArgs),
    /// Limit measure: staircase and interval masses at a level, or its moments.
    Hem(HemArgs),
    /// Between-weaving, mixing and within variance terms.
    Decompose(DecomposeArgs),
    /// Monte Carlo run of a sampling process.
    Simulate(SimulateArgs),
    /// Brute-force table of choice vectors, supports and probabilities.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Points {
    Dyadic,
    Support,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum HemTable {
    Staircase,
    Moments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Method {
    Direct,
    Weave,
    Cascade,
}

impl From<Method> for Construction {
    fn from(method: Method) -> Self {
        match method {
            Method::Direct => Construction::Direct,
            Method::Weave => Construction::Weave,
            Method::Cascade => Construction::Cascade,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Process {
    Pathmean,
    Mixdraw,
    Condmean,
}

impl From<Process> for ProcessKind {
    fn from(process: Process) -> Self {
        match process {
            Process::Pathmean => ProcessKind::PathMean,
            Process::Mixdraw => ProcessKind::MixtureDraw,
            Process::Condmean => ProcessKind::ConditionalMean,
        }
    }
}

/// Checks that the text is a rational in `[0, 1]` and keeps the text, so
/// that float mode can parse decimals with the `f64` parser.
fn probability_text(text: &str) -> Result<String, String> {
    let value = parse_rational(text).map_err(|e| e.to_string())?;
    if value < Rational::zero() || value > Rational::one() {
        return Err(format!("{text} is outside [0, 1]"));
    }
    Ok(text.to_owned())
}

fn nonnegative_text(text: &str) -> Result<String, String> {
    let value = parse_rational(text).map_err(|e| e.to_string())?;
    if value < Rational::zero() {
        return Err(format!("{text} is negative"));
    }
    Ok(text.to_owned())
}

fn component(text: &str) -> Result<ComponentSpec, String> {
    text.parse().map_err(|e: crate::error::WeaverError| e.to_string())
}

#[derive(Debug, Args)]
pub(crate) struct Output {
    /// Output format [env: WEAVER_FORMAT; default csv, json for simulate].
    #[arg(long, value_enum, env = "WEAVER_FORMAT", hide_env = true)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct Numeric {
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Largest accepted n; defaults to the mode's table cap.
    #[arg(long)]
    pub max_n: Option<u32>,
}

#[derive(Debug, Args)]
pub(crate) struct PmfArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_parser = probability_text)]
    pub p: String,
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    pub method: Method,
    #[command(flatten)]
    pub numeric: Numeric,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub(crate) struct CdfArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_parser = probability_text)]
    pub p: String,
    #[arg(long, value_enum, default_value_t = Points::Dyadic)]
    pub points: Points,
    /// Dyadic level of the evaluation grid (default n).
    #[arg(long)]
    pub level: Option<u32>,
    #[command(flatten)]
    pub numeric: Numeric,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub(crate) struct MomentsArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_parser = probability_text)]
    pub p: String,
    #[command(flatten)]
    pub numeric: Numeric,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub(crate) struct TriangleArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub max_n: Option<u32>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub(crate) struct HemArgs {
    #[arg(long, value_parser = probability_text)]
    pub p: String,
    #[arg(long, default_value_t = 4)]
    pub level: u32,
    #[arg(long, value_enum, default_value_t = HemTable::Staircase)]
    pub table: HemTable,
    #[command(flatten)]
    pub numeric: Numeric,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub(crate) struct DecomposeArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_parser = probability_text)]
    pub p: String,
    /// Variance of the H0 population.
    #[arg(long, value_parser = nonnegative_text, default_value = "0")]
    pub s0: String,
    /// Variance of the H1 population.
    #[arg(long, value_parser = nonnegative_text, default_value = "0")]
    pub s1: String,
    #[command(flatten)]
    pub numeric: Numeric,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub(crate) struct SimulateArgs {
    #[arg(long, value_enum)]
    pub process: Process,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_parser = probability_text)]
    pub p: String,
    /// H0 population: point:c, twopoint:x0,x1,q or uniform:a,b (mean 0).
    #[arg(long, value_parser = component, default_value = "point:0")]
    pub h0: ComponentSpec,
    /// H1 population (mean 1).
    #[arg(long, value_parser = component, default_value = "point:1")]
    pub h1: ComponentSpec,
    #[arg(long, default_value_t = 10_000)]
    pub reps: u64,
    #[arg(long, env = "WEAVER_SEED", hide_env = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Cap on reps * (2^n - 1) drawn observations.
    #[arg(long, default_value_t = crate::process::DEFAULT_MAX_OBSERVATIONS)]
    pub max_obs: u64,
    #[arg(long)]
    pub max_n: Option<u32>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub(crate) struct EnumerateArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_parser = probability_text)]
    pub p: String,
    #[arg(long)]
    pub max_n: Option<u32>,
    #[command(flatten)]
    pub output: Output,
}
