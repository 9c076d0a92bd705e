//! Command-line surface: subcommands, flags, defaults.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "tailex",
    version,
    about = "Extreme expectiles, extreme quantiles and marginal expected shortfall \
             for heavy-tailed, serially dependent time series",
    propagate_version = true
)]
pub struct Cli {
    /// Base seed for simulation and coverage runs.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads for replicated experiments (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
pub enum Command {
    /// Read a column (or an x,y pair) from a delimited file and re-emit it,
    /// optionally turning prices into negative log-returns.
    Ingest(IngestArgs),
    /// Tail risk estimates over one or more tail sample sizes k.
    Estimate(EstimateArgs),
    /// Write a simulated benchmark path as CSV.
    Simulate(SimulateArgs),
    /// Empirical error rates of the confidence interval variants on a
    /// benchmark model.
    Coverage(CoverageArgs),
    /// Render an estimate table as an SVG chart against k.
    Plot(PlotArgs),
}

/// How raw columns become a loss series.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    /// Use the column values as they are.
    None,
    /// Treat the column as prices and emit −log(P_{t+1}/P_t).
    #[value(alias = "neg_log_return")]
    NegLogReturn,
}

/// Flags shared by every command that reads user data.
#[derive(Args)]
pub struct DataArgs {
    /// Input file (delimited text with a header row).
    #[arg(long)]
    pub input: PathBuf,

    /// Column selector: header name or 0-based index. Two comma-separated
    /// selectors make an (x, y) pair for the MES methods.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub column: Vec<String>,

    #[arg(long, value_enum, default_value_t = Transform::None)]
    pub transform: Transform,

    /// Field delimiter of the input file.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Output path (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("ks").required(true).args(["k", "k_grid"])))]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Single tail sample size.
    #[arg(long)]
    pub k: Option<usize>,

    /// Grid of tail sample sizes: start:stop:step or a comma list.
    #[arg(long)]
    pub k_grid: Option<String>,

    /// Target quantile level (default 1 − 1/n).
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Estimator family.
    #[arg(long, value_enum)]
    pub method: MethodArg,

    /// Confidence interval variant: iid | d | d-adj | none.
    #[arg(long, default_value = "none")]
    pub ci: String,

    /// Confidence level of the interval.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,

    /// Block lengths "r,l" for the dependent variance, or "auto".
    #[arg(long, default_value = "auto")]
    pub blocks: String,

    /// Output path (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MethodArg {
    /// Composite extreme expectile, asymmetric-least-squares fit.
    Laws,
    /// Composite extreme expectile, quantile-based fit.
    Qb,
    /// Extrapolated extreme quantile.
    Weissman,
    /// MES beyond the extreme quantile of y.
    Qmes,
    /// MES beyond the calibrated extreme expectile of y (LAWS threshold).
    XmesLaws,
    /// MES beyond the calibrated extreme expectile of y (QB threshold).
    XmesQb,
}

impl MethodArg {
    pub fn to_method(self) -> tailex::pipeline::Method {
        use tailex::pipeline::Method;
        match self {
            MethodArg::Laws => Method::Laws,
            MethodArg::Qb => Method::Qb,
            MethodArg::Weissman => Method::Weissman,
            MethodArg::Qmes => Method::Qmes,
            MethodArg::XmesLaws => Method::XmesLaws,
            MethodArg::XmesQb => Method::XmesQb,
        }
    }
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Benchmark model: a..d univariate, e..h bivariate.
    #[arg(long)]
    pub model: char,

    /// Path length (0 writes a header-only file).
    #[arg(long)]
    pub n: usize,

    /// Warm-up length override (each model carries its own default).
    #[arg(long)]
    pub burn_in: Option<usize>,

    /// Output path (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("truth_src").args(["truth", "truth_file"])))]
pub struct CoverageArgs {
    /// Benchmark model: a..d univariate, e..h bivariate (MES).
    #[arg(long)]
    pub model: char,

    /// Replications.
    #[arg(long, default_value_t = 500)]
    pub reps: usize,

    /// Path length per replication.
    #[arg(long, default_value_t = 2500)]
    pub n: usize,

    /// Target expectile level τ′.
    #[arg(long, default_value_t = 0.9995)]
    pub tau_prime: f64,

    /// MES models only: target τ′ whose calibrated quantile level α the
    /// experiment aims at (the level map is inverted at the model's true
    /// tail index).
    #[arg(long, conflicts_with = "tau_prime")]
    pub alpha_from_tau_prime: Option<f64>,

    /// Tail sample sizes: comma list or start:stop:step.
    #[arg(long, default_value = "100,150,200")]
    pub k_grid: String,

    /// Confidence level of the intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,

    /// Known true value of the target (skips the simulation oracle).
    #[arg(long)]
    pub truth: Option<f64>,

    /// File holding the true value (first number is read).
    #[arg(long)]
    pub truth_file: Option<PathBuf>,

    /// Output path (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Estimate table (CSV with k, estimate and optional CI columns).
    #[arg(long)]
    pub input: PathBuf,

    /// Output path for the SVG (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
