//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "extropy", version, about = "Extropy measures of lifetime distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Relative tolerance for quadrature (at least 1e-12).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// auto, quadrature or closed_form.
    #[arg(long, global = true, default_value = "auto")]
    pub method: String,

    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for Monte-Carlo sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Exit with status 4 when any claim is violated.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate measures of one or more distributions.
    Measure(MeasureArgs),
    /// Tabulate a time-indexed measure over a grid of t.
    Curve(CurveArgs),
    /// Evaluate bivariate measures of a joint distribution.
    Bivariate(BivariateArgs),
    /// Measures of a monotone transform of a distribution.
    Transform(TransformArgs),
    /// Check claims numerically.
    Claims(ClaimsArgs),
    /// Compare Monte-Carlo estimates with quadrature.
    Mc(McArgs),
}

/// Times: a comma list via --t, or a --grid.
#[derive(Debug, Args, Clone)]
pub struct Times {
    /// Comma-separated time points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Vec<f64>,

    /// lo:hi:n (linear) or geometric:lo:hi:n.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Distribution spec: inline JSON or a file path. Repeatable.
    #[arg(long, required = true)]
    pub dist: Vec<String>,

    /// Comma-separated measure ids.
    #[arg(long, value_delimiter = ',')]
    pub measure: Vec<String>,

    #[command(flatten)]
    pub times: Times,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, required = true)]
    pub dist: Vec<String>,

    /// Comma-separated time-indexed measure ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub measure: Vec<String>,

    #[command(flatten)]
    pub times: Times,
}

#[derive(Debug, Args)]
pub struct BivariateArgs {
    /// Bivariate distribution spec.
    #[arg(long, required = true)]
    pub dist: Vec<String>,

    #[arg(long, value_delimiter = ',')]
    pub measure: Vec<String>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, required = true)]
    pub dist: Vec<String>,

    /// scale:a, affine:a,b, square, exp or pit.
    #[arg(long, required = true)]
    pub transform: String,

    #[command(flatten)]
    pub times: Times,
}

#[derive(Debug, Args)]
pub struct ClaimsArgs {
    #[arg(long, required = true)]
    pub dist: Vec<String>,

    /// Second variable for sum_bound and independence_factorization;
    /// defaults to an independent copy of each --dist.
    #[arg(long)]
    pub dist2: Option<String>,

    /// Comma-separated claim ids; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub claims: Vec<String>,

    #[command(flatten)]
    pub times: Times,

    /// Upper end T of the reversed-hazard precondition window (past_bound).
    #[arg(long)]
    pub horizon: Option<f64>,

    /// Hazard family for constancy: pareto:k or ode:t0,r0. Defaults to the
    /// Pareto family of a pareto --dist.
    #[arg(long)]
    pub hazard_family: Option<String>,

    /// Root choice for inversion: larger or continuous:r0.
    #[arg(long, default_value = "larger")]
    pub root: String,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Univariate or bivariate distribution spec.
    #[arg(long, required = true)]
    pub dist: Vec<String>,

    #[arg(long, value_delimiter = ',')]
    pub measure: Vec<String>,

    #[command(flatten)]
    pub times: Times,

    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}
