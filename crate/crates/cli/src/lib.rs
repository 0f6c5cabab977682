//! Command-line front end for the `wtrv` library.
//!
//! [`RunConfig`] is the parsed command line; [`run`] dispatches it to the
//! library and writes the result as JSON, CSV or an aligned text table.
//! JSON output depends only on the configuration, so identical invocations
//! produce identical bytes.

mod commands;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use wtrv::data::MomentConvention;
use wtrv::fit::{BoundaryPolicy, Model, DEFAULT_STARTS};
use wtrv::gof::{GofTest, PValueMethod};
use wtrv::reliability::AgingTheorem;
use wtrv::{DistributionHandle, WeightFunction};

pub use commands::render;

/// Exit status for usage and parse errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for errors raised while running a command.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Module(wtrv::Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub(crate) fn output(e: impl ToString) -> Self {
        CliError::Output(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

impl From<wtrv::Error> for CliError {
    fn from(e: wtrv::Error) -> Self {
        match e {
            wtrv::Error::Parse { .. } => CliError::Usage(e.to_string()),
            other => CliError::Module(other),
        }
    }
}

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(name = "wtrv", version, about = "Weighted tail random variables: construction, checks and fitting")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output encoding; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
}

fn dist_arg(s: &str) -> Result<DistributionHandle, String> {
    wtrv::distributions::parse_distribution(s).map_err(|e| e.to_string())
}

fn weight_arg(s: &str) -> Result<WeightFunction, String> {
    wtrv::weights::parse_weight(s).map_err(|e| e.to_string())
}

/// Degrees-of-freedom rule for the chi-square test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DfRule {
    /// `bins - 1`
    BinsMinusOne,
    /// `bins - 1 - k` with `k` the number of fitted parameters.
    BinsMinusOneMinusK,
    Fixed(f64),
}

fn df_arg(s: &str) -> Result<DfRule, String> {
    match s {
        "bins-1" => Ok(DfRule::BinsMinusOne),
        "bins-1-k" => Ok(DfRule::BinsMinusOneMinusK),
        other => match other.parse::<f64>() {
            Ok(v) if v > 0.0 => Ok(DfRule::Fixed(v)),
            _ => Err(format!("expected bins-1, bins-1-k or a positive number, got `{other}`")),
        },
    }
}

/// Which orders `check-order` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderChoice {
    Lr,
    Fr,
    Rfr,
    St,
    All,
}

/// Where the data comes from.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV file with a header row.
    pub input: PathBuf,

    /// Column holding the observations (matched case-insensitively).
    #[arg(long, default_value = "value")]
    pub column: String,

    /// Optional column of years, carried through to the output.
    #[arg(long)]
    pub year_column: Option<String>,
}

/// Settings for maximum-likelihood fits.
#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// How observations on the ends of the normalized range are handled.
    #[arg(long, default_value = "exclude-boundary")]
    pub policy: BoundaryPolicy,

    /// Optimizer starting points.
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    pub starts: usize,
}

/// Settings for goodness-of-fit tests.
#[derive(Debug, Clone, Args)]
pub struct GofArgs {
    /// Comma-separated subset of ks, ad, cvm, chisq.
    #[arg(long, value_delimiter = ',', default_value = "ks,ad,cvm,chisq")]
    pub tests: Vec<GofTest>,

    /// `asymptotic` or `bootstrap`.
    #[arg(long, default_value = "asymptotic")]
    pub pvalue: PValueMethod,

    /// Equal-probability bins for the chi-square test.
    #[arg(long, default_value_t = 10)]
    pub bins: usize,

    /// Chi-square degrees of freedom: bins-1, bins-1-k or a number.
    #[arg(long, default_value = "bins-1", value_parser = df_arg)]
    pub df: DfRule,

    /// Bootstrap replicates.
    #[arg(long, default_value_t = 999)]
    pub replicates: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Tabulate the density, distribution and survival functions of X_w.
    Construct {
        /// Base distribution, e.g. "exponential(lambda=1)".
        #[arg(long, value_parser = dist_arg)]
        dist: DistributionHandle,
        /// Weight, e.g. "power(c=2)".
        #[arg(long, value_parser = weight_arg)]
        weight: WeightFunction,
        /// Quantile grid size.
        #[arg(long, default_value_t = 200)]
        points: usize,
    },

    /// Classify a distribution (or its WTRV) into aging classes, or check an
    /// aging theorem's hypotheses and conclusion.
    CheckAging {
        #[arg(long, value_parser = dist_arg)]
        dist: DistributionHandle,
        /// Classify X_w instead of X.
        #[arg(long, value_parser = weight_arg)]
        weight: Option<WeightFunction>,
        /// prop1, thm1, thm2, thm3, thm4 or prop2 (requires --weight).
        #[arg(long)]
        theorem: Option<AgingTheorem>,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },

    /// Check stochastic orders between two distributions.
    CheckOrder {
        #[arg(long, value_parser = dist_arg)]
        x: DistributionHandle,
        #[arg(long, value_parser = dist_arg)]
        y: DistributionHandle,
        /// Compare X_{wx} instead of X.
        #[arg(long, value_parser = weight_arg)]
        wx: Option<WeightFunction>,
        /// Compare Y_{wy} instead of Y.
        #[arg(long, value_parser = weight_arg)]
        wy: Option<WeightFunction>,
        #[arg(long, value_enum, default_value = "all")]
        order: OrderChoice,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },

    /// Verify an ordering theorem on a named fixture or on given inputs.
    VerifyTheorem {
        /// Fixture name (e.g. thm9-example7) or theorem (thm5i ... thm10).
        target: String,
        #[arg(long, value_parser = dist_arg)]
        x: Option<DistributionHandle>,
        #[arg(long, value_parser = dist_arg)]
        y: Option<DistributionHandle>,
        #[arg(long, value_parser = weight_arg)]
        w1: Option<WeightFunction>,
        /// Defaults to --w1.
        #[arg(long, value_parser = weight_arg)]
        w2: Option<WeightFunction>,
        /// Emit the density ratio f_{Y_w2}/f_{X_w1} as CSV instead.
        #[arg(long)]
        emit_ratio: bool,
        /// Points on the ratio curve.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Run a randomized audit with this many hypothesis-passing tuples.
        #[arg(long, conflicts_with_all = ["x", "y", "w1", "w2", "emit_ratio"])]
        audit: Option<usize>,
    },

    /// Check the closed-form WTRV table against the construction engine.
    Table1Audit,

    /// Descriptive statistics of a data column.
    Describe {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "population")]
        convention: MomentConvention,
    },

    /// Normalize a data column to the unit interval and fit a model by maximum likelihood.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        /// beta, kw or wk.
        #[arg(long, default_value = "wk")]
        model: Model,
        #[command(flatten)]
        fit: FitArgs,
        /// Also write the fitted density on a grid to this CSV file.
        #[arg(long)]
        emit_density: Option<PathBuf>,
    },

    /// Fit a model and run goodness-of-fit tests.
    Gof {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "wk")]
        model: Model,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        gof: GofArgs,
    },

    /// Describe, normalize, fit beta, kw and wk, and test each fit.
    Report {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "population")]
        convention: MomentConvention,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        gof: GofArgs,
    },

    /// Draw a sample from a distribution or its WTRV.
    Simulate {
        #[arg(long, value_parser = dist_arg)]
        dist: DistributionHandle,
        #[arg(long, value_parser = weight_arg)]
        weight: Option<WeightFunction>,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
}

/// Execute `config`, writing to `--out` or standard output.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let text = render(config)?;
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(CliError::output),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(CliError::output)
        }
    }
}
