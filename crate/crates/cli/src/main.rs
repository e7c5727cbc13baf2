//! Batch estimation runs over CSV inputs with deterministic reports.
//!
//! Exit statuses: 0 success, 2 configuration error, 3 data error,
//! 4 non-convergence (report still written), 5 internal error.

mod report;
mod run;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "eqsys", version, about = "Multi-equation econometric estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Human-readable coefficient tables.
    Table,
    /// Self-describing JSON document (the machine contract).
    Structured,
}

#[derive(Args)]
pub struct FitArgs {
    /// Input CSV. Business-record files (canonical header) get the risk
    /// features computed; any other numeric CSV is used as-is.
    #[arg(long)]
    pub input: PathBuf,
    /// First equation, e.g. "isGroupon ~ gzrisk, gprisk, rate*nreview, nreview, rate".
    #[arg(long)]
    pub formula1: String,
    /// Second equation (joint commands only).
    #[arg(long)]
    pub formula2: Option<String>,
    /// Drop the intercept from every equation (same as a trailing ", -1").
    #[arg(long)]
    pub no_constant: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Which generator to draw from.
    #[arg(long, value_enum)]
    pub kind: SimKind,
    #[arg(long)]
    pub n: usize,
    /// Comma-separated slope vector, intercept last (e.g. "0.5,-0.4").
    #[arg(long, allow_hyphen_values = true)]
    pub beta1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub beta2: String,
    /// Error correlation in (-1, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, value_enum, default_value = "normal")]
    pub law: SimLaw,
    /// Generate without intercept columns.
    #[arg(long)]
    pub no_intercept: bool,
    /// RNG seed; every randomized command requires one explicitly.
    #[arg(long)]
    pub seed: u64,
    /// Dataset CSV path; the planted truth goes to "<out>.truth.json".
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    Biprobit,
    Sure,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimLaw {
    Normal,
    Uniform,
}

#[derive(Subcommand)]
pub enum Command {
    /// Fit a univariate probit model.
    FitProbit(FitArgs),
    /// Fit the joint bivariate probit model (needs both formulas).
    FitBiprobit(FitArgs),
    /// Fit the two-equation SUR system by feasible GLS.
    FitSure(FitArgs),
    /// AIC comparison of the joint model against the separate equations.
    SpecTest(FitArgs),
    /// Compute per-business risk-rate features from a business CSV.
    Features {
        #[arg(long)]
        input: PathBuf,
        /// Exclude each business's own outcome from its group rates.
        #[arg(long)]
        leave_one_out: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a uniform control sample of non-deal businesses.
    Sample {
        #[arg(long)]
        input: PathBuf,
        /// Number of records to draw.
        #[arg(long)]
        sample_n: usize,
        /// Study window start (ISO date); closed businesses whose last
        /// review predates it are ineligible.
        #[arg(long)]
        window_start: chrono::NaiveDate,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic dataset with a planted-truth sidecar.
    Simulate(SimulateArgs),
}

fn main() {
    let cli = Cli::parse();
    match run::execute(cli) {
        Ok(status) => std::process::exit(status),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
