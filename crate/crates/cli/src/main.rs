//! `natreg`: fit closed-form regressions on CSV data, audit their
//! naturality, and reproduce the two exact counterexamples.
//!
//! Exit codes: 0 when results are as expected, 1 on a substantive failure
//! (rank-deficient data, a disagreeing audit cell, a counterexample that
//! shows no violation), 2 on usage or input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "natreg",
    version,
    about = "Least squares and ridge regression naturality audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Ols,
    Ridge,
    #[value(name = "minnorm-ols")]
    MinnormOls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model to CSV data and write its coefficient matrix as CSV.
    Fit(FitArgs),
    /// Run randomized commutative-square checks and compare each cell with
    /// the expected classification.
    Audit(AuditArgs),
    /// Evaluate the shear and scaling counterexamples.
    Counterexamples(CounterexampleArgs),
}

#[derive(Debug, clap::Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Number of leading predictor columns.
    #[arg(long)]
    pub predictors: usize,
    /// Number of trailing target columns.
    #[arg(long)]
    pub targets: usize,
    #[arg(long, value_enum)]
    pub algorithm: AlgorithmArg,
    /// Ridge penalty; required for `--algorithm ridge`.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct AuditArgs {
    /// Algorithms to audit (comma separated). Default: ols,ridge.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub algorithm: Vec<AlgorithmArg>,
    /// Ridge penalty used by audited ridge cells.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Axes to audit: predictor, target, index (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub axes: Vec<String>,
    /// Categories: finvec, finvec_iso, euc, euc_mono, set_iso, discrete.
    #[arg(long, value_delimiter = ',')]
    pub categories: Vec<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Base relative tolerance before condition scaling.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct CounterexampleArgs {
    /// Shear parameter.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub k: f64,
    /// Scalar predictor of the ridge example.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Predictor rescaling factor.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let outcome = match cli.command {
        Command::Fit(args) => commands::fit(&args),
        Command::Audit(args) => commands::audit(&args),
        Command::Counterexamples(args) => commands::counterexamples(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("natreg: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
