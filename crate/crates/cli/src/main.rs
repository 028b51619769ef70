mod commands;
mod manifest;
mod model;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use levy_ruin::config::ConfigError;
use levy_ruin::RuinError;
use thiserror::Error;

use crate::model::ModelArgs;

/// Classify Lévy risk models into ruin regimes and certify the exponential
/// ruin bounds by simulation.
///
/// Exit status: 0 success / certified, 1 usage or configuration error,
/// 2 a bound was violated, 3 the classification was inconclusive.
#[derive(Parser)]
#[command(name = "levy-ruin", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a model and print its ruin bound
    Classify(ClassifyArgs),
    /// Tabulate Ψ and Ψ' as CSV
    PsiCurve(PsiCurveArgs),
    /// Estimate ruin frequencies by Monte Carlo
    Simulate(SimulateArgs),
    /// Classify, simulate over a capital grid and compare against the bound
    Certify(CertifyArgs),
    /// Run the built-in four-regime model gallery end to end
    Gallery(GalleryArgs),
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Root-finding tolerance on |Ψ(γ₀)|
    #[arg(long, default_value_t = levy_ruin::DEFAULT_ROOT_TOL)]
    pub tol: f64,
    /// Print only the single-line machine-readable summary
    #[arg(long)]
    pub summary: bool,
    /// Write a run manifest (JSON) to this file
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

#[derive(Args)]
pub struct PsiCurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of rows
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Largest γ when γ_c is infinite (defaults to a span past the root)
    #[arg(long)]
    pub upper: Option<f64>,
    /// Output CSV (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

/// Monte Carlo settings shared by `simulate`, `certify` and `gallery`.
#[derive(Args, Clone)]
pub struct SimArgs {
    /// Number of simulated paths
    #[arg(long, default_value_t = 10_000)]
    pub paths: u64,
    /// Truncation horizon T (default max(1000, 50·u_max/δ))
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Grid step for the Brownian part
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Detect ruin on grid nodes and jump instants only
    #[arg(long)]
    pub no_bridge: bool,
    /// Worker threads (0 = all cores); results do not depend on it
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial capital
    #[arg(long, conflicts_with = "u_grid", required_unless_present = "u_grid")]
    pub u: Option<f64>,
    /// Capital grid `a:b:n` (n evenly spaced points from a to b)
    #[arg(long, value_name = "A:B:N")]
    pub u_grid: Option<String>,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

#[derive(Args)]
pub struct CertifyArgs {
    /// Model file
    #[arg(long, value_name = "FILE", required_unless_present = "gallery", conflicts_with = "gallery")]
    pub config: Option<PathBuf>,
    /// Certify every gallery model instead of a model file
    #[arg(long)]
    pub gallery: bool,
    /// Capital grid `a:b:n` (gallery default: each model's own capitals; file default 1:4:4)
    #[arg(long, value_name = "A:B:N")]
    pub u_grid: Option<String>,
    #[arg(long, default_value_t = levy_ruin::DEFAULT_ROOT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

#[derive(Args)]
pub struct GalleryArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Certification CSV (only the summary is printed when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] RuinError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(RuinError::Inconclusive { .. } | RuinError::NoRoot { .. } | RuinError::Quadrature { .. }) => {
                3
            }
            _ => 1,
        }
    }
}

/// What a finished run means for the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok,
    Violation,
    Inconclusive,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Violation => 2,
            Outcome::Inconclusive => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Classify(a) => commands::classify(a),
        Command::PsiCurve(a) => commands::psi_curve(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Certify(a) => commands::certify(a),
        Command::Gallery(a) => commands::gallery(a),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
