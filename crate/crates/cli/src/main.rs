mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crnbal_core::balance::DEFAULT_SEED;

/// Detailed-balance analysis for reversible mass-action reaction networks.
#[derive(Debug, Parser)]
#[command(name = "crnbal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the network and derive the rate conditions for RNDB and MCDB.
    Analyze(AnalyzeArgs),
    /// Test numeric rates against RNDB, MCDB and product-form balance.
    Check(CheckArgs),
    /// Exact stationary distribution on a truncated compatibility class.
    Stationary(StationaryArgs),
    /// Exact-jump (Gillespie) simulation.
    Simulate(SimulateArgs),
    /// List irreducible nontrivial cycle types with their base states.
    Cycles(CyclesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Network file (`.crn`).
    pub network: PathBuf,
    /// File of `label = value` lines overriding rates given in the network file.
    #[arg(long)]
    pub rates: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 6)]
    pub max_cycle_len: usize,
    /// Seed for the rate sampling that tests each generator.
    #[arg(long, env = "CRNBAL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Requirement {
    Rndb,
    Mcdb,
    Wsdb,
    ComplexBalance,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 6)]
    pub max_cycle_len: usize,
    #[arg(long, env = "CRNBAL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Property whose failure makes the exit status 1.
    #[arg(long, value_enum, default_value_t = Requirement::Mcdb)]
    pub require: Requirement,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// RNDB formula if the rates are RNDB, else the one-species recursion.
    Auto,
    Rndb,
    BirthDeath,
    /// `(x*)^a / a!` at the point given by `--x-star`.
    ProductForm,
}

#[derive(Debug, Args)]
pub struct StationaryArgs {
    #[command(flatten)]
    pub input: Input,
    /// Initial populations, comma separated; defaults to all zeros.
    #[arg(long)]
    pub init: Option<String>,
    /// Per-species population cap of the truncation box.
    #[arg(long, default_value_t = 200)]
    pub cap: i64,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Complex-balanced equilibrium for `--method product-form`, e.g. `2,3/2`.
    #[arg(long)]
    pub x_star: Option<String>,
    /// Distribution CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Adds a `mass_exact` column with `p/q` masses.
    #[arg(long)]
    pub exact: bool,
    /// Two-column `state,mass` file for plotting.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    #[arg(long, env = "CRNBAL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Trajectory CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Time between recorded rows; 0 records every jump. Defaults to t_end/10000.
    #[arg(long)]
    pub sample_interval: Option<f64>,
    /// Also write the time-weighted occupation distribution here.
    #[arg(long)]
    pub occupation: Option<PathBuf>,
    /// Fraction of [0, t_end] discarded before counting occupation.
    #[arg(long, default_value_t = 0.1)]
    pub burn_in: f64,
}

#[derive(Debug, Args)]
pub struct CyclesArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 6)]
    pub max_cycle_len: usize,
}

/// Result of a command that ran to completion.
pub enum Outcome {
    Success,
    CheckFailed,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => commands::analyze(&args),
        Command::Check(args) => commands::check(&args),
        Command::Stationary(args) => commands::stationary(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Cycles(args) => commands::cycles(&args),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
