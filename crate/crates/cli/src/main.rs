//! `ringtube`: analytic response, particle simulation and their comparison
//! for a flowing tube with an absorbing ring receiver.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical or
//! internal failure, 3 some reproduced rows out of tolerance.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ringtube_core::Truncation;

#[derive(Debug, Parser)]
#[command(name = "ringtube", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Arrival probability and rate from the series model.
    Analytic(CommonArgs),
    /// Particle simulation: empirical CDF and rate histogram.
    Simulate(CommonArgs),
    /// Theory against simulation; writes metrics.csv.
    Validate(ValidateArgs),
    /// All six reference examples side by side with their reference values.
    #[command(name = "reproduce-table2")]
    ReproduceTable2(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sampling step of the output curves, s.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Series truncation `M,N`.
    #[arg(long, value_parser = config::parse_trunc)]
    pub trunc: Option<Truncation>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Simulation time step, s.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep simulating particles that are far downstream of the receiver.
    #[arg(long)]
    pub no_early_exit: bool,
    /// Use reference example 1..=6 as the scenario.
    #[arg(long)]
    pub example: Option<u32>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Score the theory against itself instead of a simulation.
    #[arg(long)]
    self_check: bool,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Partial(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Numerical(_) => 2,
            Self::Partial(_) => 3,
        }
    }
}

impl From<ringtube_core::Error> for Failure {
    fn from(e: ringtube_core::Error) -> Self {
        match e {
            ringtube_core::Error::Invalid(_) => Self::Usage(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Analytic(a) => config::resolve(a).and_then(|c| commands::analytic(&c)),
        Command::Simulate(a) => config::resolve(a).and_then(|c| commands::simulate(&c)),
        Command::Validate(v) => {
            config::resolve(&v.common).and_then(|c| commands::validate(&c, v.self_check))
        }
        Command::ReproduceTable2(a) => {
            config::resolve(a).and_then(|c| commands::reproduce_table2(&c))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Numerical(msg) | Failure::Partial(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
