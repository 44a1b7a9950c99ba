//! Command-line front end for the `leocov` models. Every command writes CSV.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error, 3 verification
//! failure or insufficient Monte Carlo precision.

use std::ffi::OsString;
use std::fmt;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod csvio;

use commands::{NeffArgs, SimulateArgs, SweepArgs};
use config::{CommonArgs, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Verification(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<leocov::Error> for CliError {
    fn from(e: leocov::Error) -> Self {
        match e {
            leocov::Error::SweepTooShort(_) => CliError::Usage(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "leocov",
    version,
    about = "Coverage and rate of LEO satellite constellations"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Visibility geometry of the configured shell.
    Geometry,
    /// Coverage probability over a parameter sweep.
    Coverage(SweepArgs),
    /// Average rate over a parameter sweep.
    Rate(SweepArgs),
    /// Effective satellite count over a latitude grid.
    Neff(NeffArgs),
    /// One Monte Carlo run next to the analytic values.
    Simulate(SimulateArgs),
    /// Analytic results against Monte Carlo with pass/fail per tolerance.
    Verify,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&cli.common)?;
    if cli.common.show_config {
        eprint!("{}", cfg.to_config_text());
    }
    match &cli.command {
        Command::Geometry => commands::geometry(&cfg),
        Command::Coverage(a) => commands::sweep_command(&cfg, a, leocov::Metric::Coverage),
        Command::Rate(a) => commands::sweep_command(&cfg, a, leocov::Metric::Rate),
        Command::Neff(a) => commands::neff(&cfg, a),
        Command::Simulate(a) => commands::simulate(&cfg, a),
        Command::Verify => commands::verify(&cfg),
    }
}
