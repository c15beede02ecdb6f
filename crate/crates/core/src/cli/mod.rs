//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 verification failure,
//! 3 numerical-tolerance failure.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::error::Error as NumError;
pub use config::Params;
pub use output::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("numerical tolerance failure: {0}")]
    Tolerance(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Tolerance(_) => 3,
        }
    }
}

impl From<NumError> for CliError {
    fn from(e: NumError) -> Self {
        match e {
            NumError::InvalidArgument(_)
            | NumError::DimensionMismatch(..)
            | NumError::MissingDelta(_) => CliError::Config(e.to_string()),
            NumError::Truncation { .. }
            | NumError::Tolerance { .. }
            | NumError::Infeasible { .. } => CliError::Tolerance(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "bosonic",
    version,
    about = "Bosonic channel bounds, distributions and converse checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML file with parameter values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Parameter override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Capacity lower bound and both upper bounds on a point or a log grid.
    Bounds,
    /// Success-probability envelope as a function of block length.
    Envelope,
    /// Output photon-number law of a channel for a number-state input.
    Dist,
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Run a demonstration experiment.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Decompositions,
    Smoothing,
    Gentle,
    Rank,
    Qubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    MeanConstraint,
    Concentration,
}

impl Command {
    /// Key into the parameter defaults.
    pub fn key(&self) -> String {
        match self {
            Command::Bounds => "bounds".into(),
            Command::Envelope => "envelope".into(),
            Command::Dist => "dist".into(),
            Command::Verify { suite } => format!(
                "verify.{}",
                suite.to_possible_value().expect("named").get_name()
            ),
            Command::Demo { name } => format!(
                "demo.{}",
                name.to_possible_value().expect("named").get_name()
            ),
        }
    }
}

/// Outcome of a run: the report to write and the failure, if any, that
/// should set the exit code after writing.
pub struct Outcome {
    pub report: Report,
    pub failure: Option<CliError>,
}

pub fn execute(command: &Command, params: Params) -> Result<Outcome, CliError> {
    match command {
        Command::Bounds => commands::bounds(params),
        Command::Envelope => commands::envelope(params),
        Command::Dist => commands::dist(params),
        Command::Verify { suite } => commands::verify(*suite, params),
        Command::Demo { name } => commands::demo(*name, params),
    }
}

fn load_table(path: &std::path::Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Resolves the configuration, runs the command and writes the report.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let table = cli.common.config.as_deref().map(load_table).transpose()?;
    let params = Params::resolve(
        &cli.command.key(),
        table.as_ref(),
        &cli.common.set,
        cli.common.seed,
    )?;
    let outcome = execute(&cli.command, params)?;
    let text = match cli.common.format {
        Format::Csv => outcome.report.to_csv()?,
        Format::Json => outcome.report.to_json()?,
    };
    match &cli.common.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    match outcome.failure {
        Some(err) => Err(err),
        None => Ok(()),
    }
}
