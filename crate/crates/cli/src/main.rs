//! Command-line front end: one subcommand per computation, CSV or JSON-lines
//! output with a fixed header per subcommand.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Format, Params};

/// Computed numbers print with this many significant digits unless `--digits` is set.
pub const DEFAULT_DIGITS: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "randhorizon", version, about = "Maturity-randomization pricing with exact and Monte-Carlo checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Closed-form hitting probability of the σ₁ = 0 digital, with its quadrature form as oracle.
    ExactDigital,
    /// Randomized digital recursion against the Erlang mixture of exact values.
    Digital,
    /// Uncertain-volatility recursion for a payoff file against the BSB finite-difference oracle.
    Uvm,
    /// Randomized American put (plain and Richardson) against a binomial tree.
    Put,
    /// Monte-Carlo lower and Erlang-mixture upper bounds around the randomized put.
    Sandwich,
    /// Recompute the published digital tables.
    Repro {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        table: Option<u8>,
    },
    /// Empirical convergence order of the digital recursion.
    Rate,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{command}: {source}")]
    Numerical {
        command: &'static str,
        source: randhorizon::Error,
    },
    #[error("{0}")]
    Check(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { source: randhorizon::Error::Input(_), .. } => 2,
            CliError::Numerical { .. } | CliError::Check(_) => 3,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("RANDHORIZON_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("RANDHORIZON_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let params = match &cli.params.config {
        Some(path) => Params::from_file(path)?.overlay(cli.params),
        None => cli.params,
    };
    params.validate()?;
    let table = commands::run(&cli.command, &params)?;
    let format = params.format.unwrap_or(Format::Csv);
    match &params.output {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
            let mut out = std::io::BufWriter::new(file);
            output::write_table(&table, format, params.digits, &mut out)?;
            out.flush()?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            output::write_table(&table, format, params.digits, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
