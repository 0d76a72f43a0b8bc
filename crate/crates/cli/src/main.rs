//! `tracetails`: tail bounds, worst-case spectra, sample sizes, Monte Carlo
//! runs and dominance checks for the Gaussian trace estimator.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 refused outside the proved region, 5 a proved-region check failed.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Failure, Output};
use config::{Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "tracetails", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare the CK bound with the exact worst-case tail over an epsilon grid.
    Bounds(Common),
    /// Smallest number of probe vectors reaching a failure probability.
    Samplesize(Common),
    /// Check the dominance theorems on random pairs and chains, or run probes.
    Verify(Common),
    /// Monte Carlo run of the estimator on a given spectrum.
    Estimate(Common),
    /// Worst-case spectrum, its estimator law and tail regions.
    Worstcase(Common),
}

#[derive(Debug, clap::Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Answer even outside the proved region.
    #[arg(long)]
    force: bool,
}

fn run(command: &Command) -> Result<(Output, Option<PathBuf>), (Failure, Option<PathBuf>)> {
    let common = match command {
        Command::Bounds(c) | Command::Samplesize(c) | Command::Verify(c) | Command::Estimate(c) | Command::Worstcase(c) => c,
    };
    let mut cfg = RunConfig::load(&common.config).map_err(|e| (Failure::Config(e), None))?;
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    let out = common.out.clone().or_else(|| cfg.out.clone());
    let format = common.format.or(cfg.format);
    let force = common.force || cfg.force.unwrap_or(false);
    let result = match command {
        Command::Bounds(_) => commands::bounds(&cfg, format.unwrap_or(Format::Csv)),
        Command::Samplesize(_) => commands::samplesize(&cfg, format, force),
        Command::Verify(_) => commands::verify(&cfg, format.unwrap_or(Format::Json)),
        Command::Estimate(_) => commands::estimate(&cfg, format.unwrap_or(Format::Json)),
        Command::Worstcase(_) => commands::worstcase(&cfg, format.unwrap_or(Format::Json)),
    };
    match result {
        Ok(o) => Ok((o, out)),
        Err(e) => Err((e, out)),
    }
}

fn emit(output: &Output, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, &output.text),
        None => std::io::stdout().lock().write_all(output.text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli.command) {
        Ok((output, out)) => match emit(&output, out.as_ref()) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                2
            }
        },
        Err((failure, out)) => {
            let code = failure.exit_code();
            match failure {
                Failure::Config(msg) => eprintln!("config error: {msg}"),
                Failure::Numeric(msg) => eprintln!("numerical failure: {msg}"),
                Failure::Refused(msg) => eprintln!("{msg}; rerun with --force to accept the conjectured region"),
                Failure::ClaimFailed(output) => {
                    eprintln!("a proved-region dominance check failed; see the report");
                    if let Err(e) = emit(&output, out.as_ref()) {
                        eprintln!("error: cannot write output: {e}");
                    }
                }
            }
            code
        }
    };
    ExitCode::from(code as u8)
}
