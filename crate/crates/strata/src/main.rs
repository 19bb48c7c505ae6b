use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use strata::config::RunConfig;
use strata::error::CliError;

/// Hierarchical Bayesian modelling of frequency response functions for
/// populations of nominally identical structures.
#[derive(Debug, Parser)]
#[command(name = "strata", version, about)]
struct Cli {
    /// JSON configuration file; defaults apply for every absent key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the config value.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic truth and training FRF datasets.
    Simulate,
    /// Estimate an FRF from force/response time series (H1, averaged
    /// blocks).
    EstimateFrf,
    /// Sample the posterior and write trace, summary, and band files.
    Fit {
        /// Pooling mode override: partial, none, or complete.
        #[arg(long)]
        pooling: Option<String>,
    },
    /// Score a temperature-model posterior at held-out temperatures.
    Predict,
    /// Convergence report for an existing trace.
    Diagnose,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are successful exits; everything else is a
            // usage error.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out_dir) = cli.out_dir {
        cfg.out_dir = out_dir;
    }
    if let Command::Fit { pooling: Some(p) } = &cli.command {
        cfg.fit.pooling = p.clone();
    }
    cfg.validate()?;
    match cli.command {
        Command::Simulate => strata::simulate::run(&cfg),
        Command::EstimateFrf => strata::estimate::run(&cfg),
        Command::Fit { .. } => strata::fit::run(&cfg),
        Command::Predict => strata::predict::run(&cfg),
        Command::Diagnose => strata::diagnose::run(&cfg),
    }
}
