//! Command-line driver: JSON scenarios in, CSV artifacts and a summary out.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Output;
use crate::config::Scenario;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "swingdamp", version, about = "Swing damping for a cable-suspended aerial manipulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario file (JSON); built-in defaults when omitted
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory for CSV files and summary.txt
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    /// Noise seed, overriding sim.seed
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Input weight scale σ, overriding synthesis.sigma
    #[arg(long, global = true, value_name = "F")]
    pub sigma: Option<f64>,

    /// Convexification iteration cap, overriding synthesis.max_iter
    #[arg(long, global = true, value_name = "N")]
    pub max_iter: Option<usize>,

    /// Relative trace(P) tolerance, overriding synthesis.tol
    #[arg(long, global = true, value_name = "F")]
    pub tol: Option<f64>,

    /// Initial convexification matrix, overriding synthesis.xi_init
    #[arg(long, global = true, value_parser = ["identity", "riccati"])]
    pub xi_init: Option<String>,

    /// Do not print the summary
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write trajectory.csv
    Simulate,
    /// Synthesize output-feedback gains for synthesis.sigma
    Synthesize,
    /// Sweep σ and write sweep.csv
    Sweep,
    /// Free-swing power spectrum, written to spectrum.csv
    Spectrum,
    /// Initial-condition stability grid, written to grid.csv
    Grid,
    /// Paired controller runs, written to compare.csv
    Compare,
}

impl Cli {
    /// Loads the scenario and applies command-line overrides.
    pub fn scenario(&self) -> CliResult<Scenario> {
        let mut sc = match &self.config {
            Some(path) => Scenario::load(path)?,
            None => Scenario::default(),
        };
        if let Some(seed) = self.seed {
            sc.sim.seed = seed;
        }
        if let Some(sigma) = self.sigma {
            sc.synthesis.sigma = sigma;
        }
        if let Some(n) = self.max_iter {
            sc.synthesis.max_iter = n;
        }
        if let Some(tol) = self.tol {
            sc.synthesis.tol = tol;
        }
        if let Some(x) = &self.xi_init {
            sc.synthesis.xi_init = x.clone();
        }
        Ok(sc)
    }
}

pub fn execute(command: Command, sc: &Scenario) -> CliResult<Output> {
    match command {
        Command::Simulate => commands::simulate(sc),
        Command::Synthesize => commands::synthesize(sc),
        Command::Sweep => commands::sweep(sc),
        Command::Spectrum => commands::spectrum(sc),
        Command::Grid => commands::grid(sc),
        Command::Compare => commands::compare(sc),
    }
}

/// Runs the parsed command line and writes the artifacts.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let sc = cli.scenario()?;
    let out = execute(cli.command, &sc)?;
    out.write_to(&cli.out)?;
    Ok(out)
}
