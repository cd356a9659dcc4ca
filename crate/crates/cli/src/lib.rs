//! The `dulab` harness: turns experiment configs into validated plans, runs
//! them on a worker pool with per-job derived seeds, and writes CSV tables
//! plus a JSON record per run.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::Outcome;
pub use config::{ConfigArgs, ExperimentConfig, KappaSpec, SeedSpec};
pub use error::{CliError, Result};

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "dulab", version, about = "Diluted-unitary map experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Superoperator spectra for every (κ, seed)
    Spectrum(ConfigArgs),
    /// Seed-averaged eigenvalue angular velocity of a model and a baseline
    Velocity(ConfigArgs),
    /// Postselect a unitary with a given number of eigenphase clusters
    Clusters(ConfigArgs),
    /// Monte Carlo fidelity decay of layered noisy circuits
    Fidelity(ConfigArgs),
    /// Draw one unitary (and optionally its diluted superoperator)
    Sample(ConfigArgs),
}

impl Command {
    pub fn args(&self) -> &ConfigArgs {
        match self {
            Command::Spectrum(a)
            | Command::Velocity(a)
            | Command::Clusters(a)
            | Command::Fidelity(a)
            | Command::Sample(a) => a,
        }
    }
}

/// Validates the whole configuration, then runs the command. Nothing is
/// written unless validation passes and the computation succeeds.
pub fn run(command: &Command) -> Result<Outcome> {
    let cfg = command.args().merged()?;
    match command {
        Command::Spectrum(_) => commands::spectrum::execute(&commands::spectrum::plan(&cfg)?),
        Command::Velocity(_) => commands::velocity::execute(&commands::velocity::plan(&cfg)?),
        Command::Clusters(_) => commands::clusters::execute(&commands::clusters::plan(&cfg)?),
        Command::Fidelity(_) => commands::fidelity::execute(&commands::fidelity::plan(&cfg)?),
        Command::Sample(_) => commands::sample::execute(&commands::sample::plan(&cfg)?),
    }
}
