//! Experiment harness for regenerative MCMC: reproduces the error-bound
//! tables and bound sweeps, plans and runs confidence procedures, and writes
//! CSV with plain-text metadata.
//!
//! Every random quantity is drawn from a stream derived from the master seed,
//! a per-command domain name and a replication index (see
//! [`regen_mcmc::seed`]); results are gathered in index order, so output does
//! not depend on the number of threads.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod table;

use std::fmt;

pub use config::{ConfigBuilder, ConfigError, ExperimentConfig};
pub use error::ExperimentError;
pub use output::Output;
pub use table::{Cell, Table};

use config::Threads;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Plan,
    Estimate,
    Table1,
    Table2,
    Sweep,
    TwostateCheck,
    Tau2,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Plan => "plan",
            Self::Estimate => "estimate",
            Self::Table1 => "table1",
            Self::Table2 => "table2",
            Self::Sweep => "sweep",
            Self::TwostateCheck => "twostate-check",
            Self::Tau2 => "tau2",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Runs `command` on the current rayon pool.
pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    cfg.validate_models()?;
    match command {
        Command::Plan => commands::confidence::run_plan(cfg),
        Command::Estimate => commands::confidence::run_estimate(cfg),
        Command::Table1 => commands::table1::run(cfg),
        Command::Table2 => commands::curves::run_table2(cfg),
        Command::Sweep => commands::curves::run_sweep(cfg),
        Command::TwostateCheck => commands::twostate::run(cfg),
        Command::Tau2 => commands::tau2::run(cfg),
    }
}

/// Runs `command` on a dedicated pool sized by `cfg.threads`.
pub fn run_with_threads(command: Command, cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let threads = match cfg.threads {
        Threads::Auto => 0,
        Threads::Fixed(n) => n,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ExperimentError::Config(ConfigError::Unsupported(format!("thread pool: {e}"))))?;
    pool.install(|| run(command, cfg))
}
