//! Batch front end: configuration, command dispatch and report emission.

pub mod config;
mod run;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{parse_config, Config, Flags, Format};
pub use run::{run, RunReport};

#[derive(Debug, Parser)]
#[command(
    name = "ffbt",
    version,
    about = "Congruence-subgroup stabilizers and complexes on Bruhat-Tits buildings over F_q(t)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Enumerate the ball of radius N around the center
    Ball,
    /// Stabilizer spaces of one simplex, or dimensions for every simplex
    Stabilizer {
        /// Vertex ids of a simplex in the ball, comma-separated
        #[arg(long)]
        simplex: Option<String>,
        /// Also run the exhaustive search and compare
        #[arg(long)]
        brute: bool,
    },
    /// Unstable simplices of the ball at the level
    UnstableMap,
    /// Homology of the full, unstable and stable complexes
    Homology,
    /// Connected components of the unstable subcomplex
    Components,
    /// Restriction from the stable complex at --ideal to the one at --coarse
    Restrict {
        #[arg(long)]
        coarse: String,
    },
    /// Run the verification suite
    Verify {
        /// Restrict to these checks (names or numbers)
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ball => "ball",
            Command::Stabilizer { .. } => "stabilizer",
            Command::UnstableMap => "unstable-map",
            Command::Homology => "homology",
            Command::Components => "components",
            Command::Restrict { .. } => "restrict",
            Command::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Core(ffbt_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ffbt_core::Error> for CliError {
    fn from(e: ffbt_core::Error) -> Self {
        use ffbt_core::Error as E;
        match e {
            E::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            E::Internal(m) => CliError::Assertion(m),
            e => CliError::Core(e),
        }
    }
}

impl CliError {
    /// 1 for failed assertions, 2 for bad input, 3 for exhausted budgets.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Budget(_) => 3,
            CliError::Usage(_) | CliError::Core(_) | CliError::Io(_) => 2,
        }
    }
}
