//! IO layer for `optomech-core`: TOML run configs, JSON reports, CSV/JSON
//! sweep tables, gnuplot scripts, a thread-pool sweep runner and the
//! `optomech-amp` command line.

pub mod cli;
pub mod config;
pub mod parallel;
pub mod plot;
pub mod report;
pub mod table;

use std::path::PathBuf;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] optomech_core::Error),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status: 2 bad input, 3 singular response, 4 steady-state
    /// failure, 5 I/O.
    pub fn exit_code(&self) -> u8 {
        use optomech_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 5,
            CliError::Model(err) => match err {
                E::SingularSystem | E::SingularCavityMatrix | E::UnstableSystem { .. } => 3,
                E::NonConvergence { .. } | E::NonUniqueSteadyState { .. } => 4,
                E::InvalidRate { .. }
                | E::InvalidParameter { .. }
                | E::PreconditionViolation(_)
                | E::DegenerateRates
                | E::InvalidSpec(_)
                | E::UnknownPreset(_) => 2,
            },
        }
    }
}
