//! Front end for `vrelax`: configuration, presets and the table-producing commands.

pub mod commands;
pub mod config;
pub mod doctor;
pub mod presets;

use std::io;

use vrelax_core::error::{DynamicsError, EnvironmentError, OperatorError};

pub use commands::{execute, load_config, Command, Overrides};
pub use config::{ConfigError, ScenarioConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("check failed: {0}")]
    Check(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<EnvironmentError> for CliError {
    fn from(e: EnvironmentError) -> Self {
        CliError::Config(ConfigError::bare(e.to_string()))
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::InconsistentRates { .. } | OperatorError::Angular(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(ConfigError::bare(e.to_string())),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}
