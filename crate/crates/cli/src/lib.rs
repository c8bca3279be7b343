//! Config-driven front end for the trinity checks and scenarios.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("run failed: {0}")]
    Run(String),
}

impl CliError {
    /// 2 for unusable input or output, 1 for a failure while running checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}
