//! Scenario files, commands and output formats for the `cdnpeer` tool.

pub mod commands;
pub mod output;
pub mod scenario;

use cdnpeer_core::sim::Violation;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("scenario has {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    /// 1 for usage and validation problems, 2 for runtime I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}
