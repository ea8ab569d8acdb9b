use rivergraph::FormatError;
use thiserror::Error;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Format(_) | CliError::Input(_) => EXIT_INPUT,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }

    pub fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
