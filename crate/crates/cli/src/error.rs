use std::io;
use std::path::PathBuf;

use flowbox_core::dsl::ParseError;
use flowbox_core::verify::VerifyError;
use flowbox_core::ChartError;
use thiserror::Error;

/// Process exit codes. They are part of the command-line contract.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const EQUILIBRIUM: u8 = 2;
    pub const CONSTRUCTION: u8 = 3;
    pub const INPUT: u8 = 4;
    pub const VERIFICATION: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Equilibrium(ChartError),
    #[error("chart construction failed: {0}")]
    Construction(ChartError),
    #[error("invalid field definition {source_text:?}: {error}")]
    Parse { source_text: String, error: ParseError },
    #[error("{0}")]
    Input(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: not a valid {what} document: {source}", path.display())]
    Document { path: PathBuf, what: &'static str, source: serde_json::Error },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Equilibrium(_) => exit::EQUILIBRIUM,
            CliError::Construction(_) => exit::CONSTRUCTION,
            CliError::Parse { .. } | CliError::Input(_) | CliError::Io { .. } | CliError::Document { .. } => {
                exit::INPUT
            }
            CliError::Verification(_) => exit::VERIFICATION,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<ChartError> for CliError {
    fn from(e: ChartError) -> Self {
        match e {
            ChartError::Equilibrium { .. } => CliError::Equilibrium(e),
            ChartError::DimensionMismatch { .. } | ChartError::InvalidParameters(_) => CliError::Input(e.to_string()),
            _ => CliError::Construction(e),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::InvalidArgument(what) => CliError::Input(what.to_string()),
            other => CliError::Verification(other.to_string()),
        }
    }
}
