use std::path::PathBuf;

use epstein_core::Error as CoreError;
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;
pub const EXIT_VERIFICATION: u8 = 4;

/// Failures of a CLI run, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("solver failure: {0}")]
    Solver(CoreError),

    #[error("computation failed: {0}")]
    Compute(CoreError),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) => EXIT_NONCONVERGENCE,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Compute(_) | CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e.root() {
            CoreError::NonConvergence { .. }
            | CoreError::Ellipticity(_)
            | CoreError::Unconverged { .. } => CliError::Solver(e),
            CoreError::Domain { .. }
            | CoreError::InvalidConfig(_)
            | CoreError::InvalidSurface(_) => CliError::Config(e.to_string()),
            _ => CliError::Compute(e),
        }
    }
}
