use std::path::Path;

use thiserror::Error;

/// Anything that ends a run early. Each variant maps to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] roofcast_core::Error),

    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Tolerance(String),
}

impl CliError {
    /// 0 success, 1 tolerance failure, 2 input-data error, 3 configuration error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Tolerance(_) => 1,
            CliError::Input(_) => 2,
            CliError::Core(e) if e.is_configuration() => 3,
            CliError::Core(_) => 2,
        }
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
