use std::path::PathBuf;

use thiserror::Error;

/// Failure of one command, mapped to the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] rotorsim::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// Malformed input file other than a scenario.
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },

    #[error("{failed} of {total} sweep runs failed (see index.csv)")]
    Sweep {
        failed: usize,
        total: usize,
        numerical: bool,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn input(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Input {
            path: path.into(),
            message: message.into(),
        }
    }

    /// 1 for invalid input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if !e.is_validation() => 2,
            CliError::Sweep { numerical: true, .. } => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
