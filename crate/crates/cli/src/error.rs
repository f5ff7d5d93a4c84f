use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] idm_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{failed} of {total} reproduction checks failed")]
    Checks { failed: usize, total: usize },
}

impl CliError {
    pub fn key(key: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Config(format!("`{key}`: {reason}"))
    }

    /// Downstream reader closed the pipe (e.g. `idm ... | head`).
    pub fn is_broken_pipe(&self) -> bool {
        let kind = match self {
            CliError::Io(e) => Some(e.kind()),
            CliError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e.kind()),
                _ => None,
            },
            CliError::Json(e) => e.io_error_kind(),
            _ => None,
        };
        kind == Some(std::io::ErrorKind::BrokenPipe)
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 3,
            CliError::Checks { .. } => 4,
        })
    }
}

pub type CliResult<T> = Result<T, CliError>;
