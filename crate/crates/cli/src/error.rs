use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Physics(#[from] respole::Error),
    #[error("invalid scenario `{scenario}`: {message}")]
    Validation { scenario: String, message: String },
    #[error("unknown figure {0}: expected 1 to 7")]
    InvalidFigure(u32),
    #[error("configuration error in {path}: {message}")]
    Config { path: String, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for physics and validation failures, 2 for I/O and configuration failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Physics(_) | Self::Validation { .. } | Self::InvalidFigure(_) => 1,
            Self::Config { .. } | Self::Io { .. } => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(scenario: &str, message: impl Into<String>) -> Self {
        Self::Validation {
            scenario: scenario.to_owned(),
            message: message.into(),
        }
    }
}
