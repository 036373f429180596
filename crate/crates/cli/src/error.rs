use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI command, each mapped to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{0}")]
    Input(String),

    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },

    #[error("run aborted: {0}")]
    Aborted(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] wganlab_core::Error),
}

impl CliError {
    pub const EXIT_OK: i32 = 0;
    pub const EXIT_VERIFY: i32 = 1;
    pub const EXIT_INPUT: i32 = 2;
    pub const EXIT_ABORT: i32 = 3;

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification { .. } => Self::EXIT_VERIFY,
            CliError::Config { .. } | CliError::Input(_) => Self::EXIT_INPUT,
            CliError::Aborted(_) | CliError::Io { .. } | CliError::Core(_) => Self::EXIT_ABORT,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
