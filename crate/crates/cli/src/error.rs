use std::path::PathBuf;

use thiserror::Error;

pub type WorkbenchResult<T> = Result<T, WorkbenchError>;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Core(#[from] isacjam_core::Error),
}

impl WorkbenchError {
    /// Process exit status: 2 for configuration problems, 3 for numerical
    /// failures, 1 for I/O and malformed files.
    pub fn exit_code(&self) -> i32 {
        use isacjam_core::Error as E;
        match self {
            WorkbenchError::Config(_) => 2,
            WorkbenchError::Io { .. } | WorkbenchError::Format { .. } => 1,
            WorkbenchError::Core(E::Numerical { .. } | E::Degenerate(_) | E::Domain(_)) => 3,
            WorkbenchError::Core(_) => 2,
        }
    }
}
