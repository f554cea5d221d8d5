use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error in {origin}: {message}")]
    Config { origin: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Csv { path: PathBuf, line: usize, message: String },

    #[error("{}: {message}", path.display())]
    Json { path: PathBuf, message: String },

    #[error("{cell}: {source}")]
    Solver {
        cell: String,
        #[source]
        source: adgd_core::Error,
    },

    #[error(transparent)]
    Core(#[from] adgd_core::Error),

    #[error("diagnostics failed: {0}")]
    Diagnostics(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 config, 3 numerical failure, 4 diagnostics, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use adgd_core::Error as E;
        let core = |e: &E| match e {
            E::InvalidParameter(_) | E::Generation(_) => 2,
            E::NumericalFailure { .. }
            | E::NonFinite { .. }
            | E::Factorization(_)
            | E::LinesearchStalled { .. }
            | E::StationaryDisplacement
            | E::AlreadyStationary
            | E::Asymmetric(_) => 3,
            _ => 1,
        };
        match self {
            HarnessError::Config { .. } => 2,
            HarnessError::Diagnostics(_) => 4,
            HarnessError::Core(e) | HarnessError::Solver { source: e, .. } => core(e),
            _ => 1,
        }
    }
}
