use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] rescycle_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 3 when an
    /// integration leaves the admissible region, 4 when a bisection bracket
    /// does not straddle its criterion, 1 for I/O failures.
    pub fn exit_code(&self) -> u8 {
        use rescycle_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Model(E::Diverged { .. } | E::FloorViolation { .. } | E::Singular(_)) => 3,
            CliError::Model(E::NoSignChange { .. }) => 4,
            CliError::Model(_) => 2,
            CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
