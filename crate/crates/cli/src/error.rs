use std::path::PathBuf;

use ehp_duffing::experiments::ExperimentError;
use ehp_duffing::{IntegrateError, RkfError};

/// Everything a command can fail with, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments or an unusable configuration.
    #[error("{0}")]
    Usage(String),
    /// An output file could not be written.
    #[error("cannot write {path}: {source}")]
    Io {
        /// File being written.
        path: PathBuf,
        /// Underlying failure.
        source: std::io::Error,
    },
    /// The integration itself broke down.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    /// Process exit code: 1 for usage and IO problems, 2 for numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::Step { .. } => CliError::Numerical(format!("integration failed: {e}")),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<RkfError> for CliError {
    fn from(e: RkfError) -> Self {
        match e {
            RkfError::InvalidConfig | RkfError::InvalidSampleTimes => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(format!("RKF45 integration failed: {e}")),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Integrate(inner) => inner.into(),
            ExperimentError::Reference(inner) => inner.into(),
            ExperimentError::EmptyGrid | ExperimentError::InvalidDtList(_) => {
                CliError::Usage(e.to_string())
            }
            ExperimentError::GridMismatch => CliError::Numerical(e.to_string()),
        }
    }
}
