use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or input file; maps to exit code 2.
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("unknown experiment `{0}` (see `cylq list`)")]
    UnknownExperiment(String),
    #[error(transparent)]
    Core(#[from] cylq_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<cylq_core::lattice::LatticeError> for CliError {
    fn from(e: cylq_core::lattice::LatticeError) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    pub fn input(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Input { path: path.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } | CliError::UnknownExperiment(_) => 2,
            CliError::Core(cylq_core::Error::InvalidArgument(_))
            | CliError::Core(cylq_core::Error::InvalidSymbol(_))
            | CliError::Core(cylq_core::Error::DimensionMismatch { .. })
            | CliError::Core(cylq_core::Error::Json(_)) => 2,
            _ => 1,
        }
    }
}
