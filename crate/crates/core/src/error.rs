use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate drive: {0}")]
    DegenerateDrive(String),
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("no convergence: {0}")]
    ConvergenceFailure(String),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
