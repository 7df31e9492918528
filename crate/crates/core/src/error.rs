use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: need m >= 2")]
    InvalidDimension(usize),
    #[error("argument {0} outside [-1, 1]")]
    OutOfRange(f64),
    #[error("invalid polynomial parameters: {0}")]
    InvalidParameters(String),
    #[error("degree {0} exceeds the supported maximum {max}", max = crate::orthopoly::MAX_DEGREE)]
    UnsupportedDegree(usize),
    #[error("value overflowed double precision: {0}")]
    Overflow(String),
    #[error("unsupported for this space: {0}")]
    Unsupported(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid coefficient scheme: {0}")]
    InvalidScheme(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid generators: {0}")]
    InvalidGenerators(String),
    #[error("sampling failed after {0} resamples")]
    SamplingFailed(usize),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("wrong certifier: {0}")]
    WrongCertifier(String),
    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
