use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid Pauli label {0:?}")]
    InvalidPauli(char),
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
    #[error("effects are not informationally complete (smallest singular value {0:e})")]
    NotInformationallyComplete(f64),
    #[error("target operator is outside the span of the effects (residual {0:e})")]
    NotInSpan(f64),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("version mismatch: {0}")]
    VersionMismatch(String),
    #[error("noise model has no entry for {0}")]
    MissingNoise(String),
    #[error("tomography failed: {0}")]
    Tomography(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    /// True for errors caused by malformed or physically invalid input, as
    /// opposed to runtime failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Tomography(_) | Error::TooLarge(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
