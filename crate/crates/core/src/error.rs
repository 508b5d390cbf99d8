use thiserror::Error;

/// Errors produced by the estimation, optimization and sampling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("target probability {p} outside bracket range [{lo}, {hi}]")]
    BracketViolation { p: f64, lo: f64, hi: f64 },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("unsupported query: {0}")]
    UnsupportedQuery(String),

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("near-singular parameterization: {0}")]
    NearSingular(String),

    #[error("non-finite objective at c = {c}")]
    NumericFailure { c: f64 },

    #[error("undefined diagnostic: {0}")]
    UndefinedDiagnostic(String),

    #[error("no finite values to aggregate")]
    EmptyCell,

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
