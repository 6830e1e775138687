use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NonSymmetric { asymmetry: f64 },
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NonHermitian { asymmetry: f64 },
    #[error("matrix is singular (pivot {pivot:e} at index {index})")]
    Singular { index: usize, pivot: f64 },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: String,
        found: String,
    },
    #[error("model is in the wrong time domain: {0}")]
    WrongDomain(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown system name `{0}`")]
    UnknownName(String),
    #[error("{solver} did not converge after {iterations} iterations")]
    NoConvergence { solver: &'static str, iterations: usize },
    #[error("matrix is not Schur stable: {0}")]
    NotStable(String),
    #[error("resolvent zI - A is numerically singular at theta = {theta}")]
    SingularResolvent { theta: f64 },
    #[error("matrix symbol unavailable: {0}")]
    SymbolUnavailable(String),
    #[error("eigenvalue {eigenvalue} of the N = {horizon} Hessian lies outside [{lower}, {upper}]")]
    ContainmentViolated {
        eigenvalue: f64,
        horizon: usize,
        lower: f64,
        upper: f64,
    },
    #[error("projection target set is empty")]
    InfeasibleProjection,
    #[error("projection does not describe a box: {0}")]
    NotABox(String),
    #[error("preconditioner unavailable: {0}")]
    PreconditionerUnavailable(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(context: &str, expected: impl ToString, found: impl ToString) -> Error {
    Error::DimensionMismatch {
        context: context.to_string(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
