use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by the CLI and the C ABI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidInput,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{key}: {msg}")]
    Format { key: String, msg: String },

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("domain error: xi = {xi} outside [{a}, {b}]")]
    Domain { xi: f64, a: f64, b: f64 },

    #[error("P1 not invertible")]
    SingularP1,

    #[error("P1 numerically singular (smallest |eigenvalue| {0:e})")]
    NumericallySingularP1(f64),

    #[error("H not positive definite at xi = {0}")]
    HamiltonianNotPositive(f64),

    #[error("not uniformly hyperbolic: {0}")]
    NotUniformlyHyperbolic(String),

    #[error("boundary matrix singular: s outside usable resolvent region (condition number {cond:e})")]
    Resolvent { cond: f64 },

    #[error("closed-form V/U requires P0^D = 0 (max |P0^D| = {0:e})")]
    P0DNonzero(f64),

    #[error("incompatible delay bases")]
    IncompatibleBases,

    #[error("nonpositive delay {0}")]
    NonpositiveDelay(f64),

    #[error("boundary coupling singular")]
    BoundaryCouplingSingular,

    #[error("no decay certificate")]
    NoDecayCertificate,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Resolvent { .. }
            | Error::Numerical(_)
            | Error::NotUniformlyHyperbolic(_)
            | Error::BoundaryCouplingSingular
            | Error::NoDecayCertificate
            | Error::P0DNonzero(_) => ErrorKind::Numerical,
            _ => ErrorKind::InvalidInput,
        }
    }

    pub(crate) fn format(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Format { key: key.into(), msg: msg.into() }
    }
}
