use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the Gamma function at x = {0}")]
    Pole(f64),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("initial datum of order {order} reaches {found:e}, above the admissible C^n n! = {limit:e}")]
    BoundViolation { order: usize, limit: f64, found: f64 },

    #[error("order mismatch: expected order {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("incompatible operands: {0}")]
    Shape(String),

    #[error("insufficient samples: need at least {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("regime mismatch: kappa = {kappa} belongs to the {actual} regime, not {requested}")]
    RegimeMismatch {
        kappa: f64,
        requested: &'static str,
        actual: &'static str,
    },

    #[error("invariant violated ({check}): {detail}")]
    Invariant { check: &'static str, detail: String },

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for this error class: 2 numerical, 3 configuration, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
