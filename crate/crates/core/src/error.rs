use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Machine-readable error class, shared by the library and the job runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorCode {
    #[serde(rename = "BAD_INPUT")]
    BadInput,
    #[serde(rename = "UNDERSAMPLED")]
    Undersampled,
    #[serde(rename = "ILL_CONDITIONED")]
    IllConditioned,
}

impl ErrorCode {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCode::BadInput => 2,
            ErrorCode::Undersampled => 3,
            ErrorCode::IllConditioned => 4,
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorCode::BadInput => "BAD_INPUT",
            ErrorCode::Undersampled => "UNDERSAMPLED",
            ErrorCode::IllConditioned => "ILL_CONDITIONED",
        })
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square and even-dimensional ({rows}x{cols})")]
    OddDimension { rows: usize, cols: usize },

    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("matrix is not symmetric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },

    #[error("invalid Lagrangian frame: {0}")]
    InvalidFrame(String),

    #[error("planes are not transversal: {0}")]
    NotTransversal(String),

    #[error("path is not a loop (endpoint gap {gap:.3e})")]
    NotALoop { gap: f64 },

    #[error("paths are not consecutive (endpoint gap {gap:.3e})")]
    EndpointMismatch { gap: f64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path undersampled between t={t0} and t={t1} (phase step {step:.3})")]
    Undersampled { t0: f64, t1: f64, step: f64 },

    #[error("refinement limit reached: {0}")]
    RefinementExhausted(String),

    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    #[error("arity mismatch: cochain of arity {arity} needs {expected} points, got {found}")]
    ArityMismatch {
        arity: usize,
        expected: usize,
        found: usize,
    },

    #[error("bad input: {0}")]
    BadInput(String),
}

impl Error {
    pub fn code(&self) -> ErrorCode {
        match self {
            Error::Undersampled { .. } | Error::RefinementExhausted(_) => ErrorCode::Undersampled,
            Error::IllConditioned(_) => ErrorCode::IllConditioned,
            _ => ErrorCode::BadInput,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
