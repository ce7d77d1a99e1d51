use thiserror::Error;

use crate::finspace::Kind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input data has the wrong shape (non-square, asymmetric, ragged).
    #[error("{0}")]
    Shape(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation not supported for kind {0}")]
    UnsupportedKind(Kind),

    #[error("scalar product is degenerate (eigenvalue {eigenvalue:e} below tolerance)")]
    Degenerate { eigenvalue: f64 },

    #[error("scalar product has index {index}, expected 1")]
    NotLorentz { index: usize },

    #[error("orientation vector is not timelike")]
    NotTimelike,

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The point lies outside the chart of a metric field.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix fails the {kind} axioms ({count} violations)")]
    AxiomViolation { kind: Kind, count: usize },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
