//! Error type shared by the core library.

use core::fmt;

/// Errors reported by construction and solver entry points.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// Operand shapes do not line up.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// A value that must be finite was NaN or infinite.
    NonFinite { context: &'static str },
    /// A matrix or vector dimension was zero where at least one is required.
    EmptyDimension { context: &'static str },
    /// Spectral norm estimation was asked for on an all-zero matrix.
    ZeroMatrix,
    /// A solver configuration field violates its contract.
    InvalidConfig { reason: &'static str },
    /// A parameter is outside its admissible range.
    InvalidParameter { context: &'static str },
    /// The phantom generator cannot reach the requested sparsity.
    UnreachableSparsity { requested: usize, capacity: usize },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::DimensionMismatch {
                context,
                expected,
                got,
            } => write!(
                f,
                "dimension mismatch in {context}: expected {expected}, got {got}"
            ),
            CoreError::NonFinite { context } => {
                write!(f, "non-finite value in {context}")
            }
            CoreError::EmptyDimension { context } => {
                write!(f, "zero dimension in {context}")
            }
            CoreError::ZeroMatrix => {
                write!(f, "spectral norm of an all-zero matrix is undefined for power iteration")
            }
            CoreError::InvalidConfig { reason } => {
                write!(f, "invalid solver configuration: {reason}")
            }
            CoreError::InvalidParameter { context } => {
                write!(f, "invalid parameter: {context}")
            }
            CoreError::UnreachableSparsity {
                requested,
                capacity,
            } => write!(
                f,
                "requested sparsity {requested} exceeds the {capacity} pixels the generator can produce"
            ),
        }
    }
}

impl core::error::Error for CoreError {}
