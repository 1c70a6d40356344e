//! Finite real vectors with exact-zero sparsity accounting.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;

/// A length-N real vector of signal coefficients.
///
/// All entries are finite by construction. The l0 count uses exact equality
/// with zero: every solver in this crate produces exact zeros by thresholding,
/// so no epsilon fudging is needed or wanted.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector {
    values: Vec<f64>,
}

impl SignalVector {
    /// Wraps a vector of finite values.
    pub fn new(values: Vec<f64>) -> Result<Self, CoreError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "SignalVector entries",
            });
        }
        Ok(SignalVector { values })
    }

    /// The all-zero vector of length `n`.
    pub fn zeros(n: usize) -> Self {
        SignalVector {
            values: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// Number of exactly nonzero entries.
    pub fn l0_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }

    /// Euclidean norm.
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| v * v).sum())
    }

    /// Sum of absolute values.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| libm::fabs(*v)).sum()
    }
}

impl core::ops::Index<usize> for SignalVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Squared Euclidean norm of a slice.
pub fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Euclidean norm of a slice.
pub fn norm(v: &[f64]) -> f64 {
    libm::sqrt(norm_sq(v))
}

/// Inner product of two equal-length slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
