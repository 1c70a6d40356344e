//! The l0 objective and its proximal-linearized surrogate.

use alloc::vec;

use crate::error::CoreError;
use crate::matrix::DenseMatrix;
use crate::signal::{dot, norm_sq, SignalVector};

fn check_dims(
    a: &DenseMatrix,
    x: &SignalVector,
    y: &[f64],
) -> Result<(), CoreError> {
    if x.len() != a.cols() {
        return Err(CoreError::DimensionMismatch {
            context: "objective: signal length vs matrix cols",
            expected: a.cols(),
            got: x.len(),
        });
    }
    if y.len() != a.rows() {
        return Err(CoreError::DimensionMismatch {
            context: "objective: measurement length vs matrix rows",
            expected: a.rows(),
            got: y.len(),
        });
    }
    Ok(())
}

/// The l0 objective `L1(x, mu) = ||x||_0 + (mu/2) ||y - A x||_2^2`.
///
/// The l0 term counts exact nonzeros; thresholding solvers produce exact
/// zeros, so no epsilon is involved.
pub fn objective_l1(
    x: &SignalVector,
    y: &[f64],
    a: &DenseMatrix,
    mu: f64,
) -> Result<f64, CoreError> {
    check_dims(a, x, y)?;
    let mut ax = vec![0.0; a.rows()];
    a.apply_into(x.as_slice(), &mut ax);
    let residual_sq: f64 = y
        .iter()
        .zip(&ax)
        .map(|(yi, ai)| (yi - ai) * (yi - ai))
        .sum();
    Ok(x.l0_count() as f64 + 0.5 * mu * residual_sq)
}

/// The surrogate
///
/// ```text
/// L2(x, mu, x_k, tau_k) = ||x||_0 + (mu / 2 tau_k) ||x - x_k||^2
///                         - mu <A^T (y - A x_k), x - x_k>
///                         + (mu/2) ||y - A x_k||^2,
/// ```
///
/// the proximal linearization of the residual term around x_k. Minimizing it
/// in x is exactly one hard-thresholding step.
pub fn surrogate_l2(
    x: &SignalVector,
    x_k: &SignalVector,
    y: &[f64],
    a: &DenseMatrix,
    mu: f64,
    tau_k: f64,
) -> Result<f64, CoreError> {
    check_dims(a, x, y)?;
    if x_k.len() != x.len() {
        return Err(CoreError::DimensionMismatch {
            context: "surrogate_l2: x vs x_k length",
            expected: x.len(),
            got: x_k.len(),
        });
    }
    if !(tau_k > 0.0) {
        return Err(CoreError::InvalidParameter {
            context: "surrogate_l2 requires tau_k > 0",
        });
    }
    let mut ax_k = vec![0.0; a.rows()];
    a.apply_into(x_k.as_slice(), &mut ax_k);
    let residual_k: alloc::vec::Vec<f64> =
        y.iter().zip(&ax_k).map(|(yi, ai)| yi - ai).collect();
    let mut grad = vec![0.0; a.cols()];
    a.apply_adjoint_into(&residual_k, &mut grad);
    let dx: alloc::vec::Vec<f64> = x
        .as_slice()
        .iter()
        .zip(x_k.as_slice())
        .map(|(xi, ki)| xi - ki)
        .collect();
    Ok(x.l0_count() as f64 + 0.5 * mu / tau_k * norm_sq(&dx) - mu * dot(&grad, &dx)
        + 0.5 * mu * norm_sq(&residual_k))
}
