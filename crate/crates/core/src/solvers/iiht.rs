//! Inexact iterative hard thresholding.

use alloc::vec;

use crate::error::CoreError;
use crate::matrix::{spectral_norm_sq, DenseMatrix, LinearOperator};
use crate::matrix::{SPECTRAL_DEFAULT_MAX_ITERS, SPECTRAL_DEFAULT_TOL};
use crate::signal::SignalVector;
use crate::solvers::config::{SolverConfig, StepRule};
use crate::solvers::driver::gradient_shrink_solve;
use crate::solvers::trace::SolveResult;
use crate::thresholding::hard_slice;

/// Step-size floor returned by [`step_size_paper`] at exactly zero residual,
/// where the rule's 1/r2 branch would divide by zero. At zero residual the
/// gradient term vanishes, so the value is inert; it only keeps tau positive.
pub const TAU_MIN: f64 = 1e-12;

/// The adaptive step-size rule `tau_k = min(1 / r2, r2)` where `r2` is the
/// squared residual norm at the current iterate.
///
/// Small when the residual is very large (cautious start) or very small
/// (converged), largest at r2 = 1.
pub fn step_size_paper(residual_norm_sq: f64) -> f64 {
    debug_assert!(residual_norm_sq >= 0.0);
    if residual_norm_sq == 0.0 {
        return TAU_MIN;
    }
    let inv = 1.0 / residual_norm_sq;
    if inv < residual_norm_sq {
        inv
    } else {
        residual_norm_sq
    }
}

/// One IIHT step: `hard(x_k + tau A^T (y - A x_k), sqrt(2 tau / mu))`.
///
/// Costs exactly one forward and one adjoint application.
pub fn iiht_step(
    a: &DenseMatrix,
    y: &[f64],
    x_k: &SignalVector,
    mu: f64,
    tau_k: f64,
) -> Result<SignalVector, CoreError> {
    if !(tau_k > 0.0) || !(mu > 0.0) {
        return Err(CoreError::InvalidParameter {
            context: "iiht_step requires tau_k > 0 and mu > 0",
        });
    }
    if x_k.len() != a.cols() {
        return Err(CoreError::DimensionMismatch {
            context: "iiht_step: signal length vs matrix cols",
            expected: a.cols(),
            got: x_k.len(),
        });
    }
    if y.len() != a.rows() {
        return Err(CoreError::DimensionMismatch {
            context: "iiht_step: measurement length vs matrix rows",
            expected: a.rows(),
            got: y.len(),
        });
    }
    let mut ax = vec![0.0; a.rows()];
    a.apply_into(x_k.as_slice(), &mut ax);
    let residual: alloc::vec::Vec<f64> =
        y.iter().zip(&ax).map(|(yi, ai)| yi - ai).collect();
    let mut grad = vec![0.0; a.cols()];
    a.apply_adjoint_into(&residual, &mut grad);
    let mut x_tilde: alloc::vec::Vec<f64> = x_k
        .as_slice()
        .iter()
        .zip(&grad)
        .map(|(xi, gi)| xi + tau_k * gi)
        .collect();
    hard_slice(&mut x_tilde, libm::sqrt(2.0 * tau_k / mu));
    SignalVector::new(x_tilde)
}

/// IIHT over any linear operator.
///
/// The `SafeBound` step rule needs the squared spectral norm of the operator;
/// for a generic operator the caller must supply it through `spectral_hint`
/// (with a [`DenseMatrix`], use [`iiht_solve`] which estimates it itself).
pub fn iiht_solve_with_operator<Op: LinearOperator>(
    op: &Op,
    y: &[f64],
    config: &SolverConfig,
    spectral_hint: Option<f64>,
) -> Result<SolveResult, CoreError> {
    config.validate()?;
    let fixed_tau = match config.step_rule {
        StepRule::PaperAdaptive => None,
        StepRule::FixedTau(tau) => Some(tau),
        StepRule::SafeBound { delta } => {
            let s = spectral_hint.ok_or(CoreError::InvalidConfig {
                reason: "SafeBound step rule needs a spectral norm estimate",
            })?;
            Some(1.0 / (s + delta))
        }
    };
    let mu = config.mu;
    gradient_shrink_solve(
        op,
        y,
        config,
        move |r2| fixed_tau.unwrap_or_else(|| step_size_paper(r2)),
        move |x_tilde, tau| hard_slice(x_tilde, libm::sqrt(2.0 * tau / mu)),
    )
}

/// IIHT on a dense matrix: iterates [`iiht_step`] under the configured step
/// rule and stopping protocol, recording a full trace.
pub fn iiht_solve(
    a: &DenseMatrix,
    y: &[f64],
    config: &SolverConfig,
) -> Result<SolveResult, CoreError> {
    let hint = match config.step_rule {
        StepRule::SafeBound { .. } => Some(
            spectral_norm_sq(a, SPECTRAL_DEFAULT_MAX_ITERS, SPECTRAL_DEFAULT_TOL)?.value,
        ),
        _ => None,
    };
    iiht_solve_with_operator(a, y, config, hint)
}
