//! Shared iteration driver for the gradient-step-then-shrink solvers.
//!
//! IIHT, IHT and IST all follow the same loop: form the residual, take a
//! gradient step `x + tau A^T (y - A x)`, then apply a shrinkage operator.
//! The driver owns the loop, the stopping rule and the trace bookkeeping so
//! the solvers only differ in their step-size rule and shrinkage.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::matrix::LinearOperator;
use crate::signal::{norm_sq, SignalVector};
use crate::solvers::config::{InitMode, SolverConfig};
use crate::solvers::trace::{SolveResult, SolveTrace, StopReason, TraceRecord};

fn l0_count(x: &[f64]) -> usize {
    x.iter().filter(|&&v| v != 0.0).count()
}

/// Runs the shared loop.
///
/// `tau_of(r2)` maps the squared residual norm at x^k to the step size tau_k.
/// `shrink(x_tilde, tau)` turns the gradient step into the next iterate in
/// place.
///
/// Per iteration the operator is used exactly once forward and once adjoint;
/// one extra forward application computes the initial residual (plus one
/// adjoint when initializing at A^T y).
pub(crate) fn gradient_shrink_solve<Op, TauFn, ShrinkFn>(
    op: &Op,
    y: &[f64],
    config: &SolverConfig,
    tau_of: TauFn,
    mut shrink: ShrinkFn,
) -> Result<SolveResult, CoreError>
where
    Op: LinearOperator,
    TauFn: Fn(f64) -> f64,
    ShrinkFn: FnMut(&mut [f64], f64),
{
    config.validate()?;
    let m = op.rows();
    let n = op.cols();
    if y.len() != m {
        return Err(CoreError::DimensionMismatch {
            context: "solver: measurement length vs operator rows",
            expected: m,
            got: y.len(),
        });
    }

    let mut x = vec![0.0; n];
    if config.init_mode == InitMode::AdjointMeasurement {
        op.apply_adjoint_into(y, &mut x);
    }

    let mut ax = vec![0.0; m];
    op.apply_into(&x, &mut ax);
    let mut r: Vec<f64> = y.iter().zip(&ax).map(|(yi, ai)| yi - ai).collect();

    let mut grad = vec![0.0; n];
    let mut x_next = vec![0.0; n];
    let mut records: Vec<TraceRecord> = Vec::with_capacity(config.max_iters + 1);
    let mut cum_step_sum = 0.0;
    let mut stop_reason = StopReason::MaxIters;
    let mut iterations = config.max_iters;

    let mu = config.mu;
    let tol = config.tol;

    for k in 0..config.max_iters {
        let r2 = norm_sq(&r);
        let tau = tau_of(r2);
        op.apply_adjoint_into(&r, &mut grad);
        for ((slot, &xi), &gi) in x_next.iter_mut().zip(&x).zip(&grad) {
            *slot = xi + tau * gi;
        }
        shrink(&mut x_next, tau);

        op.apply_into(&x_next, &mut ax);
        let step_norm_sq: f64 = x_next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        cum_step_sum += step_norm_sq;

        records.push(TraceRecord {
            k,
            tau_k: tau,
            objective_l1: l0_count(&x) as f64 + 0.5 * mu * r2,
            step_norm_sq,
            cum_step_sum,
            residual_norm_sq: r2,
            nnz: l0_count(&x),
        });

        let x_norm = libm::sqrt(norm_sq(&x));
        let change = libm::sqrt(step_norm_sq);
        let converged = if x_norm > 0.0 {
            change <= tol * x_norm
        } else {
            // The relative test is undefined at ||x^k|| = 0; compare the new
            // iterate's norm against the tolerance directly.
            libm::sqrt(norm_sq(&x_next)) <= tol
        };

        core::mem::swap(&mut x, &mut x_next);
        for (slot, (&yi, &ai)) in r.iter_mut().zip(y.iter().zip(&ax)) {
            *slot = yi - ai;
        }

        if converged {
            stop_reason = StopReason::Tolerance;
            iterations = k + 1;
            break;
        }
    }

    let r2 = norm_sq(&r);
    records.push(TraceRecord {
        k: iterations,
        tau_k: tau_of(r2),
        objective_l1: l0_count(&x) as f64 + 0.5 * mu * r2,
        step_norm_sq: 0.0,
        cum_step_sum,
        residual_norm_sq: r2,
        nnz: l0_count(&x),
    });

    Ok(SolveResult {
        x_final: SignalVector::new(x)?,
        trace: SolveTrace { records },
        stop_reason,
        iterations,
        warnings: Vec::new(),
    })
}
