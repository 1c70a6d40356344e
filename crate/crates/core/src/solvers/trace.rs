//! Per-iteration traces and solver results.

use alloc::vec::Vec;

use crate::signal::SignalVector;

/// One row of a solver trace, describing the state x^k and the step leaving
/// it.
///
/// `objective_l1`, `residual_norm_sq` and `nnz` are evaluated at x^k.
/// `tau_k` is the step size used to move from x^k to x^{k+1} (for the final
/// record it is the value the rule would have produced next), `step_norm_sq`
/// is eps_k = ||x^{k+1} - x^k||_2^2 (zero on the final record), and
/// `cum_step_sum` is phi_k = sum of eps_i for i <= k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub tau_k: f64,
    pub objective_l1: f64,
    pub step_norm_sq: f64,
    pub cum_step_sum: f64,
    pub residual_norm_sq: f64,
    pub nnz: usize,
}

/// Full per-iteration trace; one record per visited iterate, including the
/// initial state, so its length is iterations performed + 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
}

impl SolveTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Relative change fell to the tolerance.
    Tolerance,
    /// The iteration budget ran out.
    MaxIters,
}

/// Non-fatal conditions noticed during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverWarning {
    /// CoSaMP was asked for a sparsity K with 3K > M; recovery guarantees
    /// assume more measurements, but the run proceeds.
    SparsityExceedsRecommended { k: usize, m: usize },
    /// A restricted least-squares system was singular and a Tikhonov ridge
    /// was added to factor it.
    RegularizedLeastSquares { iteration: usize },
}

/// Output of an iterative solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x_final: SignalVector,
    pub trace: SolveTrace,
    pub stop_reason: StopReason,
    /// Number of iterations performed (trace length minus one).
    pub iterations: usize,
    pub warnings: Vec<SolverWarning>,
}
