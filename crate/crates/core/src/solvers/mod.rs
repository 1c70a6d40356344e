//! Sparse-recovery solvers and their shared configuration, trace and result
//! types.
//!
//! The main solver is [`iiht_solve`], inexact iterative hard thresholding for
//! the unconstrained l0 objective
//!
//! ```text
//! L1(x, mu) = ||x||_0 + (mu/2) ||y - A x||_2^2
//! ```
//!
//! with the iteration
//!
//! ```text
//! x^{k+1} = hard(x^k + tau_k A^T (y - A x^k), sqrt(2 tau_k / mu)).
//! ```
//!
//! Baselines: [`direct_recover`] (plain adjoint), [`iht_solve`] (top-K
//! projection), [`ist_solve`] (soft thresholding with an l1 target) and
//! [`cosamp_solve`]. All iterative solvers emit a per-iteration
//! [`SolveTrace`] rich enough to audit the convergence guarantees, which
//! [`verify_theorems`] does explicitly.

mod baselines;
mod config;
mod driver;
mod cosamp;
mod iiht;
mod objective;
mod trace;
mod verify;

pub use baselines::{direct_recover, iht_solve, ist_solve};
pub use config::{InitMode, SolverConfig, StepRule};
pub use cosamp::cosamp_solve;
pub use iiht::{iiht_solve, iiht_solve_with_operator, iiht_step, step_size_paper, TAU_MIN};
pub use objective::{objective_l1, surrogate_l2};
pub use trace::{SolveResult, SolveTrace, SolverWarning, StopReason, TraceRecord};
pub use verify::{verify_theorems, CheckKind, CheckStatus, TheoremCheck, TheoremReport};
