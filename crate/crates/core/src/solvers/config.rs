//! Solver configuration.

use crate::error::CoreError;

/// Starting point of an iterative solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// x0 = 0. The step-sum bound of the convergence analysis needs this.
    Zero,
    /// x0 = A^T y, the directly reconstructed signal. The benchmark protocol
    /// starts here.
    AdjointMeasurement,
}

/// How the step size tau_k is chosen each iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// tau_k = min(1 / r2, r2) with r2 the squared residual norm: small in
    /// the beginning and the end of a run, large in the middle.
    PaperAdaptive,
    /// A constant step size.
    FixedTau(f64),
    /// tau = 1 / (||A||_2^2 + delta), the safe bound under which descent and
    /// step summability are guaranteed.
    SafeBound { delta: f64 },
}

/// Shared configuration for the iterative solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Penalty weight mu of the l0 objective; larger mu weighs the residual
    /// more heavily and lowers the hard threshold.
    pub mu: f64,
    /// Sparsity budget K used by the IHT and CoSaMP baselines.
    pub sparsity_k: usize,
    /// Relative-change stopping tolerance: stop when
    /// ||x^{k+1} - x^k|| / ||x^k|| <= tol (absolute when ||x^k|| = 0).
    pub tol: f64,
    /// Iteration budget.
    pub max_iters: usize,
    pub init_mode: InitMode,
    pub step_rule: StepRule,
}

impl SolverConfig {
    /// Checks the contracts every solver relies on.
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(CoreError::InvalidConfig {
                reason: "mu must be positive and finite",
            });
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(CoreError::InvalidConfig {
                reason: "tol must be positive and finite",
            });
        }
        if self.max_iters == 0 {
            return Err(CoreError::InvalidConfig {
                reason: "max_iters must be at least 1",
            });
        }
        match self.step_rule {
            StepRule::FixedTau(tau) if !(tau > 0.0) || !tau.is_finite() => {
                Err(CoreError::InvalidConfig {
                    reason: "FixedTau step size must be positive and finite",
                })
            }
            StepRule::SafeBound { delta } if !(delta > 0.0) || !delta.is_finite() => {
                Err(CoreError::InvalidConfig {
                    reason: "SafeBound delta must be positive and finite",
                })
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SolverConfig {
        SolverConfig {
            mu: 350.0,
            sparsity_k: 10,
            tol: 1e-5,
            max_iters: 100,
            init_mode: InitMode::AdjointMeasurement,
            step_rule: StepRule::PaperAdaptive,
        }
    }

    #[test]
    fn accepts_valid_config() {
        assert!(base().validate().is_ok());
    }

    #[test]
    fn rejects_bad_fields() {
        let mut c = base();
        c.mu = 0.0;
        assert!(c.validate().is_err());

        let mut c = base();
        c.tol = -1.0;
        assert!(c.validate().is_err());

        let mut c = base();
        c.max_iters = 0;
        assert!(c.validate().is_err());

        let mut c = base();
        c.step_rule = StepRule::FixedTau(0.0);
        assert!(c.validate().is_err());

        let mut c = base();
        c.step_rule = StepRule::SafeBound { delta: 0.0 };
        assert!(c.validate().is_err());
    }
}
