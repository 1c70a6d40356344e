//! Reconstruction quality metrics.

use crate::error::CoreError;
use crate::signal::SignalVector;
use crate::solvers::StopReason;

/// Relative error `||x - x_true||_2 / ||x_true||_2 * 100`, in percent.
pub fn rel_err(x: &SignalVector, x_true: &SignalVector) -> Result<f64, CoreError> {
    if x.len() != x_true.len() {
        return Err(CoreError::DimensionMismatch {
            context: "rel_err: reconstruction vs ground truth length",
            expected: x_true.len(),
            got: x.len(),
        });
    }
    let denom = x_true.l2_norm();
    if denom == 0.0 {
        return Err(CoreError::InvalidParameter {
            context: "rel_err is undefined for an all-zero ground truth",
        });
    }
    let diff_sq: f64 = x
        .as_slice()
        .iter()
        .zip(x_true.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(libm::sqrt(diff_sq) / denom * 100.0)
}

/// Peak signal-to-noise ratio in dB.
///
/// Convention used throughout this crate (stated here because published dB
/// figures depend on the convention and are not comparable otherwise):
///
/// ```text
/// PSNR = 10 log10( N * (max_i |x_true_i|)^2 / ||x - x_true||_2^2 ),
/// ```
///
/// i.e. peak = the largest ground-truth magnitude and the MSE runs over all
/// N entries. An exact match returns the `+inf` sentinel.
pub fn psnr(x: &SignalVector, x_true: &SignalVector) -> Result<f64, CoreError> {
    if x.len() != x_true.len() {
        return Err(CoreError::DimensionMismatch {
            context: "psnr: reconstruction vs ground truth length",
            expected: x_true.len(),
            got: x.len(),
        });
    }
    let peak = x_true
        .as_slice()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(libm::fabs(*v)));
    if peak == 0.0 {
        return Err(CoreError::InvalidParameter {
            context: "psnr is undefined for an all-zero ground truth",
        });
    }
    let diff_sq: f64 = x
        .as_slice()
        .iter()
        .zip(x_true.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if diff_sq == 0.0 {
        return Ok(f64::INFINITY);
    }
    let n = x.len() as f64;
    Ok(10.0 * libm::log10(n * peak * peak / diff_sq))
}

/// Per-solver, per-trial result row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub rel_err_percent: f64,
    pub psnr_db: f64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub wall_time_seconds: f64,
}
