//! CoSaMP baseline: compressive sampling matching pursuit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::matrix::DenseMatrix;
use crate::signal::{norm, norm_sq, SignalVector};
use crate::solvers::config::SolverConfig;
use crate::solvers::trace::{SolveResult, SolveTrace, SolverWarning, StopReason, TraceRecord};
use crate::thresholding::top_k_slice;

/// Cholesky factorization of a symmetric matrix stored row-major; returns the
/// lower factor or None when a pivot is not strictly positive.
fn cholesky(g: &[f64], s: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; s * s];
    for i in 0..s {
        for j in 0..=i {
            let mut acc = g[i * s + j];
            for k in 0..j {
                acc -= l[i * s + k] * l[j * s + k];
            }
            if i == j {
                if acc <= 0.0 {
                    return None;
                }
                l[i * s + i] = libm::sqrt(acc);
            } else {
                l[i * s + j] = acc / l[j * s + j];
            }
        }
    }
    Some(l)
}

/// Solves L L^T x = b in place given the lower factor.
fn cholesky_solve(l: &[f64], s: usize, b: &mut [f64]) {
    // Forward substitution L z = b.
    for i in 0..s {
        let mut acc = b[i];
        for k in 0..i {
            acc -= l[i * s + k] * b[k];
        }
        b[i] = acc / l[i * s + i];
    }
    // Back substitution L^T x = z.
    for i in (0..s).rev() {
        let mut acc = b[i];
        for k in (i + 1)..s {
            acc -= l[k * s + i] * b[k];
        }
        b[i] = acc / l[i * s + i];
    }
}

fn magnitude_order(v: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_unstable_by(|&i, &j| {
        let mi = libm::fabs(v[i]);
        let mj = libm::fabs(v[j]);
        mj.partial_cmp(&mi).expect("finite magnitudes").then(i.cmp(&j))
    });
    order
}

/// CoSaMP: per iteration, merge the supports of the 2K largest proxy entries
/// with the current support, least-squares on the merged columns, prune to
/// the K largest, and update the residual. Stops when the residual norm
/// stagnates (relative change at or below `tol`) or at `max_iters`.
///
/// The restricted least-squares problem is solved via the normal equations
/// with a Cholesky factorization; a singular restricted Gram matrix gets a
/// Tikhonov ridge of `1e-10 * trace` and the run records a warning.
pub fn cosamp_solve(
    a: &DenseMatrix,
    y: &[f64],
    config: &SolverConfig,
) -> Result<SolveResult, CoreError> {
    config.validate()?;
    let m = a.rows();
    let n = a.cols();
    if y.len() != m {
        return Err(CoreError::DimensionMismatch {
            context: "cosamp: measurement length vs matrix rows",
            expected: m,
            got: y.len(),
        });
    }
    let k_sparse = config.sparsity_k;
    if k_sparse == 0 {
        return Err(CoreError::InvalidConfig {
            reason: "CoSaMP requires sparsity_k >= 1",
        });
    }

    let mut warnings = Vec::new();
    if 3 * k_sparse > m {
        warnings.push(SolverWarning::SparsityExceedsRecommended { k: k_sparse, m });
    }

    let mu = config.mu;
    let tol = config.tol;
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = y.to_vec();
    let mut prev_residual_norm = norm(&r);
    let mut proxy = vec![0.0; n];
    let mut ax = vec![0.0; m];
    let mut records: Vec<TraceRecord> = Vec::new();
    let mut cum_step_sum = 0.0;
    let mut stop_reason = StopReason::MaxIters;
    let mut iterations = config.max_iters;

    let l0 = |v: &[f64]| v.iter().filter(|&&t| t != 0.0).count();

    for k in 0..config.max_iters {
        a.apply_adjoint_into(&r, &mut proxy);
        let order = magnitude_order(&proxy);
        let mut support: Vec<usize> = order[..(2 * k_sparse).min(n)].to_vec();
        support.extend((0..n).filter(|&i| x[i] != 0.0));
        support.sort_unstable();
        support.dedup();
        let s = support.len();

        // Gather the restricted columns (column-major buffer).
        let mut cols = vec![0.0; s * m];
        for (c, &j) in support.iter().enumerate() {
            for i in 0..m {
                cols[c * m + i] = a.get(i, j);
            }
        }
        // Normal equations: G = B^T B, rhs = B^T y.
        let mut gram = vec![0.0; s * s];
        for p in 0..s {
            for q in 0..=p {
                let mut acc = 0.0;
                let (cp, cq) = (&cols[p * m..(p + 1) * m], &cols[q * m..(q + 1) * m]);
                for (u, v) in cp.iter().zip(cq) {
                    acc += u * v;
                }
                gram[p * s + q] = acc;
                gram[q * s + p] = acc;
            }
        }
        let mut rhs = vec![0.0; s];
        for (p, slot) in rhs.iter_mut().enumerate() {
            let cp = &cols[p * m..(p + 1) * m];
            *slot = cp.iter().zip(y).map(|(u, v)| u * v).sum();
        }

        let factor = match cholesky(&gram, s) {
            Some(f) => Some(f),
            None => {
                // Singular restricted system: add a ridge and retry.
                warnings.push(SolverWarning::RegularizedLeastSquares { iteration: k });
                let trace: f64 = (0..s).map(|i| gram[i * s + i]).sum();
                let ridge = 1e-10 * trace;
                for i in 0..s {
                    gram[i * s + i] += ridge;
                }
                cholesky(&gram, s)
            }
        };
        let mut x_next = vec![0.0; n];
        if let Some(l) = factor {
            cholesky_solve(&l, s, &mut rhs);
            for (c, &j) in support.iter().enumerate() {
                x_next[j] = rhs[c];
            }
            top_k_slice(&mut x_next, k_sparse);
        }
        // A fully degenerate system (all-zero columns) leaves x_next at zero.

        let r2_at_x = norm_sq(&r);
        a.apply_into(&x_next, &mut ax);
        let step_norm_sq: f64 = x_next
            .iter()
            .zip(&x)
            .map(|(p, q)| (p - q) * (p - q))
            .sum();
        cum_step_sum += step_norm_sq;
        records.push(TraceRecord {
            k,
            tau_k: 0.0,
            objective_l1: l0(&x) as f64 + 0.5 * mu * r2_at_x,
            step_norm_sq,
            cum_step_sum,
            residual_norm_sq: r2_at_x,
            nnz: l0(&x),
        });

        for (slot, (&yi, &ai)) in r.iter_mut().zip(y.iter().zip(&ax)) {
            *slot = yi - ai;
        }
        x = x_next;
        let residual_norm = norm(&r);
        if libm::fabs(prev_residual_norm - residual_norm)
            <= tol * prev_residual_norm.max(1e-300)
        {
            stop_reason = StopReason::Tolerance;
            iterations = k + 1;
            break;
        }
        prev_residual_norm = residual_norm;
    }

    let r2 = norm_sq(&r);
    records.push(TraceRecord {
        k: iterations,
        tau_k: 0.0,
        objective_l1: l0(&x) as f64 + 0.5 * mu * r2,
        step_norm_sq: 0.0,
        cum_step_sum,
        residual_norm_sq: r2,
        nnz: l0(&x),
    });

    Ok(SolveResult {
        x_final: SignalVector::new(x)?,
        trace: SolveTrace { records },
        stop_reason,
        iterations,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::gaussian_matrix;
    use crate::rng::RngStream;
    use crate::solvers::config::{InitMode, StepRule};

    fn config(k: usize) -> SolverConfig {
        SolverConfig {
            mu: 1.0,
            sparsity_k: k,
            tol: 1e-6,
            max_iters: 100,
            init_mode: InitMode::Zero,
            step_rule: StepRule::FixedTau(1.0),
        }
    }

    #[test]
    fn cholesky_solves_spd_system() {
        // G = [[4,2],[2,3]], b = [2, 5] has solution [-0.5, 2].
        let g = vec![4.0, 2.0, 2.0, 3.0];
        let l = cholesky(&g, 2).expect("SPD matrix must factor");
        let mut b = vec![2.0, 5.0];
        cholesky_solve(&l, 2, &mut b);
        assert!((b[0] + 0.5).abs() < 1e-12 && (b[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_singular() {
        let g = vec![1.0, 1.0, 1.0, 1.0];
        assert!(cholesky(&g, 2).is_none());
    }

    #[test]
    fn recovers_exactly_sparse_signal() {
        let mut rng = RngStream::new(20);
        let a = gaussian_matrix(64, 128, &mut rng).unwrap();
        let mut x_hat = vec![0.0; 128];
        let mut placed = 0;
        while placed < 5 {
            let i = rng.uniform_index(128);
            if x_hat[i] == 0.0 {
                x_hat[i] = rng.normal();
                placed += 1;
            }
        }
        let x_hat = SignalVector::new(x_hat).unwrap();
        let y = a.apply(&x_hat).unwrap();
        let result = cosamp_solve(&a, &y, &config(5)).unwrap();
        let err: f64 = result
            .x_final
            .as_slice()
            .iter()
            .zip(x_hat.as_slice())
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt()
            / x_hat.l2_norm();
        assert!(
            err < 1e-6,
            "noiseless CoSaMP should recover exactly, relative error {err}"
        );
    }

    #[test]
    fn matches_exhaustive_support_search_at_tiny_size() {
        // N = 12, M = 8, K = 2, noiseless: brute-force every 2-support's
        // least-squares fit; CoSaMP must find a residual at least as small.
        let mut rng = RngStream::new(21);
        let a = gaussian_matrix(8, 12, &mut rng).unwrap();
        let mut x_hat = vec![0.0; 12];
        x_hat[2] = 1.3;
        x_hat[9] = -0.8;
        let x_hat = SignalVector::new(x_hat).unwrap();
        let y = a.apply(&x_hat).unwrap();
        let result = cosamp_solve(&a, &y, &config(2)).unwrap();

        let mut best = f64::INFINITY;
        for i in 0..12 {
            for j in (i + 1)..12 {
                // 2x2 normal equations on columns (i, j).
                let (mut g00, mut g01, mut g11, mut b0, mut b1) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for row in 0..8 {
                    let (u, v) = (a.get(row, i), a.get(row, j));
                    g00 += u * u;
                    g01 += u * v;
                    g11 += v * v;
                    b0 += u * y[row];
                    b1 += v * y[row];
                }
                let det = g00 * g11 - g01 * g01;
                if det.abs() < 1e-12 {
                    continue;
                }
                let ci = (b0 * g11 - b1 * g01) / det;
                let cj = (g00 * b1 - g01 * b0) / det;
                let mut res = 0.0;
                for row in 0..8 {
                    let d = y[row] - ci * a.get(row, i) - cj * a.get(row, j);
                    res += d * d;
                }
                best = best.min(res);
            }
        }
        let final_res = result.trace.last().unwrap().residual_norm_sq;
        assert!(
            final_res <= best + 1e-9,
            "CoSaMP residual {final_res} worse than exhaustive best {best}"
        );
    }

    #[test]
    fn zero_measurements_give_zero_in_one_iteration() {
        let mut rng = RngStream::new(22);
        let a = gaussian_matrix(10, 20, &mut rng).unwrap();
        let result = cosamp_solve(&a, &vec![0.0; 10], &config(3)).unwrap();
        assert!(result.x_final.as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(result.iterations, 1);
    }

    #[test]
    fn warns_when_sparsity_too_high_for_measurements() {
        let mut rng = RngStream::new(23);
        let a = gaussian_matrix(10, 20, &mut rng).unwrap();
        let mut y = vec![0.0; 10];
        rng.fill_normal(&mut y);
        let result = cosamp_solve(&a, &y, &config(10)).unwrap();
        assert!(
            result
                .warnings
                .iter()
                .any(|w| matches!(w, SolverWarning::SparsityExceedsRecommended { .. })),
            "3K > M must produce a warning but still run"
        );
    }

    #[test]
    fn rejects_zero_sparsity() {
        let a = DenseMatrix::identity(3);
        assert!(cosamp_solve(&a, &[1.0, 2.0, 3.0], &config(0)).is_err());
    }
}
