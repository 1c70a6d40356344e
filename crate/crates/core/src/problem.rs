//! Synthetic problem generation: sparse signals, an ellipse phantom, the
//! measurement matrix and the noise model.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::matrix::{gaussian_matrix, DenseMatrix};
use crate::rng::RngStream;
use crate::signal::SignalVector;

/// Scaling of the Gaussian measurement matrix.
///
/// Raw N(0, 1) entries give `||A||_2^2` of order N, which drives every
/// fixed-step solver at textbook step sizes to divergence and freezes the
/// adaptive rule at large N. Scaling entries by 1 / sqrt(M) gives columns of
/// unit expected norm, the conventional compressed-sensing operator on which
/// published benchmark figures are reproducible; the experiment harness uses
/// it by default, while raw entries remain available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixScale {
    /// Entries are i.i.d. N(0, 1) as sampled.
    RawGaussian,
    /// Entries scaled by 1 / sqrt(M): unit expected column norm.
    #[default]
    InverseSqrtM,
}

/// Parameters of a synthetic recovery problem.
///
/// M and K are derived from the sampling ratio SR = M/N and sparsity level
/// SL = K/N by round-half-up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub n: usize,
    pub sampling_ratio: f64,
    pub sparsity_level: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    pub scale: MatrixScale,
}

/// Round-half-up of a non-negative real.
fn round_half_up(v: f64) -> usize {
    libm::floor(v + 0.5) as usize
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.n == 0 {
            return Err(CoreError::InvalidParameter {
                context: "ProblemSpec.n must be positive",
            });
        }
        if !(self.sampling_ratio > 0.0 && self.sampling_ratio <= 1.0) {
            return Err(CoreError::InvalidParameter {
                context: "sampling_ratio must lie in (0, 1]",
            });
        }
        if !(self.sparsity_level > 0.0 && self.sparsity_level <= 1.0) {
            return Err(CoreError::InvalidParameter {
                context: "sparsity_level must lie in (0, 1]",
            });
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(CoreError::InvalidParameter {
                context: "noise_sigma must be finite and non-negative",
            });
        }
        if self.m() == 0 || self.k() == 0 {
            return Err(CoreError::InvalidParameter {
                context: "derived M and K must be at least 1",
            });
        }
        Ok(())
    }

    /// Number of measurements M = round(SR * N).
    pub fn m(&self) -> usize {
        round_half_up(self.sampling_ratio * self.n as f64)
    }

    /// Sparsity K = round(SL * N).
    pub fn k(&self) -> usize {
        round_half_up(self.sparsity_level * self.n as f64)
    }
}

/// A fully generated problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedProblem {
    pub a: DenseMatrix,
    pub x_true: SignalVector,
    pub y_clean: Vec<f64>,
    pub noise: Vec<f64>,
    pub y: Vec<f64>,
}

/// Vector with exactly `k` nonzeros at uniformly chosen positions, values
/// i.i.d. standard normal. Deterministic per stream state.
pub fn gen_sparse_signal(
    n: usize,
    k: usize,
    rng: &mut RngStream,
) -> Result<SignalVector, CoreError> {
    if k > n || k == 0 || n == 0 {
        return Err(CoreError::InvalidParameter {
            context: "gen_sparse_signal needs 1 <= k <= n",
        });
    }
    // Partial Fisher-Yates: the first k slots of the index pool become a
    // uniform sample without replacement.
    let mut pool: Vec<usize> = (0..n).collect();
    let mut values = vec![0.0; n];
    for i in 0..k {
        let j = i + rng.uniform_index(n - i);
        pool.swap(i, j);
        let mut v = rng.normal();
        while v == 0.0 {
            // A normal deviate of exactly 0.0 is essentially impossible but
            // would silently lower the sparsity; redraw.
            v = rng.normal();
        }
        values[pool[i]] = v;
    }
    SignalVector::new(values)
}

/// Measurement noise `e = sigma * mean(|y_clean|) * g`, g standard normal.
///
/// `sigma = 0` returns exact zeros without consuming the stream.
pub fn gen_noise(y_clean: &[f64], sigma: f64, rng: &mut RngStream) -> Vec<f64> {
    debug_assert!(sigma >= 0.0);
    if sigma == 0.0 || y_clean.is_empty() {
        return vec![0.0; y_clean.len()];
    }
    let mean_abs: f64 =
        y_clean.iter().map(|v| libm::fabs(*v)).sum::<f64>() / y_clean.len() as f64;
    let scale = sigma * mean_abs;
    y_clean.iter().map(|_| scale * rng.normal()).collect()
}

/// Sparse image of one-pixel-wide ellipse boundaries.
///
/// Random non-degenerate ellipses with random positive intensities are
/// rasterized until the image reaches `target_nnz` nonzero pixels; surplus
/// pixels of the last ellipse are removed so the count is hit exactly.
/// Returns the image row-major as a `side * side` signal.
pub fn ellipse_phantom(
    side: usize,
    target_nnz: usize,
    rng: &mut RngStream,
) -> Result<SignalVector, CoreError> {
    if side == 0 {
        return Err(CoreError::EmptyDimension {
            context: "ellipse_phantom side",
        });
    }
    let capacity = side * side;
    if target_nnz > capacity {
        return Err(CoreError::UnreachableSparsity {
            requested: target_nnz,
            capacity,
        });
    }
    let mut image = vec![0.0; capacity];
    if target_nnz == 0 {
        return SignalVector::new(image);
    }

    let mut nnz = 0usize;
    let mut attempts = 0usize;
    while nnz < target_nnz {
        attempts += 1;
        if attempts > 10_000 {
            return Err(CoreError::UnreachableSparsity {
                requested: target_nnz,
                capacity,
            });
        }
        let s = side as f64;
        let cx = (0.2 + 0.6 * rng.uniform()) * s;
        let cy = (0.2 + 0.6 * rng.uniform()) * s;
        let ra = (0.06 + 0.24 * rng.uniform()) * s;
        let rb = (0.06 + 0.24 * rng.uniform()) * s;
        let ra = ra.max(1.5);
        let rb = rb.max(1.5);
        let theta = 2.0 * core::f64::consts::PI * rng.uniform();
        let (sin_t, cos_t) = (libm::sin(theta), libm::cos(theta));
        let intensity = 0.5 + 0.5 * rng.uniform();

        // Parametric sweep dense enough that adjacent samples land on
        // neighboring pixels, giving a one-pixel-wide boundary.
        let samples = (8.0 * (ra.max(rb)) * core::f64::consts::PI) as usize + 16;
        let mut added: Vec<usize> = Vec::new();
        for i in 0..samples {
            let t = 2.0 * core::f64::consts::PI * i as f64 / samples as f64;
            let (ex, ey) = (ra * libm::cos(t), rb * libm::sin(t));
            let px = cx + ex * cos_t - ey * sin_t;
            let py = cy + ex * sin_t + ey * cos_t;
            let (ix, iy) = (libm::floor(px), libm::floor(py));
            if ix < 0.0 || iy < 0.0 || ix >= s || iy >= s {
                continue;
            }
            let idx = iy as usize * side + ix as usize;
            if image[idx] == 0.0 {
                image[idx] = intensity;
                added.push(idx);
                nnz += 1;
            }
        }
        if nnz > target_nnz {
            // Trim surplus pixels of this last ellipse, newest first.
            let surplus = nnz - target_nnz;
            for &idx in added.iter().rev().take(surplus) {
                image[idx] = 0.0;
            }
            nnz = target_nnz;
        }
    }
    SignalVector::new(image)
}

/// Generates the full instance for a [`ProblemSpec`]: matrix, signal, clean
/// and noisy measurements. Draw order is fixed (matrix, signal, noise), so an
/// equal spec reproduces the instance bit for bit.
pub fn generate_problem(spec: &ProblemSpec) -> Result<GeneratedProblem, CoreError> {
    spec.validate()?;
    let mut rng = RngStream::new(spec.seed);
    let a = gaussian_matrix(spec.m(), spec.n, &mut rng)?;
    let a = match spec.scale {
        MatrixScale::RawGaussian => a,
        MatrixScale::InverseSqrtM => {
            let factor = 1.0 / libm::sqrt(spec.m() as f64);
            let entries: Vec<f64> = a.entries().iter().map(|v| factor * v).collect();
            DenseMatrix::from_entries(spec.m(), spec.n, entries)?
        }
    };
    let x_true = gen_sparse_signal(spec.n, spec.k(), &mut rng)?;
    let y_clean = a.apply(&x_true)?;
    let noise = gen_noise(&y_clean, spec.noise_sigma, &mut rng);
    let y: Vec<f64> = y_clean.iter().zip(&noise).map(|(c, e)| c + e).collect();
    Ok(GeneratedProblem {
        a,
        x_true,
        y_clean,
        noise,
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_up() {
        let spec = ProblemSpec {
            n: 1024,
            sampling_ratio: 0.35,
            sparsity_level: 0.05,
            noise_sigma: 0.0,
            seed: 0,
            scale: MatrixScale::default(),
        };
        assert_eq!(spec.m(), 358, "0.35 * 1024 = 358.4 rounds to 358");
        assert_eq!(spec.k(), 51, "0.05 * 1024 = 51.2 rounds to 51");
        let spec2 = ProblemSpec { n: 10, sampling_ratio: 0.35, ..spec };
        assert_eq!(spec2.m(), 4, "3.5 rounds half up to 4");
    }

    #[test]
    fn sparse_signal_has_exact_support_size() {
        let mut rng = RngStream::new(40);
        for _ in 0..100 {
            let n = 2 + rng.uniform_index(200);
            let k = 1 + rng.uniform_index(n);
            let x = gen_sparse_signal(n, k, &mut rng).unwrap();
            assert_eq!(x.l0_count(), k, "requested {k} nonzeros in length {n}");
        }
    }

    #[test]
    fn sparse_signal_edge_cases() {
        let mut rng = RngStream::new(41);
        let dense = gen_sparse_signal(10, 10, &mut rng).unwrap();
        assert_eq!(dense.l0_count(), 10);
        let single = gen_sparse_signal(10, 1, &mut rng).unwrap();
        assert_eq!(single.l0_count(), 1);
        assert!(gen_sparse_signal(5, 6, &mut rng).is_err());
    }

    #[test]
    fn noise_zero_sigma_is_exactly_zero() {
        let mut rng = RngStream::new(42);
        let e = gen_noise(&[1.0, -2.0, 3.0], 0.0, &mut rng);
        assert_eq!(e, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn noise_scale_follows_model() {
        // With y_clean = (1, -1, ...) the mean magnitude is 1, so the noise
        // is sigma * g; its sample std over 10^4 entries must sit near sigma.
        let mut rng = RngStream::new(43);
        let y: Vec<f64> = (0..10_000)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let sigma = 0.3;
        let e = gen_noise(&y, sigma, &mut rng);
        let var = e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64;
        let std = var.sqrt();
        assert!(
            (std / sigma - 1.0).abs() < 0.05,
            "noise std {std} should be near sigma {sigma}"
        );
    }

    #[test]
    fn noise_half_normal_mean() {
        // mean(|e|) / (sigma * mean(|y|)) converges to sqrt(2/pi).
        let mut rng = RngStream::new(44);
        let y: Vec<f64> = vec![2.0; 20_000];
        let sigma = 0.5;
        let e = gen_noise(&y, sigma, &mut rng);
        let mean_abs = e.iter().map(|v| v.abs()).sum::<f64>() / e.len() as f64;
        let ratio = mean_abs / (sigma * 2.0);
        let expected = (2.0 / core::f64::consts::PI).sqrt();
        assert!(
            (ratio - expected).abs() < 0.02,
            "half-normal mean ratio {ratio} should be near {expected}"
        );
    }

    #[test]
    fn phantom_hits_target_sparsity_exactly() {
        let mut rng = RngStream::new(45);
        let img = ellipse_phantom(128, 1282, &mut rng).unwrap();
        assert_eq!(img.l0_count(), 1282);
        assert!(
            img.as_slice().iter().all(|&v| v >= 0.0),
            "phantom intensities are non-negative"
        );
        assert!(
            img.as_slice().iter().filter(|&&v| v != 0.0).all(|&v| v > 0.0),
            "all nonzero phantom pixels are positive"
        );
    }

    #[test]
    fn phantom_edge_cases() {
        let mut rng = RngStream::new(46);
        let zero = ellipse_phantom(8, 0, &mut rng).unwrap();
        assert_eq!(zero.l0_count(), 0);
        assert!(ellipse_phantom(8, 65, &mut rng).is_err());
    }

    #[test]
    fn phantom_is_deterministic() {
        let a = ellipse_phantom(32, 90, &mut RngStream::new(7)).unwrap();
        let b = ellipse_phantom(32, 90, &mut RngStream::new(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generated_problem_is_reproducible_and_consistent() {
        let spec = ProblemSpec {
            n: 128,
            sampling_ratio: 0.5,
            sparsity_level: 0.05,
            noise_sigma: 0.1,
            seed: 99,
            scale: MatrixScale::default(),
        };
        let p1 = generate_problem(&spec).unwrap();
        let p2 = generate_problem(&spec).unwrap();
        assert_eq!(p1, p2, "equal specs must generate identical problems");
        assert_eq!(p1.x_true.l0_count(), spec.k());
        for ((yi, ci), ei) in p1.y.iter().zip(&p1.y_clean).zip(&p1.noise) {
            assert_eq!(*yi, ci + ei, "y must equal y_clean + noise exactly");
        }
    }
}
