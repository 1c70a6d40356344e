//! Dense measurement matrices: application, adjoint, generation and spectral
//! norm estimation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::rng::RngStream;
use crate::signal::{norm_sq, SignalVector};

/// Dense M x N real matrix in row-major order, double precision.
///
/// Plays the role of the compressed measurement operator A. The problem sizes
/// targeted here (N up to 2^14) fit comfortably in memory, so no sparse or
/// structured storage is provided.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self, CoreError> {
        if rows == 0 || cols == 0 {
            return Err(CoreError::EmptyDimension {
                context: "DenseMatrix dimensions",
            });
        }
        if entries.len() != rows * cols {
            return Err(CoreError::DimensionMismatch {
                context: "DenseMatrix entry count",
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "DenseMatrix entries",
            });
        }
        Ok(DenseMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// The n x n identity.
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        DenseMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Entry at (i, j).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    /// Writes `A x` into `out` without allocating.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *slot = acc;
        }
    }

    /// Writes `A^T r` into `out` without allocating.
    ///
    /// Sweeps the matrix row by row (sequential memory access) accumulating
    /// `out += r_i * row_i`.
    pub fn apply_adjoint_into(&self, r: &[f64], out: &mut [f64]) {
        debug_assert_eq!(r.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        for (i, &ri) in r.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            for (slot, &a) in out.iter_mut().zip(row) {
                *slot += ri * a;
            }
        }
    }

    /// Returns the measurement vector `A x`.
    pub fn apply(&self, x: &SignalVector) -> Result<Vec<f64>, CoreError> {
        if x.len() != self.cols {
            return Err(CoreError::DimensionMismatch {
                context: "apply: signal length vs matrix cols",
                expected: self.cols,
                got: x.len(),
            });
        }
        let mut out = vec![0.0; self.rows];
        self.apply_into(x.as_slice(), &mut out);
        Ok(out)
    }

    /// Returns the signal-space vector `A^T r`.
    pub fn apply_adjoint(&self, r: &[f64]) -> Result<SignalVector, CoreError> {
        if r.len() != self.rows {
            return Err(CoreError::DimensionMismatch {
                context: "apply_adjoint: residual length vs matrix rows",
                expected: self.rows,
                got: r.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        self.apply_adjoint_into(r, &mut out);
        SignalVector::new(out)
    }
}

/// Which stopping case ended the power iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralStop {
    /// Relative change of the eigenvalue estimate fell below the tolerance.
    Converged,
    /// The iteration budget ran out first.
    MaxIters,
}

/// Estimate of the squared spectral norm together with its stopping case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub stop: SpectralStop,
    pub iterations: usize,
}

/// M x N matrix of i.i.d. standard-normal entries.
pub fn gaussian_matrix(m: usize, n: usize, rng: &mut RngStream) -> Result<DenseMatrix, CoreError> {
    if m == 0 || n == 0 {
        return Err(CoreError::EmptyDimension {
            context: "gaussian_matrix dimensions",
        });
    }
    let mut entries = vec![0.0; m * n];
    rng.fill_normal(&mut entries);
    DenseMatrix::from_entries(m, n, entries)
}

/// Random n x n orthogonal matrix.
///
/// Draws a uniformly random signed permutation: a Fisher-Yates shuffle picks
/// the permutation and each nonzero entry gets an independent random sign.
/// Signed permutations are exactly orthogonal in floating point (Q^T Q = I
/// holds bitwise, not just to rounding), which keeps the orthogonal-operator
/// fixed-point identities of the solvers exact.
pub fn random_orthogonal(n: usize, rng: &mut RngStream) -> Result<DenseMatrix, CoreError> {
    if n == 0 {
        return Err(CoreError::EmptyDimension {
            context: "random_orthogonal dimension",
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.uniform_index(i + 1);
        perm.swap(i, j);
    }
    let mut entries = vec![0.0; n * n];
    for (i, &j) in perm.iter().enumerate() {
        let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
        entries[i * n + j] = sign;
    }
    DenseMatrix::from_entries(n, n, entries)
}

/// Estimates `||A||_2^2`, the largest eigenvalue of A^T A, by power iteration.
///
/// The starting vector is drawn from a stream with a fixed internal seed, so
/// the estimate is a deterministic function of the matrix. Stops when the
/// relative change of the eigenvalue estimate drops to `tol` or after
/// `max_iters` steps, whichever comes first; the result reports which.
pub fn spectral_norm_sq(
    a: &DenseMatrix,
    max_iters: usize,
    tol: f64,
) -> Result<SpectralEstimate, CoreError> {
    if a.entries.iter().all(|&v| v == 0.0) {
        return Err(CoreError::ZeroMatrix);
    }
    let mut rng = RngStream::new(0x5eed_cafe);
    let mut v = vec![0.0; a.cols()];
    rng.fill_normal(&mut v);
    let scale = 1.0 / libm::sqrt(norm_sq(&v));
    for slot in v.iter_mut() {
        *slot *= scale;
    }

    let mut av = vec![0.0; a.rows()];
    let mut atav = vec![0.0; a.cols()];
    let mut lambda = 0.0;
    let mut iterations = 0;
    let mut stop = SpectralStop::MaxIters;
    for k in 0..max_iters {
        a.apply_into(&v, &mut av);
        a.apply_adjoint_into(&av, &mut atav);
        // Rayleigh quotient with unit-norm v: lambda = v^T (A^T A v).
        let new_lambda: f64 = v.iter().zip(&atav).map(|(x, y)| x * y).sum();
        let w_norm_sq = norm_sq(&atav);
        iterations = k + 1;
        if w_norm_sq == 0.0 {
            // v landed exactly in the null space; restart from a fresh vector.
            rng.fill_normal(&mut v);
            let s = 1.0 / libm::sqrt(norm_sq(&v));
            for slot in v.iter_mut() {
                *slot *= s;
            }
            continue;
        }
        let s = 1.0 / libm::sqrt(w_norm_sq);
        for (slot, &w) in v.iter_mut().zip(&atav) {
            *slot = w * s;
        }
        let change = libm::fabs(new_lambda - lambda);
        if k > 0 && change <= tol * libm::fabs(new_lambda) {
            lambda = new_lambda;
            stop = SpectralStop::Converged;
            break;
        }
        lambda = new_lambda;
    }
    Ok(SpectralEstimate {
        value: lambda,
        stop,
        iterations,
    })
}

/// Default power-iteration budget for spectral norm estimation.
pub const SPECTRAL_DEFAULT_MAX_ITERS: usize = 500;
/// Default relative tolerance for spectral norm estimation.
pub const SPECTRAL_DEFAULT_TOL: f64 = 1e-8;

/// Measurement operator abstraction used by the solvers.
///
/// Solvers only need the forward and adjoint actions, so they are written
/// against this trait; [`CountingOperator`] wraps any operator to audit how
/// many of each action a solver performs.
pub trait LinearOperator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply_into(&self, x: &[f64], out: &mut [f64]);
    fn apply_adjoint_into(&self, r: &[f64], out: &mut [f64]);
}

impl LinearOperator for DenseMatrix {
    fn rows(&self) -> usize {
        DenseMatrix::rows(self)
    }
    fn cols(&self) -> usize {
        DenseMatrix::cols(self)
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        DenseMatrix::apply_into(self, x, out)
    }
    fn apply_adjoint_into(&self, r: &[f64], out: &mut [f64]) {
        DenseMatrix::apply_adjoint_into(self, r, out)
    }
}

/// Wraps an operator and counts forward and adjoint applications.
pub struct CountingOperator<'a, Op: LinearOperator> {
    inner: &'a Op,
    applies: core::cell::Cell<usize>,
    adjoints: core::cell::Cell<usize>,
}

impl<'a, Op: LinearOperator> CountingOperator<'a, Op> {
    pub fn new(inner: &'a Op) -> Self {
        CountingOperator {
            inner,
            applies: core::cell::Cell::new(0),
            adjoints: core::cell::Cell::new(0),
        }
    }

    /// Number of forward applications so far.
    pub fn apply_count(&self) -> usize {
        self.applies.get()
    }

    /// Number of adjoint applications so far.
    pub fn adjoint_count(&self) -> usize {
        self.adjoints.get()
    }
}

impl<'a, Op: LinearOperator> LinearOperator for CountingOperator<'a, Op> {
    fn rows(&self) -> usize {
        self.inner.rows()
    }
    fn cols(&self) -> usize {
        self.inner.cols()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.applies.set(self.applies.get() + 1);
        self.inner.apply_into(x, out);
    }
    fn apply_adjoint_into(&self, r: &[f64], out: &mut [f64]) {
        self.adjoints.set(self.adjoints.get() + 1);
        self.inner.apply_adjoint_into(r, out);
    }
}
