//! Pointwise shrinkage operators: hard threshold, top-k projection and soft
//! threshold.

use alloc::vec::Vec;

use crate::signal::SignalVector;

/// Hard threshold of a scalar: 0 if |b| < t, otherwise b unchanged.
///
/// The boundary |b| = t keeps b. At the boundary both choices tie in the l0
/// objective the operator minimizes, so the keep branch is fixed for
/// determinism.
pub fn hard_scalar(b: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if libm::fabs(b) < t {
        0.0
    } else {
        b
    }
}

/// Componentwise hard threshold, in place on a slice.
pub fn hard_slice(x: &mut [f64], t: f64) {
    for v in x.iter_mut() {
        *v = hard_scalar(*v, t);
    }
}

/// Componentwise hard threshold of a signal vector.
pub fn hard_vector(x: &SignalVector, t: f64) -> SignalVector {
    let mut out = x.as_slice().to_vec();
    hard_slice(&mut out, t);
    SignalVector::new(out).expect("hard threshold preserves finiteness")
}

/// Keeps the k largest-magnitude entries, zeroing the rest, in place.
///
/// Ties in magnitude are broken by lowest index: among equal magnitudes the
/// entries with smaller indices are kept.
pub fn top_k_slice(x: &mut [f64], k: usize) {
    let n = x.len();
    if k >= n {
        return;
    }
    if k == 0 {
        x.fill(0.0);
        return;
    }
    let mut order: Vec<usize> = (0..n).collect();
    // Sort by magnitude descending, then index ascending; the comparator is a
    // total order on distinct indices, so unstable sorting is deterministic.
    order.sort_unstable_by(|&i, &j| {
        let mi = libm::fabs(x[i]);
        let mj = libm::fabs(x[j]);
        mj.partial_cmp(&mi)
            .expect("magnitudes are finite")
            .then(i.cmp(&j))
    });
    for &i in &order[k..] {
        x[i] = 0.0;
    }
}

/// Keeps the k largest-magnitude entries of a signal vector.
pub fn top_k(x: &SignalVector, k: usize) -> SignalVector {
    let mut out = x.as_slice().to_vec();
    top_k_slice(&mut out, k);
    SignalVector::new(out).expect("top-k projection preserves finiteness")
}

/// Soft threshold of a scalar: shrink toward zero by w, zeroing |b| < w.
pub fn soft_scalar(b: f64, w: f64) -> f64 {
    debug_assert!(w >= 0.0);
    if libm::fabs(b) < w {
        0.0
    } else if b > 0.0 {
        b - w
    } else if b < 0.0 {
        b + w
    } else {
        0.0
    }
}

/// Componentwise soft threshold, in place on a slice.
pub fn soft_slice(x: &mut [f64], w: f64) {
    for v in x.iter_mut() {
        *v = soft_scalar(*v, w);
    }
}

/// Componentwise soft threshold of a signal vector.
pub fn soft_vector(x: &SignalVector, w: f64) -> SignalVector {
    let mut out = x.as_slice().to_vec();
    soft_slice(&mut out, w);
    SignalVector::new(out).expect("soft threshold preserves finiteness")
}
