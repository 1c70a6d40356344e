//! Sparse-recovery library built around inexact iterative hard thresholding
//! (IIHT) for the unconstrained l0 problem
//!
//! ```text
//! min_x  ||x||_0 + (mu/2) ||y - A x||_2^2
//! ```
//!
//! together with the classic baselines used to benchmark it: direct adjoint
//! reconstruction, iterative hard thresholding (IHT), iterative soft
//! thresholding (IST) and CoSaMP.
//!
//! The crate is `no_std` (with `alloc`) and fully deterministic: every random
//! quantity is drawn from an explicitly seeded [`rng::RngStream`], and all
//! solver runs are reproducible bit for bit from their inputs.
//!
//! Modules:
//! - [`matrix`]: dense measurement matrices, apply/adjoint, spectral norm
//! - [`signal`]: finite real vectors with exact-zero l0 accounting
//! - [`rng`]: seeded, platform-stable uniform and normal deviates
//! - [`thresholding`]: hard, top-k and soft shrinkage operators
//! - [`solvers`]: IIHT and the baseline solvers, traces, theorem checks
//! - [`problem`]: synthetic problem generators (sparse vectors, phantom, noise)
//! - [`metrics`]: relative error and PSNR

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod matrix;
pub mod metrics;
pub mod problem;
pub mod rng;
pub mod signal;
pub mod solvers;
pub mod thresholding;

pub use error::CoreError;
pub use matrix::DenseMatrix;
pub use signal::SignalVector;
