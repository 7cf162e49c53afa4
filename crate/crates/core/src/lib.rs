//! Sparse regularization with the generalized minimax-concave (GMC) penalty.
//!
//! The GMC penalty `psi_B(x) = ||x||_1 - S_B(x)` is non-convex, yet with
//! `B = sqrt(gamma / lam) A` and `0 <= gamma <= 1` the least-squares cost
//! `1/2 ||y - A x||^2 + lam psi_B(x)` stays convex. This crate provides
//!
//! - matrix-free operators ([`operators`]), including over-sampled DFT and STFT frames,
//! - the scalar penalty and threshold functions ([`scalar_penalties`]),
//! - evaluation of `S_B`, its gradient and `psi_B` ([`multivariate_penalties`]),
//! - forward-backward, ISTA and closed-form diagonal solvers ([`solvers`]),
//! - reproducible denoising experiments ([`experiments`]) and their CSV formats ([`csvio`]).
//!
//! ```
//! use gmc::operators::DenseOperator;
//! use gmc::solvers::{diagonal_solve, gmc_solve, SolveConfig};
//!
//! let a = DenseOperator::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]])?;
//! let y = [3.0, 0.5];
//! let report = gmc_solve(&a, &y, &SolveConfig::new(1.0, 0.5))?;
//! assert!(report.converged);
//! // A^T A is diagonal here, so the closed form applies
//! let exact = diagonal_solve(&[1.0, 2.0], &[3.0, 1.0], 1.0, 0.5)?;
//! assert!((report.x_star[0] - exact[0]).abs() < 1e-6);
//! # Ok::<(), gmc::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csvio;
pub mod error;
pub mod experiments;
pub mod multivariate_penalties;
pub mod operators;
pub mod scalar;
pub mod scalar_penalties;
pub mod solvers;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use scalar::{Field, Scalar};
