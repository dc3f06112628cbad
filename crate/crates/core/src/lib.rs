//! Exact Hamiltonian Monte Carlo for truncated multivariate Gaussians.
//!
//! The target is a Gaussian `log p(x) = -1/2 xᵀ M x + rᵀ x + const` restricted
//! to a region cut out by linear, quadratic and product-of-factor inequalities.
//! Between walls the equations of motion are solved in closed form, so every
//! proposal is accepted; walls are handled as elastic reflections at exactly
//! computed hit times.
//!
//! The crate is `no_std` (with `alloc`). Everything that touches the operating
//! system (files, clocks, threads) lives in the companion `tmg` crate.
//!
//! Modules:
//! - [`linalg`]: Gaussian specifications, structured Cholesky factors
//!   (dense, banded, Toeplitz via circulant embedding, probit block form).
//! - [`constraints`]: constraint types, exact hit times, reflections.
//! - [`engine`]: the exact-HMC chain in canonical or general frame.
//! - [`gibbs`]: slice-augmented Gibbs baseline for linear constraints.
//! - [`diagnostics`]: ACF, effective sample factor and size.
//! - [`models`]: builders for the probit, Brownian bridge, quantized GP and
//!   two-dimensional toy models.
//! - [`lasso`]: piecewise-quadratic sampler for the Bayesian Lasso.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod constraints;
pub mod diagnostics;
pub mod engine;
mod error;
pub mod fft;
pub mod gibbs;
pub mod lasso;
pub mod linalg;
pub mod models;

pub use error::{Error, Result};

/// Candidate hit times at or below this value are discarded so that a wall
/// that was just reflected from is not detected again at `t = 0`.
pub const HIT_GUARD: f64 = 1e-10;

/// Samples whose constraint values fall below `-FEASIBILITY_TOL` are treated
/// as a solver failure.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Maximum number of wall reflections (or sign-flip events) per iteration.
pub const BOUNCE_LIMIT: usize = 10_000;
