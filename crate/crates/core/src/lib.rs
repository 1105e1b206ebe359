//! Ergodic sum-rate capacity of zero-forcing MU-MIMO receivers under banded
//! exponential correlation and complex Nakagami-m fading.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: incomplete gamma, `e^x E_1(x)`, Tricomi `U(1, b, z)`,
//!   Gompertz–Makeham density, numerical Laplace inversion.
//! - [`correlation`]: banded correlation matrices and Hermitian square roots.
//! - [`channel`]: complex Nakagami-m channel sampling and semi-correlated composition.
//! - [`zf`]: zero-forcing SINR and the Monte Carlo capacity estimator.
//! - [`statfit`]: gamma/exponential maximum-likelihood fits with χ² and KS gates.
//! - [`analytic`]: closed-form capacity, its MGF and the capacity density.
//! - [`runner`]: sweep configuration, orchestration and CSV output.

// NaN must fail range checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod correlation;
pub mod error;
pub mod rng;
pub mod runner;
pub mod specfun;
pub mod statfit;
pub mod zf;

pub use error::{Error, Result};
