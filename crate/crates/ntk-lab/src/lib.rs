//! Desk-scale toolkit for the neural tangent kernel of two-layer ReLU
//! networks on low-dimensional boxes.
//!
//! The crate is organized around one pipeline:
//!
//! * [`kernels`] evaluates the NTK `K_d` in closed form together with the
//!   auxiliary kernels `G_alpha`, `Pi_0`, `Pi_1` that sandwich it.
//! * [`spectral`] computes everything eigenvalue-shaped: Gram spectra, the
//!   closed-form inverse of `G_alpha` Grams, transcendental Mercer
//!   eigenvalues, and decay-rate fits.
//! * [`flow`] solves kernel gradient-flow regression in closed form via
//!   spectral filtering, from `t = 0` through the ridgeless limit
//!   `t = infinity`, with early stopping and excess-risk quadrature.
//! * [`net`] trains actual finite-width two-layer ReLU networks with
//!   explicit-Euler steps and compares them against the idealized flow.
//! * [`experiments`] wires the above into reproducible, seeded scenarios
//!   with CSV/JSON output; the `ntk-lab` binary is a thin wrapper over it.
//! * [`numerics`] holds the shared dense linear algebra and the
//!   deterministic random number generator everything else uses.
//!
//! All computations are `f64`, deterministic for a fixed seed, and designed
//! to finish on a single desktop core.

// Index loops follow the linear-algebra notation of the formulas they
// implement, and `!(x >= 0.0)` guards are deliberate: they reject NaN where
// the suggested `partial_cmp` rewrite would quietly accept it.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod flow;
pub mod kernels;
pub mod net;
pub mod numerics;
pub mod spectral;

pub use error::{Error, Result};
