//! Numerical laboratory for the quadratic derivative nonlinear Schrödinger
//! equation `∂_t u = i∂_x²u + u∂_x u` on the circle.
//!
//! States are mean-zero truncated Fourier series ([`spectral`]). The flow is
//! integrated in interaction variables ([`dynamics`]), reduced to its normal
//! form series ([`normal_form`]), linearized by the modified Cole-Hopf gauge
//! ([`cole_hopf`]), and monitored through the invariant quantities
//! `Q_k` ([`invariants`]). [`blowup`] holds the closed-form large-data
//! solution that leaves every `L^p` at `t = π/2`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod cole_hopf;
pub mod dynamics;
pub mod error;
pub mod invariants;
pub mod normal_form;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
