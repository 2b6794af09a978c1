//! Two-body Casimir interaction energies for scalar fields on the imaginary
//! frequency axis.
//!
//! Two exactly reducible models are covered:
//!
//! * multi-channel 1D fields (channels of possibly different masses) with
//!   rank-1 point mirrors `λ α αᵀ δ(x - x₀)`, where the two-body determinant
//!   collapses to a scalar closed form ([`scattering`], [`channel_energy`]);
//! * rank-1 separable potentials `|f⟩⟨f|` built from weighted point sources
//!   ([`separable`]).
//!
//! Supporting pieces: a double-exponential quadrature for `(0, ∞)`
//! ([`quadrature`]), Bessel-zero waveguide channels ([`waveguide`]) and a
//! brute-force zero-point-energy lattice oracle ([`lattice`]).
//!
//! Units are `ħ = c = 1`. Energies are negative for attraction; a force
//! `F = -dE/dx` below zero is attractive.

// Range checks are written `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel_energy;
pub mod dispersion;
mod error;
pub mod grid;
pub mod lattice;
pub mod parallel;
pub mod quadrature;
pub mod regression;
pub mod scattering;
pub mod scenarios;
pub mod separable;
pub mod waveguide;

pub use error::{CasimirError, Result};
pub use parallel::Execution;

/// A numerical value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}
