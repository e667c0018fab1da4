//! Numerical laboratory for Herz-space analysis of the Hardy–Hénon heat
//! equation `∂ₜu − Δu = |x|^γ |u|^{α−1} u`.
//!
//! The crate is organised bottom-up:
//!
//! * [`exponents`] exact rational exponent lattice and hypothesis checks,
//! * [`quadrature`] Gauss–Legendre and Gauss–Kronrod rules,
//! * [`functions`] radial test functions and annular decompositions,
//! * [`norms`] Herz, Lorentz, K-functional and interpolation norms,
//! * [`heat`] the radial heat semigroup and Duhamel integral,
//! * [`solver`] Picard iteration and the uniqueness probe,
//! * [`harness`] config-driven experiments with JSON reports.

// `!(x > 0.0)` guards deliberately reject NaN; quadrature tables keep full digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod exponents;
pub mod functions;
pub mod harness;
pub mod heat;
pub mod norms;
pub mod quadrature;
pub mod solver;

pub use exponents::{ExtRat, HerzIndex, ProblemParams, Rational};
pub use functions::{AnnularProfile, RadialFunction};
pub use norms::NormValue;

