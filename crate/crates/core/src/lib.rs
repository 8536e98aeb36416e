//! Necessary conditions for Liouville integrability of relativistic
//! Hamiltonian systems `H = sqrt(1 + |p|^2) + V(q)` with homogeneous
//! potentials, together with a numerical dynamics engine for the same
//! systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: complex multivariate polynomials, univariate root finding
//!   and rational reconstruction of floating point eigenvalues.
//! * [`darboux`]: Darboux points `V'(d) = gamma d` and scaled Hessian spectra.
//! * [`integer_sets`]: exact membership tests for the admissible integer
//!   eigenvalue sets and their Pell-equation structure.
//! * [`galois`]: the eigenvalue tables, the Kimura solvability test for the
//!   Riemann P-equation and the final verdict.
//! * [`dynamics`]: relativistic and classical flows, Poincaré sections and
//!   the straight-line particular solutions.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod darboux;
pub mod dynamics;
pub mod error;
pub mod galois;
pub mod integer_sets;

pub use algebra::{Complex, HomogeneousPotential, Monomial, Rational};
pub use darboux::{DarbouxPoint, SpectrumReport};
pub use error::{Error, Result};
pub use galois::{IntegrabilityVerdict, Overall};
