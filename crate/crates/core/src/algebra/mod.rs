//! Complex polynomials, root finding and rational reconstruction.

mod potential;
mod rational;
mod roots;

pub use potential::{HomogeneousPotential, Monomial, MAX_VARIABLES};
pub use rational::{
    reconstruct_rational, rational_to_f64, Rational, DEFAULT_MAX_DENOMINATOR,
    DEFAULT_RECONSTRUCTION_TOLERANCE,
};
pub use roots::{eval_poly, roots_univariate, ROOT_RESIDUAL};

pub type Complex = num_complex::Complex64;

/// Orders complex numbers by real part, then imaginary part.
pub fn cmp_complex(a: &Complex, b: &Complex) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}
