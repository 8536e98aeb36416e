//! Straight-line solutions `q(t) = φ(t)d` along a Darboux direction and the
//! normal form `w″ = r(z)w` of the variational equation after the change
//! of variable `z ∝ φᵏ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::{Complex, HomogeneousPotential};
use crate::darboux::DARBOUX_RESIDUAL;
use crate::error::{Error, Result};
use crate::galois::ExponentDifferences;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSolutionParams {
    pub d: Vec<f64>,
    pub gamma: f64,
    pub k: i32,
    pub energy_e: f64,
    /// `|d|²·e`.
    pub s: f64,
}

impl LineSolutionParams {
    /// Checks `V′(d) = γd` to [`DARBOUX_RESIDUAL`].
    pub fn new(v: &HomogeneousPotential, d: Vec<f64>, gamma: f64, energy_e: f64) -> Result<Self> {
        if d.len() != v.n() {
            return Err(Error::DimensionMismatch {
                expected: v.n(),
                got: d.len(),
            });
        }
        if gamma == 0.0 {
            return Err(Error::ZeroGamma);
        }
        let dc: Vec<Complex> = d.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let g = v.gradient(&dc)?;
        let residual = g
            .iter()
            .zip(&d)
            .map(|(gi, &di)| (gi - gamma * di).norm())
            .fold(0.0, f64::max);
        if residual > DARBOUX_RESIDUAL {
            return Err(Error::InvalidArgument(format!(
                "V'(d) - gamma d has residual {residual:e}"
            )));
        }
        let d2 = d.iter().map(|x| x * x).sum::<f64>();
        Ok(Self {
            d,
            gamma,
            k: v.k(),
            energy_e,
            s: d2 * energy_e,
        })
    }

    pub fn d_squared(&self) -> f64 {
        self.d.iter().map(|x| x * x).sum()
    }

    fn lorentz(&self, phidot: f64) -> Result<f64> {
        let d2 = self.d_squared();
        let w = 1.0 - phidot * phidot * d2;
        if !(w > 0.0) {
            return Err(Error::Superluminal(phidot.abs() * d2.sqrt()));
        }
        Ok(w)
    }
}

/// `φ̈ = -γ(1 - φ̇²|d|²)^{3/2} φ^{k-1}`.
pub fn line_solution_rhs(phi: f64, phidot: f64, params: &LineSolutionParams) -> Result<f64> {
    let w = params.lorentz(phidot)?;
    Ok(-params.gamma * w.powf(1.5) * phi.powi(params.k - 1))
}

/// `1/(|d|²√(1 - φ̇²|d|²)) + (γ/k)φᵏ`, constant along solutions.
pub fn line_energy(phi: f64, phidot: f64, params: &LineSolutionParams) -> Result<f64> {
    let w = params.lorentz(phidot)?;
    Ok(1.0 / (params.d_squared() * w.sqrt()) + params.gamma / params.k as f64 * phi.powi(params.k))
}

/// `(q, p)` of the particular solution: `q = φd`, `p = φ̇d/√(1 - φ̇²|d|²)`.
pub fn line_embedding(phi: f64, phidot: f64, params: &LineSolutionParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let w = params.lorentz(phidot)?;
    let q = params.d.iter().map(|x| phi * x).collect();
    let p = params.d.iter().map(|x| phidot * x / w.sqrt()).collect();
    Ok((q, p))
}

fn pole_guard(z: Complex, s: Complex) -> Result<()> {
    let tol = 1e-12 * s.norm().max(1.0);
    for (name, dist) in [("z = 0", z.norm()), ("z = s - 1", (z - s + 1.0).norm()), ("z = s + 1", (z - s - 1.0).norm())] {
        if dist <= tol {
            return Err(Error::Pole(name.into()));
        }
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite(format!("z = {z}")));
    }
    Ok(())
}

/// `p(z)` of the Fuchsian variational equation `y″ + p y′ + q y = 0`.
pub fn fuchsian_p(k: i64, s: Complex, z: Complex) -> Complex {
    let kf = k as f64;
    let x = z - s;
    (kf - 1.0) / (kf * z) + x / (x * x - 1.0)
}

/// `q(z)` of the Fuchsian variational equation.
pub fn fuchsian_q(k: i64, lambda: Complex, s: Complex, z: Complex) -> Complex {
    let kf = k as f64;
    let x = z - s;
    lambda * (s - z) / (kf * z * (x * x - 1.0))
}

/// `r(z)` of `w″ = r(z)w`:
///
/// `-(k²-1)/(4k²z²) - 3/(16(z-s+1)²) - 3/(16(z-s-1)²)
///  + (z(5k+8λ-4) - 4s(k-1+2λ)) / (8kz((z-s)²-1))`.
pub fn variational_coefficient_r(k: i64, lambda: Complex, s: Complex, z: Complex) -> Result<Complex> {
    if k == 0 {
        return Err(Error::ZeroDegree);
    }
    pole_guard(z, s)?;
    let kf = k as f64;
    let x = z - s;
    let a = -(kf * kf - 1.0) / (4.0 * kf * kf * z * z);
    let b = -3.0 / (16.0 * (x + 1.0) * (x + 1.0));
    let c = -3.0 / (16.0 * (x - 1.0) * (x - 1.0));
    let num = z * (5.0 * kf + 8.0 * lambda - 4.0) - 4.0 * s * (kf - 1.0 + 2.0 * lambda);
    let e = num / (8.0 * kf * z * (x * x - 1.0));
    Ok(a + b + c + e)
}

/// `(1/2πi)∮ f(z)(z - c)^{m-1} dz` over `|z - c| = radius`: the coefficient
/// of `(z - c)^{-m}` in the Laurent expansion on that annulus.
pub fn laurent_coefficient<F>(f: F, center: Complex, radius: f64, m: i32, nodes: usize) -> Complex
where
    F: Fn(Complex) -> Complex,
{
    let mut acc = Complex::new(0.0, 0.0);
    for j in 0..nodes {
        let w = Complex::from_polar(radius, 2.0 * PI * j as f64 / nodes as f64);
        acc += f(center + w) * w.powi(m);
    }
    acc / nodes as f64
}

const LAURENT_NODES: usize = 512;

/// Exponent differences of `w″ = r(z)w` at `s = 1`, where the singular
/// points `z = 0` and `z = s - 1` merge: `√(1 + 4c)` with `c` the
/// double-pole coefficient at `z = 0`, at `z = 2` and at infinity.
pub fn exponent_differences_at_merge(k: i64, lambda: Complex) -> Result<ExponentDifferences> {
    if k == 0 {
        return Err(Error::ZeroDegree);
    }
    let s = Complex::new(1.0, 0.0);
    let r = |z: Complex| variational_coefficient_r(k, lambda, s, z).unwrap_or(Complex::new(f64::NAN, 0.0));
    let zero = Complex::new(0.0, 0.0);
    let two = Complex::new(2.0, 0.0);
    let c0 = laurent_coefficient(r, zero, 1.0, 2, LAURENT_NODES);
    let c2 = laurent_coefficient(r, two, 1.0, 2, LAURENT_NODES);
    // Near infinity r = c∞/z² + O(1/z³); integrate on a circle enclosing
    // every finite pole.
    let c_inf = laurent_coefficient(r, zero, 8.0, 2, LAURENT_NODES);
    // Quadrature noise must not flip the branch of √ on the negative axis.
    let diff = |c: Complex| {
        let mut w = 1.0 + 4.0 * c;
        if w.im.abs() <= 1e-12 * w.norm().max(1.0) {
            w.im = 0.0;
        }
        w.sqrt()
    };
    let sigma = diff(c2);
    if sigma.im.abs() > 1e-12 {
        return Err(Error::NonFinite(format!("exponent difference at z = 2: {sigma}")));
    }
    Ok(ExponentDifferences {
        rho: diff(c0),
        sigma: sigma.re,
        tau: diff(c_inf),
    })
}
