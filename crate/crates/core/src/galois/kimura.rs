//! Solvability of the identity component for the Riemann P-equation,
//! decided from its exponent differences.

use serde::Serialize;

use crate::algebra::Complex;

/// Tolerance for integrality and reality of exponent data.
pub const KIMURA_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentDifferences {
    pub rho: Complex,
    pub sigma: f64,
    pub tau: Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KimuraCase {
    /// One of `±ρ ± τ ± σ` (with an even number of minus signs) is an odd
    /// integer.
    ConditionI,
    /// Row of Schwarz's list, numbered 1 to 15.
    SchwarzRow(u8),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KimuraResult {
    pub solvable: bool,
    pub case: KimuraCase,
}

/// `ρ = √((k-2)² + 8kλ) / (2|k|)`, `σ = 1/2`, `τ = √((k-1)² + 4kλ) / |k|`,
/// principal square roots.
pub fn riemann_exponents(k: i64, lambda: Complex) -> ExponentDifferences {
    let kf = k as f64;
    let ka = kf.abs();
    let rho = (Complex::new((kf - 2.0).powi(2), 0.0) + lambda * (8.0 * kf)).sqrt() / (2.0 * ka);
    let tau = (Complex::new((kf - 1.0).powi(2), 0.0) + lambda * (4.0 * kf)).sqrt() / ka;
    ExponentDifferences { rho, sigma: 0.5, tau }
}

/// Schwarz's list as fractional offsets `(a, b, c)`; `None` means
/// unconstrained, and the flag requires `r + q + p` even.
const SCHWARZ: [(f64, f64, Option<f64>, bool); 15] = [
    (0.5, 0.5, None, false),
    (0.5, 1.0 / 3.0, Some(1.0 / 3.0), false),
    (2.0 / 3.0, 1.0 / 3.0, Some(1.0 / 3.0), true),
    (0.5, 1.0 / 3.0, Some(0.25), false),
    (2.0 / 3.0, 0.25, Some(0.25), true),
    (0.5, 1.0 / 3.0, Some(0.2), false),
    (0.4, 1.0 / 3.0, Some(1.0 / 3.0), true),
    (2.0 / 3.0, 0.2, Some(0.2), true),
    (0.5, 0.4, Some(0.2), false),
    (0.6, 1.0 / 3.0, Some(0.2), true),
    (0.4, 0.4, Some(0.4), true),
    (2.0 / 3.0, 1.0 / 3.0, Some(0.2), true),
    (0.8, 0.2, Some(0.2), true),
    (0.5, 0.4, Some(1.0 / 3.0), false),
    (0.6, 0.4, Some(1.0 / 3.0), true),
];

fn nearest_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= KIMURA_TOLERANCE).then_some(r as i64)
}

fn real_part(z: Complex) -> Option<f64> {
    (z.im.abs() <= KIMURA_TOLERANCE && z.re.is_finite()).then_some(z.re)
}

fn condition_one(rho: Complex, sigma: Complex, tau: Complex) -> bool {
    [
        rho + tau + sigma,
        -rho + tau + sigma,
        rho - tau + sigma,
        rho + tau - sigma,
    ]
    .into_iter()
    .filter_map(real_part)
    .filter_map(nearest_integer)
    .any(|n| n.rem_euclid(2) == 1)
}

fn schwarz_row(values: [f64; 3]) -> Option<u8> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for (row, &(a, b, c, even)) in SCHWARZ.iter().enumerate() {
        for perm in PERMS {
            for signs in 0..8u8 {
                let v = |i: usize| {
                    let s = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
                    s * values[perm[i]]
                };
                let Some(r) = nearest_integer(v(0) - a) else { continue };
                let Some(q) = nearest_integer(v(1) - b) else { continue };
                let p = match c {
                    None => Some(0),
                    Some(c) => nearest_integer(v(2) - c),
                };
                let Some(p) = p else { continue };
                if !even || (r + q + p).rem_euclid(2) == 0 {
                    return Some(row as u8 + 1);
                }
            }
        }
    }
    None
}

/// Kimura's criterion: Condition I is tested first, then Schwarz's list
/// over all sign choices and orderings.
pub fn kimura_solvable(rho: Complex, sigma: Complex, tau: Complex) -> KimuraResult {
    if condition_one(rho, sigma, tau) {
        return KimuraResult {
            solvable: true,
            case: KimuraCase::ConditionI,
        };
    }
    let reals = [rho, tau, sigma].map(real_part);
    if let [Some(r), Some(t), Some(s)] = reals {
        if let Some(row) = schwarz_row([r, t, s]) {
            return KimuraResult {
                solvable: true,
                case: KimuraCase::SchwarzRow(row),
            };
        }
    }
    KimuraResult {
        solvable: false,
        case: KimuraCase::None,
    }
}

impl ExponentDifferences {
    pub fn kimura(&self) -> KimuraResult {
        kimura_solvable(self.rho, Complex::new(self.sigma, 0.0), self.tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex {
        Complex::new(x, 0.0)
    }

    #[test]
    fn exponent_examples() {
        let e = riemann_exponents(2, c(0.0));
        assert!(e.rho.norm() < 1e-15 && (e.tau - 0.5).norm() < 1e-15);
        let e = riemann_exponents(1, c(1.0));
        assert!((e.rho - 1.5).norm() < 1e-15 && (e.tau - 2.0).norm() < 1e-15);
        let e = riemann_exponents(-1, c(0.0));
        assert!((e.rho - 1.5).norm() < 1e-15 && (e.tau - 2.0).norm() < 1e-15);
        assert_eq!(e.sigma, 0.5);
    }

    #[test]
    fn squares_match_closed_form() {
        for k in [-7i64, -2, -1, 1, 3, 10] {
            for lambda in [-3.5, -0.25, 0.0, 0.7, 5.0, 40.0] {
                let e = riemann_exponents(k, c(lambda));
                let kf = k as f64;
                let rho2 = ((kf - 2.0).powi(2) + 8.0 * kf * lambda) / (4.0 * kf * kf);
                let tau2 = ((kf - 1.0).powi(2) + 4.0 * kf * lambda) / (kf * kf);
                assert!((e.rho * e.rho - rho2).norm() <= 1e-12 * rho2.abs().max(1.0));
                assert!((e.tau * e.tau - tau2).norm() <= 1e-12 * tau2.abs().max(1.0));
            }
        }
    }

    #[test]
    fn kimura_examples() {
        let r = kimura_solvable(c(0.5), c(0.5), c(0.377));
        assert_eq!(r.case, KimuraCase::SchwarzRow(1));
        let r = kimura_solvable(c(0.5), c(0.5), c(0.0));
        assert_eq!(r.case, KimuraCase::ConditionI);
        let r = kimura_solvable(c(0.2), c(0.2), c(0.2));
        assert!(!r.solvable);
    }

    #[test]
    fn parity_side_condition() {
        // (2/3, 1/3, 1/3): r = q = p = 0, even.
        assert_eq!(schwarz_row([2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]), Some(3));
        // (2/3 + 1, 1/3, 1/3): every placement gives r + q + p odd.
        assert_eq!(schwarz_row([5.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]), None);
        assert_eq!(schwarz_row([0.8, 0.2, 0.2]), Some(13));
    }

    #[test]
    fn complex_exponents_need_condition_one() {
        let z = Complex::new(0.3, 0.4);
        assert!(!kimura_solvable(z, c(0.5), c(0.5)).solvable);
        // ρ + τ + σ = 1 with complex conjugate parts.
        let r = kimura_solvable(Complex::new(0.25, 0.5), c(0.5), Complex::new(0.25, -0.5));
        assert_eq!(r.case, KimuraCase::ConditionI);
    }
}
