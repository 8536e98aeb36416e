use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational with big-integer numerator and positive denominator,
/// always kept in lowest terms.
pub type Rational = BigRational;

pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;
pub const DEFAULT_RECONSTRUCTION_TOLERANCE: f64 = 1e-8;

/// Recovers a small-denominator rational from a floating point value.
///
/// Walks the continued-fraction convergents of the exact binary value of `x`
/// and returns the first one with denominator at most `max_denominator`
/// lying within `tolerance` of `x`. A value within `tolerance` of an integer
/// always reconstructs to that integer.
pub fn reconstruct_rational(x: f64, max_denominator: u64, tolerance: f64) -> Option<Rational> {
    if !x.is_finite() || max_denominator == 0 || !(tolerance > 0.0) {
        return None;
    }
    let nearest = x.round();
    if (x - nearest).abs() <= tolerance {
        return Some(Rational::from_integer(BigInt::from(nearest as i128)));
    }

    let exact = Rational::from_float(x)?;
    let max_den = BigInt::from(max_denominator);
    let (mut num, mut den) = (exact.numer().clone(), exact.denom().clone());

    // Convergent recurrences seeded with h_{-2}=0, h_{-1}=1, k_{-2}=1, k_{-1}=0.
    let (mut h_m2, mut h_m1) = (BigInt::zero(), BigInt::one());
    let (mut k_m2, mut k_m1) = (BigInt::one(), BigInt::zero());

    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let h_n = &a * &h_m1 + &h_m2;
        let k_n = &a * &k_m1 + &k_m2;
        if k_n > max_den {
            return None;
        }
        let candidate = Rational::new(h_n.clone(), k_n.clone());
        let err = (rational_to_f64(&candidate) - x).abs();
        if err <= tolerance {
            return Some(candidate);
        }
        h_m2 = std::mem::replace(&mut h_m1, h_n);
        k_m2 = std::mem::replace(&mut k_m1, k_n);
        num = std::mem::replace(&mut den, r);
    }
    None
}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale down huge operands before dividing.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer().abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            let v = n / d;
            if r.is_negative() {
                -v
            } else {
                v
            }
        }
    }
}
