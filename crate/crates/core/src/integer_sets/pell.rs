//! Pell equation `U² - D V² = 1` and the orbit structure of `J+ ∪ J-`.
//!
//! With `X = k(4p+1)` the condition `m² = 4k²p(2p+1) + 1` reads
//! `X² - 2m² = k² - 2`, and `f±(k,p) = (6m² - 6 + 4k ± 4Xm) / (8k)`.
//! Multiplication of `X + m√2` by the unit `U + 4kV√2` (`D = 32k²`)
//! preserves `X ≡ k (mod 4k)` when `U ≡ 1 (mod 4)`, so along each orbit the
//! values satisfy `λ_{n+3} = a(λ_{n+2} - λ_{n+1}) + λ_n`, `a = 4U² - 1`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};

use super::{check_count, check_k, size_key};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellSolution {
    pub u: BigInt,
    pub v: BigInt,
    pub d: BigInt,
}

/// Fundamental solution of `U² - D V² = 1` from the continued fraction of
/// `√D`.
pub fn pell_fundamental(d: u64) -> Result<PellSolution> {
    let db = BigInt::from(d);
    let a0 = db.sqrt();
    if &a0 * &a0 == db {
        return Err(Error::PerfectSquare(format!("D = {d} is a perfect square")));
    }
    let (mut m, mut den, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut h_prev, mut h) = (BigInt::one(), a0.clone());
    let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
    while &h * &h - &db * &k * &k != BigInt::one() {
        m = &den * &a - &m;
        den = (&db - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
    Ok(PellSolution { u: h, v: k, d: db })
}

/// Element `x + y√2` of `Z[√2]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Quad {
    x: BigInt,
    y: BigInt,
}

impl Quad {
    fn mul(&self, o: &Quad) -> Quad {
        Quad {
            x: &self.x * &o.x + &self.y * &o.y * 2,
            y: &self.x * &o.y + &self.y * &o.x,
        }
    }

    fn conj(&self) -> Quad {
        Quad {
            x: self.x.clone(),
            y: -&self.y,
        }
    }
}

/// `λ(X, m) = (6m² - 6 + 4k + 4Xm) / (8k)`; `None` if not integral.
fn lambda_of(k: &BigInt, xi: &Quad) -> Option<BigInt> {
    let num: BigInt = &xi.y * &xi.y * 6 - 6 + k * 4 + &xi.x * &xi.y * 4;
    let den: BigInt = k * 8;
    num.is_multiple_of(&den).then(|| num / den)
}

/// Solutions of `X² - 2m² = n` representing every orbit under
/// multiplication by `3 + 2√2`.
fn reduced_representatives(n: &BigInt) -> Vec<Quad> {
    // Each orbit meets |ξ| ∈ [√|n|/√ε0, √|n|√ε0), so
    // |X| <= √|n| (√ε0 + 1/√ε0) / 2 = √(2|n|).
    let limit: BigInt = Roots::sqrt(&(n.abs() * 2)) + 1;
    let mut out = Vec::new();
    let mut x = -limit.clone();
    while x <= limit {
        let t: BigInt = &x * &x - n;
        if !t.is_negative() && t.is_even() {
            let half: BigInt = &t / 2;
            let m = half.sqrt();
            if &m * &m == half {
                out.push(Quad { x: x.clone(), y: m.clone() });
                if !m.is_zero() {
                    out.push(Quad { x: x.clone(), y: -m });
                }
            }
        }
        x += 1;
    }
    out
}

/// One bi-infinite orbit, extended lazily by the linear recurrence.
struct OrbitSequence {
    terms: Vec<BigInt>,
}

impl OrbitSequence {
    fn extend(&mut self, a: &BigInt) {
        let n = self.terms.len();
        let next = a * (&self.terms[n - 1] - &self.terms[n - 2]) + &self.terms[n - 3];
        self.terms.push(next);
    }

    fn settled(&self, k: i64, threshold: &BigInt) -> bool {
        let n = self.terms.len();
        let last = size_key(k, &self.terms[n - 1]);
        &last > threshold && last > size_key(k, &self.terms[n - 2])
    }
}

/// The `count` smallest elements of `J+ ∪ J-` (closest to 1 for `k < 0`),
/// generated from Pell orbits and the three-term recurrence.
pub fn enumerate_j_pm_via_pell(k: i64, count: usize) -> Result<Vec<BigInt>> {
    check_k(k)?;
    check_count(count)?;
    let kb = BigInt::from(k);
    let four_k = BigInt::from(4 * k.unsigned_abs());
    let pell = pell_fundamental(32 * k.unsigned_abs().pow(2))?;
    let a: BigInt = &pell.u * &pell.u * 4 - 1;

    // η = s(U + 4|k|V√2) with s ≡ U (mod 4) keeps X ≡ k (mod 4k).
    let s = if pell.u.mod_floor(&BigInt::from(4)) == BigInt::one() { 1 } else { -1 };
    let eta = Quad {
        x: &pell.u * s,
        y: &four_k * &pell.v * s,
    };
    let eta_inv = eta.conj();
    let eps0 = Quad {
        x: BigInt::from(3),
        y: BigInt::from(2),
    };
    let unit = Quad {
        x: pell.u.clone(),
        y: &four_k * &pell.v,
    };

    // Seeds: every congruent element within one η-period of each
    // reduced orbit.
    let congruent = |xi: &Quad| (&xi.x - &kb).is_multiple_of(&four_k);
    let n = &kb * &kb - 2;
    let mut seeds: BTreeSet<Quad> = BTreeSet::new();
    for rep in reduced_representatives(&n) {
        let mut cur = rep;
        let mut power = Quad {
            x: BigInt::one(),
            y: BigInt::zero(),
        };
        loop {
            if congruent(&cur) {
                seeds.insert(cur.clone());
            }
            cur = cur.mul(&eps0);
            power = power.mul(&eps0);
            if power == unit {
                break;
            }
        }
    }

    let mut sequences: Vec<OrbitSequence> = Vec::new();
    for xi in &seeds {
        for step in [&eta, &eta_inv] {
            let x1 = xi.mul(step);
            let x2 = x1.mul(step);
            let terms = [xi, &x1, &x2]
                .iter()
                .map(|q| {
                    lambda_of(&kb, q).ok_or_else(|| {
                        Error::InvalidArgument(format!("non-integral orbit value at X = {}", q.x))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            sequences.push(OrbitSequence { terms });
        }
    }
    if sequences.is_empty() {
        return Err(Error::InvalidArgument(format!("no Pell orbit found for k = {k}")));
    }

    loop {
        let values = smallest_values(k, &sequences);
        let threshold = (values.len() >= count).then(|| size_key(k, &values[count - 1]));
        let mut progressed = false;
        for seq in sequences.iter_mut() {
            let done = threshold.as_ref().is_some_and(|t| seq.settled(k, t));
            if !done {
                seq.extend(&a);
                progressed = true;
            }
        }
        if !progressed {
            let mut out: Vec<BigInt> = values.into_iter().take(count).collect();
            out.sort();
            return Ok(out);
        }
    }
}

/// Distinct orbit values ordered by size.
fn smallest_values(k: i64, sequences: &[OrbitSequence]) -> Vec<BigInt> {
    let set: BTreeSet<&BigInt> = sequences.iter().flat_map(|s| s.terms.iter()).collect();
    let mut values: Vec<BigInt> = set.into_iter().cloned().collect();
    values.sort_by_key(|v| (size_key(k, v), v.clone()));
    values
}
