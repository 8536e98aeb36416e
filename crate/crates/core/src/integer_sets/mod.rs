//! The integer sets `J+`, `J-` built from
//! `f±(k,p) = 3kp(2p+1) + (1 ± (4p+1)m)/2`, `m² = 4k²p(2p+1) + 1`,
//! together with the triangular and square triangular sets used for
//! `|k| <= 2`.
//!
//! Membership is decided in exact integer arithmetic only.

mod pell;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};

pub use pell::{enumerate_j_pm_via_pell, pell_fundamental, PellSolution};

/// Upper bound on `|p|` for direct scans.
pub const SCAN_P_LIMIT: i64 = 200_000_000;
/// Largest `count` accepted by the enumerators.
pub const MAX_COUNT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SetName {
    JPlus,
    JMinus,
    J1,
    J2,
    Jm1,
    Jm2,
}

impl SetName {
    pub fn of_sign(sign: Sign) -> Self {
        match sign {
            Sign::Plus => SetName::JPlus,
            Sign::Minus => SetName::JMinus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipWitness {
    pub member: bool,
    pub set_name: SetName,
    pub witness_p: Option<BigInt>,
    pub value: BigInt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FValue {
    Integer(BigInt),
    /// `m` is irrational; carries the floating point value.
    Irrational(f64),
}

fn check_k(k: i64) -> Result<()> {
    if k == 0 {
        Err(Error::ZeroDegree)
    } else {
        Ok(())
    }
}

/// `f±(k, p)`, exact whenever `4k²p(2p+1) + 1` is a perfect square.
pub fn f_pm(k: i64, p: i64, sign: Sign) -> Result<FValue> {
    check_k(k)?;
    let (kb, pb) = (BigInt::from(k), BigInt::from(p));
    let x = &pb * (&pb * 2 + 1);
    let m2: BigInt = &kb * &kb * &x * 4 + 1;
    let m = m2.sqrt();
    if &m * &m == m2 {
        Ok(FValue::Integer(f_exact(&kb, &pb, &m, sign)))
    } else {
        let (kf, pf) = (k as f64, p as f64);
        let mf = (4.0 * kf * kf * pf * (2.0 * pf + 1.0) + 1.0).sqrt();
        Ok(FValue::Irrational(
            3.0 * kf * pf * (2.0 * pf + 1.0) + 0.5 * (1.0 + sign.factor() as f64 * (4.0 * pf + 1.0) * mf),
        ))
    }
}

/// `f±(k,p)` given the integer `m`; `(4p+1)m` is odd so the halving is exact.
fn f_exact(k: &BigInt, p: &BigInt, m: &BigInt, sign: Sign) -> BigInt {
    let x = p * (p * 2 + 1);
    let t = (p * 4 + 1) * m * sign.factor();
    k * x * 3 + (t + 1) / 2
}

/// `m` when `4k²p(2p+1)+1` is a perfect square, in machine integers.
fn square_root_m(k: i64, p: i64) -> Option<i128> {
    let (k, p) = (k as i128, p as i128);
    let m2 = 4 * k * k * p * (2 * p + 1) + 1;
    let m = m2.sqrt();
    (m * m == m2).then_some(m)
}

fn f_fast(k: i64, p: i64, m: i128, sign: Sign) -> i128 {
    let (k, p) = (k as i128, p as i128);
    3 * k * p * (2 * p + 1) + (1 + sign.factor() as i128 * (4 * p + 1) * m) / 2
}

/// Real-valued `f±`, used only for scan termination bounds.
fn f_real(k: i64, p: i64, sign: Sign) -> f64 {
    let (k, p) = (k as f64, p as f64);
    let m = (4.0 * k * k * p * (2.0 * p + 1.0) + 1.0).sqrt();
    3.0 * k * p * (2.0 * p + 1.0) + 0.5 * (1.0 + sign.factor() as f64 * (4.0 * p + 1.0) * m)
}

/// Exact membership of `lambda` in `J+ ∪ J-`.
///
/// Writing `x = p(2p+1)`, the squared equation `f±(k,p) = lambda` is
/// quadratic in `x`; its integer roots give every candidate `p`, which is
/// then verified exactly. The witness minimises `|p|`, preferring `J+`.
pub fn in_j_pm(k: i64, lambda: &BigInt) -> Result<MembershipWitness> {
    check_k(k)?;
    let kb = BigInt::from(k);
    let c: BigInt = lambda * 2 - 1;
    let a: BigInt = &kb * &kb * 4;
    let b_neg: BigInt = &c * &kb * 12 + 8 + &kb * &kb * 4;
    let b: BigInt = -b_neg;
    let cc: BigInt = &c * &c - 1;
    let disc: BigInt = &b * &b - &a * &cc * 4;

    let mut hits: Vec<(BigInt, Sign)> = Vec::new();
    if !disc.is_negative() {
        let s = disc.sqrt();
        if &s * &s == disc {
            let mut xs = vec![-&b + &s, -&b - &s];
            xs.dedup();
            for num in xs {
                let den = &a * 2;
                if !num.is_multiple_of(&den) {
                    continue;
                }
                let x = num / den;
                if x.is_negative() {
                    continue;
                }
                let r2: BigInt = &x * 8 + 1;
                let r = r2.sqrt();
                if &r * &r != r2 {
                    continue;
                }
                let tops: [BigInt; 2] = [&r - 1, -&r - 1];
                for top in tops {
                    if !top.is_multiple_of(&BigInt::from(4)) {
                        continue;
                    }
                    let p = top / 4;
                    let m2: BigInt = &kb * &kb * &x * 4 + 1;
                    let m = m2.sqrt();
                    if &m * &m != m2 {
                        continue;
                    }
                    for sign in [Sign::Plus, Sign::Minus] {
                        if &f_exact(&kb, &p, &m, sign) == lambda {
                            hits.push((p.clone(), sign));
                        }
                    }
                }
            }
        }
    }
    hits.sort_by(|a, b| a.0.abs().cmp(&b.0.abs()).then(a.1.cmp(&b.1)).then(a.0.cmp(&b.0)));
    Ok(match hits.into_iter().next() {
        Some((p, sign)) => MembershipWitness {
            member: true,
            set_name: SetName::of_sign(sign),
            witness_p: Some(p),
            value: lambda.clone(),
        },
        None => MembershipWitness {
            member: false,
            set_name: SetName::JPlus,
            witness_p: None,
            value: lambda.clone(),
        },
    })
}

/// Membership by scanning `p` outward from zero. Each side stops after
/// three consecutive `p` for which both `|f±|` exceed `|lambda|`.
pub fn in_j_pm_scan(k: i64, lambda: i128) -> Result<MembershipWitness> {
    check_k(k)?;
    let target = lambda.unsigned_abs() as f64;
    let exceeds = |p: i64| {
        [Sign::Plus, Sign::Minus]
            .iter()
            .all(|&s| f_real(k, p, s).abs() > target * (1.0 + 1e-12) + 1.0)
    };
    let mut streak = [0u8; 2];
    let mut step: i64 = 0;
    loop {
        let sides: &[i64] = if step == 0 { &[0] } else { &[step, -step] };
        for &p in sides {
            let side = usize::from(p < 0);
            if p != 0 && streak[side] >= 3 {
                continue;
            }
            if let Some(m) = square_root_m(k, p) {
                for sign in [Sign::Plus, Sign::Minus] {
                    if f_fast(k, p, m, sign) == lambda {
                        return Ok(MembershipWitness {
                            member: true,
                            set_name: SetName::of_sign(sign),
                            witness_p: Some(p.into()),
                            value: lambda.into(),
                        });
                    }
                }
            }
            if p != 0 {
                streak[side] = if exceeds(p) { streak[side] + 1 } else { 0 };
            }
        }
        if streak.iter().all(|&s| s >= 3) {
            break;
        }
        step += 1;
        if step > SCAN_P_LIMIT {
            return Err(Error::Unsupported(format!(
                "scan for {lambda} exceeded |p| <= {SCAN_P_LIMIT}"
            )));
        }
    }
    Ok(MembershipWitness {
        member: false,
        set_name: SetName::JPlus,
        witness_p: None,
        value: lambda.into(),
    })
}

/// Ordering key selecting the "smallest" elements: the sets grow away from
/// 0 for `k > 0` and away from 1 for `k < 0`.
pub(crate) fn size_key(k: i64, lambda: &BigInt) -> BigInt {
    if k > 0 {
        lambda.abs()
    } else {
        (BigInt::from(1) - lambda).abs()
    }
}

fn size_key_f64(k: i64, lambda: f64) -> f64 {
    if k > 0 {
        lambda.abs()
    } else {
        (1.0 - lambda).abs()
    }
}

pub(crate) fn check_count(count: usize) -> Result<()> {
    if count == 0 || count > MAX_COUNT {
        Err(Error::InvalidArgument(format!(
            "count must lie in 1..={MAX_COUNT} (got {count})"
        )))
    } else {
        Ok(())
    }
}

/// The `count` smallest elements of `J+ ∪ J-` in increasing order, by a
/// direct scan over `p`. For `k < 0` "smallest" means closest to 1.
pub fn enumerate_j_pm(k: i64, count: usize) -> Result<Vec<BigInt>> {
    check_k(k)?;
    check_count(count)?;
    let mut found: BTreeSet<i128> = BTreeSet::new();
    let key = |v: i128| if k > 0 { v.unsigned_abs() } else { (1 - v).unsigned_abs() };
    let mut p: i64 = 0;
    loop {
        let sides: &[i64] = if p == 0 { &[0] } else { &[p, -p] };
        for &q in sides {
            if let Some(m) = square_root_m(k, q) {
                for sign in [Sign::Plus, Sign::Minus] {
                    found.insert(f_fast(k, q, m, sign));
                }
            }
        }
        if p >= 3 && found.len() >= count {
            // Every element from |p| > P has key at least this bound.
            let bound = [p + 1, -(p + 1)]
                .iter()
                .flat_map(|&q| [Sign::Plus, Sign::Minus].map(|s| size_key_f64(k, f_real(k, q, s))))
                .fold(f64::INFINITY, f64::min);
            let mut keys: Vec<u128> = found.iter().map(|&v| key(v)).collect();
            keys.sort_unstable();
            if (keys[count - 1] as f64) < bound * (1.0 - 1e-12) - 1.0 {
                break;
            }
        }
        p += 1;
        if p > SCAN_P_LIMIT {
            return Err(Error::Unsupported(format!(
                "direct scan exceeded |p| <= {SCAN_P_LIMIT}; use the Pell enumerator"
            )));
        }
    }
    let mut by_key: Vec<i128> = found.into_iter().collect();
    by_key.sort_by_key(|&v| (key(v), v));
    by_key.truncate(count);
    by_key.sort_unstable();
    Ok(by_key.into_iter().map(BigInt::from).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DensityScan {
    /// Number of `p` with `|p| <= p_bound` giving integer values.
    pub p_values: u64,
    /// Number of `(p, sign)` pairs giving integer values.
    pub hits: u64,
}

/// Counts the integers among `f±(k,p)` for `|p| <= p_bound`.
///
/// Both signs share `m`, so `hits = 2 * p_values`.
pub fn integer_density_scan(k: i64, p_bound: u64) -> Result<DensityScan> {
    check_k(k)?;
    if p_bound > 10_000_000 {
        return Err(Error::InvalidArgument(format!(
            "p_bound {p_bound} exceeds 10^7"
        )));
    }
    let bound = p_bound as i64;
    let count_range = |lo: i64, hi: i64| -> u64 {
        (lo..=hi).filter(|&p| square_root_m(k, p).is_some()).count() as u64
    };
    const CHUNK: i64 = 1 << 16;
    let starts: Vec<i64> = (0..)
        .map(|i| -bound + i * CHUNK)
        .take_while(|&s| s <= bound)
        .collect();
    let chunk = |&s: &i64| count_range(s, (s + CHUNK - 1).min(bound));
    #[cfg(feature = "parallel")]
    let p_values: u64 = {
        use rayon::prelude::*;
        starts.par_iter().map(chunk).sum()
    };
    #[cfg(not(feature = "parallel"))]
    let p_values: u64 = starts.iter().map(chunk).sum();
    Ok(DensityScan {
        p_values,
        hits: 2 * p_values,
    })
}

fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// The `p >= 0` with `p(p+1)/2 = t`, if any.
pub fn triangular_index(t: &BigInt) -> Option<BigInt> {
    let r = is_perfect_square(&(t * 8 + 1))?;
    Some((r - 1) / 2)
}

/// `t = p(p+1)/2` for some integer `p`, i.e. `8t+1` is a perfect square.
pub fn triangular_membership(t: &BigInt) -> bool {
    triangular_index(t).is_some()
}

/// `s` is both a perfect square and triangular.
pub fn square_triangular_membership(s: &BigInt) -> bool {
    is_perfect_square(s).is_some() && triangular_membership(s)
}

/// Membership in `J_k` for `k ∈ {-2, -1, 1, 2}`:
/// `J_1` square triangular numbers, `J_2` triangular numbers,
/// `J_-1 = 1 - J_1`, `J_-2 = 1 - J_2`.
pub fn in_j_k_small(k: i64, lambda: &BigInt) -> Result<MembershipWitness> {
    let one = BigInt::from(1);
    let (set_name, arg, square) = match k {
        1 => (SetName::J1, lambda.clone(), true),
        2 => (SetName::J2, lambda.clone(), false),
        -1 => (SetName::Jm1, &one - lambda, true),
        -2 => (SetName::Jm2, &one - lambda, false),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "J_k is defined for k in {{-2,-1,1,2}} (got {k})"
            )))
        }
    };
    let member = if square {
        square_triangular_membership(&arg)
    } else {
        triangular_membership(&arg)
    };
    Ok(MembershipWitness {
        member,
        set_name,
        witness_p: if member { triangular_index(&arg) } else { None },
        value: lambda.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn list(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| b(x)).collect()
    }

    #[test]
    fn f_values() {
        for k in [-7, -1, 1, 3, 10] {
            assert_eq!(f_pm(k, 0, Sign::Minus).unwrap(), FValue::Integer(b(0)));
            assert_eq!(f_pm(k, 0, Sign::Plus).unwrap(), FValue::Integer(b(1)));
        }
        assert_eq!(f_pm(10, -2, Sign::Plus).unwrap(), FValue::Integer(b(9)));
        assert!(matches!(f_pm(3, 1, Sign::Plus).unwrap(), FValue::Irrational(_)));
        assert!(f_pm(0, 1, Sign::Plus).is_err());
    }

    #[test]
    fn membership_examples() {
        assert!(in_j_pm(3, &b(5)).unwrap().member);
        assert!(in_j_pm(4, &b(10)).unwrap().member);
        assert!(!in_j_pm(2, &b(-1)).unwrap().member);
        assert!(!in_j_k_small(2, &b(-1)).unwrap().member);
        let w = in_j_pm(10, &b(9)).unwrap();
        assert_eq!(w.witness_p, Some(b(-2)));
        assert_eq!(w.set_name, SetName::JPlus);
        assert!(!in_j_pm(3, &b(7)).unwrap().member);
    }

    #[test]
    fn scan_agrees_with_exact_solver() {
        for k in [-6, -4, -3, -2, -1, 1, 2, 3, 4, 5, 6, 10] {
            for lambda in -60i64..=2000 {
                let exact = in_j_pm(k, &b(lambda)).unwrap().member;
                let scan = in_j_pm_scan(k, lambda as i128).unwrap().member;
                assert_eq!(exact, scan, "k={k} lambda={lambda}");
            }
        }
    }

    #[test]
    fn set_displays() {
        assert_eq!(enumerate_j_pm(3, 7).unwrap(), list(&[0, 1, 5, 40, 176, 1365, 5985]));
        assert_eq!(enumerate_j_pm(4, 7).unwrap(), list(&[0, 1, 10, 45, 351, 1540, 11935]));
        assert_eq!(enumerate_j_pm(5, 6).unwrap(), list(&[0, 1, 540, 1729, 18361, 58752]));
        assert_eq!(enumerate_j_pm(6, 7).unwrap(), list(&[0, 1, 21, 56, 736, 1925, 25025]));
    }

    #[test]
    fn negative_degree_mirrors() {
        for k in 1..=6 {
            let pos = enumerate_j_pm(k, 8).unwrap();
            let mut neg: Vec<BigInt> = enumerate_j_pm(-k, 8).unwrap().iter().map(|v| b(1) - v).collect();
            neg.sort();
            assert_eq!(pos, neg, "k={k}");
        }
    }

    #[test]
    fn density_small() {
        assert_eq!(integer_density_scan(1, 0).unwrap(), DensityScan { p_values: 1, hits: 2 });
    }

    #[test]
    fn triangular_examples() {
        assert!(square_triangular_membership(&b(36)));
        assert!(triangular_membership(&b(10)) && !square_triangular_membership(&b(10)));
        assert!(square_triangular_membership(&b(0)) && triangular_membership(&b(0)));
        assert!(!triangular_membership(&b(-3)));
    }

    #[test]
    fn small_k_sets() {
        assert!(in_j_k_small(2, &b(1)).unwrap().member);
        assert!(in_j_k_small(1, &b(36)).unwrap().member);
        let w = in_j_k_small(-2, &b(-2)).unwrap();
        assert!(w.member);
        assert_eq!(w.set_name, SetName::Jm2);
        assert!(in_j_k_small(-1, &b(-35)).unwrap().member);
        assert!(in_j_k_small(3, &b(0)).is_err());
    }
}
