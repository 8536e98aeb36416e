//! Eigenvalue families that are quadratic in an integer parameter `p`,
//! solved exactly over the rationals.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::Rational;
use crate::integer_sets::{f_pm, in_j_pm, FValue, SetName, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Table {
    /// Non-relativistic conditions.
    Classical,
    /// Variational equation at a generic energy level.
    GenericLevel,
    /// Variational equation at the special energy level (Riemann P form).
    SpecialLevel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyHit {
    pub table: Table,
    pub row_id: String,
    /// `None` for rows that accept every `lambda`.
    pub parameter_p: Option<BigInt>,
    pub k: i64,
    pub lambda: Rational,
}

/// `lambda(p) = a p² + b p + c`.
#[derive(Debug, Clone)]
struct Family {
    id: String,
    a: Rational,
    b: Rational,
    c: Rational,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

impl Family {
    /// `scale (a1 p + b1)(a2 p + b2)`.
    fn product(id: impl Into<String>, scale: Rational, a1: i64, b1: i64, a2: i64, b2: i64) -> Self {
        Family {
            id: id.into(),
            a: &scale * int(a1 * a2),
            b: &scale * int(a1 * b2 + a2 * b1),
            c: &scale * int(b1 * b2),
        }
    }

    /// `a p² + c`.
    fn square(id: impl Into<String>, a: Rational, c: Rational) -> Self {
        Family {
            id: id.into(),
            a,
            b: Rational::zero(),
            c,
        }
    }

    fn eval(&self, p: &BigInt) -> Rational {
        let p = Rational::from_integer(p.clone());
        &self.a * &p * &p + &self.b * &p + &self.c
    }

    /// Integer `p` with `lambda(p) = lambda`, ascending.
    fn solve(&self, lambda: &Rational) -> Vec<BigInt> {
        let c = &self.c - lambda;
        let mut out = Vec::new();
        if self.a.is_zero() {
            if self.b.is_zero() {
                return out;
            }
            let p = -c / &self.b;
            if p.is_integer() {
                out.push(p.to_integer());
            }
            return out;
        }
        let disc = &self.b * &self.b - int(4) * &self.a * &c;
        let Some(root) = rational_sqrt(&disc) else {
            return out;
        };
        for s in [-root.clone(), root] {
            let p = (-&self.b + s) / (int(2) * &self.a);
            if p.is_integer() {
                out.push(p.to_integer());
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| Rational::new(sn, sd))
}

fn hits_for(table: Table, k: i64, lambda: &Rational, families: &[Family]) -> Vec<FamilyHit> {
    let mut hits = Vec::new();
    for f in families {
        for p in f.solve(lambda) {
            debug_assert_eq!(&f.eval(&p), lambda);
            hits.push(FamilyHit {
                table,
                row_id: f.id.clone(),
                parameter_p: Some(p),
                k,
                lambda: lambda.clone(),
            });
        }
    }
    hits
}

fn classical_families(k: i64) -> Vec<Family> {
    let kr = int(k);
    let half_k = q(k, 2);
    let mut rows = vec![
        // p + k p (p-1) / 2
        Family {
            id: "p+kp(p-1)/2".into(),
            a: half_k.clone(),
            b: int(1) - &half_k,
            c: Rational::zero(),
        },
        // (kp+1)(kp+k-1) / (2k)
        Family {
            id: "(kp+1)(kp+k-1)/(2k)".into(),
            a: half_k.clone(),
            b: half_k,
            c: (&kr - int(1)) / (int(2) * &kr),
        },
    ];
    let sp = |id: &str, scale: Rational, a1, b1, a2, b2| Family::product(format!("k={k}:{id}"), scale, a1, b1, a2, b2);
    match k {
        3 => rows.extend([
            sp("(2p+1)(6p+1)/8", q(1, 8), 2, 1, 6, 1),
            sp("(12p+1)(12p+5)/96", q(1, 96), 12, 1, 12, 5),
            sp("(30p+1)(30p+11)/600", q(1, 600), 30, 1, 30, 11),
            sp("(30p+7)(30p+17)/600", q(1, 600), 30, 7, 30, 17),
        ]),
        4 => rows.push(sp("(12p+1)(12p+7)/72", q(1, 72), 12, 1, 12, 7)),
        5 => rows.extend([
            sp("(30p+1)(30p+19)/360", q(1, 360), 30, 1, 30, 19),
            sp("(10p+1)(10p+7)/40", q(1, 40), 10, 1, 10, 7),
        ]),
        -3 => rows.extend([
            sp("-(2p-1)(6p+7)/8", q(-1, 8), 2, -1, 6, 7),
            sp("-(12p-7)(12p+13)/96", q(-1, 96), 12, -7, 12, 13),
            sp("-(30p-19)(30p+31)/600", q(-1, 600), 30, -19, 30, 31),
            sp("-(30p-13)(30p+37)/600", q(-1, 600), 30, -13, 30, 37),
        ]),
        -4 => rows.push(sp("-(12p-5)(12p+13)/72", q(-1, 72), 12, -5, 12, 13)),
        -5 => rows.extend([
            sp("-(30p-11)(30p+31)/360", q(-1, 360), 30, -11, 30, 31),
            sp("-(10p-3)(10p+11)/40", q(-1, 40), 10, -3, 10, 11),
        ]),
        _ => {}
    }
    rows
}

/// Non-relativistic eigenvalue families for degree `k`. For `k = ±2` every
/// `lambda` is admissible.
pub fn check_classical(k: i64, lambda: &Rational) -> Vec<FamilyHit> {
    let mut hits = Vec::new();
    if k.abs() == 2 {
        hits.push(FamilyHit {
            table: Table::Classical,
            row_id: "k=±2:arbitrary".into(),
            parameter_p: None,
            k,
            lambda: lambda.clone(),
        });
    }
    hits.extend(hits_for(Table::Classical, k, lambda, &classical_families(k)));
    hits
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericLevelCheck {
    pub hits: Vec<FamilyHit>,
    /// No degree-specific rows are known for `|k| > 6`.
    pub partial_table: bool,
}

fn generic_families(k: i64) -> Vec<Family> {
    let kr = int(k);
    let mut rows = vec![
        Family::product("(1+p)(1+kp)", int(1), 1, 1, k, 1),
        Family::product("(3+2p)(2+k+2kp)/4", q(1, 4), 2, 3, 2 * k, 2 + k),
        // (2k-1)/(4k) + k(p²-4)/16
        Family {
            id: "(2k-1)/(4k)+k(p^2-4)/16".into(),
            a: q(k, 16),
            b: Rational::zero(),
            c: (int(2) * &kr - int(1)) / (int(4) * &kr) - q(k, 4),
        },
    ];
    let sq = |id: &str, a: Rational, c: Rational| Family::square(format!("k={k}:{id}"), a, c);
    let specific: Vec<Family> = match k {
        1 => vec![
            sq("p^2/16", q(1, 16), int(0)),
            sq("p^2/144", q(1, 144), int(0)),
            sq("p^2/100", q(1, 100), int(0)),
            sq("p^2/64", q(1, 64), int(0)),
        ],
        2 => vec![
            sq("(p^2-1)/8", q(1, 8), q(-1, 8)),
            sq("p^2/72-1/8", q(1, 72), q(-1, 8)),
            sq("p^2/50-1/8", q(1, 50), q(-1, 8)),
            sq("p^2/32-1/8", q(1, 32), q(-1, 8)),
        ],
        3 => vec![
            sq("3p^2/64-1/3", q(3, 64), q(-1, 3)),
            sq("p^2/48-1/3", q(1, 48), q(-1, 3)),
            sq("3p^2/100-1/3", q(3, 100), q(-1, 3)),
        ],
        4 => vec![
            sq("(p^2-9)/16", q(1, 16), q(-9, 16)),
            sq("p^2/36-9/16", q(1, 36), q(-9, 16)),
            sq("p^2/25-9/16", q(1, 25), q(-9, 16)),
        ],
        5 => vec![
            sq("5p^2/144-4/5", q(5, 144), q(-4, 5)),
            sq("p^2/20-4/5", q(1, 20), q(-4, 5)),
            sq("5p^2/64-4/5", q(5, 64), q(-4, 5)),
        ],
        6 => vec![
            sq("p^2/24-25/24", q(1, 24), q(-25, 24)),
            sq("3p^2/32-25/24", q(3, 32), q(-25, 24)),
            sq("3p^2/50-25/24", q(3, 50), q(-25, 24)),
        ],
        -1 => vec![
            sq("(16-p^2)/16", q(-1, 16), int(1)),
            sq("1-p^2/144", q(-1, 144), int(1)),
            sq("1-p^2/100", q(-1, 100), int(1)),
            sq("1-p^2/64", q(-1, 64), int(1)),
        ],
        -2 => vec![
            sq("(9-p^2)/8", q(-1, 8), q(9, 8)),
            sq("9/8-p^2/72", q(-1, 72), q(9, 8)),
            sq("9/8-p^2/50", q(-1, 50), q(9, 8)),
            sq("9/8-p^2/32", q(-1, 32), q(9, 8)),
        ],
        -3 => vec![
            sq("4/3-3p^2/64", q(-3, 64), q(4, 3)),
            sq("4/3-p^2/48", q(-1, 48), q(4, 3)),
            sq("4/3-3p^2/100", q(-3, 100), q(4, 3)),
        ],
        -4 => vec![
            sq("(25-p^2)/16", q(-1, 16), q(25, 16)),
            sq("25/16-p^2/36", q(-1, 36), q(25, 16)),
            sq("25/16-p^2/25", q(-1, 25), q(25, 16)),
        ],
        -5 => vec![
            sq("9/5-5p^2/144", q(-5, 144), q(9, 5)),
            sq("9/5-p^2/20", q(-1, 20), q(9, 5)),
            sq("9/5-5p^2/64", q(-5, 64), q(9, 5)),
        ],
        -6 => vec![
            sq("49/24-p^2/24", q(-1, 24), q(49, 24)),
            sq("49/24-3p^2/32", q(-3, 32), q(49, 24)),
            sq("49/24-3p^2/50", q(-3, 50), q(49, 24)),
        ],
        _ => vec![],
    };
    rows.extend(specific);
    rows
}

/// Families admissible at a generic energy level.
pub fn check_generic_level(k: i64, lambda: &Rational) -> GenericLevelCheck {
    GenericLevelCheck {
        hits: hits_for(Table::GenericLevel, k, lambda, &generic_families(k)),
        partial_table: k.abs() > 6,
    }
}

fn special_families(k: i64) -> Vec<Family> {
    let kr = int(k);
    vec![
        // ((k-1)/k + k p (p+1)) / 2
        Family {
            id: "((k-1)/k+kp(p+1))/2".into(),
            a: q(k, 2),
            b: q(k, 2),
            c: (&kr - int(1)) / (int(2) * &kr),
        },
        // (2k-1)/(4k) + k(4p(p+1) - 3)/16
        Family {
            id: "(2k-1)/(4k)+k(4p(p+1)-3)/16".into(),
            a: q(k, 4),
            b: q(k, 4),
            c: (int(2) * &kr - int(1)) / (int(4) * &kr) - q(3 * k, 16),
        },
    ]
}

/// Families admissible at the special energy level. The `f±` family can
/// only produce integers, so non-integer `lambda` never hits it.
pub fn check_special_level(k: i64, lambda: &Rational) -> Vec<FamilyHit> {
    let mut hits = Vec::new();
    if lambda.is_integer() && k != 0 {
        let w = in_j_pm(k, &lambda.to_integer()).expect("k != 0");
        if w.member {
            let sign = match w.set_name {
                SetName::JMinus => "f-(k,p)",
                _ => "f+(k,p)",
            };
            hits.push(FamilyHit {
                table: Table::SpecialLevel,
                row_id: sign.into(),
                parameter_p: w.witness_p,
                k,
                lambda: lambda.clone(),
            });
        }
    }
    hits.extend(hits_for(Table::SpecialLevel, k, lambda, &special_families(k)));
    hits
}

/// Substitutes `p` into a row by id; used to audit hits.
pub fn evaluate_row(table: Table, k: i64, row_id: &str, p: &BigInt) -> Option<Rational> {
    let families = match table {
        Table::Classical => classical_families(k),
        Table::GenericLevel => generic_families(k),
        Table::SpecialLevel => special_families(k),
    };
    if let Some(f) = families.iter().find(|f| f.id == row_id) {
        return Some(f.eval(p));
    }
    if table == Table::SpecialLevel && (row_id == "f+(k,p)" || row_id == "f-(k,p)") {
        let sign = if row_id == "f+(k,p)" { Sign::Plus } else { Sign::Minus };
        let p: i64 = p.try_into().ok()?;
        return match f_pm(k, p, sign).ok()? {
            FValue::Integer(v) => Some(Rational::from_integer(v)),
            FValue::Irrational(_) => None,
        };
    }
    None
}
