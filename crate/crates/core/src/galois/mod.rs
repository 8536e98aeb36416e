//! Eigenvalue tables, the Kimura test and the combined verdict for
//! relativistic integrability.
//!
//! A relativistic system can only be integrable when every non-trivial
//! eigenvalue is an integer in `J+ ∪ J-` (or in `J_k` when `|k| <= 2`).
//! The classical, generic-level and special-level tables are reported as
//! diagnostics alongside the verdict.

mod kimura;
mod tables;

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;

use crate::algebra::{Complex, Rational};
use crate::darboux::{rational_of, SpectrumReport, IMAGINARY_TOLERANCE};
use crate::error::{Error, Result};
use crate::integer_sets::{in_j_k_small, in_j_pm, MembershipWitness};

pub use kimura::{
    kimura_solvable, riemann_exponents, ExponentDifferences, KimuraCase, KimuraResult,
    KIMURA_TOLERANCE,
};
pub use tables::{
    check_classical, check_generic_level, check_special_level, evaluate_row, FamilyHit,
    GenericLevelCheck, Table,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Overall {
    CannotBeIntegrable,
    PassesNecessaryConditions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueVerdict {
    pub lambda: Complex,
    pub rational: Option<Rational>,
    pub integer_reconstruction: Option<BigInt>,
    /// Witnesses from `J±` and, for `|k| <= 2`, from `J_k`.
    pub memberships: Vec<MembershipWitness>,
    pub classical: Vec<FamilyHit>,
    pub generic_level: Option<GenericLevelCheck>,
    pub special_level: Vec<FamilyHit>,
    pub kimura: Option<KimuraResult>,
    pub passes_main_theorem: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityVerdict {
    pub k: i64,
    pub per_eigenvalue: Vec<EigenvalueVerdict>,
    pub overall: Overall,
    pub explanation: String,
}

fn format_lambda(z: Complex) -> String {
    if z.im.abs() <= IMAGINARY_TOLERANCE {
        format!("{:.12}", z.re)
    } else {
        format!("{:.12}{:+.12}i", z.re, z.im)
    }
}

fn judge(k: i64, lambda: Complex) -> Result<EigenvalueVerdict> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::NonFinite(format!("eigenvalue {lambda}")));
    }
    let mut v = EigenvalueVerdict {
        lambda,
        rational: None,
        integer_reconstruction: None,
        memberships: Vec::new(),
        classical: Vec::new(),
        generic_level: None,
        special_level: Vec::new(),
        kimura: None,
        passes_main_theorem: false,
        reason: String::new(),
    };
    if lambda.im.abs() > IMAGINARY_TOLERANCE {
        v.reason = format!(
            "eigenvalue {} is complex; the relativistic criterion requires integers",
            format_lambda(lambda)
        );
        return Ok(v);
    }
    v.kimura = Some(riemann_exponents(k, Complex::new(lambda.re, 0.0)).kimura());
    let Some(r) = rational_of(lambda) else {
        v.reason = format!(
            "eigenvalue {} is not rational; the relativistic criterion requires integers",
            format_lambda(lambda)
        );
        return Ok(v);
    };
    v.classical = check_classical(k, &r);
    v.generic_level = Some(check_generic_level(k, &r));
    v.special_level = check_special_level(k, &r);
    v.rational = Some(r.clone());
    if !r.is_integer() {
        v.reason = format!("eigenvalue {r} is not an integer; the relativistic criterion requires integers");
        return Ok(v);
    }
    let n = r.to_integer();
    v.integer_reconstruction = Some(n.clone());
    let pm = in_j_pm(k, &n)?;
    if pm.member {
        v.memberships.push(pm);
    }
    if k.abs() <= 2 {
        let small = in_j_k_small(k, &n)?;
        if small.member {
            v.memberships.push(small);
        }
    }
    v.passes_main_theorem = !v.memberships.is_empty();
    v.reason = if v.passes_main_theorem {
        let w = &v.memberships[0];
        match &w.witness_p {
            Some(p) => format!("eigenvalue {n} lies in {:?} (p = {p})", w.set_name),
            None => format!("eigenvalue {n} lies in {:?}", w.set_name),
        }
    } else if k.abs() <= 2 {
        format!("integer eigenvalue {n} is not in J+ ∪ J- ∪ J_{k}")
    } else {
        format!("integer eigenvalue {n} is not in J+ ∪ J-")
    };
    Ok(v)
}

/// Combined verdict over the non-trivial eigenvalues of all Darboux points.
pub fn main_theorem_verdict(k: i64, eigenvalues: &[Complex]) -> Result<IntegrabilityVerdict> {
    if k == 0 {
        return Err(Error::ZeroDegree);
    }
    let per_eigenvalue = eigenvalues
        .iter()
        .map(|&l| judge(k, l))
        .collect::<Result<Vec<_>>>()?;
    let overall = if per_eigenvalue.iter().all(|v| v.passes_main_theorem) {
        Overall::PassesNecessaryConditions
    } else {
        Overall::CannotBeIntegrable
    };
    let mut explanation = String::new();
    match overall {
        Overall::PassesNecessaryConditions => {
            let _ = write!(
                explanation,
                "all {} non-trivial eigenvalues satisfy the necessary conditions",
                per_eigenvalue.len()
            );
        }
        Overall::CannotBeIntegrable => {
            explanation.push_str("not integrable with first integrals rational in (q, p, u): ");
            let reasons: Vec<&str> = per_eigenvalue
                .iter()
                .filter(|v| !v.passes_main_theorem)
                .map(|v| v.reason.as_str())
                .collect();
            explanation.push_str(&reasons.join("; "));
            let classical_obstructed = per_eigenvalue
                .iter()
                .any(|v| v.rational.is_some() && v.classical.is_empty());
            if classical_obstructed {
                explanation.push_str("; the non-relativistic system with the same potential is obstructed as well");
            }
        }
    }
    Ok(IntegrabilityVerdict {
        k,
        per_eigenvalue,
        overall,
        explanation,
    })
}

/// Verdict from the spectra of all Darboux points of a potential.
pub fn verdict_for_spectra(k: i64, spectra: &[SpectrumReport]) -> Result<IntegrabilityVerdict> {
    let lambdas: Vec<Complex> = spectra.iter().flat_map(|s| s.nontrivial.iter().copied()).collect();
    main_theorem_verdict(k, &lambdas)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex {
        Complex::new(x, 0.0)
    }

    #[test]
    fn oscillator_verdicts() {
        let pass = main_theorem_verdict(2, &[c(1.0), c(1.0)]).unwrap();
        assert_eq!(pass.overall, Overall::PassesNecessaryConditions);
        let fail = main_theorem_verdict(2, &[c(-1.0), c(-1.0)]).unwrap();
        assert_eq!(fail.overall, Overall::CannotBeIntegrable);
    }

    #[test]
    fn non_integer_fails() {
        let v = main_theorem_verdict(3, &[c(1.0 / 3.0), c(5.0), c(5.0)]).unwrap();
        assert_eq!(v.overall, Overall::CannotBeIntegrable);
        assert!(v.explanation.contains("1/3"), "{}", v.explanation);
        assert!(v.per_eigenvalue[1].passes_main_theorem);
    }

    #[test]
    fn complex_eigenvalue_fails() {
        let v = main_theorem_verdict(3, &[Complex::new(5.0, 1e-3)]).unwrap();
        assert!(v.explanation.contains("complex"));
        assert!(main_theorem_verdict(3, &[c(f64::NAN)]).is_err());
    }

    #[test]
    fn cartesian_exception() {
        assert_eq!(main_theorem_verdict(10, &[c(9.0)]).unwrap().overall, Overall::PassesNecessaryConditions);
        assert_eq!(main_theorem_verdict(9, &[c(8.0)]).unwrap().overall, Overall::CannotBeIntegrable);
    }

    #[test]
    fn kimura_on_set_elements() {
        for lambda in [0.0, 1.0, 5.0, 40.0] {
            assert!(riemann_exponents(3, c(lambda)).kimura().solvable, "{lambda}");
        }
    }
}
