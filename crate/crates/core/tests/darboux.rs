use num_rational::BigRational;
use proptest::prelude::*;
use relint_core::darboux::{aggregate_nontrivial, analyze, find_darboux_points, universal_relation};
use relint_core::galois::{main_theorem_verdict, Overall};
use relint_core::{Complex, HomogeneousPotential, Rational};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn q(n: i64, d: i64) -> Rational {
    BigRational::new(n.into(), d.into())
}

fn sorted_rationals(v: &HomogeneousPotential) -> Vec<Rational> {
    let mut out: Vec<Rational> = aggregate_nontrivial(v)
        .unwrap()
        .into_iter()
        .map(|z| {
            assert!(z.im.abs() < 1e-8, "{z}");
            relint_core::darboux::rational_of(z).unwrap_or_else(|| panic!("{z} not rational"))
        })
        .collect();
    out.sort();
    out
}

fn v4(sign: f64) -> HomogeneousPotential {
    let a = sign * 3f64.sqrt() / 18.0;
    HomogeneousPotential::from_terms(
        2,
        3,
        [
            (c(0.0, a), vec![3, 0]),
            (c(0.5, 0.0), vec![2, 1]),
            (c(1.0, 0.0), vec![0, 3]),
        ],
    )
    .unwrap()
}

/// `(q₂ - s i q₁)²(q₂ + 2 s i q₁)/3` expanded.
fn v6(s: f64) -> HomogeneousPotential {
    // (q₂ - a)²(q₂ + 2a) = q₂³ - 3a²q₂ + 2a³ with a = s i q₁.
    HomogeneousPotential::from_terms(
        2,
        3,
        [
            (c(1.0 / 3.0, 0.0), vec![0, 3]),
            (c(1.0, 0.0), vec![2, 1]),
            (c(0.0, -2.0 * s / 3.0), vec![3, 0]),
        ],
    )
    .unwrap()
}

#[test]
fn v4_spectrum() {
    for sign in [1.0, -1.0] {
        assert_eq!(sorted_rationals(&v4(sign)), vec![q(1, 3), q(10, 3), q(15, 1)]);
    }
}

#[test]
fn v6_spectrum() {
    for s in [1.0, -1.0] {
        let v = v6(s);
        // Check the expansion at a sample point against the factored form.
        let z = [c(0.3, -0.2), c(-0.7, 0.4)];
        let a = c(0.0, s) * z[0];
        let factored = (z[1] - a) * (z[1] - a) * (z[1] + 2.0 * a) / 3.0;
        assert!((v.eval(&z).unwrap() - factored).norm() < 1e-14);
        assert_eq!(sorted_rationals(&v), vec![q(2, 1)]);
        let verdict = main_theorem_verdict(3, &aggregate_nontrivial(&v).unwrap()).unwrap();
        assert_eq!(verdict.overall, Overall::CannotBeIntegrable);
    }
}

#[test]
fn trivial_eigenvalue_is_k_minus_one() {
    let v = HomogeneousPotential::from_real_terms(2, 4, [(1.0, vec![4, 0]), (0.3, vec![1, 3]), (-2.0, vec![0, 4])]).unwrap();
    for (_, s) in analyze(&v).unwrap() {
        assert!((s.trivial_eigenvalue - 3.0).norm() < 1e-9);
    }
}

fn coefficient() -> impl Strategy<Value = Complex> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn universal_relation_on_generic_forms(k in 3i32..=5, coeffs in prop::collection::vec(coefficient(), 6)) {
        let terms: Vec<(Complex, Vec<u32>)> = (0..=k as u32)
            .map(|j| (coeffs[j as usize], vec![k as u32 - j, j]))
            .collect();
        let v = HomogeneousPotential::from_terms(2, k, terms).unwrap();
        let pts = find_darboux_points(&v).unwrap();
        // Generic forms have k Darboux points; skip degenerate draws.
        prop_assume!(pts.len() == k as usize);
        let lambdas = aggregate_nontrivial(&v).unwrap();
        prop_assume!(lambdas.iter().all(|l| (l - 1.0).norm() > 1e-3));
        let r = universal_relation(&lambdas).unwrap();
        prop_assert!(r.norm() < 1e-8, "relation defect {r}");
    }

    #[test]
    fn spectrum_invariant_under_scaling(re in 0.2f64..3.0, im in -2.0f64..2.0, coeffs in prop::collection::vec(coefficient(), 4)) {
        let terms: Vec<(Complex, Vec<u32>)> = (0..=3u32).map(|j| (coeffs[j as usize], vec![3 - j, j])).collect();
        let v = HomogeneousPotential::from_terms(2, 3, terms).unwrap();
        prop_assume!(find_darboux_points(&v).map(|p| p.len() == 3).unwrap_or(false));
        let a = aggregate_nontrivial(&v).unwrap();
        let b = aggregate_nontrivial(&v.scaled(c(re, im)).unwrap()).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() < 1e-7 * x.norm().max(1.0), "{} vs {}", x, y);
        }
    }
}
