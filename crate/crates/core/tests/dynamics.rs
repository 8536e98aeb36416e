use proptest::prelude::*;
use relint_core::darboux::find_darboux_points;
use relint_core::dynamics::{
    exponent_differences_at_merge, flow_vector, integrate, integrate_flow, kepler, line_embedding, line_energy,
    line_solution_rhs, oscillator, poincare_section, preset, relativistic_rhs, seed_line, DynamicsPotential,
    FlowSettings, IntegratorSettings, Kinetic, LineSolutionParams, PhaseState, PolynomialPotential, Potential,
    SectionPlane,
};
use relint_core::galois::riemann_exponents;
use relint_core::{Complex, HomogeneousPotential};

fn tight() -> FlowSettings {
    FlowSettings {
        integrator: IntegratorSettings {
            rtol: 1e-12,
            atol: 1e-12,
            ..Default::default()
        },
        escape_radius: None,
    }
}

#[test]
fn classical_oscillator_returns_after_one_period() {
    let v = PolynomialPotential::from_terms(2, [(0.5, vec![2, 0]), (0.5, vec![0, 2])]).unwrap();
    let s0 = PhaseState::new(0.0, vec![0.3, -1.2], vec![0.8, 0.1]).unwrap();
    let tr = integrate_flow(&v, Kinetic::Classical, &s0, 2.0 * std::f64::consts::PI, &FlowSettings::default(), None)
        .unwrap();
    let end = tr.states.last().unwrap();
    for i in 0..2 {
        assert!((end.q[i] - s0.q[i]).abs() < 1e-8);
        assert!((end.p[i] - s0.p[i]).abs() < 1e-8);
    }
}

#[test]
fn angular_momentum_for_radial_potentials() {
    for kinetic in [Kinetic::Relativistic, Kinetic::Classical] {
        for v in [kepler(-0.25), oscillator(1.0)] {
            let s0 = PhaseState::new(0.0, vec![0.8, 0.1], vec![0.05, 0.6]).unwrap();
            let tr = integrate_flow(&v, kinetic, &s0, 200.0, &tight(), Some(1.0)).unwrap();
            assert!(tr.drift.angular_momentum.unwrap() <= 1e-8, "{kinetic:?} {:?}", tr.drift);
        }
    }
}

#[test]
fn momentum_component_for_single_variable_potential() {
    let v = PolynomialPotential::from_terms(2, [(1.0, vec![4, 0])]).unwrap();
    for kinetic in [Kinetic::Relativistic, Kinetic::Classical] {
        let s0 = PhaseState::new(0.0, vec![0.5, 0.0], vec![0.0, 0.7]).unwrap();
        let tr = integrate_flow(&v, kinetic, &s0, 300.0, &FlowSettings::default(), None).unwrap();
        for s in &tr.states {
            assert!((s.p[1] - 0.7).abs() <= 1e-10);
        }
    }
}

#[test]
fn time_reversal() {
    let p = preset("henon-heiles-a-rel").unwrap();
    let v = p.potential.as_potential();
    let s0 = seed_line(v, p.kinetic, p.energy, p.seed_range, 3)[1].clone();
    let fwd = integrate_flow(v, p.kinetic, &s0, 50.0, &tight(), Some(1e9)).unwrap();
    let back = integrate_flow(v, p.kinetic, fwd.states.last().unwrap(), 0.0, &tight(), Some(1e9)).unwrap();
    let end = back.states.last().unwrap();
    assert_eq!(end.t, 0.0);
    for (a, b) in end.q.iter().chain(&end.p).zip(s0.q.iter().chain(&s0.p)) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

fn jacobian(v: &dyn Potential, kinetic: Kinetic, y: &[f64]) -> Vec<Vec<f64>> {
    let h = 1e-6;
    let m = y.len();
    (0..m)
        .map(|j| {
            let (mut a, mut b) = (y.to_vec(), y.to_vec());
            a[j] += h;
            b[j] -= h;
            let (mut fa, mut fb) = (vec![0.0; m], vec![0.0; m]);
            flow_vector(v, kinetic, &a, &mut fa);
            flow_vector(v, kinetic, &b, &mut fb);
            fa.iter().zip(&fb).map(|(x, z)| (x - z) / (2.0 * h)).collect()
        })
        .collect()
}

#[test]
fn equilibria_share_linearization() {
    for v in [preset("henon-heiles-b-rel").unwrap().potential, oscillator(0.5)] {
        // Origin and, for the Hénon-Heiles potential, the saddle at q₂ = -2.
        let mut points = vec![vec![0.0, 0.0]];
        if matches!(v, DynamicsPotential::Polynomial(ref p) if p.terms.len() > 2) {
            points.push(vec![0.0, -2.0]);
        }
        for q in points {
            let mut g = [0.0; 2];
            v.gradient(&q, &mut g);
            assert!(g.iter().all(|x| x.abs() < 1e-12));
            let y = [q[0], q[1], 0.0, 0.0, 1.0];
            let a = jacobian(&v, Kinetic::Relativistic, &y);
            let b = jacobian(&v, Kinetic::Classical, &y);
            for (ra, rb) in a.iter().zip(&b) {
                for (x, z) in ra.iter().zip(rb) {
                    assert!((x - z).abs() < 1e-10, "{x} vs {z}");
                }
            }
        }
    }
}

#[test]
fn line_solution_embeds_into_flow() {
    let hv = HomogeneousPotential::from_real_terms(2, 3, [(1.0, vec![3, 0])]).unwrap();
    let pt = &find_darboux_points(&hv).unwrap()[0];
    let d: Vec<f64> = pt.d.iter().map(|z| z.re).collect();
    let params = LineSolutionParams::new(&hv, d, pt.gamma.re, 1.0).unwrap();
    let y0 = [-0.4, 0.3];
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = line_solution_rhs(y[0], y[1], &params).unwrap();
    };
    let ts: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
    let sol = integrate(rhs, 0.0, &y0, 2.0, IntegratorSettings::default(), Some(&ts)).unwrap();
    let v = PolynomialPotential::try_from(&hv).unwrap();
    let e0 = line_energy(y0[0], y0[1], &params).unwrap();
    for y in &sol.y {
        assert!((line_energy(y[0], y[1], &params).unwrap() - e0).abs() < 1e-9);
        // dq/dt = φ̇ d and dp/dt = d/dt(φ̇ d/√w) must match the flow.
        let (q, p) = line_embedding(y[0], y[1], &params).unwrap();
        let s = PhaseState::new(0.0, q, p).unwrap();
        let flow = relativistic_rhs(&s, &v).unwrap();
        let phiddot = line_solution_rhs(y[0], y[1], &params).unwrap();
        let d2 = params.d_squared();
        let w = 1.0 - y[1] * y[1] * d2;
        for i in 0..2 {
            assert!((flow.q[i] - y[1] * params.d[i]).abs() < 1e-8);
            let dp = phiddot * params.d[i] / w.powf(1.5);
            assert!((flow.p[i] - dp).abs() < 1e-8, "{} vs {dp}", flow.p[i]);
        }
    }
}

#[test]
fn section_output_is_deterministic() {
    let p = preset("henon-heiles-b-rel").unwrap();
    let v = p.potential.as_potential();
    let seeds = seed_line(v, p.kinetic, p.energy, p.seed_range, 6);
    let st = FlowSettings::default();
    let all = poincare_section(v, p.kinetic, &seeds, p.energy, 150.0, SectionPlane::default(), &st).unwrap();
    let again = poincare_section(v, p.kinetic, &seeds, p.energy, 150.0, SectionPlane::default(), &st).unwrap();
    assert_eq!(all, again);
    for (i, s) in seeds.iter().enumerate() {
        let single = poincare_section(v, p.kinetic, std::slice::from_ref(s), p.energy, 150.0, SectionPlane::default(), &st)
            .unwrap();
        assert_eq!(single[0].points, all[i].points);
        assert!(!all[i].points.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn casimir_and_energy_conserved(q1 in -0.5f64..0.5, q2 in -0.5f64..0.5, p1 in -0.5f64..0.5, p2 in -0.5f64..0.5) {
        let p = preset("henon-heiles-b-rel").unwrap();
        let v = p.potential.as_potential();
        let s0 = PhaseState::new(0.0, vec![q1, q2], vec![p1, p2]).unwrap();
        let tr = integrate_flow(v, Kinetic::Relativistic, &s0, 100.0, &FlowSettings { escape_radius: Some(10.0), ..tight() }, Some(1e9)).unwrap();
        prop_assert!(tr.drift.energy <= 1e-9);
        prop_assert!(tr.drift.casimir <= 1e-9);
    }

    #[test]
    fn merged_exponents_match_closed_form(k in prop::sample::select(vec![-4i64, -3, -1, 1, 2, 3, 6]), lambda in -3.0f64..20.0) {
        let l = Complex::new(lambda, 0.0);
        let got = exponent_differences_at_merge(k, l).unwrap();
        let want = riemann_exponents(k, l);
        prop_assert!((got.rho - want.rho).norm() < 1e-9);
        prop_assert!((got.tau - want.tau).norm() < 1e-9);
        prop_assert!((got.sigma - want.sigma).abs() < 1e-9);
    }
}
