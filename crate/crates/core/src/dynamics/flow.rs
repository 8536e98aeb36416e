//! Relativistic and classical flows on the extended phase space `(q, p, u)`.
//!
//! Both kinetics carry `u` with `u̇ = -(p·V′)/u`, which keeps
//! `u² - |p|² = 1` for either flow; the relativistic energy is `u + V`.

use serde::{Deserialize, Serialize};

use super::integrator::{Dop853, DenseSegment, IntegratorSettings, StepOutcome};
use super::potential::Potential;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kinetic {
    Relativistic,
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub t: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub u: f64,
}

impl PhaseState {
    /// State with `u = √(1 + |p|²)`.
    pub fn new(t: f64, q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                got: p.len(),
            });
        }
        let u = (1.0 + p.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let s = Self { t, q, p, u };
        s.check_finite()?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn check_finite(&self) -> Result<()> {
        let finite = self.t.is_finite()
            && self.u.is_finite()
            && self.q.iter().chain(&self.p).all(|x| x.is_finite());
        if finite {
            Ok(())
        } else {
            Err(Error::NonFinite(format!("phase state at t = {}", self.t)))
        }
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(2 * self.dim() + 1);
        y.extend_from_slice(&self.q);
        y.extend_from_slice(&self.p);
        y.push(self.u);
        y
    }

    pub fn from_vector(t: f64, y: &[f64]) -> Self {
        let n = (y.len() - 1) / 2;
        Self {
            t,
            q: y[..n].to_vec(),
            p: y[n..2 * n].to_vec(),
            u: y[2 * n],
        }
    }

    /// `u² - |p|² - 1`.
    pub fn casimir_defect(&self) -> f64 {
        self.u * self.u - self.p.iter().map(|x| x * x).sum::<f64>() - 1.0
    }

    /// `q₁p₂ - q₂p₁` for planar states.
    pub fn angular_momentum(&self) -> Option<f64> {
        (self.dim() == 2).then(|| self.q[0] * self.p[1] - self.q[1] * self.p[0])
    }
}

/// Derivative of `(q, p, u)` packed as in [`PhaseState::to_vector`].
pub fn flow_vector(v: &dyn Potential, kinetic: Kinetic, y: &[f64], dy: &mut [f64]) {
    let n = v.dim();
    let (q, rest) = y.split_at(n);
    let (p, u) = rest.split_at(n);
    let u = u[0];
    let (dq, drest) = dy.split_at_mut(n);
    let (dp, du) = drest.split_at_mut(n);
    v.gradient(q, dp);
    let mut pv = 0.0;
    for i in 0..n {
        pv += p[i] * dp[i];
        dp[i] = -dp[i];
        dq[i] = match kinetic {
            Kinetic::Relativistic => p[i] / u,
            Kinetic::Classical => p[i],
        };
    }
    du[0] = -pv / u;
}

fn derivative(v: &dyn Potential, kinetic: Kinetic, state: &PhaseState) -> Result<PhaseState> {
    state.check_finite()?;
    if state.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            got: state.dim(),
        });
    }
    let y = state.to_vector();
    let mut dy = vec![0.0; y.len()];
    flow_vector(v, kinetic, &y, &mut dy);
    let d = PhaseState::from_vector(1.0, &dy);
    d.check_finite()?;
    Ok(d)
}

/// `q̇ = p/u`, `ṗ = -V′(q)`, `u̇ = -(p·V′)/u`; `t` of the result is 1.
pub fn relativistic_rhs(state: &PhaseState, v: &dyn Potential) -> Result<PhaseState> {
    derivative(v, Kinetic::Relativistic, state)
}

/// `q̇ = p`, `ṗ = -V′(q)`, with `u` transported as in the relativistic flow.
pub fn classical_rhs(state: &PhaseState, v: &dyn Potential) -> Result<PhaseState> {
    derivative(v, Kinetic::Classical, state)
}

/// `u + V` (relativistic, with the carried `u`) or `|p|²/2 + V`.
pub fn energy(v: &dyn Potential, kinetic: Kinetic, state: &PhaseState) -> f64 {
    let kin = match kinetic {
        Kinetic::Relativistic => state.u,
        Kinetic::Classical => 0.5 * state.p.iter().map(|x| x * x).sum::<f64>(),
    };
    kin + v.value(&state.q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// `|q|` exceeded the escape radius at time `t`.
    Escaped { t: f64 },
}

/// Conserved-quantity audit of one trajectory. Energy drift is relative to
/// `max(1, |H₀|)` and Casimir drift to `u²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DriftReport {
    pub energy: f64,
    pub casimir: f64,
    pub angular_momentum: Option<f64>,
}

pub(crate) struct DriftTracker {
    kinetic: Kinetic,
    h0: f64,
    l0: Option<f64>,
    pub(crate) report: DriftReport,
}

impl DriftTracker {
    pub(crate) fn new(v: &dyn Potential, kinetic: Kinetic, s0: &PhaseState) -> Self {
        let l0 = s0.angular_momentum();
        Self {
            kinetic,
            h0: energy(v, kinetic, s0),
            l0,
            report: DriftReport {
                angular_momentum: l0.map(|_| 0.0),
                ..Default::default()
            },
        }
    }

    pub(crate) fn observe(&mut self, v: &dyn Potential, s: &PhaseState) {
        let dh = (energy(v, self.kinetic, s) - self.h0).abs() / self.h0.abs().max(1.0);
        let dc = s.casimir_defect().abs() / (s.u * s.u);
        let r = &mut self.report;
        r.energy = r.energy.max(dh);
        r.casimir = r.casimir.max(dc);
        if let (Some(l0), Some(l)) = (self.l0, s.angular_momentum()) {
            let dl = (l - l0).abs();
            r.angular_momentum = Some(r.angular_momentum.unwrap_or(0.0).max(dl));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FlowSettings {
    pub integrator: IntegratorSettings,
    /// Stop (without error) once `|q|` exceeds this radius.
    pub escape_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<PhaseState>,
    pub drift: DriftReport,
    pub termination: Termination,
    pub steps: usize,
}

pub(crate) fn escaped(settings: &FlowSettings, q: &[f64]) -> bool {
    settings
        .escape_radius
        .is_some_and(|r| q.iter().map(|x| x * x).sum::<f64>() > r * r)
}

/// Drive the flow from `state0` to `t_end`, calling `visit` with each
/// accepted step's dense segment and end state.
pub(crate) fn drive<G>(
    v: &dyn Potential,
    kinetic: Kinetic,
    state0: &PhaseState,
    t_end: f64,
    settings: &FlowSettings,
    mut visit: G,
) -> Result<(DriftReport, Termination, usize)>
where
    G: FnMut(&mut dyn FnMut() -> DenseSegment, &PhaseState) -> Result<()>,
{
    state0.check_finite()?;
    if state0.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            got: state0.dim(),
        });
    }
    if !t_end.is_finite() {
        return Err(Error::NonFinite(format!("t_end = {t_end}")));
    }
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| flow_vector(v, kinetic, y, dy);
    let mut solver = Dop853::new(rhs, state0.t, &state0.to_vector(), t_end, settings.integrator)?;
    let mut tracker = DriftTracker::new(v, kinetic, state0);
    loop {
        let outcome = solver.step()?;
        let s = PhaseState::from_vector(solver.t(), solver.y());
        tracker.observe(v, &s);
        let mut dense = || solver.dense_output();
        visit(&mut dense, &s)?;
        if escaped(settings, &s.q) {
            return Ok((tracker.report, Termination::Escaped { t: s.t }, solver.steps()));
        }
        if outcome == StepOutcome::Finished {
            return Ok((tracker.report, Termination::Completed, solver.steps()));
        }
    }
}

/// Integrate one trajectory, keeping every accepted step, or only the
/// states at multiples of `sample_dt` when given.
pub fn integrate_flow(
    v: &dyn Potential,
    kinetic: Kinetic,
    state0: &PhaseState,
    t_end: f64,
    settings: &FlowSettings,
    sample_dt: Option<f64>,
) -> Result<Trajectory> {
    if let Some(dt) = sample_dt {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("sample interval {dt} must be positive")));
        }
    }
    let dir = if t_end >= state0.t { 1.0 } else { -1.0 };
    let mut states = vec![state0.clone()];
    let mut next_index = 1u64;
    let (drift, termination, steps) = drive(v, kinetic, state0, t_end, settings, |dense, s| {
        match sample_dt {
            None => states.push(s.clone()),
            Some(dt) => {
                let at = |i: u64| state0.t + dir * dt * i as f64;
                if dir * (at(next_index) - s.t) <= 0.0 {
                    let seg = dense();
                    while dir * (at(next_index) - s.t) <= 0.0 {
                        let t = at(next_index);
                        states.push(PhaseState::from_vector(t, &seg.eval(t)));
                        next_index += 1;
                    }
                }
            }
        }
        Ok(())
    })?;
    Ok(Trajectory {
        states,
        drift,
        termination,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::super::potential::{oscillator, PolynomialPotential};
    use super::*;

    fn planar_quadratic() -> PolynomialPotential {
        PolynomialPotential::from_terms(2, [(1.0, vec![2, 0]), (1.0, vec![0, 2])]).unwrap()
    }

    #[test]
    fn rest_and_gradient() {
        let v = planar_quadratic();
        let s = PhaseState::new(0.0, vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let d = relativistic_rhs(&s, &v).unwrap();
        assert_eq!(d.q, vec![0.0, 0.0]);
        assert_eq!(d.p, vec![-2.0, 0.0]);
        assert_eq!(d.u, 0.0);
        let s = PhaseState::new(0.0, vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(classical_rhs(&s, &v).unwrap().q, vec![1.0, 0.0]);
        let bad = PhaseState {
            t: 0.0,
            q: vec![f64::NAN, 0.0],
            p: vec![0.0, 0.0],
            u: 1.0,
        };
        assert!(relativistic_rhs(&bad, &v).is_err());
    }

    #[test]
    fn free_particle_is_straight() {
        let v = PolynomialPotential::new(2, vec![]).unwrap();
        let s0 = PhaseState::new(0.0, vec![1.0, -2.0], vec![3.0, 4.0]).unwrap();
        let tr = integrate_flow(&v, Kinetic::Relativistic, &s0, 50.0, &FlowSettings::default(), None).unwrap();
        let last = tr.states.last().unwrap();
        for i in 0..2 {
            let exact = s0.q[i] + 50.0 * s0.p[i] / s0.u;
            assert!((last.q[i] - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn sampled_trajectory() {
        let v = oscillator(1.0);
        let s0 = PhaseState::new(0.0, vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let tr = integrate_flow(&v, Kinetic::Classical, &s0, 10.0, &FlowSettings::default(), Some(0.5)).unwrap();
        assert_eq!(tr.states.len(), 21);
        for s in &tr.states {
            assert!((s.q[0] - s.t.cos()).abs() < 1e-9 && (s.q[1] - s.t.sin()).abs() < 1e-9);
        }
        assert_eq!(tr.termination, Termination::Completed);
    }
}
