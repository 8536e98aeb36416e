//! Poincaré sections on a coordinate plane `q_i = 0` with `p_j > 0`.

use serde::{Deserialize, Serialize};

use super::flow::{drive, energy, DriftReport, FlowSettings, Kinetic, PhaseState, Termination};
use super::potential::Potential;
use crate::error::{Error, Result};

/// Seeds must lie this close to the requested energy.
pub const ENERGY_LEVEL_TOLERANCE: f64 = 1e-9;
/// Per-orbit relative energy drift allowed during a section run.
pub const SECTION_DRIFT_LIMIT: f64 = 1e-7;
/// `|q_i|` at a refined crossing.
pub const CROSSING_TOLERANCE: f64 = 1e-12;

const BISECTION_ITERATIONS: usize = 200;

/// Default: `q1 = 0` with `p1 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SectionPlane {
    pub plane_index: usize,
    pub positive_momentum_index: usize,
}

impl SectionPlane {
    /// First coordinate index other than the plane's.
    pub fn display_index(&self) -> usize {
        usize::from(self.plane_index == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub t: f64,
    /// `(q, p)` of [`SectionPlane::display_index`] at the crossing.
    pub coords: (f64, f64),
    pub energy: f64,
    pub crossing_index: usize,
    pub casimir_drift: f64,
    pub state: PhaseState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSection {
    pub orbit: usize,
    pub points: Vec<SectionPoint>,
    pub drift: DriftReport,
    pub termination: Termination,
    pub steps: usize,
}

fn velocity(kinetic: Kinetic, s: &PhaseState, i: usize) -> f64 {
    match kinetic {
        Kinetic::Relativistic => s.p[i] / s.u,
        Kinetic::Classical => s.p[i],
    }
}

fn section_orbit(
    v: &dyn Potential,
    kinetic: Kinetic,
    orbit: usize,
    state0: &PhaseState,
    t_end: f64,
    plane: SectionPlane,
    settings: &FlowSettings,
) -> Result<OrbitSection> {
    let (i, j) = (plane.plane_index, plane.positive_momentum_index);
    let shown = plane.display_index();
    let mut points = Vec::new();
    let mut prev = state0.clone();
    let (drift, termination, steps) = drive(v, kinetic, state0, t_end, settings, |dense, s| {
        let (g0, g1) = (prev.q[i], s.q[i]);
        if g0 < 0.0 && g1 >= 0.0 {
            let seg = dense();
            let (mut a, mut b) = (prev.t, s.t);
            let mut y = s.to_vector();
            let mut t = b;
            for _ in 0..BISECTION_ITERATIONS {
                t = 0.5 * (a + b);
                seg.eval_into(t, &mut y);
                if y[i].abs() <= CROSSING_TOLERANCE || t == a || t == b {
                    break;
                }
                if y[i] < 0.0 {
                    a = t;
                } else {
                    b = t;
                }
            }
            let mid = PhaseState::from_vector(t, &y);
            let qdot = velocity(kinetic, &mid, i);
            if qdot != 0.0 {
                let tn = t - mid.q[i] / qdot;
                if tn >= prev.t && tn <= s.t {
                    seg.eval_into(tn, &mut y);
                    if y[i].abs() <= mid.q[i].abs() {
                        t = tn;
                    } else {
                        seg.eval_into(t, &mut y);
                    }
                }
            }
            let c = PhaseState::from_vector(t, &y);
            if c.p[j] > 0.0 {
                points.push(SectionPoint {
                    t,
                    coords: (c.q[shown], c.p[shown]),
                    energy: energy(v, kinetic, &c),
                    crossing_index: points.len(),
                    casimir_drift: c.casimir_defect().abs() / (c.u * c.u),
                    state: c,
                });
            }
        }
        prev = s.clone();
        Ok(())
    })?;
    if drift.energy > SECTION_DRIFT_LIMIT {
        return Err(Error::EnergyDrift {
            orbit,
            drift: drift.energy,
            limit: SECTION_DRIFT_LIMIT,
        });
    }
    Ok(OrbitSection {
        orbit,
        points,
        drift,
        termination,
        steps,
    })
}

/// Section points for each initial state, in input order. Every state must
/// already lie on the energy level `level` (checked, not projected).
pub fn poincare_section(
    v: &dyn Potential,
    kinetic: Kinetic,
    initial_states: &[PhaseState],
    level: f64,
    t_end: f64,
    plane: SectionPlane,
    settings: &FlowSettings,
) -> Result<Vec<OrbitSection>> {
    let n = v.dim();
    if plane.plane_index >= n || plane.positive_momentum_index >= n || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "section indices {:?} invalid for n = {n}",
            plane
        )));
    }
    for (index, s) in initial_states.iter().enumerate() {
        s.check_finite()?;
        if s.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: s.dim(),
            });
        }
        let discrepancy = energy(v, kinetic, s) - level;
        if !(discrepancy.abs() <= ENERGY_LEVEL_TOLERANCE) {
            return Err(Error::OffEnergyLevel { index, discrepancy });
        }
    }
    let run = |(orbit, s): (usize, &PhaseState)| section_orbit(v, kinetic, orbit, s, t_end, plane, settings);
    #[cfg(feature = "parallel")]
    let results: Vec<Result<OrbitSection>> = {
        use rayon::prelude::*;
        initial_states.par_iter().enumerate().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<OrbitSection>> = initial_states.iter().enumerate().map(run).collect();
    results.into_iter().collect()
}

/// Planar state on `q₁ = 0` at `(q₂, p₂)` with `p₁ > 0` solved from the
/// energy level, or `None` where the level is not reachable.
pub fn seed_on_section(v: &dyn Potential, kinetic: Kinetic, level: f64, q2: f64, p2: f64) -> Option<PhaseState> {
    if v.dim() != 2 {
        return None;
    }
    let q = vec![0.0, q2];
    let budget = level - v.value(&q);
    let p1_sq = match kinetic {
        Kinetic::Relativistic => budget * budget - 1.0 - p2 * p2,
        Kinetic::Classical => 2.0 * budget - p2 * p2,
    };
    if kinetic == Kinetic::Relativistic && budget < 1.0 {
        return None;
    }
    if !(p1_sq.is_finite() && p1_sq > 0.0) {
        return None;
    }
    let p = vec![p1_sq.sqrt(), p2];
    let u = match kinetic {
        Kinetic::Relativistic => budget,
        Kinetic::Classical => (1.0 + p1_sq + p2 * p2).sqrt(),
    };
    Some(PhaseState { t: 0.0, q, p, u })
}

/// `count` seeds with `p₂ = 0` and `q₂` evenly spaced strictly inside
/// `range`; unreachable positions are skipped.
pub fn seed_line(v: &dyn Potential, kinetic: Kinetic, level: f64, range: (f64, f64), count: usize) -> Vec<PhaseState> {
    (0..count)
        .filter_map(|i| {
            let x = range.0 + (range.1 - range.0) * (i as f64 + 0.5) / count as f64;
            seed_on_section(v, kinetic, level, x, 0.0)
        })
        .collect()
}

/// Largest distance of a point from the chord between its neighbours when
/// the points are ordered by angle about their centroid, relative to the
/// cloud's diameter. Small for points on a smooth closed curve.
pub fn angular_roughness(points: &[(f64, f64)]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        let ta = (a.1 - cy).atan2(a.0 - cx);
        let tb = (b.1 - cy).atan2(b.0 - cx);
        ta.total_cmp(&tb)
    });
    let diameter = diameter(&sorted);
    if diameter == 0.0 {
        return 0.0;
    }
    let m = sorted.len();
    (0..m)
        .map(|k| {
            let a = sorted[(k + m - 1) % m];
            let b = sorted[(k + 1) % m];
            segment_distance(sorted[k], a, b)
        })
        .fold(0.0, f64::max)
        / diameter
}

fn diameter(points: &[(f64, f64)]) -> f64 {
    let hull = convex_hull(points);
    let mut d: f64 = 0.0;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            d = d.max((a.0 - b.0).hypot(a.1 - b.1));
        }
    }
    d
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let s = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.0 - a.0 - s * dx).hypot(p.1 - a.1 - s * dy)
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain convex hull, counter-clockwise.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn convex_hull_area(points: &[(f64, f64)]) -> f64 {
    let h = convex_hull(points);
    if h.len() < 3 {
        return 0.0;
    }
    let m = h.len();
    0.5 * (0..m)
        .map(|i| {
            let (a, b) = (h[i], h[(i + 1) % m]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
        .abs()
}

#[cfg(test)]
mod tests {
    use super::super::potential::oscillator;
    use super::*;

    #[test]
    fn hull_of_square() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)];
        assert_eq!(convex_hull(&pts).len(), 4);
        assert!((convex_hull_area(&pts) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn roughness_separates_curve_from_cloud() {
        let circle: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let a = i as f64 * 0.731;
                (a.cos(), 0.5 * a.sin())
            })
            .collect();
        assert!(angular_roughness(&circle) < 0.01);
        let mut x: u64 = 12345;
        let cloud: Vec<(f64, f64)> = (0..200)
            .map(|_| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = (x >> 11) as f64 / (1u64 << 53) as f64;
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let b = (x >> 11) as f64 / (1u64 << 53) as f64;
                (a, b)
            })
            .collect();
        assert!(angular_roughness(&cloud) > 0.2);
    }

    #[test]
    fn oscillator_crossings() {
        let v = oscillator(1.0);
        let level = 3.0;
        let seeds = seed_line(&v, Kinetic::Classical, level, (-1.0, 1.0), 4);
        assert_eq!(seeds.len(), 4);
        let secs = poincare_section(&v, Kinetic::Classical, &seeds, level, 40.0, SectionPlane::default(), &FlowSettings::default()).unwrap();
        for (sec, seed) in secs.iter().zip(&seeds) {
            // Period 2π: six crossings within t ≤ 40.
            assert_eq!(sec.points.len(), 6);
            for (k, pt) in sec.points.iter().enumerate() {
                assert!(pt.state.q[0].abs() <= CROSSING_TOLERANCE);
                assert!((pt.t - 2.0 * std::f64::consts::PI * (k + 1) as f64).abs() < 1e-8);
                assert!((pt.coords.0 - seed.q[1]).abs() < 1e-8);
            }
        }
        let mut off = seeds[0].clone();
        off.p[0] += 1e-6;
        assert!(matches!(
            poincare_section(&v, Kinetic::Classical, &[off], level, 1.0, SectionPlane::default(), &FlowSettings::default()),
            Err(Error::OffEnergyLevel { index: 0, .. })
        ));
    }
}
