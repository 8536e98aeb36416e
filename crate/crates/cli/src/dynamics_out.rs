//! `poincare` and `simulate`: runs and their CSV, SVG and JSON renderings.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use relint_core::dynamics::{
    energy, integrate_flow, poincare_section, seed_line, FlowSettings, OrbitSection, PhaseState, SectionPlane,
    Termination,
};
use serde_json::json;

use crate::config::{Format, SystemSpec, Tolerances};

fn flow_settings(system: &SystemSpec, tol: &Tolerances) -> FlowSettings {
    FlowSettings {
        integrator: tol.integrator(),
        escape_radius: system.escape_radius,
    }
}

pub fn poincare(system: &SystemSpec, t_end: f64, orbits: usize, tol: &Tolerances, format: Format) -> Result<String> {
    let level = system.energy.context("poincare needs --energy (or a preset)")?;
    let range = system.seed_range.context("poincare needs --seed-range (or a preset)")?;
    if orbits == 0 {
        bail!("--orbits must be at least 1");
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        bail!("--tend must be positive");
    }
    let v = system.potential.as_potential();
    let seeds = seed_line(v, system.kinetic, level, range, orbits);
    if seeds.is_empty() {
        bail!("no seed in q2 range {range:?} reaches energy {level}");
    }
    let sections = poincare_section(
        v,
        system.kinetic,
        &seeds,
        level,
        t_end,
        SectionPlane::default(),
        &flow_settings(system, tol),
    )?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "energy": level,
            "orbits": sections.iter().map(|o| json!({
                "orbit_id": o.orbit,
                "seed": seeds[o.orbit],
                "drift": o.drift,
                "termination": o.termination,
                "steps": o.steps,
                "points": o.points.iter().map(|p| json!({
                    "crossing_index": p.crossing_index,
                    "t": p.t,
                    "q2": p.coords.0,
                    "p2": p.coords.1,
                    "energy": p.energy,
                    "casimir_drift": p.casimir_drift,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }))? + "\n",
        Format::Svg => svg(&sections),
        _ => {
            let mut s = String::from("orbit_id,crossing_index,t,q2,p2,energy,casimir_drift\n");
            for o in &sections {
                for p in &o.points {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{}",
                        o.orbit, p.crossing_index, p.t, p.coords.0, p.coords.1, p.energy, p.casimir_drift
                    );
                }
            }
            s
        }
    })
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

fn svg(sections: &[OrbitSection]) -> String {
    let (w, h, m) = (640.0, 480.0, 50.0);
    let pts: Vec<(f64, f64)> = sections.iter().flat_map(|o| o.points.iter().map(|p| p.coords)).collect();
    let bound = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (-1.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = bound(|p| p.0);
    let (y0, y1) = bound(|p| p.1);
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{} H{}" fill="none" stroke="black"/>"#,
        h - m,
        w - m
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">q2</text>"#, w / 2.0, h - 12.0);
    let _ = writeln!(s, r#"<text x="14" y="{}" text-anchor="middle">p2</text>"#, h / 2.0);
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="{anchor}" font-size="11">{x:.4}</text>"#, sx(x), h - m + 16.0);
    }
    for y in [y0, y1] {
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end" font-size="11">{y:.4}</text>"#, m - 4.0, sy(y));
    }
    for o in sections {
        let colour = PALETTE[o.orbit % PALETTE.len()];
        let _ = writeln!(s, r#"<g fill="{colour}">"#);
        for p in &o.points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.2"/>"#, sx(p.coords.0), sy(p.coords.1));
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

pub fn simulate(
    system: &SystemSpec,
    t_end: f64,
    dt: f64,
    q: Option<&[f64]>,
    p: Option<&[f64]>,
    tol: &Tolerances,
    format: Format,
) -> Result<String> {
    let v = system.potential.as_potential();
    let state0 = match (q, p) {
        (Some(q), Some(p)) => PhaseState::new(0.0, q.to_vec(), p.to_vec())?,
        (None, None) => {
            let level = system.energy.context("simulate needs --q/--p or an energy level")?;
            let range = system.seed_range.context("simulate needs --q/--p or a seed range")?;
            seed_line(v, system.kinetic, level, range, 1)
                .into_iter()
                .next()
                .context("the seed range does not reach the energy level")?
        }
        _ => bail!("--q and --p must be given together"),
    };
    if state0.dim() != v.dim() {
        bail!("initial state has dimension {}, potential has {}", state0.dim(), v.dim());
    }
    let tr = integrate_flow(v, system.kinetic, &state0, t_end, &flow_settings(system, tol), Some(dt))?;
    let n = state0.dim();
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "kinetic": system.kinetic,
            "drift": tr.drift,
            "termination": tr.termination,
            "steps": tr.steps,
            "states": tr.states,
        }))? + "\n",
        _ => {
            let mut s = String::from("t");
            for prefix in ["q", "p"] {
                for i in 1..=n {
                    let _ = write!(s, ",{prefix}{i}");
                }
            }
            s.push_str(",u,energy,casimir_defect\n");
            for st in &tr.states {
                let _ = write!(s, "{}", st.t);
                for x in st.q.iter().chain(&st.p) {
                    let _ = write!(s, ",{x}");
                }
                let _ = writeln!(
                    s,
                    ",{},{},{}",
                    st.u,
                    energy(v, system.kinetic, st),
                    st.casimir_defect()
                );
            }
            if let Termination::Escaped { t } = tr.termination {
                eprintln!("note: trajectory left the escape radius at t = {t}");
            }
            s
        }
    })
}
