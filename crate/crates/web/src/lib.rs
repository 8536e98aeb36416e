//! Browser bindings for the demo page in `www/`. Every export takes and
//! returns plain strings or numbers; structured results travel as JSON.
//! The `*_json` functions hold the logic so they can be tested natively.

use relint_core::darboux::analyze;
use relint_core::dynamics::{poincare_section, preset, seed_line, FlowSettings, SectionPlane, PRESET_NAMES};
use relint_core::galois::verdict_for_spectra;
use relint_core::integer_sets::enumerate_j_pm_via_pell;
use relint_core::HomogeneousPotential;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Upper bounds that keep a single call responsive in a browser tab.
const MAX_COUNT: usize = 40;
const MAX_ORBITS: usize = 24;
const MAX_T_END: f64 = 5000.0;

pub fn check_json(potential: &str) -> Result<String, String> {
    let v = HomogeneousPotential::from_json(potential).map_err(|e| e.to_string())?;
    let points = analyze(&v).map_err(|e| e.to_string())?;
    let spectra: Vec<_> = points.iter().map(|(_, s)| s.clone()).collect();
    let verdict = verdict_for_spectra(v.k() as i64, &spectra).map_err(|e| e.to_string())?;
    let eigenvalues: Vec<_> = verdict
        .per_eigenvalue
        .iter()
        .map(|e| {
            json!({
                "value": [e.lambda.re, e.lambda.im],
                "exact": e.rational.as_ref().map(|r| r.to_string()),
                "passes": e.passes_main_theorem,
                "reason": e.reason,
            })
        })
        .collect();
    Ok(json!({
        "k": v.k(),
        "darboux_points": points.len(),
        "verdict": verdict.overall,
        "explanation": verdict.explanation,
        "eigenvalues": eigenvalues,
    })
    .to_string())
}

pub fn jset_json(k: i32, count: usize) -> Result<String, String> {
    if count > MAX_COUNT {
        return Err(format!("count is limited to {MAX_COUNT} here"));
    }
    let values = enumerate_j_pm_via_pell(k as i64, count).map_err(|e| e.to_string())?;
    Ok(json!(values.iter().map(|b| b.to_string()).collect::<Vec<_>>()).to_string())
}

/// Section points per orbit as `[[[q2, p2], ...], ...]`.
pub fn poincare_json(preset_name: &str, orbits: usize, t_end: f64) -> Result<String, String> {
    if orbits == 0 || orbits > MAX_ORBITS {
        return Err(format!("orbits must be between 1 and {MAX_ORBITS}"));
    }
    if !(t_end > 0.0 && t_end <= MAX_T_END) {
        return Err(format!("t_end must be in (0, {MAX_T_END}]"));
    }
    let p = preset(preset_name).ok_or_else(|| format!("unknown preset `{preset_name}`"))?;
    let v = p.potential.as_potential();
    let seeds = seed_line(v, p.kinetic, p.energy, p.seed_range, orbits);
    let settings = FlowSettings {
        escape_radius: p.escape_radius,
        ..Default::default()
    };
    let sections = poincare_section(v, p.kinetic, &seeds, p.energy, t_end, SectionPlane::default(), &settings)
        .map_err(|e| e.to_string())?;
    let out: Vec<Vec<[f64; 2]>> = sections
        .iter()
        .map(|o| o.points.iter().map(|pt| [pt.coords.0, pt.coords.1]).collect())
        .collect();
    Ok(json!(out).to_string())
}

#[wasm_bindgen]
pub fn check(potential: &str) -> Result<String, JsError> {
    check_json(potential).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn jset(k: i32, count: usize) -> Result<String, JsError> {
    jset_json(k, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn poincare(preset_name: &str, orbits: usize, t_end: f64) -> Result<String, JsError> {
    poincare_json(preset_name, orbits, t_end).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn presets() -> String {
    json!(PRESET_NAMES).to_string()
}
