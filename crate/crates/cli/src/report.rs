//! Rendering for `check`, `jset` and `jscan`.

use std::fmt::Write as _;

use anyhow::Result;
use num_bigint::BigInt;
use relint_core::darboux::{analyze, DarbouxPoint, SpectrumReport};
use relint_core::galois::{verdict_for_spectra, EigenvalueVerdict, FamilyHit, IntegrabilityVerdict, Overall};
use relint_core::integer_sets::{enumerate_j_pm_via_pell, integer_density_scan};
use relint_core::{Complex, HomogeneousPotential};
use serde_json::{json, Value};

use crate::config::Format;

pub struct CheckOutcome {
    pub body: String,
    pub overall: Overall,
}

fn cjson(z: Complex) -> Value {
    json!([z.re, z.im])
}

/// Text rendering drops components below round-off relative to `|z|`;
/// JSON keeps the raw values.
fn ctext(z: Complex) -> String {
    let eps = 1e-12 * z.norm().max(1.0);
    let z = Complex::new(
        if z.re.abs() <= eps { 0.0 } else { z.re },
        if z.im.abs() <= eps { 0.0 } else { z.im },
    );
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn hit_json(h: &FamilyHit) -> Value {
    json!({
        "table": h.table,
        "row": h.row_id,
        "p": h.parameter_p.as_ref().map(BigInt::to_string),
    })
}

fn hit_text(hits: &[FamilyHit]) -> String {
    if hits.is_empty() {
        return "no row".into();
    }
    hits.iter()
        .map(|h| match &h.parameter_p {
            Some(p) => format!("{} (p = {p})", h.row_id),
            None => h.row_id.clone(),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn eigen_json(v: &EigenvalueVerdict, explain: bool) -> Value {
    let mut out = json!({
        "value": cjson(v.lambda),
        "exact": v.rational.as_ref().map(|r| r.to_string()),
        "integer": v.integer_reconstruction.as_ref().map(BigInt::to_string),
        "passes": v.passes_main_theorem,
        "reason": v.reason,
        "memberships": v.memberships.iter().map(|m| json!({
            "set": m.set_name,
            "p": m.witness_p.as_ref().map(BigInt::to_string),
        })).collect::<Vec<_>>(),
    });
    if explain {
        out["diagnostics"] = json!({
            "classical": v.classical.iter().map(hit_json).collect::<Vec<_>>(),
            "generic_level": v.generic_level.as_ref().map(|g| json!({
                "hits": g.hits.iter().map(hit_json).collect::<Vec<_>>(),
                "partial_table": g.partial_table,
            })),
            "special_level": v.special_level.iter().map(hit_json).collect::<Vec<_>>(),
            "kimura": v.kimura,
        });
    }
    out
}

fn point_json(pt: &DarbouxPoint, s: &SpectrumReport) -> Value {
    json!({
        "d": pt.d.iter().copied().map(cjson).collect::<Vec<_>>(),
        "gamma": cjson(pt.gamma),
        "residual": pt.residual,
        "multiplicity": pt.multiplicity,
        "continuum": pt.continuum,
        "trivial_eigenvalue": cjson(s.trivial_eigenvalue),
        "nontrivial": s.nontrivial.iter().zip(&s.nontrivial_rational).map(|(z, r)| json!({
            "value": cjson(*z),
            "exact": r.as_ref().map(|r| r.to_string()),
        })).collect::<Vec<_>>(),
    })
}

fn check_text(
    v: &HomogeneousPotential,
    points: &[(DarbouxPoint, SpectrumReport)],
    verdict: &IntegrabilityVerdict,
    explain: bool,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "potential: n = {}, k = {}", v.n(), v.k());
    for (i, (pt, s)) in points.iter().enumerate() {
        let d: Vec<String> = pt.d.iter().map(|z| ctext(*z)).collect();
        let _ = writeln!(
            out,
            "darboux point {}: d = ({}), gamma = {}{}",
            i + 1,
            d.join(", "),
            ctext(pt.gamma),
            if pt.continuum { " [continuum]" } else { "" }
        );
        let ev: Vec<String> = s
            .nontrivial
            .iter()
            .zip(&s.nontrivial_rational)
            .map(|(z, r)| match r {
                Some(r) => format!("{} ({r})", ctext(*z)),
                None => ctext(*z),
            })
            .collect();
        let _ = writeln!(
            out,
            "  trivial eigenvalue {}; non-trivial: {}",
            ctext(s.trivial_eigenvalue),
            ev.join(", ")
        );
    }
    let _ = writeln!(out, "verdict: {:?}", verdict.overall);
    let _ = writeln!(out, "{}", verdict.explanation);
    if explain {
        for e in &verdict.per_eigenvalue {
            let exact = e.rational.as_ref().map(|r| r.to_string()).unwrap_or_else(|| "none".into());
            let _ = writeln!(out, "eigenvalue {} (exact {exact})", ctext(e.lambda));
            let _ = writeln!(out, "  relativistic: {}", e.reason);
            let _ = writeln!(out, "  classical table: {}", hit_text(&e.classical));
            if let Some(g) = &e.generic_level {
                let partial = if g.partial_table { " (table partial for this k)" } else { "" };
                let _ = writeln!(out, "  generic level: {}{partial}", hit_text(&g.hits));
            }
            let _ = writeln!(out, "  special level: {}", hit_text(&e.special_level));
            match &e.kimura {
                Some(k) => {
                    let _ = writeln!(out, "  Kimura: solvable = {} ({:?})", k.solvable, k.case);
                }
                None => {
                    let _ = writeln!(out, "  Kimura: not evaluated");
                }
            }
        }
    }
    out
}

pub fn check(potential: &serde_json::Value, explain: bool, format: Format) -> Result<CheckOutcome> {
    let v = HomogeneousPotential::from_json(&potential.to_string())?;
    let points = analyze(&v)?;
    let spectra: Vec<SpectrumReport> = points.iter().map(|(_, s)| s.clone()).collect();
    let verdict = verdict_for_spectra(v.k() as i64, &spectra)?;
    let body = match format {
        Format::Json => {
            let doc = json!({
                "potential": {"n": v.n(), "k": v.k()},
                "darboux_points": points.iter().map(|(p, s)| point_json(p, s)).collect::<Vec<_>>(),
                "verdict": verdict.overall,
                "explanation": verdict.explanation,
                "eigenvalues": verdict.per_eigenvalue.iter().map(|e| eigen_json(e, explain)).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        _ => check_text(&v, &points, &verdict, explain),
    };
    Ok(CheckOutcome {
        body,
        overall: verdict.overall,
    })
}

pub fn jset(k: i64, count: usize, format: Format) -> Result<String> {
    let values = enumerate_j_pm_via_pell(k, count)?;
    let strings: Vec<String> = values.iter().map(BigInt::to_string).collect();
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&json!({"k": k, "count": count, "elements": strings}))? + "\n",
        Format::Csv => {
            let mut s = String::from("index,value\n");
            for (i, v) in strings.iter().enumerate() {
                let _ = writeln!(s, "{i},{v}");
            }
            s
        }
        _ => format!("{{{}}}\n", strings.join(", ")),
    })
}

pub fn jscan(k: i64, pbound: u64, format: Format) -> Result<String> {
    let scan = integer_density_scan(k, pbound)?;
    Ok(match format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({"k": k, "pbound": pbound, "p_values": scan.p_values, "hits": scan.hits}))?
                + "\n"
        }
        _ => format!("{}\n", scan.p_values),
    })
}
