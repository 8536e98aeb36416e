//! Numerical dynamics: relativistic and classical flows, Poincaré
//! sections, and the straight-line particular solutions.

mod flow;
mod integrator;
mod line;
mod potential;
mod section;
mod tableau;

use serde::{Deserialize, Serialize};

pub use flow::{
    classical_rhs, energy, flow_vector, integrate_flow, relativistic_rhs, DriftReport, FlowSettings, Kinetic,
    PhaseState, Termination, Trajectory,
};
pub use integrator::{
    integrate, DenseSegment, Dop853, IntegratorSettings, Solution, StepOutcome, DIVERGENCE_LIMIT,
};
pub use line::{
    exponent_differences_at_merge, fuchsian_p, fuchsian_q, laurent_coefficient, line_embedding, line_energy,
    line_solution_rhs, variational_coefficient_r, LineSolutionParams,
};
pub use potential::{
    henon_heiles, kepler, oscillator, DynamicsPotential, PolyTerm, PolynomialPotential, Potential, RadialPotential,
};
pub use section::{
    angular_roughness, convex_hull, convex_hull_area, poincare_section, seed_line, seed_on_section, OrbitSection,
    SectionPlane, SectionPoint, CROSSING_TOLERANCE, ENERGY_LEVEL_TOLERANCE, SECTION_DRIFT_LIMIT,
};

/// Named experiment: potential, kinetics, energy level and a seed line
/// `q₂ ∈ seed_range` on the section `q₁ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub potential: DynamicsPotential,
    pub kinetic: Kinetic,
    pub energy: f64,
    pub seed_range: (f64, f64),
    pub escape_radius: Option<f64>,
}

/// Rest energy of the kinetic term at `p = 0`.
pub fn rest_energy(kinetic: Kinetic) -> f64 {
    match kinetic {
        Kinetic::Relativistic => 1.0,
        Kinetic::Classical => 0.0,
    }
}

pub const PRESET_NAMES: [&str; 12] = [
    "kepler-rel",
    "kepler-classical",
    "oscillator-rel",
    "oscillator-classical",
    "anisotropic-rel",
    "anisotropic-classical",
    "henon-heiles-a-rel",
    "henon-heiles-a-classical",
    "henon-heiles-b-rel",
    "henon-heiles-b-classical",
    "henon-heiles-c-rel",
    "henon-heiles-c-classical",
];

/// Presets for the planar experiments. Energies above the potential
/// minimum are: oscillator +2, anisotropic oscillator (α = 1/2) +58,
/// Hénon-Heiles (α, β) = (0, 1/2) +0.6, (1/2, 1/2) +0.33, (1/12, 1/2) +0.7.
/// The Kepler levels are `E = 0.9` (relativistic) and `E = -0.1` with
/// `μ = -1/4`.
pub fn preset(name: &str) -> Option<Preset> {
    let (base, kinetic) = match name.rsplit_once('-') {
        Some((b, "rel")) => (b, Kinetic::Relativistic),
        Some((b, "classical")) => (b, Kinetic::Classical),
        _ => return None,
    };
    let e0 = rest_energy(kinetic);
    let rel = kinetic == Kinetic::Relativistic;
    let (potential, energy, seed_range, escape_radius) = match base {
        "kepler" => {
            let e = if rel { 0.9 } else { -0.1 };
            (kepler(-0.25), e, (0.3, 2.0), None)
        }
        "oscillator" => (oscillator(1.0), e0 + 2.0, (-1.9, 1.9), None),
        "anisotropic" => (oscillator(0.5), e0 + 58.0, (-15.0, 15.0), None),
        "henon-heiles-a" => (henon_heiles(0.0, 0.5), e0 + 0.6, (-1.5, 1.1), Some(10.0)),
        "henon-heiles-b" => (henon_heiles(0.5, 0.5), e0 + 0.33, (-0.8, 0.8), Some(10.0)),
        "henon-heiles-c" => (henon_heiles(1.0 / 12.0, 0.5), e0 + 0.7, (-1.5, 1.1), Some(10.0)),
        _ => return None,
    };
    Some(Preset {
        name: name.to_string(),
        potential,
        kinetic,
        energy,
        seed_range,
        escape_radius,
    })
}
