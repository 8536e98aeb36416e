//! Resolved run configuration. Everything a run depends on is stored here
//! so that a manifest alone reproduces the outputs.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use relint_core::dynamics::{preset, DynamicsPotential, IntegratorSettings, Kinetic};
use serde::{Deserialize, Serialize};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "RELINT_THREADS";

/// Defaults for every tunable, each overridable by a flag.
pub mod defaults {
    pub const RTOL: f64 = 1e-10;
    pub const ATOL: f64 = 1e-10;
    pub const POINCARE_T_END: f64 = 1000.0;
    pub const SIMULATE_T_END: f64 = 100.0;
    pub const SAMPLE_DT: f64 = 0.1;
    pub const ORBITS: usize = 8;
    pub const COUNT: usize = 10;
    pub const PBOUND: u64 = 1_000_000;
    pub const MAX_STEPS: usize = 5_000_000;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
            Format::Text => "text",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Tolerances {
    pub fn new(rtol: Option<f64>, atol: Option<f64>) -> Result<Self> {
        let t = Self {
            rtol: rtol.unwrap_or(defaults::RTOL),
            atol: atol.unwrap_or(defaults::ATOL),
            max_steps: defaults::MAX_STEPS,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rtol", self.rtol), ("atol", self.atol)] {
            if !(v.is_finite() && v > 0.0) {
                bail!("{name} must be strictly positive (got {v})");
            }
        }
        Ok(())
    }

    pub fn integrator(&self) -> IntegratorSettings {
        IntegratorSettings {
            rtol: self.rtol,
            atol: self.atol,
            max_steps: self.max_steps,
            ..Default::default()
        }
    }
}

/// Potential, kinetics and section seeding for the dynamics commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub preset: Option<String>,
    pub potential_path: Option<PathBuf>,
    pub potential: DynamicsPotential,
    pub kinetic: Kinetic,
    pub energy: Option<f64>,
    pub seed_range: Option<(f64, f64)>,
    pub escape_radius: Option<f64>,
}

pub struct SystemFlags<'a> {
    pub preset: Option<&'a str>,
    pub potential: Option<&'a PathBuf>,
    pub kinetic: Option<Kinetic>,
    pub energy: Option<f64>,
    pub seed_range: Option<(f64, f64)>,
    pub escape_radius: Option<f64>,
}

impl SystemSpec {
    pub fn resolve(flags: SystemFlags<'_>) -> Result<Self> {
        let mut spec = match (flags.preset, flags.potential) {
            (Some(_), Some(_)) => bail!("--preset and --potential are mutually exclusive"),
            (None, None) => bail!("one of --preset or --potential is required"),
            (Some(name), None) => {
                let p = preset(name).with_context(|| format!("unknown preset `{name}`"))?;
                Self {
                    preset: Some(p.name),
                    potential_path: None,
                    potential: p.potential,
                    kinetic: p.kinetic,
                    energy: Some(p.energy),
                    seed_range: Some(p.seed_range),
                    escape_radius: p.escape_radius,
                }
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read potential file {}", path.display()))?;
                let potential = DynamicsPotential::from_json(&text)
                    .with_context(|| format!("invalid potential file {}", path.display()))?;
                Self {
                    preset: None,
                    potential_path: Some(path.clone()),
                    potential,
                    kinetic: Kinetic::Relativistic,
                    energy: None,
                    seed_range: None,
                    escape_radius: None,
                }
            }
        };
        if let Some(k) = flags.kinetic {
            if spec.preset.is_some() && k != spec.kinetic {
                bail!("preset `{}` fixes the kinetics", spec.preset.as_deref().unwrap_or_default());
            }
            spec.kinetic = k;
        }
        if let Some(e) = flags.energy {
            if !e.is_finite() {
                bail!("--energy must be finite");
            }
            spec.energy = Some(e);
        }
        if let Some((a, b)) = flags.seed_range {
            if !(a.is_finite() && b.is_finite() && a < b) {
                bail!("--seed-range needs finite bounds with lo < hi");
            }
            spec.seed_range = Some((a, b));
        }
        if let Some(r) = flags.escape_radius {
            if !(r.is_finite() && r > 0.0) {
                bail!("--escape-radius must be positive");
            }
            spec.escape_radius = Some(r);
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    Check {
        potential_path: PathBuf,
        /// Potential file contents as read at run time.
        potential: serde_json::Value,
        explain: bool,
    },
    Jset {
        k: i64,
        count: usize,
    },
    Jscan {
        k: i64,
        pbound: u64,
    },
    Poincare {
        system: SystemSpec,
        t_end: f64,
        orbits: usize,
        tolerances: Tolerances,
    },
    Simulate {
        system: SystemSpec,
        t_end: f64,
        dt: f64,
        q: Option<Vec<f64>>,
        p: Option<Vec<f64>>,
        tolerances: Tolerances,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Jset { .. } => "jset",
            Command::Jscan { .. } => "jscan",
            Command::Poincare { .. } => "poincare",
            Command::Simulate { .. } => "simulate",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::Check { .. } => Format::Json,
            Command::Jset { .. } | Command::Jscan { .. } => Format::Text,
            Command::Poincare { .. } | Command::Simulate { .. } => Format::Csv,
        }
    }

    pub fn supports(&self, f: Format) -> bool {
        match self {
            Command::Check { .. } | Command::Jscan { .. } => matches!(f, Format::Json | Format::Text),
            Command::Jset { .. } => matches!(f, Format::Json | Format::Text | Format::Csv),
            Command::Poincare { .. } => matches!(f, Format::Json | Format::Csv | Format::Svg),
            Command::Simulate { .. } => matches!(f, Format::Json | Format::Csv),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub format: Format,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command, format: Option<Format>, output_path: Option<PathBuf>) -> Result<Self> {
        let format = format.unwrap_or_else(|| command.default_format());
        if !command.supports(format) {
            bail!("`{}` does not support --format {}", command.name(), format.name());
        }
        if let Some(dir) = output_path.as_ref().and_then(|p| p.parent()) {
            if !dir.as_os_str().is_empty() && !dir.is_dir() {
                bail!("output directory {} does not exist", dir.display());
            }
        }
        Ok(Self {
            command,
            format,
            output_path,
        })
    }
}
