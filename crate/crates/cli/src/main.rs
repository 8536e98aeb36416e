//! `relint`: integrability checks and dynamics for relativistic homogeneous
//! potentials.
//!
//! Exit codes: 0 on success (or a potential passing the necessary
//! conditions), 1 when `check` proves non-integrability, 2 on any error.

mod config;
mod dynamics_out;
mod manifest;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use relint_core::dynamics::Kinetic;
use relint_core::galois::Overall;

use config::{defaults, Command, Format, RunConfig, SystemFlags, SystemSpec, Tolerances, THREADS_ENV};
use manifest::Manifest;

#[derive(Parser)]
#[command(name = "relint", version, about = "Integrability obstructions and dynamics for relativistic homogeneous potentials")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Output {
    /// Output format; each command has its own default.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output here (plus `<out>.manifest.json`) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KineticArg {
    #[value(name = "rel", alias = "relativistic")]
    Relativistic,
    Classical,
}

impl From<KineticArg> for Kinetic {
    fn from(k: KineticArg) -> Self {
        match k {
            KineticArg::Relativistic => Kinetic::Relativistic,
            KineticArg::Classical => Kinetic::Classical,
        }
    }
}

#[derive(Args)]
struct SystemArgs {
    /// Named system; see `relint presets`.
    #[arg(long)]
    preset: Option<String>,
    /// Potential file (homogeneous monomial list or tagged dynamics potential).
    #[arg(long)]
    potential: Option<PathBuf>,
    #[arg(long, value_enum)]
    kinetic: Option<KineticArg>,
    #[arg(long, allow_negative_numbers = true)]
    energy: Option<f64>,
    /// Section seed interval on q2, as `lo,hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    seed_range: Option<(f64, f64)>,
    #[arg(long)]
    escape_radius: Option<f64>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
}

impl SystemArgs {
    fn resolve(&self) -> Result<(SystemSpec, Tolerances)> {
        let spec = SystemSpec::resolve(SystemFlags {
            preset: self.preset.as_deref(),
            potential: self.potential.as_ref(),
            kinetic: self.kinetic.map(Into::into),
            energy: self.energy,
            seed_range: self.seed_range,
            escape_radius: self.escape_radius,
        })?;
        Ok((spec, Tolerances::new(self.rtol, self.atol)?))
    }
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

#[derive(Subcommand)]
enum Cmd {
    /// Test a homogeneous potential against the necessary integrability conditions.
    Check {
        #[arg(long)]
        potential: PathBuf,
        /// Include per-table diagnostics.
        #[arg(long)]
        explain: bool,
        #[command(flatten)]
        output: Output,
    },
    /// List the first elements of the integer set J± for degree k.
    Jset {
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, default_value_t = defaults::COUNT)]
        count: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Count the p in [-pbound, pbound] for which f±(k, p) is an integer.
    Jscan {
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, default_value_t = defaults::PBOUND)]
        pbound: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Poincaré section on q1 = 0, p1 > 0 for seeds along the q2 axis.
    Poincare {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long = "tend", default_value_t = defaults::POINCARE_T_END)]
        t_end: f64,
        #[arg(long, default_value_t = defaults::ORBITS)]
        orbits: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Sample one trajectory on a uniform time grid.
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long = "tend", default_value_t = defaults::SIMULATE_T_END)]
        t_end: f64,
        #[arg(long, default_value_t = defaults::SAMPLE_DT)]
        dt: f64,
        /// Initial position, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Option<Vec<f64>>,
        /// Initial momentum, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        p: Option<Vec<f64>>,
        #[command(flatten)]
        output: Output,
    },
    /// Re-run the configuration stored in a manifest.
    Replay {
        manifest: PathBuf,
        /// Output path; defaults to the one recorded in the manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the named dynamics presets.
    Presets,
}

fn build(cmd: Cmd) -> Result<Option<RunConfig>> {
    let (command, output) = match cmd {
        Cmd::Check {
            potential,
            explain,
            output,
        } => {
            let text = std::fs::read_to_string(&potential)
                .with_context(|| format!("cannot read potential file {}", potential.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .with_context(|| format!("invalid potential file {}", potential.display()))?;
            (
                Command::Check {
                    potential_path: potential,
                    potential: value,
                    explain,
                },
                output,
            )
        }
        Cmd::Jset { k, count, output } => (Command::Jset { k, count }, output),
        Cmd::Jscan { k, pbound, output } => (Command::Jscan { k, pbound }, output),
        Cmd::Poincare {
            system,
            t_end,
            orbits,
            output,
        } => {
            let (system, tolerances) = system.resolve()?;
            (
                Command::Poincare {
                    system,
                    t_end,
                    orbits,
                    tolerances,
                },
                output,
            )
        }
        Cmd::Simulate {
            system,
            t_end,
            dt,
            q,
            p,
            output,
        } => {
            if !(dt.is_finite() && dt > 0.0) {
                bail!("--dt must be positive");
            }
            let (system, tolerances) = system.resolve()?;
            (
                Command::Simulate {
                    system,
                    t_end,
                    dt,
                    q,
                    p,
                    tolerances,
                },
                output,
            )
        }
        Cmd::Replay { manifest, out } => {
            let mut config = Manifest::read(&manifest)?.config;
            if out.is_some() {
                config.output_path = out;
            }
            return RunConfig::new(config.command, Some(config.format), config.output_path).map(Some);
        }
        Cmd::Presets => {
            for name in relint_core::dynamics::PRESET_NAMES {
                println!("{name}");
            }
            return Ok(None);
        }
    };
    RunConfig::new(command, output.format, output.out).map(Some)
}

/// Runs a resolved configuration, returning the rendered output and whether
/// a `check` verdict was negative.
fn execute(config: &RunConfig) -> Result<(String, bool)> {
    let f = config.format;
    Ok(match &config.command {
        Command::Check { potential, explain, .. } => {
            let out = report::check(potential, *explain, f)?;
            (out.body, out.overall == Overall::CannotBeIntegrable)
        }
        Command::Jset { k, count } => (report::jset(*k, *count, f)?, false),
        Command::Jscan { k, pbound } => (report::jscan(*k, *pbound, f)?, false),
        Command::Poincare {
            system,
            t_end,
            orbits,
            tolerances,
        } => (dynamics_out::poincare(system, *t_end, *orbits, tolerances, f)?, false),
        Command::Simulate {
            system,
            t_end,
            dt,
            q,
            p,
            tolerances,
        } => (
            dynamics_out::simulate(system, *t_end, *dt, q.as_deref(), p.as_deref(), tolerances, f)?,
            false,
        ),
    })
}

fn emit(config: &RunConfig, body: &str) -> Result<()> {
    match &config.output_path {
        Some(path) => {
            write_file(path, body)?;
            Manifest::new(config.clone()).write(path)?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer (got `{raw}`)"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    init_threads()?;
    let Some(config) = build(cli.command)? else {
        return Ok(false);
    };
    let (body, obstructed) = execute(&config)?;
    emit(&config, &body)?;
    Ok(obstructed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
