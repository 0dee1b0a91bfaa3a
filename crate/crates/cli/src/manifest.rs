//! Run configuration: CLI flags merged over an optional JSON config file,
//! resolved into a [`RunManifest`].

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use cascade_cavity::{linear_grid, Nonlinearity, SimulationConfig};

use crate::{CliError, DeformationKind};

/// Environment variable that redirects relative output paths.
pub const OUT_DIR_ENV: &str = "CASCADE_CAVITY_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Eigen,
    Ode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrataMode {
    Off,
    Report,
}

/// Fully resolved simulation run.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config: SimulationConfig,
    pub solver: Solver,
    pub out: PathBuf,
    pub dump_amplitudes: Option<PathBuf>,
    pub dump_rho: Option<f64>,
    pub rho_out: PathBuf,
    pub errata_mode: ErrataMode,
    pub errata_out: PathBuf,
}

/// JSON mirror of the simulate flags; every field optional, flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub f: Option<String>,
    pub eta: Option<f64>,
    pub alpha_sq: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub tail_eps: Option<f64>,
    pub ode_tol: Option<f64>,
    pub solver: Option<String>,
    pub out: Option<String>,
    pub dump_amplitudes: Option<String>,
    pub dump_rho: Option<f64>,
    pub rho_out: Option<String>,
    pub errata: Option<String>,
    pub errata_out: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("parsing config {}: {e}", path.display())))
    }
}

/// Flag-level inputs to the merge (everything optional).
#[derive(Debug, Clone, Default)]
pub struct SimulateOverrides {
    pub f: Option<DeformationKind>,
    pub eta: Option<f64>,
    pub alpha_sq: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub tail_eps: Option<f64>,
    pub ode_tol: Option<f64>,
    pub solver: Option<Solver>,
    pub out: Option<PathBuf>,
    pub dump_amplitudes: Option<PathBuf>,
    pub dump_rho: Option<f64>,
    pub rho_out: Option<PathBuf>,
    pub errata: Option<ErrataMode>,
    pub errata_out: Option<PathBuf>,
}

fn parse_deformation(s: &str) -> Result<DeformationKind, CliError> {
    match s {
        "constant" => Ok(DeformationKind::Constant),
        "harmonious" => Ok(DeformationKind::Harmonious),
        "trapped-ion" | "trapped_ion" => Ok(DeformationKind::TrappedIon),
        other => Err(CliError::Config(format!("unknown deformation `{other}`"))),
    }
}

fn parse_solver(s: &str) -> Result<Solver, CliError> {
    match s {
        "eigen" => Ok(Solver::Eigen),
        "ode" => Ok(Solver::Ode),
        other => Err(CliError::Config(format!("unknown solver `{other}`"))),
    }
}

fn parse_errata(s: &str) -> Result<ErrataMode, CliError> {
    match s {
        "off" => Ok(ErrataMode::Off),
        "report" => Ok(ErrataMode::Report),
        other => Err(CliError::Config(format!("unknown errata mode `{other}`"))),
    }
}

/// Join a relative path onto the output-directory override, if any.
pub fn apply_out_dir(path: PathBuf) -> PathBuf {
    if path.is_absolute() {
        return path;
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path,
    }
}

/// Merge flags over the file config and defaults, then validate.
pub fn resolve(flags: SimulateOverrides, file: FileConfig) -> Result<RunManifest, CliError> {
    let kind = match flags.f {
        Some(k) => k,
        None => match &file.f {
            Some(s) => parse_deformation(s)?,
            None => DeformationKind::Constant,
        },
    };
    let eta = flags
        .eta
        .or(file.eta)
        .unwrap_or(Nonlinearity::DEFAULT_LAMB_DICKE);
    let nonlinearity = match kind {
        DeformationKind::Constant => Nonlinearity::Constant,
        DeformationKind::Harmonious => Nonlinearity::Harmonious,
        DeformationKind::TrappedIon => Nonlinearity::TrappedIon { lamb_dicke: eta },
    };

    let alpha_sq = flags.alpha_sq.or(file.alpha_sq).unwrap_or(10.0);
    if !(alpha_sq > 0.0) {
        return Err(CliError::Config("alpha-sq must be positive".into()));
    }
    let delta1 = flags.delta1.or(file.delta1).unwrap_or(0.0);
    let delta2 = flags.delta2.or(file.delta2).unwrap_or(0.0);
    let t_max = flags.t_max.or(file.t_max).unwrap_or(25.0);
    let steps = flags.steps.or(file.steps).unwrap_or(1000);
    if steps == 0 || !(t_max > 0.0) {
        return Err(CliError::Config("t-max and steps must be positive".into()));
    }
    let tail_eps = flags.tail_eps.or(file.tail_eps).unwrap_or(1e-12);
    let ode_tol = flags.ode_tol.or(file.ode_tol).unwrap_or(1e-10);

    let resonant = delta1 == 0.0 && delta2 == 0.0;
    let solver = match flags.solver {
        Some(s) => s,
        None => match &file.solver {
            Some(s) => parse_solver(s)?,
            None => {
                if resonant {
                    Solver::Eigen
                } else {
                    Solver::Ode
                }
            }
        },
    };
    if solver == Solver::Eigen && !resonant {
        return Err(CliError::Config(
            "solver `eigen` requires delta1 = delta2 = 0; use --solver ode for detuned runs".into(),
        ));
    }

    let errata_mode = match flags.errata {
        Some(m) => m,
        None => match &file.errata {
            Some(s) => parse_errata(s)?,
            None => ErrataMode::Off,
        },
    };
    if errata_mode == ErrataMode::Report && !resonant {
        return Err(CliError::Config(
            "errata reporting compares resonance amplitudes; it requires delta1 = delta2 = 0"
                .into(),
        ));
    }

    let config = SimulationConfig {
        alpha: Complex64::new(alpha_sq.sqrt(), 0.0),
        nonlinearity,
        delta1,
        delta2,
        t_grid: linear_grid(t_max, steps),
        tail_epsilon: tail_eps,
        ode_tolerance: ode_tol,
    };
    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let out = apply_out_dir(
        flags
            .out
            .or_else(|| file.out.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("observables.csv")),
    );
    let dump_amplitudes = flags
        .dump_amplitudes
        .or_else(|| file.dump_amplitudes.as_ref().map(PathBuf::from))
        .map(apply_out_dir);
    let dump_rho = flags.dump_rho.or(file.dump_rho);
    let rho_out = apply_out_dir(
        flags
            .rho_out
            .or_else(|| file.rho_out.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("rho_atoms.csv")),
    );
    let errata_out = apply_out_dir(
        flags
            .errata_out
            .or_else(|| file.errata_out.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("errata_report.csv")),
    );

    Ok(RunManifest {
        config,
        solver,
        out,
        dump_amplitudes,
        dump_rho,
        rho_out,
        errata_mode,
        errata_out,
    })
}
