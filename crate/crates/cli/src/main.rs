//! Command-line driver: `simulate` runs the model and writes observable time
//! series, `validate` runs the self-check suite, `spectra` dumps per-block
//! spectral quantities.
//!
//! Exit codes: 0 success, 1 validation failure, 2 configuration error,
//! 3 I/O error.

// negated comparisons in config validation reject NaN along with the range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod manifest;
mod simulate;
mod spectra;
mod validate;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cascade_cavity::Error as ModelError;

use manifest::{ErrataMode, FileConfig, SimulateOverrides, Solver};

#[derive(Debug)]
pub enum CliError {
    Validation,
    Config(String),
    Io(String),
}

impl CliError {
    /// Model-level failures come from how the run was configured (deformation
    /// poles, broken grids), so they surface as configuration errors.
    fn from_model(e: ModelError) -> Self {
        CliError::Config(e.to_string())
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeformationKind {
    Constant,
    Harmonious,
    #[value(name = "trapped-ion")]
    TrappedIon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Eigen,
    Ode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ErrataArg {
    Off,
    Report,
}

#[derive(Parser)]
#[command(
    name = "cascade-cavity",
    version,
    about = "Two ladder-type three-level atoms in a single-mode cavity with intensity-dependent coupling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the atoms-field state and write observable time series
    Simulate(SimulateArgs),
    /// Run the invariant and errata self-check suite
    Validate(ValidateArgs),
    /// Dump per-block spectral coefficients as CSV
    Spectra(SpectraArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config file mirroring these flags (flags override the file)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coupling deformation
    #[arg(long = "f", value_enum)]
    f: Option<DeformationKind>,
    /// Lamb-Dicke parameter for the trapped-ion deformation
    #[arg(long)]
    eta: Option<f64>,
    /// Initial mean photon number |alpha|^2
    #[arg(long = "alpha-sq")]
    alpha_sq: Option<f64>,
    /// Detuning of the upper transition, units of g
    #[arg(long)]
    delta1: Option<f64>,
    /// Detuning of the lower transition, units of g
    #[arg(long)]
    delta2: Option<f64>,
    /// Final scaled time gt
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Number of grid intervals (output rows = steps + 1)
    #[arg(long)]
    steps: Option<usize>,
    /// Poisson tail mass allowed beyond the photon cutoff
    #[arg(long = "tail-eps")]
    tail_eps: Option<f64>,
    /// Relative tolerance of the adaptive integrator
    #[arg(long = "ode-tol")]
    ode_tol: Option<f64>,
    /// Propagation path (defaults to eigen at resonance, ode when detuned)
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Observable time-series output path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also dump raw amplitudes per time and photon index
    #[arg(long = "dump-amplitudes")]
    dump_amplitudes: Option<PathBuf>,
    /// Dump the two-atom density matrix at the grid time nearest this gt
    #[arg(long = "dump-rho")]
    dump_rho: Option<f64>,
    /// Output path for --dump-rho
    #[arg(long = "rho-out")]
    rho_out: Option<PathBuf>,
    /// Compare analytic amplitude variants against the solver
    #[arg(long, value_enum)]
    errata: Option<ErrataArg>,
    /// Output path for the errata comparison
    #[arg(long = "errata-out")]
    errata_out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Lamb-Dicke parameter for the trapped-ion deformation
    #[arg(long)]
    eta: Option<f64>,
    /// Initial mean photon number |alpha|^2
    #[arg(long = "alpha-sq")]
    alpha_sq: Option<f64>,
    /// Final scaled time gt of the checked trajectories
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Number of grid intervals
    #[arg(long)]
    steps: Option<usize>,
    /// Poisson tail mass allowed beyond the photon cutoff
    #[arg(long = "tail-eps")]
    tail_eps: Option<f64>,
    /// Relative tolerance of the adaptive integrator
    #[arg(long = "ode-tol")]
    ode_tol: Option<f64>,
}

#[derive(Args)]
struct SpectraArgs {
    /// Coupling deformation
    #[arg(long = "f", value_enum, default_value = "constant")]
    f: DeformationKind,
    /// Lamb-Dicke parameter for the trapped-ion deformation
    #[arg(long)]
    eta: Option<f64>,
    /// Largest photon block index (rows cover n = 0..=n-max)
    #[arg(long = "n-max", default_value_t = 39)]
    n_max: u32,
    /// Output path
    #[arg(long, default_value = "spectra.csv")]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Validate(args) => validate::run(args.into()),
        Command::Spectra(args) => spectra::run(&args),
    };
    if let Err(e) = result {
        match &e {
            CliError::Validation => eprintln!("validation failed"),
            CliError::Config(msg) => eprintln!("configuration error: {msg}"),
            CliError::Io(msg) => eprintln!("i/o error: {msg}"),
        }
        std::process::exit(e.exit_code());
    }
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let overrides = SimulateOverrides {
        f: args.f,
        eta: args.eta,
        alpha_sq: args.alpha_sq,
        delta1: args.delta1,
        delta2: args.delta2,
        t_max: args.t_max,
        steps: args.steps,
        tail_eps: args.tail_eps,
        ode_tol: args.ode_tol,
        solver: args.solver.map(|s| match s {
            SolverArg::Eigen => Solver::Eigen,
            SolverArg::Ode => Solver::Ode,
        }),
        out: args.out,
        dump_amplitudes: args.dump_amplitudes,
        dump_rho: args.dump_rho,
        rho_out: args.rho_out,
        errata: args.errata.map(|m| match m {
            ErrataArg::Off => ErrataMode::Off,
            ErrataArg::Report => ErrataMode::Report,
        }),
        errata_out: args.errata_out,
    };
    let manifest = manifest::resolve(overrides, file)?;
    simulate::run(&manifest)
}

impl From<ValidateArgs> for cascade_cavity::validation::ValidationConfig {
    fn from(a: ValidateArgs) -> Self {
        let mut cfg = cascade_cavity::validation::ValidationConfig::default();
        if let Some(x) = a.eta {
            cfg.lamb_dicke = x;
        }
        if let Some(x) = a.alpha_sq {
            cfg.alpha_sq = x;
        }
        if let Some(x) = a.t_max {
            cfg.t_max = x;
        }
        if let Some(x) = a.steps {
            cfg.steps = x;
        }
        if let Some(x) = a.tail_eps {
            cfg.tail_epsilon = x;
        }
        if let Some(x) = a.ode_tol {
            cfg.ode_tolerance = x;
        }
        cfg
    }
}
