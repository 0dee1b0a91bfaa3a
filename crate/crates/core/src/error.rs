use thiserror::Error;

/// Errors surfaced by the model kernels.
///
/// Everything here signals either a genuine model singularity (a pole of the
/// deformation function), a defect in the caller's configuration, or a
/// numerical routine that failed to meet its own contract. None of these are
/// recoverable mid-computation; callers are expected to report and abort.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// The trapped-ion deformation `f(m) = L_m^1(eta^2) / ((m+1) L_m^0(eta^2))`
    /// was evaluated at a root of the denominator Laguerre polynomial.
    #[error("nonlinearity singularity: (m+1)*L_m^0(eta^2) vanishes at m = {m}, eta = {eta}")]
    NonlinearitySingularity { m: u32, eta: f64 },

    /// The quartic block invariant `x3^2 - 4 x2` came out negative beyond
    /// rounding slack, which would put the pair frequencies off the real axis.
    /// Never observed for the supported deformations; kept as a guard.
    #[error("complex spectrum: x3^2 - 4*x2 = {discriminant} < 0 for block n = {n}")]
    ComplexSpectrum { n: u32, discriminant: f64 },

    /// The cyclic Jacobi sweep budget was exhausted before the off-diagonal
    /// norm dropped below tolerance. Signals a defect, not a model state.
    #[error("eigensolver non-convergence: off-diagonal norm {off_norm} after {sweeps} sweeps")]
    EigensolverNonConvergence { sweeps: usize, off_norm: f64 },

    /// The adaptive integrator drove its step size below the hard floor.
    #[error("step underflow: step size {step} below 1e-12 at t = {t}")]
    StepUnderflow { t: f64, step: f64 },

    /// Mandel Q is undefined when the mean photon number vanishes.
    #[error("vacuum field: mean photon number {mean_n} too small for Mandel Q")]
    VacuumField { mean_n: f64 },

    /// A simulation configuration violated one of its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
