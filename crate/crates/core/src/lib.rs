//! Simulation of two identical ladder-type (Ξ) three-level atoms coupled to a
//! single-mode cavity field with intensity-dependent coupling `A = a f(n̂)`.
//!
//! Both atoms start excited and the field starts coherent; the joint state
//! then stays inside independent six-amplitude excitation blocks, one per
//! photon index. The crate propagates those blocks two ways — exact per-block
//! eigendecomposition at resonance and adaptive integration of the coupled
//! amplitude equations at arbitrary detuning — and derives entanglement
//! measures (linear entropies, negativity) and field statistics (Mandel Q,
//! mean photon number, quadrature squeezing) from the result.
//!
//! Module map:
//!
//! * [`nonlinearity`] — deformation functions f(n) and ladder couplings;
//! * [`spectral`] — per-block invariants x1..x5 and pair frequencies β₁, β₂;
//! * [`dynamics`] — state construction, eigen and ODE propagation, analytic
//!   amplitude variants;
//! * [`density`] — reduced density matrices and the partial transpose;
//! * [`observables`] — the measured quantities;
//! * [`validation`] — the self-check suite behind the `validate` command;
//! * [`report`] — deterministic CSV formats.

// matrix kernels index straight into fixed-size stencils; iterator adaptors
// would obscure them. negated comparisons reject NaN along with the range.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod nonlinearity;
pub mod observables;
pub mod ode;
pub mod report;
pub mod spectral;
pub mod validation;

pub use density::{
    atom1_reduced, atoms_reduced, field_reduced, hermitian_eigenvalues, partial_transpose_second,
    DensityMatrix,
};
pub use dynamics::{
    closed_form_amplitudes, initial_amplitudes, linear_grid, ode_evolve, ode_evolve_block,
    propagate_resonance, total_norm, truncation_cutoff, ClosedFormVariant, ResonancePropagator,
    SimulationConfig, WaveFunction, BLOCK_OFFSETS, DEGENERACY,
};
pub use error::{Error, Result};
pub use nonlinearity::{associated_laguerre, CouplingBlock, Nonlinearity};
pub use observables::{
    linear_entropy, mandel_q, negativity, observable_record, observable_records, photon_moments,
    quadrature_params, ObservableRecord,
};
pub use spectral::{
    block_eigensystem, spectral_coefficients, symmetrized_block_matrix, BlockEigensystem,
    SpectralCoefficients,
};
