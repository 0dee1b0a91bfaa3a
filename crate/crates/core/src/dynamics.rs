//! State construction and time evolution.
//!
//! The joint state of the two atoms and the field lives in six amplitude
//! families `C_1..C_6`, indexed by photon number:
//!
//! ```text
//! |ψ(t)⟩ = Σ_n [ C1(n)|1,1,n⟩ + C2(n)(|1,2,n⟩+|2,1,n⟩) + C3(n)(|1,3,n⟩+|3,1,n⟩)
//!              + C4(n)(|2,3,n⟩+|3,2,n⟩) + C5(n)|2,2,n⟩ + C6(n)|3,3,n⟩ ]
//! ```
//!
//! The interaction couples the six amplitudes
//! `(C1(n), C2(n+1), C3(n+2), C4(n+3), C5(n+2), C6(n+4))` and nothing else,
//! so the dynamics splits into independent excitation blocks, one per photon
//! index `n`. Two solvers are provided:
//!
//! * [`ResonancePropagator`] — exact per-block eigendecomposition, valid at
//!   zero detuning. This is the authoritative resonance path.
//! * [`ode_evolve`] — direct adaptive integration of the coupled equations
//!   with their explicit `e^{±iΔt}` phases, valid at any detuning. Serves as
//!   the independent oracle for the eigen path.
//!
//! [`closed_form_amplitudes`] additionally evaluates the analytic resonance
//! amplitudes in two variants (see [`ClosedFormVariant`]) for diagnostics.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::ode::{self, Tolerances};
use crate::spectral::{block_eigensystem, spectral_coefficients, BlockEigensystem};

/// Degeneracy weight of each amplitude family in norms and traces
/// (the paired kets contribute twice).
pub const DEGENERACY: [f64; 6] = [1.0, 2.0, 2.0, 2.0, 1.0, 1.0];

/// Photon-index offset of each amplitude family within an excitation block.
pub const BLOCK_OFFSETS: [usize; 6] = [0, 1, 2, 3, 2, 4];

/// Full simulation configuration, in units of the bare coupling g
/// (times are the scaled time gt; detunings are Δ/g).
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    /// Coherent amplitude of the initial field state.
    pub alpha: Complex64,
    pub nonlinearity: Nonlinearity,
    pub delta1: f64,
    pub delta2: f64,
    /// Strictly increasing sample times, starting at or after 0.
    pub t_grid: Vec<f64>,
    /// Poisson tail mass allowed beyond the photon-space cutoff.
    pub tail_epsilon: f64,
    /// Relative tolerance of the adaptive integrator.
    pub ode_tolerance: f64,
}

impl SimulationConfig {
    /// Resonant configuration with the conventional defaults:
    /// `|α|² = 10`, gt ∈ [0, 25] in 1000 steps, tail 1e-12, tolerance 1e-10.
    pub fn resonant(nonlinearity: Nonlinearity) -> Self {
        SimulationConfig {
            alpha: Complex64::new(10.0f64.sqrt(), 0.0),
            nonlinearity,
            delta1: 0.0,
            delta2: 0.0,
            t_grid: linear_grid(25.0, 1000),
            tail_epsilon: 1e-12,
            ode_tolerance: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_epsilon > 0.0 && self.tail_epsilon <= 1e-6) {
            return Err(Error::Config(format!(
                "tail_epsilon must lie in (0, 1e-6], got {}",
                self.tail_epsilon
            )));
        }
        if !(self.ode_tolerance > 0.0) {
            return Err(Error::Config("ode_tolerance must be positive".into()));
        }
        if self.alpha.norm_sqr() <= 0.0 {
            return Err(Error::Config("alpha must be nonzero".into()));
        }
        if self.t_grid.is_empty() || self.t_grid[0] < 0.0 {
            return Err(Error::Config(
                "t_grid must be nonempty and start at t >= 0".into(),
            ));
        }
        if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("t_grid must be strictly increasing".into()));
        }
        if let Nonlinearity::TrappedIon { lamb_dicke } = self.nonlinearity {
            if !(lamb_dicke > 0.0) {
                return Err(Error::Config("lamb_dicke must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Uniform grid 0..=t_max with `steps` intervals (`steps + 1` points).
pub fn linear_grid(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| t_max * i as f64 / steps as f64)
        .collect()
}

/// Complex amplitudes of the joint state at one instant.
///
/// Each family is stored out to photon index `n_max + 4`: the block rooted at
/// the cutoff still reaches four rungs up the ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    t: f64,
    n_max: usize,
    c: [Vec<Complex64>; 6],
}

impl WaveFunction {
    /// All-zero state (not normalized); useful for assembling test states.
    pub fn zeroed(n_max: usize) -> Self {
        let len = n_max + 5;
        WaveFunction {
            t: 0.0,
            n_max,
            c: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); len]),
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Length of each amplitude array (`n_max + 5`).
    // never zero: the block offsets force at least five photon slots
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n_max + 5
    }

    /// Amplitude family `i` (0-based: `c(0)` is `C_1`), indexed by photon number.
    pub fn c(&self, i: usize) -> &[Complex64] {
        &self.c[i]
    }

    pub fn amp(&self, i: usize, n: usize) -> Complex64 {
        self.c[i][n]
    }

    pub fn set_amp(&mut self, i: usize, n: usize, value: Complex64) {
        self.c[i][n] = value;
    }

    pub fn set_t(&mut self, t: f64) {
        self.t = t;
    }

    /// The six amplitudes of the excitation block rooted at photon index `n`.
    pub fn block(&self, n: usize) -> [Complex64; 6] {
        std::array::from_fn(|i| self.c[i][n + BLOCK_OFFSETS[i]])
    }

    pub fn set_block(&mut self, n: usize, u: &[Complex64; 6]) {
        for i in 0..6 {
            self.c[i][n + BLOCK_OFFSETS[i]] = u[i];
        }
    }
}

/// Weighted norm `Σ_n (|c1|² + 2|c2|² + 2|c3|² + 2|c4|² + |c5|² + |c6|²)`.
pub fn total_norm(wf: &WaveFunction) -> f64 {
    let mut acc = 0.0;
    for i in 0..6 {
        let w = DEGENERACY[i];
        for z in wf.c(i) {
            acc += w * z.norm_sqr();
        }
    }
    acc
}

/// Smallest photon cutoff `N` whose Poisson tail `Σ_{n>N} e^{-|α|²}|α|^{2n}/n!`
/// drops below `tail_epsilon`. Amplitude arrays are then sized `N + 5` to
/// absorb the block index offsets.
pub fn truncation_cutoff(alpha: Complex64, tail_epsilon: f64) -> usize {
    let lambda = alpha.norm_sqr();
    assert!(lambda > 0.0, "coherent amplitude must be nonzero");
    assert!(tail_epsilon > 0.0);

    // collect terms until the geometric bound on the remaining tail is
    // negligible against tail_epsilon, then suffix-sum backwards so no
    // cancellation enters the comparison
    let mut terms: Vec<f64> = Vec::new();
    let mut p = (-lambda).exp();
    let mut n = 0usize;
    loop {
        terms.push(p);
        let ratio = lambda / (n as f64 + 1.0);
        if ratio < 0.5 && p * ratio / (1.0 - ratio) < tail_epsilon * 1e-6 {
            break;
        }
        n += 1;
        p *= lambda / n as f64;
        assert!(n < 100_000, "tail_epsilon unreachable");
    }
    let mut suffix = 0.0;
    let mut cutoff = terms.len() - 1;
    for nn in (0..terms.len()).rev() {
        suffix += terms[nn];
        if suffix >= tail_epsilon {
            cutoff = nn;
            break;
        }
    }
    cutoff
}

/// Initial state: both atoms excited, field coherent with amplitude `alpha`.
/// `c1[n] = e^{-|α|²/2} αⁿ/√(n!)`, everything else zero, t = 0.
///
/// Magnitudes are computed in log space so large photon indices cannot
/// overflow the factorial.
pub fn initial_amplitudes(alpha: Complex64, n_max: usize) -> WaveFunction {
    let mut wf = WaveFunction::zeroed(n_max);
    let lambda = alpha.norm_sqr();
    let ln_mod = alpha.norm().ln();
    let phi = alpha.arg();
    let mut ln_fact = 0.0;
    for n in 0..wf.len() {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let magnitude = (-0.5 * lambda + n as f64 * ln_mod - 0.5 * ln_fact).exp();
        wf.set_amp(0, n, Complex64::from_polar(magnitude, n as f64 * phi));
    }
    wf
}

/// Exact resonance propagator: one eigendecomposition per excitation block,
/// reused for every sample time.
#[derive(Debug, Clone)]
pub struct ResonancePropagator {
    n_max: usize,
    blocks: Vec<BlockEigensystem>,
}

impl ResonancePropagator {
    pub fn new(nonlinearity: Nonlinearity, n_max: usize) -> Result<Self> {
        let blocks = (0..=n_max as u32)
            .into_par_iter()
            .map(|n| block_eigensystem(&nonlinearity.coupling_strengths(n)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(ResonancePropagator { n_max, blocks })
    }

    /// Propagate a t = 0 state to time `t`.
    pub fn propagate(&self, wf0: &WaveFunction, t: f64) -> WaveFunction {
        assert_eq!(wf0.n_max(), self.n_max, "cutoff mismatch");
        assert_eq!(wf0.t(), 0.0, "initial state must sit at t = 0");
        let mut wf = wf0.clone();
        wf.set_t(t);
        for n in 0..=self.n_max {
            let u = self.blocks[n].evolve(&wf0.block(n), t);
            wf.set_block(n, &u);
        }
        wf
    }

    /// Propagate to every time of a sample grid (parallel over times).
    pub fn propagate_grid(&self, wf0: &WaveFunction, t_grid: &[f64]) -> Vec<WaveFunction> {
        t_grid.par_iter().map(|&t| self.propagate(wf0, t)).collect()
    }
}

/// One-shot resonance propagation (builds the eigensystems and applies them).
pub fn propagate_resonance(
    wf0: &WaveFunction,
    nonlinearity: Nonlinearity,
    t: f64,
) -> Result<WaveFunction> {
    Ok(ResonancePropagator::new(nonlinearity, wf0.n_max())?.propagate(wf0, t))
}

/// Right-hand side of the six coupled amplitude equations for one block,
/// with the explicit detuning phases:
///
/// ```text
/// u1' = -2i V1 e^{+iΔ1 t} u2
/// u2' = -i V1 e^{-iΔ1 t} u1 - i V2 e^{+iΔ2 t} u3 - i V2 e^{+iΔ1 t} u5
/// u3' = -i V2 e^{-iΔ2 t} u2 - i V3 e^{+iΔ1 t} u4
/// u4' = -i V3 e^{-iΔ1 t} u3 - i V3 e^{-iΔ2 t} u5 - i V4 e^{+iΔ2 t} u6
/// u5' = -2i V2 e^{-iΔ1 t} u2 - 2i V3 e^{+iΔ2 t} u4
/// u6' = -2i V4 e^{-iΔ2 t} u4
/// ```
fn block_rhs(
    v: &[f64; 4],
    delta1: f64,
    delta2: f64,
    t: f64,
    u: &[Complex64],
    du: &mut [Complex64],
) {
    let e1 = Complex64::from_polar(1.0, delta1 * t);
    let e2 = Complex64::from_polar(1.0, delta2 * t);
    let e1c = e1.conj();
    let e2c = e2.conj();
    let mi = Complex64::new(0.0, -1.0);
    let [v1, v2, v3, v4] = *v;
    du[0] = mi * 2.0 * v1 * e1 * u[1];
    du[1] = mi * (v1 * e1c * u[0] + v2 * e2 * u[2] + v2 * e1 * u[4]);
    du[2] = mi * (v2 * e2c * u[1] + v3 * e1 * u[3]);
    du[3] = mi * (v3 * e1c * u[2] + v3 * e2c * u[4] + v4 * e2 * u[5]);
    du[4] = mi * 2.0 * (v2 * e1c * u[1] + v3 * e2 * u[3]);
    du[5] = mi * 2.0 * v4 * e2c * u[3];
}

/// Integrate a single excitation block from its t = 0 amplitudes, sampling
/// dense output on `t_grid`.
pub fn ode_evolve_block(
    nonlinearity: Nonlinearity,
    n: u32,
    delta1: f64,
    delta2: f64,
    u0: &[Complex64; 6],
    t_grid: &[f64],
    ode_tolerance: f64,
) -> Result<Vec<[Complex64; 6]>> {
    let block = nonlinearity.coupling_strengths(n)?;
    let sol = ode::integrate_dense(
        |t, u, du| block_rhs(&block.v, delta1, delta2, t, u, du),
        0.0,
        u0,
        t_grid,
        Tolerances::relative(ode_tolerance),
    )?;
    Ok(sol
        .into_iter()
        .map(|u| std::array::from_fn(|i| u[i]))
        .collect())
}

/// Integrate the full state over `t_grid` at arbitrary detuning.
///
/// Blocks are independent and integrate in parallel; within a block the
/// solver is sequential in time. This is the model's ground-truth path.
pub fn ode_evolve(
    wf0: &WaveFunction,
    nonlinearity: Nonlinearity,
    delta1: f64,
    delta2: f64,
    t_grid: &[f64],
    ode_tolerance: f64,
) -> Result<Vec<WaveFunction>> {
    assert_eq!(wf0.t(), 0.0, "initial state must sit at t = 0");
    let n_max = wf0.n_max();
    let per_block: Vec<Vec<[Complex64; 6]>> = (0..=n_max as u32)
        .into_par_iter()
        .map(|n| {
            ode_evolve_block(
                nonlinearity,
                n,
                delta1,
                delta2,
                &wf0.block(n as usize),
                t_grid,
                ode_tolerance,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(t_grid.len());
    for (ti, &t) in t_grid.iter().enumerate() {
        let mut wf = wf0.clone();
        wf.set_t(t);
        for (n, traj) in per_block.iter().enumerate() {
            wf.set_block(n, &traj[ti]);
        }
        out.push(wf);
    }
    Ok(out)
}

/// Which analytic resonance amplitudes to evaluate.
///
/// `Corrected` applies the errata ledger: the trace-consistent `x3` feeds all
/// spectral quantities, `C4` carries the sign that matches the equations of
/// motion, and `C2` is the sine combination uniquely fixed by them.
/// `Printed` reproduces the uncorrected formulas verbatim (including the
/// doubled-`V3²` form of `x3`) so deviations can be quantified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormVariant {
    Printed,
    Corrected,
}

/// Analytic resonance amplitudes of block `n` at time `t`, per unit initial
/// amplitude `C1(n, 0)`; callers scale by the actual initial value.
pub fn closed_form_amplitudes(
    n: u32,
    nonlinearity: Nonlinearity,
    t: f64,
    variant: ClosedFormVariant,
) -> Result<[Complex64; 6]> {
    let block = nonlinearity.coupling_strengths(n)?;
    let s = spectral_coefficients(&block)?;
    let (eta, b1, b2) = match variant {
        ClosedFormVariant::Corrected => (s.eta, s.beta1, s.beta2),
        ClosedFormVariant::Printed => s.printed_frequencies()?,
    };
    let [v1, v2, _, v4] = block.v;
    let (x1, x2, x4, x5) = (s.x1, s.x2, s.x4, s.x5);
    let (cb1, cb2) = ((b1 * t).cos(), (b2 * t).cos());
    let (sb1, sb2) = ((b1 * t).sin(), (b2 * t).sin());
    let i = Complex64::new(0.0, 1.0);

    let c1 = ((x2 - x4) * eta + (2.0 * v1 * v1 * x2 - b2 * b2 * x4) * cb1
        - (2.0 * v1 * v1 * x2 - b1 * b1 * x4) * cb2)
        / (x2 * eta);
    let c3 = (-x5 * eta - (b2 * b2 * x5 - v1 * v2 * x2) * cb1
        + (b1 * b1 * x5 - v1 * v2 * x2) * cb2)
        / (x2 * eta);
    let c5 = 2.0 * c3;
    let c6 = x1 * (eta - b1 * b1 * cb2 + b2 * b2 * cb1) / (x2 * eta);

    let (c2, c4) = match variant {
        ClosedFormVariant::Printed => {
            let c2 = i / (2.0 * b1 * b2 * eta)
                * ((x4 - 2.0 * b1 * b1) * b2 * sb1 - (x4 - 2.0 * b2 * b2) * b1 * sb2);
            let c4 = i * x1 / (2.0 * v4 * eta) * (sb1 / b1 - sb2 / b2);
            (c2, c4)
        }
        ClosedFormVariant::Corrected => {
            let p = 2.0 * v1 * v1 + 3.0 * v2 * v2;
            let c2 = -i * v1 / eta * ((p - b2 * b2) * sb1 / b1 - (p - b1 * b1) * sb2 / b2);
            let c4 = -i * x1 / (2.0 * v4 * eta) * (sb1 / b1 - sb2 / b2);
            (c2, c4)
        }
    };

    Ok([
        Complex64::new(c1, 0.0),
        c2,
        Complex64::new(c3, 0.0),
        c4,
        Complex64::new(c5, 0.0),
        Complex64::new(c6, 0.0),
    ])
}
