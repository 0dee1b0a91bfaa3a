//! Entanglement and field-statistics observables of the propagated state.
//!
//! One [`ObservableRecord`] per sample time carries:
//!
//! * `s_atoms` — linear entropy `1 - Tr ρ²` of the two-atom subsystem
//!   (entanglement between the atom pair and the field), range [0, 8/9];
//! * `s_atom1` — linear entropy of a single atom (entanglement between that
//!   atom and everything else), range [0, 2/3];
//! * `negativity` — entanglement between the two atoms via the partial
//!   transpose, `Σ|μ_neg| = (‖ρ^{T₂}‖₁ - 1)/2`;
//! * `mandel_q` — `(⟨n²⟩-⟨n⟩²)/⟨n⟩ - 1`; negative means sub-Poissonian;
//! * `mean_n` — mean photon number;
//! * `s_x`, `s_y` — quadrature parameters `4(Δx)² - 1` and `4(Δy)² - 1` for
//!   `x = (a+a†)/2`, `y = (a-a†)/2i`; negative values flag squeezing.

use num_complex::Complex64;

use crate::density::{
    atom1_reduced, atoms_reduced, field_reduced, hermitian_eigenvalues, partial_transpose_second,
    DensityMatrix,
};
use crate::dynamics::{WaveFunction, DEGENERACY};
use crate::error::{Error, Result};

/// Eigenvalues above this (negative) threshold count as numerical zeros when
/// summing the negative part of a partial transpose.
const NEGATIVE_EIG_THRESHOLD: f64 = -1e-10;

/// Mean photon numbers below this make Mandel Q undefined.
const VACUUM_THRESHOLD: f64 = 1e-12;

/// One sample of every observable at scaled time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub t: f64,
    pub s_atoms: f64,
    pub s_atom1: f64,
    pub negativity: f64,
    pub mandel_q: f64,
    pub mean_n: f64,
    pub s_x: f64,
    pub s_y: f64,
}

/// Linear entropy `1 - Tr ρ²`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// Negativity of the two-atom state: absolute sum of the negative eigenvalues
/// of the partial transpose with respect to the second atom.
pub fn negativity(rho9: &DensityMatrix) -> Result<f64> {
    let w = hermitian_eigenvalues(&partial_transpose_second(rho9))?;
    Ok(w.iter()
        .filter(|&&x| x < NEGATIVE_EIG_THRESHOLD)
        .map(|x| -x)
        .sum())
}

/// `(⟨n⟩, ⟨n²⟩)` with the degeneracy weights of the six amplitude families.
pub fn photon_moments(wf: &WaveFunction) -> (f64, f64) {
    let mut mean = 0.0;
    let mut mean2 = 0.0;
    for n in 0..wf.len() {
        let w: f64 = (0..6)
            .map(|i| DEGENERACY[i] * wf.amp(i, n).norm_sqr())
            .sum();
        mean += n as f64 * w;
        mean2 += (n * n) as f64 * w;
    }
    (mean, mean2)
}

/// Mandel Q parameter; errors on an effectively empty field.
pub fn mandel_q(wf: &WaveFunction) -> Result<f64> {
    let (mean, mean2) = photon_moments(wf);
    if mean <= VACUUM_THRESHOLD {
        return Err(Error::VacuumField { mean_n: mean });
    }
    Ok((mean2 - mean * mean) / mean - 1.0)
}

/// Quadrature parameters `(S_x, S_y)` from the first two field moments:
/// `⟨a⟩ = Σ √n ρ_F[n][n-1]`, `⟨a²⟩ = Σ √(n(n-1)) ρ_F[n][n-2]`, and
/// `S_x = 2Re⟨a²⟩ + 2⟨n⟩ - 4(Re⟨a⟩)²`,
/// `S_y = -2Re⟨a²⟩ + 2⟨n⟩ - 4(Im⟨a⟩)²`.
pub fn quadrature_params(wf: &WaveFunction) -> (f64, f64) {
    let rho_f = field_reduced(wf);
    quadratures_from_field(&rho_f)
}

fn quadratures_from_field(rho_f: &DensityMatrix) -> (f64, f64) {
    let d = rho_f.dim();
    let mut a = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut mean = 0.0;
    for n in 0..d {
        mean += n as f64 * rho_f.get(n, n).re;
        if n >= 1 {
            a += (n as f64).sqrt() * rho_f.get(n, n - 1);
        }
        if n >= 2 {
            a2 += ((n * (n - 1)) as f64).sqrt() * rho_f.get(n, n - 2);
        }
    }
    let s_x = 2.0 * a2.re + 2.0 * mean - 4.0 * a.re * a.re;
    let s_y = -2.0 * a2.re + 2.0 * mean - 4.0 * a.im * a.im;
    (s_x, s_y)
}

/// Records for a whole trajectory, parallel over sample times.
pub fn observable_records(states: &[WaveFunction]) -> Result<Vec<ObservableRecord>> {
    use rayon::prelude::*;
    states.par_iter().map(observable_record).collect()
}

/// Assemble the full record for one state.
pub fn observable_record(wf: &WaveFunction) -> Result<ObservableRecord> {
    let rho9 = atoms_reduced(wf);
    let rho1 = atom1_reduced(&rho9);
    let rho_f = field_reduced(wf);
    let (mean, mean2) = photon_moments(wf);
    if mean <= VACUUM_THRESHOLD {
        return Err(Error::VacuumField { mean_n: mean });
    }
    let (s_x, s_y) = quadratures_from_field(&rho_f);
    Ok(ObservableRecord {
        t: wf.t(),
        s_atoms: linear_entropy(&rho9),
        s_atom1: linear_entropy(&rho1),
        negativity: negativity(&rho9)?,
        mandel_q: (mean2 - mean * mean) / mean - 1.0,
        mean_n: mean,
        s_x,
        s_y,
    })
}
