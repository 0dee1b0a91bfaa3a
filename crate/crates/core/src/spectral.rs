//! Per-block spectral structure of the resonant dynamics.
//!
//! At resonance the six amplitudes of an excitation block obey
//! `du/dt = -i M u` with a constant real coefficient matrix `M` built from
//! the ladder couplings `V_1..V_4`. `M` is similar to a symmetric matrix
//! `M_s = S M S⁻¹` under the degeneracy scaling `S = diag(1,√2,√2,√2,1,1)`,
//! and its characteristic polynomial factors as
//!
//! ```text
//! det(λI - M_s) = λ² (λ⁴ - x3 λ² + x2)
//! ```
//!
//! so the spectrum is `{0, 0, ±β₁, ±β₂}` with `β² = (x3 ± η)/2`,
//! `η = √(x3² - 4 x2)`. The quartic invariants are polynomial in the
//! couplings:
//!
//! ```text
//! x1 = 6 V1 V2 V3 V4            x2 = 6 V1²V3² + 4 V1²V4² + 6 V2²V4²
//! x3 = 2(V1² + V4²) + 3(V2² + V3²)
//! x4 = 6 V1²V3² + 4 V1²V4²      x5 = 2 V1 V2 V4²
//! ```
//!
//! The `x3` above is pinned by the trace identity `tr(M_s²) = 2 x3`. A
//! variant with the `V3²` weight doubled, `x3' = 2(V1²+V4²) + 3(V2²+2V3²)`,
//! circulates in closed-form amplitude expressions but fails that identity;
//! it is carried along as [`SpectralCoefficients::x3_printed`] purely so the
//! errata diagnostics can rebuild and compare the dynamics it implies.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::nonlinearity::CouplingBlock;

/// Slack for the discriminant guard: `x3² - 4 x2` mathematically cannot be
/// negative for a real symmetric block, so anything below `-1e-12` means the
/// inputs are broken.
const DISCRIMINANT_EPS: f64 = 1e-12;

/// Degeneracy scaling that symmetrizes the raw block matrix.
pub const DEGENERACY_SCALING: [f64; 6] = [
    1.0,
    std::f64::consts::SQRT_2,
    std::f64::consts::SQRT_2,
    std::f64::consts::SQRT_2,
    1.0,
    1.0,
];

/// Quartic invariants and pair frequencies of one excitation block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCoefficients {
    pub n: u32,
    pub x1: f64,
    pub x2: f64,
    /// Trace-consistent form `2(V1²+V4²) + 3(V2²+V3²)`.
    pub x3: f64,
    pub x4: f64,
    pub x5: f64,
    /// `√(x3² - 4 x2) = β₁² - β₂²`.
    pub eta: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Diagnostics-only variant `2(V1²+V4²) + 3(V2²+2V3²)`; not used by any
    /// propagation path.
    pub x3_printed: f64,
}

/// Derive `(η, β₁, β₂)` from a given `x3` and `x2`, guarding the discriminant.
fn pair_frequencies(n: u32, x2: f64, x3: f64) -> Result<(f64, f64, f64)> {
    let disc = x3 * x3 - 4.0 * x2;
    if disc < -DISCRIMINANT_EPS {
        return Err(Error::ComplexSpectrum {
            n,
            discriminant: disc,
        });
    }
    let eta = disc.max(0.0).sqrt();
    let beta1 = (0.5 * (x3 + eta)).sqrt();
    let beta2 = (0.5 * (x3 - eta)).max(0.0).sqrt();
    Ok((eta, beta1, beta2))
}

/// Compute all block invariants from the ladder couplings.
pub fn spectral_coefficients(block: &CouplingBlock) -> Result<SpectralCoefficients> {
    let [v1, v2, v3, v4] = block.v;
    let (s1, s2, s3, s4) = (v1 * v1, v2 * v2, v3 * v3, v4 * v4);
    let x1 = 6.0 * v1 * v2 * v3 * v4;
    let x2 = 6.0 * s1 * s3 + 4.0 * s1 * s4 + 6.0 * s2 * s4;
    let x3 = 2.0 * (s1 + s4) + 3.0 * (s2 + s3);
    let x4 = 6.0 * s1 * s3 + 4.0 * s1 * s4;
    let x5 = 2.0 * v1 * v2 * s4;
    let x3_printed = 2.0 * (s1 + s4) + 3.0 * (s2 + 2.0 * s3);
    let (eta, beta1, beta2) = pair_frequencies(block.n, x2, x3)?;
    Ok(SpectralCoefficients {
        n: block.n,
        x1,
        x2,
        x3,
        x4,
        x5,
        eta,
        beta1,
        beta2,
        x3_printed,
    })
}

impl SpectralCoefficients {
    /// `(η, β₁, β₂)` rebuilt from the diagnostics variant of `x3`.
    pub fn printed_frequencies(&self) -> Result<(f64, f64, f64)> {
        pair_frequencies(self.n, self.x2, self.x3_printed)
    }
}

/// The symmetrized block matrix `M_s = S M S⁻¹`.
///
/// Nonzero entries (0-based, symmetric): `(0,1) = √2 V1`, `(1,2) = V2`,
/// `(1,4) = √2 V2`, `(2,3) = V3`, `(3,4) = √2 V3`, `(3,5) = √2 V4`.
pub fn symmetrized_block_matrix(block: &CouplingBlock) -> [[f64; 6]; 6] {
    let [v1, v2, v3, v4] = block.v;
    let r2 = std::f64::consts::SQRT_2;
    let mut m = [[0.0; 6]; 6];
    let mut set = |i: usize, j: usize, w: f64| {
        m[i][j] = w;
        m[j][i] = w;
    };
    set(0, 1, r2 * v1);
    set(1, 2, v2);
    set(1, 4, r2 * v2);
    set(2, 3, v3);
    set(3, 4, r2 * v3);
    set(3, 5, r2 * v4);
    m
}

/// Exact eigensystem of one excitation block, ready to propagate.
#[derive(Debug, Clone)]
pub struct BlockEigensystem {
    /// Eigenfrequencies of `M_s`, ascending: `{-β₁, -β₂, 0, 0, β₂, β₁}`.
    pub frequencies: [f64; 6],
    /// Columns are the orthonormal eigenvectors of `M_s`.
    pub modes: [[f64; 6]; 6],
    /// The degeneracy scaling `S`.
    pub scaling: [f64; 6],
}

/// Full eigendecomposition of the symmetrized block matrix.
pub fn block_eigensystem(block: &CouplingBlock) -> Result<BlockEigensystem> {
    let m = symmetrized_block_matrix(block);
    let rows: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
    let (w, q) = linalg::eigh_real(&rows)?;
    let mut frequencies = [0.0; 6];
    let mut modes = [[0.0; 6]; 6];
    for i in 0..6 {
        frequencies[i] = w[i];
        for j in 0..6 {
            modes[i][j] = q[i][j];
        }
    }
    Ok(BlockEigensystem {
        frequencies,
        modes,
        scaling: DEGENERACY_SCALING,
    })
}

impl BlockEigensystem {
    /// Evolve a block amplitude vector for time `t`:
    /// `u(t) = S⁻¹ Q e^{-iΛt} Qᵀ S u(0)`.
    pub fn evolve(&self, u0: &[Complex64; 6], t: f64) -> [Complex64; 6] {
        let mut w = [Complex64::new(0.0, 0.0); 6];
        // w = Qᵀ S u0
        for j in 0..6 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..6 {
                acc += self.modes[i][j] * self.scaling[i] * u0[i];
            }
            w[j] = acc;
        }
        for (j, wj) in w.iter_mut().enumerate() {
            let phase = -self.frequencies[j] * t;
            *wj *= Complex64::new(phase.cos(), phase.sin());
        }
        let mut out = [Complex64::new(0.0, 0.0); 6];
        for (i, oi) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..6 {
                acc += self.modes[i][j] * w[j];
            }
            *oi = acc / self.scaling[i];
        }
        out
    }
}
