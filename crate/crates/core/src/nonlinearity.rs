//! Intensity-dependence of the atom-field coupling.
//!
//! The cavity mode couples to both atomic ladders through deformed operators
//! `A = a f(n̂)`, so every transition matrix element picks up a factor
//! `f(m)√m` instead of the bare `√m`. Three deformations are supported:
//!
//! * `constant` — `f ≡ 1`, the undeformed coupling;
//! * `harmonious` — `f(m) = 1/√m`, which makes every ladder coupling equal
//!   and the dynamics exactly periodic;
//! * `trapped_ion` — `f(m) = L_m^1(η²) / ((m+1) L_m^0(η²))`, the
//!   center-of-mass deformation of an ion in a trap with Lamb-Dicke
//!   parameter η.
//!
//! `f` is only ever needed at integer arguments m ≥ 1: the ladder couplings
//! evaluate it at `n + j` with `j = 1..4`, so no convention for `f(0)` is
//! introduced.

use crate::error::{Error, Result};

/// Threshold below which the trapped-ion denominator counts as a genuine
/// pole of the deformation rather than a small value.
const SINGULARITY_EPS: f64 = 1e-12;

/// Which intensity function deforms the coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    /// `f ≡ 1`.
    Constant,
    /// `f(m) = 1/√m`.
    Harmonious,
    /// `f(m) = L_m^1(η²) / ((m+1) L_m^0(η²))` with `η = lamb_dicke > 0`.
    TrappedIon { lamb_dicke: f64 },
}

impl Nonlinearity {
    /// Default Lamb-Dicke parameter for the trapped-ion deformation.
    pub const DEFAULT_LAMB_DICKE: f64 = 0.2;

    /// Evaluate the deformation at photon number `m >= 1`.
    ///
    /// Errors with [`Error::NonlinearitySingularity`] when the trapped-ion
    /// denominator `(m+1) L_m^0(η²)` falls below `1e-12` in magnitude; those
    /// are Laguerre roots, i.e. genuine poles of the model, and are never
    /// clamped.
    pub fn value(&self, m: u32) -> Result<f64> {
        debug_assert!(m >= 1, "deformation is only defined for m >= 1");
        match *self {
            Nonlinearity::Constant => Ok(1.0),
            Nonlinearity::Harmonious => Ok(1.0 / (m as f64).sqrt()),
            Nonlinearity::TrappedIon { lamb_dicke } => {
                let x = lamb_dicke * lamb_dicke;
                let den = (m as f64 + 1.0) * associated_laguerre(m, 0, x);
                if den.abs() < SINGULARITY_EPS {
                    return Err(Error::NonlinearitySingularity { m, eta: lamb_dicke });
                }
                Ok(associated_laguerre(m, 1, x) / den)
            }
        }
    }

    /// Ladder couplings `V_j = f(n+j)·√(n+j)`, `j = 1..4`, for the excitation
    /// block rooted at photon number `n`.
    pub fn coupling_strengths(&self, n: u32) -> Result<CouplingBlock> {
        let mut v = [0.0; 4];
        for (j, vj) in v.iter_mut().enumerate() {
            let m = n + 1 + j as u32;
            // harmonious collapses to f(m)√m = 1 identically; keep that exact
            *vj = match self {
                Nonlinearity::Harmonious => 1.0,
                _ => self.value(m)? * (m as f64).sqrt(),
            };
        }
        Ok(CouplingBlock { n, v })
    }
}

/// The four ladder couplings of one excitation block, in units of the bare
/// coupling constant g. `v[j-1] = f(n+j)·√(n+j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingBlock {
    /// Photon index of the block root.
    pub n: u32,
    /// `V_1 .. V_4`.
    pub v: [f64; 4],
}

/// Associated Laguerre polynomial `L_n^m(x)` by upward three-term recurrence:
/// `L_0^m = 1`, `L_1^m = 1 + m - x`,
/// `(k+1) L_{k+1}^m = (2k+1+m-x) L_k^m - (k+m) L_{k-1}^m`.
///
/// The recurrence is stable for the small arguments `x = η² ≲ 1` in play here.
pub fn associated_laguerre(n: u32, m: u32, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let m = m as f64;
    let mut prev = 1.0;
    let mut cur = 1.0 + m - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + m - x) * cur - (k + m) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed-form oracle: L_n^m(x) = sum_k (-1)^k C(n+m, n-k) x^k / k!.
    fn laguerre_sum(n: u32, m: u32, x: f64) -> f64 {
        let binom = |a: u32, b: u32| -> f64 {
            let mut r = 1.0;
            for i in 0..b {
                r = r * (a - i) as f64 / (i + 1) as f64;
            }
            r
        };
        let mut acc = 0.0;
        let mut xk = 1.0;
        let mut kfact = 1.0;
        for k in 0..=n {
            if k > 0 {
                xk *= x;
                kfact *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom(n + m, n - k) * xk / kfact;
        }
        acc
    }

    #[test]
    fn laguerre_base_cases() {
        assert_eq!(associated_laguerre(0, 1, 0.04), 1.0);
        assert!((associated_laguerre(1, 0, 0.04) - 0.96).abs() < 1e-15);
        // L_2^1(x) = (x^2 - 6x + 6)/2
        let explicit = (0.04f64 * 0.04 - 6.0 * 0.04 + 6.0) / 2.0;
        assert!((associated_laguerre(2, 1, 0.04) - explicit).abs() < 1e-14);
        assert!((associated_laguerre(2, 1, 0.04) - 2.8808).abs() < 1e-12);
    }

    #[test]
    fn laguerre_matches_closed_form_sum() {
        for n in 0..=10 {
            for m in 0..=2 {
                for &x in &[0.0, 0.04, 1.0] {
                    let rec = associated_laguerre(n, m, x);
                    let sum = laguerre_sum(n, m, x);
                    let scale = sum.abs().max(1.0);
                    assert!(
                        (rec - sum).abs() <= 1e-12 * scale,
                        "n={n} m={m} x={x}: {rec} vs {sum}"
                    );
                }
            }
        }
    }

    #[test]
    fn deformation_values() {
        assert_eq!(Nonlinearity::Constant.value(7).unwrap(), 1.0);
        assert_eq!(Nonlinearity::Harmonious.value(4).unwrap(), 0.5);
        // f_TI(1) = L_1^1(0.04) / (2 L_1^0(0.04)) = (2 - 0.04)/(2(1 - 0.04)) = 49/48
        let ti = Nonlinearity::TrappedIon { lamb_dicke: 0.2 };
        assert!((ti.value(1).unwrap() - 49.0 / 48.0).abs() < 1e-14);
    }

    #[test]
    fn trapped_ion_pole_is_an_error() {
        // L_1^0(1) = 0 exactly, so eta = 1 puts m = 1 on a Laguerre root.
        let ti = Nonlinearity::TrappedIon { lamb_dicke: 1.0 };
        match ti.value(1) {
            Err(Error::NonlinearitySingularity { m, eta }) => {
                assert_eq!(m, 1);
                assert_eq!(eta, 1.0);
            }
            other => panic!("expected singularity, got {other:?}"),
        }
        // and it propagates through coupling_strengths (block n=0 touches m=1)
        assert!(ti.coupling_strengths(0).is_err());
    }

    #[test]
    fn trapped_ion_small_eta_limit_is_constant() {
        let ti = Nonlinearity::TrappedIon { lamb_dicke: 1e-6 };
        for m in 1..=50 {
            assert!((ti.value(m).unwrap() - 1.0).abs() < 1e-6, "m={m}");
        }
    }

    #[test]
    fn coupling_strengths_constant_and_harmonious() {
        let b = Nonlinearity::Constant.coupling_strengths(0).unwrap();
        assert_eq!(b.v[0], 1.0);
        assert_eq!(b.v[1], 2.0f64.sqrt());
        assert_eq!(b.v[2], 3.0f64.sqrt());
        assert_eq!(b.v[3], 2.0);
        for n in 0..=60 {
            let h = Nonlinearity::Harmonious.coupling_strengths(n).unwrap();
            assert_eq!(h.v, [1.0, 1.0, 1.0, 1.0], "harmonious block must be exact");
            let c = Nonlinearity::Constant.coupling_strengths(n).unwrap();
            for j in 0..4 {
                let m = (n + 1 + j as u32) as f64;
                // v is exactly f(m)·√m; squaring costs one more rounding
                assert_eq!(c.v[j], m.sqrt());
                assert!((c.v[j] * c.v[j] - m).abs() <= 1e-15 * m);
            }
        }
    }

    #[test]
    fn coupling_strengths_trapped_ion_block0() {
        let ti = Nonlinearity::TrappedIon { lamb_dicke: 0.2 };
        let b = ti.coupling_strengths(0).unwrap();
        assert!((b.v[0] - 49.0 / 48.0).abs() < 1e-14); // f(1)·√1
        assert_eq!(b.v[0], ti.value(1).unwrap() * 1.0f64.sqrt());
    }
}
