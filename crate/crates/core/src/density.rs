//! Reduced density matrices of the atomic and field subsystems.
//!
//! The two-atom matrix is 9×9 in the product basis
//! `(|11⟩,|12⟩,|13⟩,|21⟩,|22⟩,|23⟩,|31⟩,|32⟩,|33⟩)` (atom 1 major, levels
//! 1..3). Because the state only carries the six amplitude families, every
//! entry is a pairwise overlap `ρ_ij = Σ_n C_i(n) C_j*(n)` placed through the
//! coefficient-index map
//!
//! ```text
//! basis slot: |11⟩ |12⟩ |13⟩ |21⟩ |22⟩ |23⟩ |31⟩ |32⟩ |33⟩
//! family:      C1   C2   C3   C2   C5   C4   C3   C4   C6
//! ```
//!
//! which is why rows/columns 2 & 4, 3 & 7 and 6 & 8 of the matrix repeat.

use num_complex::Complex64;

use crate::dynamics::{WaveFunction, DEGENERACY};
use crate::error::Result;
use crate::linalg;

/// Coefficient family occupying each two-atom basis slot.
pub const ATOM_BASIS_FAMILY: [usize; 9] = [0, 1, 2, 1, 4, 3, 2, 3, 5];

/// Dense complex matrix with unit trace (except partial-transpose outputs,
/// which stay Hermitian and unit-trace but may lose positivity).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        DensityMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.dim + c]
    }

    fn set(&mut self, r: usize, c: usize, z: Complex64) {
        self.entries[r * self.dim + c] = z;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr ρ² = Σ_{rs} |ρ_rs|²` for Hermitian ρ.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..=r {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }
}

/// Pairwise coefficient overlaps `G[i][j] = Σ_n c_i[n] c_j*[n]`, Hermitian by
/// construction (lower triangle mirrored).
fn coefficient_gram(wf: &WaveFunction) -> [[Complex64; 6]; 6] {
    let mut g = [[Complex64::new(0.0, 0.0); 6]; 6];
    for i in 0..6 {
        for j in 0..=i {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in wf.c(i).iter().zip(wf.c(j)) {
                acc += a * b.conj();
            }
            g[i][j] = acc;
            g[j][i] = acc.conj();
        }
    }
    g
}

/// Two-atom reduced density matrix (trace over the field).
pub fn atoms_reduced(wf: &WaveFunction) -> DensityMatrix {
    let g = coefficient_gram(wf);
    let mut rho = DensityMatrix::new(9, vec![Complex64::new(0.0, 0.0); 81]);
    for r in 0..9 {
        for s in 0..9 {
            rho.set(r, s, g[ATOM_BASIS_FAMILY[r]][ATOM_BASIS_FAMILY[s]]);
        }
    }
    rho
}

/// Single-atom reduced matrix: trace the 9×9 two-atom matrix over the second
/// atom, `y[i][k] = Σ_j ρ[(i,j),(k,j)]`.
///
/// In coefficient overlaps this reads
/// `y11 = ρ11+ρ22+ρ33`, `y12 = ρ12+ρ25+ρ34`, `y13 = ρ13+ρ24+ρ36`,
/// `y22 = ρ22+ρ44+ρ55`, `y23 = ρ23+ρ54+ρ46`, `y33 = ρ33+ρ44+ρ66`.
pub fn atom1_reduced(rho9: &DensityMatrix) -> DensityMatrix {
    assert_eq!(rho9.dim(), 9);
    let mut y = DensityMatrix::new(3, vec![Complex64::new(0.0, 0.0); 9]);
    for i in 0..3 {
        for k in 0..3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..3 {
                acc += rho9.get(3 * i + j, 3 * k + j);
            }
            y.set(i, k, acc);
        }
    }
    y
}

/// Field reduced density matrix (trace over both atoms):
/// `ρ_F[n][m] = Σ_i w_i c_i[n] c_i*[m]` with the degeneracy weights `w`.
pub fn field_reduced(wf: &WaveFunction) -> DensityMatrix {
    let d = wf.len();
    let mut rho = DensityMatrix::new(d, vec![Complex64::new(0.0, 0.0); d * d]);
    for i in 0..6 {
        let w = DEGENERACY[i];
        let c = wf.c(i);
        for n in 0..d {
            if c[n].norm_sqr() == 0.0 {
                continue;
            }
            for m in 0..d {
                let z = rho.get(n, m) + w * c[n] * c[m].conj();
                rho.set(n, m, z);
            }
        }
    }
    rho
}

/// Partial transpose with respect to the second atom:
/// `out[(i,l),(k,j)] = in[(i,j),(k,l)]`.
pub fn partial_transpose_second(rho9: &DensityMatrix) -> DensityMatrix {
    assert_eq!(rho9.dim(), 9);
    let mut out = DensityMatrix::new(9, vec![Complex64::new(0.0, 0.0); 81]);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    out.set(3 * i + l, 3 * k + j, rho9.get(3 * i + j, 3 * k + l));
                }
            }
        }
    }
    out
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DensityMatrix) -> Result<Vec<f64>> {
    let d = m.dim();
    let rows: Vec<Vec<Complex64>> = (0..d)
        .map(|r| (0..d).map(|c| m.get(r, c)).collect())
        .collect();
    let (w, _) = linalg::eigh_hermitian(&rows)?;
    Ok(w)
}
