//! Dense eigensolvers for the small matrices this model produces.
//!
//! Everything is cyclic Jacobi: unconditionally stable, orthogonal to machine
//! precision, and entirely adequate at dimensions 6 (coupling blocks) and 9
//! (two-atom density matrices). Rotations are applied in place; eigenvectors
//! are accumulated alongside.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sweep budget before the solver reports non-convergence. Quadratic
/// convergence puts typical runs at 6-10 sweeps.
const MAX_SWEEPS: usize = 100;

/// Off-diagonal norm target, relative to the Frobenius norm of the input.
const OFF_TOL: f64 = 1e-12;

fn frobenius_real(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .flat_map(|row| row.iter().map(|x| x * x))
        .sum::<f64>()
        .sqrt()
}

fn off_norm_real(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += a[p][q] * a[p][q];
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a real symmetric matrix.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// columns of an orthogonal matrix `q` (`a = q diag(w) qᵀ`).
pub fn eigh_real(a: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let tol = OFF_TOL * frobenius_real(&m).max(1.0);

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        if off_norm_real(&m) <= tol {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apq = m[p][r];
                if apq == 0.0 {
                    continue;
                }
                let tau = (m[r][r] - m[p][p]) / (2.0 * apq);
                // stable root of t^2 + 2 tau t - 1 = 0
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate_real(&mut m, &mut q, p, r, c, s);
            }
        }
    }
    if !converged && off_norm_real(&m) > tol {
        return Err(Error::EigensolverNonConvergence {
            sweeps,
            off_norm: off_norm_real(&m),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap());
    let w: Vec<f64> = order.iter().map(|&i| m[i][i]).collect();
    let mut vecs = vec![vec![0.0; n]; n];
    for (new, &old) in order.iter().enumerate() {
        for row in 0..n {
            vecs[row][new] = q[row][old];
        }
    }
    Ok((w, vecs))
}

/// Apply the rotation J(p,q; c,s) as m <- Jᵀ m J and q <- q J.
fn rotate_real(m: &mut [Vec<f64>], q: &mut [Vec<f64>], p: usize, r: usize, c: f64, s: f64) {
    let n = m.len();
    for k in 0..n {
        let mkp = m[k][p];
        let mkr = m[k][r];
        m[k][p] = c * mkp - s * mkr;
        m[k][r] = s * mkp + c * mkr;
    }
    for k in 0..n {
        let mpk = m[p][k];
        let mrk = m[r][k];
        m[p][k] = c * mpk - s * mrk;
        m[r][k] = s * mpk + c * mrk;
    }
    for row in q.iter_mut() {
        let qp = row[p];
        let qr = row[r];
        row[p] = c * qp - s * qr;
        row[r] = s * qp + c * qr;
    }
}

fn frobenius_herm(a: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .flat_map(|row| row.iter().map(|x| x.norm_sqr()))
        .sum::<f64>()
        .sqrt()
}

fn off_norm_herm(a: &[Vec<Complex64>]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += a[p][q].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi with
/// phased rotations.
///
/// Each rotation first absorbs the phase of the pivot `a_pq = r e^{iθ}` and
/// then solves the real 2×2 problem, i.e. the unitary is
/// `G[p][p] = e^{iθ} c`, `G[p][q] = e^{iθ} s`, `G[q][p] = -s`, `G[q][q] = c`.
///
/// Returns eigenvalues ascending plus the unitary of column eigenvectors.
pub fn eigh_hermitian(a: &[Vec<Complex64>]) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    let mut q = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    let tol = OFF_TOL * frobenius_herm(&m).max(1.0);

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        if off_norm_herm(&m) <= tol {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apq = m[p][r];
                let rmod = apq.norm();
                if rmod == 0.0 {
                    continue;
                }
                let phase = apq / rmod;
                let tau = (m[r][r].re - m[p][p].re) / (2.0 * rmod);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate_herm(&mut m, &mut q, p, r, c, s, phase);
            }
        }
    }
    if !converged && off_norm_herm(&m) > tol {
        return Err(Error::EigensolverNonConvergence {
            sweeps,
            off_norm: off_norm_herm(&m),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].re.partial_cmp(&m[j][j].re).unwrap());
    let w: Vec<f64> = order.iter().map(|&i| m[i][i].re).collect();
    let mut vecs = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (new, &old) in order.iter().enumerate() {
        for row in 0..n {
            vecs[row][new] = q[row][old];
        }
    }
    Ok((w, vecs))
}

/// m <- G† m G and q <- q G for the phased rotation described above.
fn rotate_herm(
    m: &mut [Vec<Complex64>],
    q: &mut [Vec<Complex64>],
    p: usize,
    r: usize,
    c: f64,
    s: f64,
    phase: Complex64,
) {
    let n = m.len();
    // columns: new_p = e^{iθ} c col_p - s col_r ; new_r = e^{iθ} s col_p + c col_r
    for k in 0..n {
        let mkp = m[k][p];
        let mkr = m[k][r];
        m[k][p] = phase * c * mkp - s * mkr;
        m[k][r] = phase * s * mkp + c * mkr;
    }
    // rows pick up the conjugate from the left
    let pconj = phase.conj();
    for k in 0..n {
        let mpk = m[p][k];
        let mrk = m[r][k];
        m[p][k] = pconj * c * mpk - s * mrk;
        m[r][k] = pconj * s * mpk + c * mrk;
    }
    for row in q.iter_mut() {
        let qp = row[p];
        let qr = row[r];
        row[p] = phase * c * qp - s * qr;
        row[r] = phase * s * qp + c * qr;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn real_diagonal_passthrough() {
        let a = vec![
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ];
        let (w, _) = eigh_real(&a).unwrap();
        assert_eq!(w, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn real_reconstruction_random() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let n = 6;
            let mut a = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..=i {
                    let x = rng.gen_range(-2.0..2.0);
                    a[i][j] = x;
                    a[j][i] = x;
                }
            }
            let (w, q) = eigh_real(&a).unwrap();
            // orthonormality
            for i in 0..n {
                for j in 0..n {
                    let dot: f64 = (0..n).map(|k| q[k][i] * q[k][j]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-12);
                }
            }
            // reconstruction
            for i in 0..n {
                for j in 0..n {
                    let rec: f64 = (0..n).map(|k| q[i][k] * w[k] * q[j][k]).sum();
                    assert!((rec - a[i][j]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn hermitian_reconstruction_random() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..20 {
            let n = 9;
            let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
            for i in 0..n {
                a[i][i] = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
                for j in 0..i {
                    let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    a[i][j] = z;
                    a[j][i] = z.conj();
                }
            }
            let (w, q) = eigh_hermitian(&a).unwrap();
            assert!(w.windows(2).all(|p| p[0] <= p[1]));
            for i in 0..n {
                for j in 0..n {
                    let rec: Complex64 = (0..n).map(|k| q[i][k] * w[k] * q[j][k].conj()).sum();
                    assert!((rec - a[i][j]).norm() < 1e-10, "entry ({i},{j})");
                }
            }
            // unitarity
            for i in 0..n {
                for j in 0..n {
                    let dot: Complex64 = (0..n).map(|k| q[k][i].conj() * q[k][j]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - Complex64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn hermitian_eigenvalues_of_known_matrix() {
        // pauli-y embedded in 2x2: eigenvalues ±1
        let a = vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        ];
        let (w, _) = eigh_hermitian(&a).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-14);
        assert!((w[1] - 1.0).abs() < 1e-14);
    }
}
