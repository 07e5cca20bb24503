//! Cyclic Jacobi eigensolver for small dense symmetric matrices.
//!
//! Used as the inner step of the alternating eigenvalue solvers and as the
//! exact path for matrices. Sweeps plane rotations until the off-diagonal
//! Frobenius mass drops below `1e-14 * ||M||_F`.

use crate::error::{Error, Result};
use crate::tensor::l2_norm;

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Largest eigenvalue and a unit eigenvector of the symmetric `n x n`
/// matrix `a` (row-major). Rejects asymmetric input.
pub fn top_eig_symmetric(n: usize, a: &[f64]) -> Result<(f64, Vec<f64>)> {
    let (values, vectors) = eigen_symmetric(n, a)?;
    let top = values
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| x.total_cmp(y))
        .map(|(i, _)| i)
        .unwrap();
    let v = (0..n).map(|r| vectors[r * n + top]).collect();
    Ok((values[top], v))
}

/// Full eigendecomposition by cyclic Jacobi rotations. Returns the
/// eigenvalues (unsorted) and the eigenvector matrix (columns, row-major).
pub fn eigen_symmetric(n: usize, a: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || a.len() != n * n {
        return Err(Error::ShapeMismatch(format!(
            "matrix buffer of {} elements is not {n}x{n}",
            a.len()
        )));
    }
    let fro = l2_norm(a);
    let sym_tol = 1e-12 * fro.max(1.0);
    for p in 0..n {
        for q in (p + 1)..n {
            let asym = (a[p * n + q] - a[q * n + p]).abs();
            if asym > sym_tol {
                return Err(Error::AsymmetricMatrix(format!(
                    "|M[{p},{q}] - M[{q},{p}]| = {asym:e}"
                )));
            }
        }
    }

    let mut m = a.to_vec();
    // Symmetrize exactly so rotations preserve symmetry bit-for-bit.
    for p in 0..n {
        for q in (p + 1)..n {
            let avg = 0.5 * (m[p * n + q] + m[q * n + p]);
            m[p * n + q] = avg;
            m[q * n + p] = avg;
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n == 1 {
        return Ok((vec![m[0]], v));
    }

    let threshold = OFF_DIAGONAL_TOL * fro;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                // Smaller-magnitude root of t^2 + 2 t theta - 1 = 0.
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = m[r * n + p];
                        let arq = m[r * n + q];
                        m[r * n + p] = arp - s * (arq + tau * arp);
                        m[r * n + q] = arq + s * (arp - tau * arq);
                        m[p * n + r] = m[r * n + p];
                        m[q * n + r] = m[r * n + q];
                    }
                }
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp - s * (vrq + tau * vrp);
                    v[r * n + q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    let values = (0..n).map(|i| m[i * n + i]).collect();
    Ok((values, v))
}
