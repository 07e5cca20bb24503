//! Exhaustive-grid ground truth for tiny instances.
//!
//! Supported instances: matrices (d = 2, any dimensions), where the exact
//! eigensolver path is used directly, and tensors with every dimension
//! equal to 2 up to order 4, where each free unit vector lives on a
//! circle and is swept over `resolution` angles. The last block of each
//! functional is always resolved in closed form (normalized contraction,
//! dual-norm maximizer, or a top eigenpair), so the grid covers one fewer
//! block than the functional has.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jacobi::top_eig_symmetric;
use crate::solve::SpectralFunctional;
use crate::tensor::{l2_norm, lp_norm, Tensor};

/// Upper bound on `|grid max - true max|`: the objective is Lipschitz in
/// each block vector with constant `||A||_F`, grid points are at most
/// `pi / resolution` apart in angle, and the angle-to-sphere map is
/// 1-Lipschitz on the l2 circle (bounded by ~7 after ld renormalization
/// for d <= 4).
pub fn grid_tolerance(t: &Tensor, f: SpectralFunctional, resolution: usize) -> f64 {
    let d = t.shape().order() as f64;
    let stretch = match f {
        SpectralFunctional::LdSingular | SpectralFunctional::HEig => 7.0,
        _ => 1.0,
    };
    stretch * d * t.frobenius_norm() * PI / resolution as f64
}

/// Maximum of the functional over the grid; within `grid_tolerance` of
/// the true maximum on supported instances.
pub fn grid_oracle(t: &Tensor, f: SpectralFunctional, resolution: usize) -> Result<f64> {
    if resolution < 8 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be >= 8, got {resolution}"
        )));
    }
    let dims = t.shape().dims();
    let d = dims.len();
    if d == 2 {
        return matrix_oracle(t, f);
    }
    if dims.iter().any(|&n| n != 2) || d > 4 {
        return Err(Error::UnsupportedOracle(format!(
            "grid oracle supports d = 2 or all dimensions 2 with d <= 4, got {dims:?}"
        )));
    }
    match f {
        SpectralFunctional::L2Singular => Ok(sweep_singular(t, resolution, false)?),
        SpectralFunctional::LdSingular => Ok(sweep_singular(t, resolution, true)?),
        SpectralFunctional::ZEig => sweep_symmetric(t, resolution, false),
        SpectralFunctional::HEig => sweep_symmetric(t, resolution, true),
        SpectralFunctional::MEig => sweep_m_eig(t, resolution),
        SpectralFunctional::CEig => sweep_c_eig(t, resolution),
    }
}

/// Point on the unit circle, renormalized onto the ld sphere when asked.
fn circle_point(theta: f64, ld: Option<f64>) -> Result<[f64; 2]> {
    let p = [theta.cos(), theta.sin()];
    match ld {
        None => Ok(p),
        Some(d) => {
            let nd = lp_norm(&p, d)?;
            Ok([p[0] / nd, p[1] / nd])
        }
    }
}

/// Singular-value functionals: sweep d-1 modes, resolve the last in
/// closed form from its contraction.
fn sweep_singular(t: &Tensor, resolution: usize, ld: bool) -> Result<f64> {
    let d = t.shape().order();
    let p = if ld { Some(d as f64) } else { None };
    let mut angles = vec![0usize; d - 1];
    let mut best = f64::NEG_INFINITY;
    let steps = 2.0 * PI / resolution as f64;
    loop {
        let mut vecs: Vec<[f64; 2]> = Vec::with_capacity(d);
        for &a in &angles {
            vecs.push(circle_point(a as f64 * steps, p)?);
        }
        vecs.push([1.0, 0.0]); // placeholder for the resolved mode
        let refs: Vec<&[f64]> = vecs.iter().map(|v| v.as_slice()).collect();
        let g = t.contract_raw(&refs, d - 1);
        let value = if ld {
            lp_norm(&g, d as f64 / (d as f64 - 1.0))?
        } else {
            l2_norm(&g)
        };
        best = best.max(value);
        if !bump(&mut angles, resolution) {
            break;
        }
    }
    Ok(best)
}

/// Z/H functionals: a single shared vector, one angle sweep.
fn sweep_symmetric(t: &Tensor, resolution: usize, ld: bool) -> Result<f64> {
    let d = t.shape().order();
    let p = if ld { Some(d as f64) } else { None };
    let steps = 2.0 * PI / resolution as f64;
    let mut best = f64::NEG_INFINITY;
    for a in 0..resolution {
        let u = circle_point(a as f64 * steps, p)?;
        let refs: Vec<&[f64]> = (0..d).map(|_| u.as_slice()).collect();
        best = best.max(t.rank1_raw(&refs));
    }
    Ok(best)
}

/// M functional on (2,2,2,2): sweep u, resolve v as the top eigenvector
/// of `B(u)_{jl} = sum_{ik} u_i u_k A_{ijkl}`.
fn sweep_m_eig(t: &Tensor, resolution: usize) -> Result<f64> {
    let steps = 2.0 * PI / resolution as f64;
    let data = t.data();
    let mut best = f64::NEG_INFINITY;
    for a in 0..resolution {
        let u = circle_point(a as f64 * steps, None)?;
        let mut b = [0.0f64; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        b[j * 2 + l] += u[i] * u[k] * data[((i * 2 + j) * 2 + k) * 2 + l];
                    }
                }
            }
        }
        let sym = 0.5 * (b[1] + b[2]);
        b[1] = sym;
        b[2] = sym;
        let (lam, _) = top_eig_symmetric(2, &b)?;
        best = best.max(lam);
    }
    Ok(best)
}

/// C functional on (2,2,2): sweep v, resolve u = w(v)/|w(v)| in closed
/// form.
fn sweep_c_eig(t: &Tensor, resolution: usize) -> Result<f64> {
    let steps = 2.0 * PI / resolution as f64;
    let data = t.data();
    let mut best = f64::NEG_INFINITY;
    for a in 0..resolution {
        let v = circle_point(a as f64 * steps, None)?;
        let mut w = [0.0f64; 2];
        for i in 0..2 {
            let mut acc = 0.0;
            for j in 0..2 {
                for k in 0..2 {
                    acc += data[(i * 2 + j) * 2 + k] * v[j] * v[k];
                }
            }
            w[i] = acc;
        }
        best = best.max(l2_norm(&w));
    }
    Ok(best)
}

/// Exact matrix path: singular values via the Gram matrix, eigenvalue
/// functionals via the symmetric eigensolver.
fn matrix_oracle(t: &Tensor, f: SpectralFunctional) -> Result<f64> {
    let dims = t.shape().dims();
    let (m, n) = (dims[0], dims[1]);
    let a = t.data();
    match f {
        SpectralFunctional::L2Singular | SpectralFunctional::LdSingular => {
            // ld = l2 at d = 2. sigma_max via the smaller Gram matrix.
            let (sz, big) = if n <= m { (n, m) } else { (m, n) };
            let mut gram = vec![0.0; sz * sz];
            for r in 0..big {
                for p in 0..sz {
                    for q in p..sz {
                        let (x, y) = if n <= m {
                            (a[r * n + p], a[r * n + q])
                        } else {
                            (a[p * n + r], a[q * n + r])
                        };
                        gram[p * sz + q] += x * y;
                    }
                }
            }
            for p in 0..sz {
                for q in p + 1..sz {
                    gram[q * sz + p] = gram[p * sz + q];
                }
            }
            let (lam, _) = top_eig_symmetric(sz, &gram)?;
            Ok(lam.max(0.0).sqrt())
        }
        SpectralFunctional::ZEig | SpectralFunctional::HEig => {
            if m != n {
                return Err(Error::UnsupportedOracle(format!(
                    "eigenvalue oracle needs a square matrix, got {dims:?}"
                )));
            }
            let (lam, _) = top_eig_symmetric(n, a)?;
            Ok(lam)
        }
        _ => Err(Error::UnsupportedOracle(format!(
            "{f} has no matrix form"
        ))),
    }
}

/// Odometer over `len(angles)` digits of base `resolution`.
fn bump(angles: &mut [usize], resolution: usize) -> bool {
    for a in angles.iter_mut().rev() {
        *a += 1;
        if *a < resolution {
            return true;
        }
        *a = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{sample, SeedSpec, TensorClass};
    use crate::tensor::Shape;

    #[test]
    fn rank1_indicator_is_found() {
        let mut data = vec![0.0; 8];
        data[0] = 1.0;
        let t = Tensor::new(Shape::new(vec![2, 2, 2]).unwrap(), data).unwrap();
        let v = grid_oracle(&t, SpectralFunctional::L2Singular, 720).unwrap();
        assert!((v - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn eigen_vs_singular_distinction_on_matrices() {
        let t = Tensor::new(Shape::new(vec![2, 2]).unwrap(), vec![1.0, 0.0, 0.0, -5.0]).unwrap();
        let z = grid_oracle(&t, SpectralFunctional::ZEig, 360).unwrap();
        let s = grid_oracle(&t, SpectralFunctional::L2Singular, 360).unwrap();
        assert!((z - 1.0).abs() < 1e-12);
        assert!((s - 5.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_self_consistency() {
        for seed in 0..10u64 {
            let t = sample(&TensorClass::Iid { dims: vec![2, 2, 2] }, SeedSpec::new(55, seed))
                .unwrap();
            let coarse = grid_oracle(&t, SpectralFunctional::L2Singular, 360).unwrap();
            let fine = grid_oracle(&t, SpectralFunctional::L2Singular, 720).unwrap();
            let tol = grid_tolerance(&t, SpectralFunctional::L2Singular, 360);
            assert!(fine >= coarse - 1e-12);
            assert!((fine - coarse).abs() <= 2.0 * tol);
        }
    }

    #[test]
    fn unsupported_instances_are_rejected() {
        let t = sample(&TensorClass::Iid { dims: vec![3, 3, 3] }, SeedSpec::new(56, 0)).unwrap();
        assert!(matches!(
            grid_oracle(&t, SpectralFunctional::L2Singular, 360),
            Err(Error::UnsupportedOracle(_))
        ));
        let t5 = sample(&TensorClass::Iid { dims: vec![2; 5] }, SeedSpec::new(56, 1)).unwrap();
        assert!(grid_oracle(&t5, SpectralFunctional::L2Singular, 360).is_err());
    }
}
