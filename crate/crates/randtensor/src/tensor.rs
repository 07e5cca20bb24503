//! Dense tensors with row-major storage, multilinear contractions, and
//! vector norms.
//!
//! A tensor of shape `(n_1, ..., n_d)` is stored as a flat `Vec<f64>` in
//! row-major order (last index fastest). All operations are pure; `Tensor`
//! and `VectorTuple` are immutable after construction and safe to share
//! across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a dense tensor: ordered dimensions `(n_1, ..., n_d)`, `d >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    /// Builds a shape, rejecting orders below 2, zero dimensions, and
    /// element counts that do not fit the address space (in bytes).
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidShape(format!(
                "order must be >= 2, got {}",
                dims.len()
            )));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("zero dimension in {dims:?}")));
        }
        let mut count: usize = 1;
        for &n in &dims {
            count = count
                .checked_mul(n)
                .ok_or_else(|| Error::InvalidShape(format!("element count overflow for {dims:?}")))?;
        }
        count
            .checked_mul(std::mem::size_of::<f64>())
            .ok_or_else(|| Error::InvalidShape(format!("byte size overflow for {dims:?}")))?;
        Ok(Shape { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Tensor order `d`.
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Total number of elements.
    pub fn element_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Dimensions joined by `x`, e.g. `4x9x16`.
    pub fn label(&self) -> String {
        self.dims
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }
}

/// Row-major flat offset of `multi_index` (last index fastest).
pub fn flat_index(shape: &Shape, multi_index: &[usize]) -> Result<usize> {
    let dims = shape.dims();
    if multi_index.len() != dims.len()
        || multi_index.iter().zip(dims).any(|(&i, &n)| i >= n)
    {
        return Err(Error::IndexOutOfRange {
            index: multi_index.to_vec(),
            dims: dims.to_vec(),
        });
    }
    let mut offset = 0usize;
    for (&i, &n) in multi_index.iter().zip(dims) {
        offset = offset * n + i;
    }
    Ok(offset)
}

/// Dense real tensor. Entries are finite 64-bit floats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Shape,
    data: Vec<f64>,
}

impl Tensor {
    /// Builds a tensor, rejecting length mismatches and non-finite entries.
    pub fn new(shape: Shape, data: Vec<f64>) -> Result<Self> {
        if data.len() != shape.element_count() {
            return Err(Error::ShapeMismatch(format!(
                "shape {:?} needs {} elements, got {}",
                shape.dims(),
                shape.element_count(),
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("tensor entry at offset {pos}")));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: Shape) -> Self {
        let data = vec![0.0; shape.element_count()];
        Tensor { shape, data }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, multi_index: &[usize]) -> Result<f64> {
        Ok(self.data[flat_index(&self.shape, multi_index)?])
    }

    /// Largest entry magnitude.
    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Frobenius norm: the l2 norm of the flat data.
    pub fn frobenius_norm(&self) -> f64 {
        l2_norm(&self.data)
    }

    /// The multilinear form `<A, u_1 (x) ... (x) u_d>`:
    /// `sum_{i_1..i_d} A_{i_1..i_d} prod_j u_{j,i_j}`.
    pub fn rank1_value(&self, u: &VectorTuple) -> Result<f64> {
        self.check_tuple(u, None)?;
        let refs: Vec<&[f64]> = u.vectors.iter().map(|v| v.as_slice()).collect();
        Ok(self.rank1_raw(&refs))
    }

    /// Contraction of every mode except `mode`: the vector `g` with
    /// `g_{i} = sum over the other indices of A * prod_{k != mode} u_{k,i_k}`.
    /// Satisfies `<g, u_mode> = rank1_value(A, u)`.
    pub fn contract_except(&self, u: &VectorTuple, mode: usize) -> Result<Vec<f64>> {
        let dims = self.shape.dims();
        if mode >= dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "mode {mode} out of range for order {}",
                dims.len()
            )));
        }
        self.check_tuple(u, Some(mode))?;
        let refs: Vec<&[f64]> = u.vectors.iter().map(|v| v.as_slice()).collect();
        Ok(self.contract_raw(&refs, mode))
    }

    /// Unchecked single-pass rank-1 contraction over raw slices; lengths
    /// must match the shape.
    pub(crate) fn rank1_raw(&self, vecs: &[&[f64]]) -> f64 {
        let dims = self.shape.dims();
        debug_assert_eq!(vecs.len(), dims.len());
        let mut idx = vec![0usize; dims.len()];
        let mut acc = 0.0;
        for &a in &self.data {
            let mut w = a;
            for (j, &i) in idx.iter().enumerate() {
                w *= vecs[j][i];
            }
            acc += w;
            increment(&mut idx, dims);
        }
        acc
    }

    /// Unchecked single-pass contraction of every mode except `mode` over
    /// raw slices; `vecs[mode]` is ignored and may have any length.
    pub(crate) fn contract_raw(&self, vecs: &[&[f64]], mode: usize) -> Vec<f64> {
        let dims = self.shape.dims();
        debug_assert_eq!(vecs.len(), dims.len());
        let mut idx = vec![0usize; dims.len()];
        let mut g = vec![0.0; dims[mode]];
        for &a in &self.data {
            let mut w = a;
            for (k, &i) in idx.iter().enumerate() {
                if k != mode {
                    w *= vecs[k][i];
                }
            }
            g[idx[mode]] += w;
            increment(&mut idx, dims);
        }
        g
    }

    fn check_tuple(&self, u: &VectorTuple, skip: Option<usize>) -> Result<()> {
        let dims = self.shape.dims();
        if u.vectors.len() != dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "vector tuple has {} modes, tensor has {}",
                u.vectors.len(),
                dims.len()
            )));
        }
        for (j, (v, &n)) in u.vectors.iter().zip(dims).enumerate() {
            if Some(j) != skip && v.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "mode {j}: vector length {} != dimension {n}",
                    v.len()
                )));
            }
        }
        Ok(())
    }
}

/// Row-major odometer: increment `idx` with last position fastest.
fn increment(idx: &mut [usize], dims: &[usize]) {
    for j in (0..idx.len()).rev() {
        idx[j] += 1;
        if idx[j] < dims[j] {
            return;
        }
        idx[j] = 0;
    }
}

/// One vector per tensor mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorTuple {
    vectors: Vec<Vec<f64>>,
}

impl VectorTuple {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        if vectors.len() < 2 {
            return Err(Error::ShapeMismatch(format!(
                "vector tuple needs >= 2 modes, got {}",
                vectors.len()
            )));
        }
        for (j, v) in vectors.iter().enumerate() {
            if v.is_empty() {
                return Err(Error::ShapeMismatch(format!("mode {j}: empty vector")));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("vector entry in mode {j}")));
            }
        }
        Ok(VectorTuple { vectors })
    }

    /// The same vector repeated over `d` modes (symmetric functionals).
    pub fn repeated(v: Vec<f64>, d: usize) -> Result<Self> {
        Self::new(vec![v; d])
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn matches(&self, shape: &Shape) -> bool {
        self.vectors.len() == shape.order()
            && self
                .vectors
                .iter()
                .zip(shape.dims())
                .all(|(v, &n)| v.len() == n)
    }

    /// Largest deviation of any mode vector from the unit lp sphere.
    pub fn max_unit_deviation(&self, p: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for v in &self.vectors {
            worst = worst.max((lp_norm(v, p)? - 1.0).abs());
        }
        Ok(worst)
    }
}

/// lp norm `(sum |v_i|^p)^(1/p)` for `p >= 1`, computed with max-scaling to
/// avoid overflow and underflow.
pub fn lp_norm(v: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("lp norm needs p >= 1, got {p}")));
    }
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(v.iter().map(|x| x.abs()).sum());
    }
    if p == 2.0 {
        return Ok(l2_norm(v));
    }
    let sum: f64 = v.iter().map(|x| (x.abs() / m).powf(p)).sum();
    Ok(m * sum.powf(1.0 / p))
}

/// l2 norm with max-scaling.
pub fn l2_norm(v: &[f64]) -> f64 {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let sum: f64 = v
        .iter()
        .map(|x| {
            let r = x / m;
            r * r
        })
        .sum();
    m * sum.sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(dims: &[usize]) -> Shape {
        Shape::new(dims.to_vec()).unwrap()
    }

    /// Independent naive oracle: rank-1 value of a (2,2,2) tensor by three
    /// explicit nested loops and explicit flat offsets.
    fn naive_rank1_222(data: &[f64], u: &[f64], v: &[f64], w: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    acc += data[4 * i + 2 * j + k] * u[i] * v[j] * w[k];
                }
            }
        }
        acc
    }

    fn pseudo_random(len: usize, seed: u64) -> Vec<f64> {
        // Tiny deterministic LCG; test-only, independent of the samplers.
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        (0..len)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect()
    }

    #[test]
    fn flat_index_origin_and_last() {
        let s = shape(&[2, 3, 4]);
        assert_eq!(flat_index(&s, &[0, 0, 0]).unwrap(), 0);
        assert_eq!(flat_index(&s, &[1, 2, 3]).unwrap(), 23);
    }

    #[test]
    fn flat_index_matches_row_major_enumeration() {
        // Oracle: enumerate all 24 indices in row-major order and read the
        // position of each from the enumeration itself.
        let s = shape(&[2, 3, 4]);
        let mut enumerated = Vec::new();
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..4 {
                    enumerated.push(vec![i, j, k]);
                }
            }
        }
        assert_eq!(enumerated.iter().position(|ix| ix == &[0, 1, 2]), Some(6));
        for (pos, ix) in enumerated.iter().enumerate() {
            assert_eq!(flat_index(&s, ix).unwrap(), pos);
        }
    }

    #[test]
    fn flat_index_rejects_out_of_range() {
        let s = shape(&[2, 3, 4]);
        assert!(flat_index(&s, &[2, 0, 0]).is_err());
        assert!(flat_index(&s, &[0, 0]).is_err());
    }

    #[test]
    fn shape_rejects_degenerate() {
        assert!(Shape::new(vec![3]).is_err());
        assert!(Shape::new(vec![2, 0]).is_err());
        assert!(Shape::new(vec![usize::MAX, 8]).is_err());
    }

    #[test]
    fn tensor_rejects_nan_and_length_mismatch() {
        assert!(Tensor::new(shape(&[2, 2]), vec![0.0; 3]).is_err());
        assert!(Tensor::new(shape(&[2, 2]), vec![0.0, 1.0, f64::NAN, 2.0]).is_err());
        assert!(Tensor::new(shape(&[2, 2]), vec![0.0, 1.0, f64::INFINITY, 2.0]).is_err());
    }

    #[test]
    fn rank1_zero_tensor_and_indicator() {
        let z = Tensor::zeros(shape(&[2, 2, 2]));
        let u = VectorTuple::new(vec![vec![0.3, 0.7]; 3]).unwrap();
        assert_eq!(z.rank1_value(&u).unwrap(), 0.0);

        let mut data = vec![0.0; 8];
        data[0] = 1.0; // e1 (x) e1 (x) e1
        let t = Tensor::new(shape(&[2, 2, 2]), data).unwrap();
        let e1 = VectorTuple::new(vec![vec![1.0, 0.0]; 3]).unwrap();
        assert_eq!(t.rank1_value(&e1).unwrap(), 1.0);
    }

    #[test]
    fn rank1_matches_naive_loops() {
        let data = pseudo_random(8, 7);
        let t = Tensor::new(shape(&[2, 2, 2]), data.clone()).unwrap();
        let u = pseudo_random(2, 11);
        let v = pseudo_random(2, 13);
        let w = pseudo_random(2, 17);
        let tuple = VectorTuple::new(vec![u.clone(), v.clone(), w.clone()]).unwrap();
        let got = t.rank1_value(&tuple).unwrap();
        let want = naive_rank1_222(&data, &u, &v, &w);
        assert!((got - want).abs() <= 1e-13 * want.abs().max(1.0));
    }

    #[test]
    fn contract_except_zero_and_indicator() {
        let z = Tensor::zeros(shape(&[2, 2, 2]));
        let u = VectorTuple::new(vec![vec![0.5, 0.5]; 3]).unwrap();
        assert_eq!(z.contract_except(&u, 0).unwrap(), vec![0.0, 0.0]);

        let mut data = vec![0.0; 8];
        data[0] = 1.0;
        let t = Tensor::new(shape(&[2, 2, 2]), data).unwrap();
        let e1 = VectorTuple::new(vec![vec![1.0, 0.0]; 3]).unwrap();
        assert_eq!(t.contract_except(&e1, 0).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn contract_except_matches_naive_loops() {
        // 2x3x2 tensor, contract modes 1 and 2, leaving mode 0.
        let data = pseudo_random(12, 23);
        let t = Tensor::new(shape(&[2, 3, 2]), data.clone()).unwrap();
        let v = pseudo_random(3, 29);
        let w = pseudo_random(2, 31);
        let tuple =
            VectorTuple::new(vec![vec![1.0, 1.0], v.clone(), w.clone()]).unwrap();
        let g = t.contract_except(&tuple, 0).unwrap();
        for i in 0..2 {
            let mut want = 0.0;
            for j in 0..3 {
                for k in 0..2 {
                    want += data[6 * i + 2 * j + k] * v[j] * w[k];
                }
            }
            assert!((g[i] - want).abs() <= 1e-13 * want.abs().max(1.0));
        }
    }

    #[test]
    fn contract_dot_identity() {
        let data = pseudo_random(24, 41);
        let t = Tensor::new(shape(&[2, 3, 4]), data).unwrap();
        let tuple = VectorTuple::new(vec![
            pseudo_random(2, 43),
            pseudo_random(3, 47),
            pseudo_random(4, 53),
        ])
        .unwrap();
        let r = t.rank1_value(&tuple).unwrap();
        for mode in 0..3 {
            let g = t.contract_except(&tuple, mode).unwrap();
            let d = dot(&g, &tuple.vectors()[mode]);
            assert!((d - r).abs() <= 1e-12 * r.abs().max(1.0), "mode {mode}: {d} vs {r}");
        }
    }

    #[test]
    fn rank1_is_linear_in_tensor() {
        let a = pseudo_random(8, 61);
        let b = pseudo_random(8, 67);
        let (alpha, beta) = (0.37, -1.25);
        let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
        let s = shape(&[2, 2, 2]);
        let ta = Tensor::new(s.clone(), a).unwrap();
        let tb = Tensor::new(s.clone(), b).unwrap();
        let tc = Tensor::new(s, combo).unwrap();
        let u = VectorTuple::new(vec![
            pseudo_random(2, 71),
            pseudo_random(2, 73),
            pseudo_random(2, 79),
        ])
        .unwrap();
        let lhs = tc.rank1_value(&u).unwrap();
        let rhs = alpha * ta.rank1_value(&u).unwrap() + beta * tb.rank1_value(&u).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn lp_norm_analytic_values() {
        assert_eq!(lp_norm(&[3.0, 4.0], 2.0).unwrap(), 5.0);
        let got = lp_norm(&[1.0, 1.0, 1.0], 3.0).unwrap();
        assert!((got - 3.0f64.powf(1.0 / 3.0)).abs() < 1e-15);
        assert!(lp_norm(&[1.0], 0.5).is_err());
    }

    #[test]
    fn lp_norm_matches_log_domain_recomputation() {
        let v = pseudo_random(17, 83);
        let p = 1.5;
        let got = lp_norm(&v, p).unwrap();
        // Independent route: sum exp(p ln|v_i|) term by term in log space.
        let sum: f64 = v
            .iter()
            .filter(|x| **x != 0.0)
            .map(|x| (p * x.abs().ln()).exp())
            .sum();
        let want = ((1.0 / p) * sum.ln()).exp();
        assert!((got - want).abs() <= 1e-14 * want.abs());
    }

    #[test]
    fn frobenius_matches_l2_of_flat_data() {
        let ones = Tensor::new(shape(&[2, 2]), vec![1.0; 4]).unwrap();
        assert_eq!(ones.frobenius_norm(), 2.0);
        assert_eq!(Tensor::zeros(shape(&[3, 3])).frobenius_norm(), 0.0);

        let data = pseudo_random(30, 89);
        let t = Tensor::new(shape(&[5, 6]), data.clone()).unwrap();
        let want = lp_norm(&data, 2.0).unwrap();
        assert!((t.frobenius_norm() - want).abs() <= 1e-14 * want);
    }

    #[test]
    fn cauchy_schwarz_bound_on_rank1() {
        for seed in 0..20u64 {
            let data = pseudo_random(24, 100 + seed);
            let t = Tensor::new(shape(&[2, 3, 4]), data).unwrap();
            let vs = vec![
                pseudo_random(2, 200 + seed),
                pseudo_random(3, 300 + seed),
                pseudo_random(4, 400 + seed),
            ];
            let norms: f64 = vs.iter().map(|v| l2_norm(v)).product();
            let u = VectorTuple::new(vs).unwrap();
            let r = t.rank1_value(&u).unwrap().abs();
            assert!(r <= t.frobenius_norm() * norms * (1.0 + 1e-12));
        }
    }
}
