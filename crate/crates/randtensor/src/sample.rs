//! Gaussian random tensor ensembles.
//!
//! Four sampling schemes:
//! - `Iid`: every entry N(0,1).
//! - `Symmetric`: one draw per permutation orbit of the index tuple with
//!   variance `d / card(orbit)`, copied bit-exactly across the orbit. For
//!   d = 2 this is the GOE (diagonal variance 2, off-diagonal 1).
//! - `PartiallySymmetric`: shape (m,n,m,n) with the four-way identity
//!   `A_ijkl = A_kjil = A_ilkj = A_klij`; one draw per orbit with variance
//!   `2 / card(orbit)`.
//! - `Piezoelectric`: shape (n,n,n) with `A_ijk = A_ikj`; off-diagonal
//!   pairs (j < k) are N(0,1), diagonal entries (j = k) are N(0,2).
//!
//! Sampling is deterministic in the `SeedSpec`: the same (class, seed)
//! yields a bit-identical tensor. Standard normals come from the Marsaglia
//! polar method on top of a ChaCha stream, not from a table-based sampler,
//! so the calibration tests see the exact target variances.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{flat_index, Shape, Tensor};

/// One of the four sampling schemes, with its class parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TensorClass {
    Iid { dims: Vec<usize> },
    Symmetric { d: usize, n: usize },
    PartiallySymmetric { m: usize, n: usize },
    Piezoelectric { n: usize },
}

impl TensorClass {
    /// The shape this class samples; validates the class parameters.
    pub fn shape(&self) -> Result<Shape> {
        match self {
            TensorClass::Iid { dims } => Shape::new(dims.clone()),
            TensorClass::Symmetric { d, n } => {
                if *d < 2 {
                    return Err(Error::InvalidParameter(format!(
                        "symmetric class needs d >= 2, got {d}"
                    )));
                }
                Shape::new(vec![*n; *d])
            }
            TensorClass::PartiallySymmetric { m, n } => Shape::new(vec![*m, *n, *m, *n]),
            TensorClass::Piezoelectric { n } => Shape::new(vec![*n; 3]),
        }
    }

    /// Stable lowercase label used in CSV output and CLI flags.
    pub fn label(&self) -> &'static str {
        match self {
            TensorClass::Iid { .. } => "iid",
            TensorClass::Symmetric { .. } => "symmetric",
            TensorClass::PartiallySymmetric { .. } => "partially-symmetric",
            TensorClass::Piezoelectric { .. } => "piezoelectric",
        }
    }
}

/// Master seed plus substream index; addresses one independent random
/// stream of a seeded experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec { master_seed, stream_index }
    }

    /// Mixes (master, index) into the substream seed. For a fixed master
    /// the map is injective in the index: index -> index * odd-constant is
    /// a bijection on u64, xor with the hashed master keeps it one, and
    /// the SplitMix64 finalizer is a bijection.
    pub fn substream_seed(&self) -> u64 {
        let h = splitmix64(self.master_seed);
        splitmix64(h ^ self.stream_index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// SplitMix64 finalizer (a bijection on u64).
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Substream for trial `trial_index` of an experiment seeded by
/// `master_seed`.
pub fn derive_substream(master_seed: u64, trial_index: u64) -> SeedSpec {
    SeedSpec::new(master_seed, trial_index)
}

/// Standard normal source: Marsaglia polar method over ChaCha8 uniforms,
/// with the usual spare-value cache.
pub struct NormalSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalSource {
    pub fn new(seed: SeedSpec) -> Self {
        NormalSource {
            rng: ChaCha8Rng::seed_from_u64(seed.substream_seed()),
            spare: None,
        }
    }

    /// Uniform in [0, 1) with 53 random bits.
    fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// One N(0,1) draw.
    pub fn next_standard(&mut self) -> f64 {
        if let Some(x) = self.spare.take() {
            return x;
        }
        loop {
            let u = 2.0 * self.next_uniform() - 1.0;
            let v = 2.0 * self.next_uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * m);
                return u * m;
            }
        }
    }

    /// One N(0, sd^2) draw.
    pub fn next_scaled(&mut self, sd: f64) -> f64 {
        sd * self.next_standard()
    }
}

/// Number of distinct permutations of an index tuple:
/// `d! / prod_v (multiplicity of v)!`. Saturates at u64::MAX, which is
/// unreachable for any tensor that fits in memory.
pub fn multiset_orbit_card(index_tuple: &[usize]) -> u64 {
    // Multinomial as a product of binomials: prod_v C(running_total, m_v).
    let mut sorted = index_tuple.to_vec();
    sorted.sort_unstable();
    let mut card: u128 = 1;
    let mut total = 0u128;
    let mut i = 0;
    while i < sorted.len() {
        let mut mult = 1u128;
        while i + 1 < sorted.len() && sorted[i + 1] == sorted[i] {
            mult += 1;
            i += 1;
        }
        i += 1;
        // C(total + mult, mult), multiplicative form.
        for k in 1..=mult {
            total += 1;
            card = match card.checked_mul(total) {
                Some(c) => c / k,
                None => return u64::MAX,
            };
        }
    }
    u64::try_from(card).unwrap_or(u64::MAX)
}

/// The partial-symmetry orbit of (i,j,k,l): the distinct tuples among
/// {(i,j,k,l), (k,j,i,l), (i,l,k,j), (k,l,i,j)}, sorted. Size 1, 2, or 4.
pub fn partial_sym_orbit(i: usize, j: usize, k: usize, l: usize) -> Vec<[usize; 4]> {
    let mut orbit = vec![[i, j, k, l], [k, j, i, l], [i, l, k, j], [k, l, i, j]];
    orbit.sort_unstable();
    orbit.dedup();
    orbit
}

/// All distinct permutations of `tuple`, each exactly once, in
/// lexicographic order (classic next-permutation on the sorted tuple).
fn distinct_permutations(tuple: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = tuple.to_vec();
    cur.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.push(cur.clone());
        // Find the rightmost ascent.
        let Some(i) = (0..cur.len() - 1).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}

/// Draws one tensor of the given class. Deterministic in (class, seed).
pub fn sample(class: &TensorClass, seed: SeedSpec) -> Result<Tensor> {
    let shape = class.shape()?;
    let mut src = NormalSource::new(seed);
    let mut data = vec![0.0; shape.element_count()];
    match class {
        TensorClass::Iid { .. } => {
            for x in data.iter_mut() {
                *x = src.next_standard();
            }
        }
        TensorClass::Symmetric { d, n } => {
            // One draw per nondecreasing representative, variance d/card,
            // copied bit-exactly to every permutation of the tuple.
            let mut rep = vec![0usize; *d];
            loop {
                let card = multiset_orbit_card(&rep);
                let sd = (*d as f64 / card as f64).sqrt();
                let x = src.next_scaled(sd);
                for perm in distinct_permutations(&rep) {
                    data[flat_index(&shape, &perm)?] = x;
                }
                if !next_nondecreasing(&mut rep, *n) {
                    break;
                }
            }
        }
        TensorClass::PartiallySymmetric { m, n } => {
            for i in 0..*m {
                for j in 0..*n {
                    for k in 0..*m {
                        for l in 0..*n {
                            let orbit = partial_sym_orbit(i, j, k, l);
                            if orbit[0] != [i, j, k, l] {
                                continue; // not the representative
                            }
                            let sd = (2.0 / orbit.len() as f64).sqrt();
                            let x = src.next_scaled(sd);
                            for t in &orbit {
                                data[flat_index(&shape, t)?] = x;
                            }
                        }
                    }
                }
            }
        }
        TensorClass::Piezoelectric { n } => {
            for i in 0..*n {
                for j in 0..*n {
                    for k in j..*n {
                        if j == k {
                            data[flat_index(&shape, &[i, j, j])?] = src.next_scaled(std::f64::consts::SQRT_2);
                        } else {
                            let x = src.next_standard();
                            data[flat_index(&shape, &[i, j, k])?] = x;
                            data[flat_index(&shape, &[i, k, j])?] = x;
                        }
                    }
                }
            }
        }
    }
    Tensor::new(shape, data)
}

/// Advances `rep` to the next nondecreasing tuple over {0..n-1} in
/// lexicographic order; false when exhausted.
fn next_nondecreasing(rep: &mut [usize], n: usize) -> bool {
    for j in (0..rep.len()).rev() {
        if rep[j] + 1 < n {
            let v = rep[j] + 1;
            for r in rep[j..].iter_mut() {
                *r = v;
            }
            return true;
        }
    }
    false
}
