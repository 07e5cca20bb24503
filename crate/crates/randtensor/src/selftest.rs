//! Standalone property suites behind the `selftest` CLI subcommand.
//!
//! Three checks, each over freshly drawn random inputs:
//! - `product-difference-bound`: for unit-l2 tuples,
//!   `sum (prod u - prod u')^2 <= sum_j ||u_j - u_j'||^2`,
//!   with the left side evaluated by naive enumeration.
//! - `lp-product-difference-bound`: for unit-ld tuples (d in {3,4}) the
//!   same left side against the weighted right side
//!   `2^(d-1) sum_j prod_{i != j} n_i^((d-2)/d) ||u_j - u_j'||^2`.
//! - `spectral-norm-lipschitz`: on (2,2,2) pairs via the grid oracle,
//!   `|rho(A) - rho(B)| <= ||A - B||_F + 2 * grid tolerance`.

use crate::grid::{grid_oracle, grid_tolerance};
use crate::sample::{NormalSource, SeedSpec};
use crate::solve::SpectralFunctional;
use crate::tensor::{lp_norm, Shape, Tensor};

/// Outcome of one property suite. `worst_slack` is the smallest observed
/// margin `rhs - lhs` (scaled); negative beyond tolerance means failure.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub worst_slack: f64,
    pub pass: bool,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "check {}: {} (cases={}, worst_slack={:.3e})",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.cases,
            self.worst_slack
        )
    }
}

const SLACK_TOL: f64 = 1e-12;

fn unit_vector(src: &mut NormalSource, n: usize, p: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| src.next_standard()).collect();
        let norm = lp_norm(&v, p).unwrap();
        if norm > 1e-300 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `sum over the index box of (prod_j u_{j,i_j} - prod_j u'_{j,i_j})^2`
/// by direct enumeration.
fn product_difference_sum(us: &[Vec<f64>], vs: &[Vec<f64>]) -> f64 {
    let dims: Vec<usize> = us.iter().map(|u| u.len()).collect();
    let d = dims.len();
    let mut idx = vec![0usize; d];
    let total: usize = dims.iter().product();
    let mut acc = 0.0;
    for _ in 0..total {
        let mut pu = 1.0;
        let mut pv = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            pu *= us[j][i];
            pv *= vs[j][i];
        }
        acc += (pu - pv) * (pu - pv);
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < dims[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    acc
}

/// Unit-l2 tuples: the product-difference sum is bounded by the sum of
/// squared vector distances.
pub fn product_difference_bound(cases: usize, seed: u64) -> CheckOutcome {
    let mut src = NormalSource::new(SeedSpec::new(seed, 1));
    let mut draw_dim = {
        let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
        move |hi: usize| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            1 + (s >> 33) as usize % hi
        }
    };
    let mut worst = f64::INFINITY;
    for case in 0..cases {
        let d = 2 + case % 3; // 2, 3, 4
        let dims: Vec<usize> = (0..d).map(|_| draw_dim(6)).collect();
        let us: Vec<Vec<f64>> = dims.iter().map(|&n| unit_vector(&mut src, n, 2.0)).collect();
        let vs: Vec<Vec<f64>> = dims.iter().map(|&n| unit_vector(&mut src, n, 2.0)).collect();
        let lhs = product_difference_sum(&us, &vs);
        let rhs: f64 = us
            .iter()
            .zip(&vs)
            .map(|(u, v)| u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .sum();
        let slack = (rhs - lhs) / rhs.max(1.0);
        worst = worst.min(slack);
    }
    CheckOutcome {
        name: "product-difference-bound",
        cases,
        worst_slack: worst,
        pass: worst >= -SLACK_TOL,
    }
}

/// Unit-ld tuples (d = k in {3,4}): the product-difference sum against
/// the 2^(d-1)-weighted right side with factors `prod_{i!=j} n_i^((d-2)/d)`.
pub fn lp_product_difference_bound(cases: usize, seed: u64) -> CheckOutcome {
    let mut src = NormalSource::new(SeedSpec::new(seed, 2));
    let mut draw_dim = {
        let mut s = seed.wrapping_mul(0xD134_2543_DE82_EF95).wrapping_add(3);
        move |hi: usize| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            1 + (s >> 33) as usize % hi
        }
    };
    let mut worst = f64::INFINITY;
    for case in 0..cases {
        let d = 3 + case % 2; // 3, 4
        let dims: Vec<usize> = (0..d).map(|_| draw_dim(6)).collect();
        let p = d as f64;
        let us: Vec<Vec<f64>> = dims.iter().map(|&n| unit_vector(&mut src, n, p)).collect();
        let vs: Vec<Vec<f64>> = dims.iter().map(|&n| unit_vector(&mut src, n, p)).collect();
        let lhs = product_difference_sum(&us, &vs);
        let e = (p - 2.0) / p;
        let mut rhs = 0.0;
        for j in 0..d {
            let weight: f64 = dims
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, &n)| (n as f64).powf(e))
                .product();
            let dist2: f64 = us[j]
                .iter()
                .zip(&vs[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            rhs += weight * dist2;
        }
        rhs *= 2f64.powi(d as i32 - 1);
        let slack = (rhs - lhs) / rhs.max(1.0);
        worst = worst.min(slack);
    }
    CheckOutcome {
        name: "lp-product-difference-bound",
        cases,
        worst_slack: worst,
        pass: worst >= -SLACK_TOL,
    }
}

/// Spectral-norm Lipschitz continuity on (2,2,2) pairs via the grid
/// oracle: `|rho(A) - rho(B)| <= ||A - B||_F + 2 * grid_tolerance`.
pub fn spectral_norm_lipschitz(pairs: usize, resolution: usize, seed: u64) -> CheckOutcome {
    let shape = Shape::new(vec![2, 2, 2]).unwrap();
    let mut src = NormalSource::new(SeedSpec::new(seed, 3));
    let mut worst = f64::INFINITY;
    for _ in 0..pairs {
        let a_data: Vec<f64> = (0..8).map(|_| src.next_standard()).collect();
        let b_data: Vec<f64> = (0..8).map(|_| src.next_standard()).collect();
        let a = Tensor::new(shape.clone(), a_data.clone()).unwrap();
        let b = Tensor::new(shape.clone(), b_data.clone()).unwrap();
        let ra = grid_oracle(&a, SpectralFunctional::L2Singular, resolution).unwrap();
        let rb = grid_oracle(&b, SpectralFunctional::L2Singular, resolution).unwrap();
        let diff: Vec<f64> = a_data.iter().zip(&b_data).map(|(x, y)| x - y).collect();
        let fro = crate::tensor::l2_norm(&diff);
        let tol = grid_tolerance(&a, SpectralFunctional::L2Singular, resolution)
            .max(grid_tolerance(&b, SpectralFunctional::L2Singular, resolution));
        let rhs = fro + 2.0 * tol;
        let slack = (rhs - (ra - rb).abs()) / rhs.max(1.0);
        worst = worst.min(slack);
    }
    CheckOutcome {
        name: "spectral-norm-lipschitz",
        cases: pairs,
        worst_slack: worst,
        pass: worst >= -SLACK_TOL,
    }
}

/// The full suite at its standard sizes.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        product_difference_bound(10_000, seed),
        lp_product_difference_bound(10_000, seed),
        spectral_norm_lipschitz(100, 360, seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_at_reduced_size() {
        let a = product_difference_bound(500, 11);
        assert!(a.pass, "{a}");
        let b = lp_product_difference_bound(500, 11);
        assert!(b.pass, "{b}");
        let c = spectral_norm_lipschitz(10, 240, 11);
        assert!(c.pass, "{c}");
    }

    #[test]
    fn product_difference_sum_closed_form() {
        // For unit-l2 vectors the enumeration equals
        // 2 (1 - prod_j <u_j, u_j'>).
        let mut src = NormalSource::new(SeedSpec::new(5, 0));
        let us: Vec<Vec<f64>> = vec![
            unit_vector(&mut src, 3, 2.0),
            unit_vector(&mut src, 4, 2.0),
            unit_vector(&mut src, 2, 2.0),
        ];
        let vs: Vec<Vec<f64>> = vec![
            unit_vector(&mut src, 3, 2.0),
            unit_vector(&mut src, 4, 2.0),
            unit_vector(&mut src, 2, 2.0),
        ];
        let lhs = product_difference_sum(&us, &vs);
        let prod: f64 = us
            .iter()
            .zip(&vs)
            .map(|(u, v)| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>())
            .product();
        let want = 2.0 * (1.0 - prod);
        assert!((lhs - want).abs() <= 1e-12 * want.abs().max(1.0));
    }
}
