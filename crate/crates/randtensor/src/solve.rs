//! Multi-start iterative maximizers for the six spectral functionals.
//!
//! Each functional is the maximum of the multilinear form over a feasible
//! set of unit vectors:
//! - `L2Singular` / `LdSingular`: one vector per mode on the unit l2 / ld
//!   sphere (block ascent; each block update is an exact maximization,
//!   the ld update via the dual-norm maximizer).
//! - `ZEig` / `HEig`: a single vector repeated over all modes of a
//!   symmetric tensor, on the l2 / ld sphere (shifted power steps with a
//!   monotonicity guard: steps that would decrease the objective are
//!   rejected and the shift is escalated, so the objective sequence is
//!   non-decreasing by construction).
//! - `MEig`: `(u,v,u,v)` on a partially symmetric (m,n,m,n) tensor;
//!   alternating exact block maximization via the top eigenvector of the
//!   contracted n x n / m x m matrices.
//! - `CEig`: `(u,v,v)` on a piezoelectric-type (n,n,n) tensor; `u` is the
//!   normalized quadratic contraction, `v` the top eigenvector of the
//!   linear contraction.
//!
//! Every start yields a feasible point, so the best value over starts is
//! always a valid lower bound on the true functional. Start 0 is the
//! coordinate tuple at the largest-magnitude entry, which makes
//! `solve(L2Singular) >= max |A_entry|` unconditional; remaining starts
//! are uniform on the sphere. For matrices (d = 2) the singular-value
//! functionals use the exact Gram eigensolver path instead of iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::top_eig_symmetric;
use crate::sample::{NormalSource, SeedSpec};
use crate::tensor::{dot, l2_norm, lp_norm, Tensor, VectorTuple};

/// Objective / feasible-set selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralFunctional {
    L2Singular,
    LdSingular,
    ZEig,
    HEig,
    MEig,
    CEig,
}

impl SpectralFunctional {
    pub const ALL: [SpectralFunctional; 6] = [
        SpectralFunctional::L2Singular,
        SpectralFunctional::LdSingular,
        SpectralFunctional::ZEig,
        SpectralFunctional::HEig,
        SpectralFunctional::MEig,
        SpectralFunctional::CEig,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SpectralFunctional::L2Singular => "l2singular",
            SpectralFunctional::LdSingular => "ldsingular",
            SpectralFunctional::ZEig => "zeig",
            SpectralFunctional::HEig => "heig",
            SpectralFunctional::MEig => "meig",
            SpectralFunctional::CEig => "ceig",
        }
    }
}

impl std::fmt::Display for SpectralFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SpectralFunctional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2singular" => Ok(SpectralFunctional::L2Singular),
            "ldsingular" => Ok(SpectralFunctional::LdSingular),
            "zeig" => Ok(SpectralFunctional::ZEig),
            "heig" => Ok(SpectralFunctional::HEig),
            "meig" => Ok(SpectralFunctional::MEig),
            "ceig" => Ok(SpectralFunctional::CEig),
            other => Err(Error::InvalidParameter(format!(
                "unknown functional `{other}` (expected one of l2singular, ldsingular, zeig, heig, meig, ceig)"
            ))),
        }
    }
}

/// Multi-start solver configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative objective-change stopping threshold.
    pub tol: f64,
    /// Shift for the symmetric iterations; `None` selects the adaptive
    /// default `1 + d * max |A_entry|`.
    pub shift: Option<f64>,
    /// Seed for the random starts.
    pub rng: SeedSpec,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restarts: 32,
            max_iters: 500,
            tol: 1e-10,
            shift: None,
            rng: SeedSpec::new(0, 0),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidParameter("restarts must be >= 1".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", self.tol)));
        }
        if let Some(s) = self.shift {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::InvalidParameter(format!("shift must be >= 0, got {s}")));
            }
        }
        Ok(())
    }
}

/// Best value found, the maximizing vectors, and run diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub value: f64,
    pub argmax: VectorTuple,
    pub iterations_total: usize,
    pub converged: bool,
    pub degenerate_restarts: usize,
    pub functional: SpectralFunctional,
}

/// The unit-ld vector maximizing `<g, u>`: components proportional to
/// `sign(g_i) |g_i|^(1/(d-1))`, normalized in ld. Attains the dual norm
/// `||g||_{d/(d-1)}`.
pub fn dual_norm_maximizer(g: &[f64], d: usize) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dual norm needs d >= 2, got {d}")));
    }
    let ng = l2_norm(g);
    if ng == 0.0 {
        return Err(Error::InvalidParameter("dual norm maximizer of zero vector".into()));
    }
    if d == 2 {
        return Ok(g.iter().map(|x| x / ng).collect());
    }
    let e = 1.0 / (d as f64 - 1.0);
    // Scale by the max first; powf then stays in a safe range.
    let m = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut y: Vec<f64> = g
        .iter()
        .map(|x| {
            let r = (x.abs() / m).powf(e);
            if *x < 0.0 {
                -r
            } else {
                r
            }
        })
        .collect();
    let nd = lp_norm(&y, d as f64)?;
    for c in y.iter_mut() {
        *c /= nd;
    }
    Ok(y)
}

fn slice_refs(u: &[Vec<f64>]) -> Vec<&[f64]> {
    u.iter().map(|v| v.as_slice()).collect()
}

struct RunOutcome {
    vectors: Vec<Vec<f64>>,
    objective: f64,
    iterations: usize,
    converged: bool,
    /// Objective after every accepted update, for monotonicity checks.
    #[cfg_attr(not(test), allow(dead_code))]
    trace: Vec<f64>,
}

enum StartOutcome {
    Run(RunOutcome),
    Degenerate,
}

/// Computes the largest value of `f` on `t` over multiple starts.
pub fn solve(t: &Tensor, f: SpectralFunctional, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_compatible(t, f)?;
    let d = t.shape().order();

    // Exact Gram path for matrix singular values (ld = l2 when d = 2).
    if d == 2
        && matches!(
            f,
            SpectralFunctional::L2Singular | SpectralFunctional::LdSingular
        )
    {
        return matrix_sigma_max(t, f);
    }

    let mut starts = StartSource::new(t, f, cfg);
    let mut best: Option<RunOutcome> = None;
    let mut iterations_total = 0usize;
    let mut degenerate = 0usize;

    let mut slots: Vec<Vec<Vec<f64>>> = Vec::with_capacity(cfg.restarts);
    if f == SpectralFunctional::LdSingular {
        // Warm start from the l2 argmax rescaled onto the ld sphere, so
        // the ld value dominates the l2 value by construction.
        let l2 = solve(t, SpectralFunctional::L2Singular, cfg)?;
        iterations_total += l2.iterations_total;
        let mut warm = Vec::with_capacity(d);
        for v in l2.argmax.vectors() {
            let nd = lp_norm(v, d as f64)?;
            warm.push(v.iter().map(|x| x / nd).collect());
        }
        slots.push(warm);
    }
    while slots.len() < cfg.restarts {
        slots.push(starts.next_start());
    }

    for start in slots {
        let mut attempt = start;
        let mut retries = 0usize;
        loop {
            match run_start(t, f, cfg, attempt.clone())? {
                StartOutcome::Run(run) => {
                    iterations_total += run.iterations;
                    let better = match &best {
                        None => true,
                        // First attainer wins ties within 1e-12.
                        Some(b) => run.objective > b.objective + 1e-12 * b.objective.abs().max(1.0),
                    };
                    if better {
                        best = Some(run);
                    }
                    break;
                }
                StartOutcome::Degenerate => {
                    degenerate += 1;
                    retries += 1;
                    if retries > 4 {
                        break;
                    }
                    attempt = starts.next_start();
                }
            }
        }
    }

    let best = best.ok_or(Error::AllStartsDegenerate)?;
    let argmax = assemble_tuple(f, d, &best.vectors)?;
    let value = t.rank1_value(&argmax)?;
    Ok(SolveResult {
        value,
        argmax,
        iterations_total,
        converged: best.converged,
        degenerate_restarts: degenerate,
        functional: f,
    })
}

/// Rejects tensors whose shape or symmetry does not match the functional.
fn check_compatible(t: &Tensor, f: SpectralFunctional) -> Result<()> {
    let dims = t.shape().dims();
    match f {
        SpectralFunctional::L2Singular | SpectralFunctional::LdSingular => Ok(()),
        SpectralFunctional::ZEig | SpectralFunctional::HEig => {
            if dims.iter().any(|&n| n != dims[0]) {
                return Err(Error::IncompatibleFunctional(format!(
                    "{f} needs a cubical shape, got {dims:?}"
                )));
            }
            verify_full_symmetry(t)
        }
        SpectralFunctional::MEig => {
            if dims.len() != 4 || dims[0] != dims[2] || dims[1] != dims[3] {
                return Err(Error::IncompatibleFunctional(format!(
                    "meig needs shape (m,n,m,n), got {dims:?}"
                )));
            }
            verify_partial_symmetry(t)
        }
        SpectralFunctional::CEig => {
            if dims.len() != 3 || dims.iter().any(|&n| n != dims[0]) {
                return Err(Error::IncompatibleFunctional(format!(
                    "ceig needs shape (n,n,n), got {dims:?}"
                )));
            }
            verify_last_two_symmetry(t)
        }
    }
}

fn sym_tol(t: &Tensor) -> f64 {
    1e-12 * t.max_abs_entry().max(1.0)
}

fn verify_full_symmetry(t: &Tensor) -> Result<()> {
    let dims = t.shape().dims();
    let tol = sym_tol(t);
    let d = dims.len();
    let mut idx = vec![0usize; d];
    for flat in 0..t.shape().element_count() {
        let mut rep = idx.clone();
        rep.sort_unstable();
        let a = t.data()[flat];
        let b = t.get(&rep)?;
        if (a - b).abs() > tol {
            return Err(Error::IncompatibleFunctional(format!(
                "tensor is not symmetric at {idx:?}: {a} vs {b}"
            )));
        }
        advance(&mut idx, dims);
    }
    Ok(())
}

fn verify_partial_symmetry(t: &Tensor) -> Result<()> {
    let dims = t.shape().dims();
    let (m, n) = (dims[0], dims[1]);
    let tol = sym_tol(t);
    for i in 0..m {
        for j in 0..n {
            for k in 0..m {
                for l in 0..n {
                    let a = t.get(&[i, j, k, l])?;
                    for other in [[k, j, i, l], [i, l, k, j]] {
                        let b = t.get(&other)?;
                        if (a - b).abs() > tol {
                            return Err(Error::IncompatibleFunctional(format!(
                                "tensor is not partially symmetric at ({i},{j},{k},{l})"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn verify_last_two_symmetry(t: &Tensor) -> Result<()> {
    let n = t.shape().dims()[0];
    let tol = sym_tol(t);
    for i in 0..n {
        for j in 0..n {
            for k in j + 1..n {
                let a = t.get(&[i, j, k])?;
                let b = t.get(&[i, k, j])?;
                if (a - b).abs() > tol {
                    return Err(Error::IncompatibleFunctional(format!(
                        "tensor is not symmetric in its last two modes at ({i},{j},{k})"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn advance(idx: &mut [usize], dims: &[usize]) {
    for j in (0..idx.len()).rev() {
        idx[j] += 1;
        if idx[j] < dims[j] {
            return;
        }
        idx[j] = 0;
    }
}

/// Start generator: the coordinate tuple at the largest entry first, then
/// uniform-on-sphere random starts from per-restart substreams.
struct StartSource<'a> {
    t: &'a Tensor,
    f: SpectralFunctional,
    norm_p: f64,
    issued: usize,
    seed: u64,
}

impl<'a> StartSource<'a> {
    fn new(t: &'a Tensor, f: SpectralFunctional, cfg: &SolverConfig) -> Self {
        let d = t.shape().order() as f64;
        let norm_p = match f {
            SpectralFunctional::LdSingular | SpectralFunctional::HEig => d,
            _ => 2.0,
        };
        StartSource {
            t,
            f,
            norm_p,
            issued: 0,
            seed: cfg.rng.substream_seed(),
        }
    }

    /// Which vectors a start consists of, per functional: every mode for
    /// the singular-value functionals, one shared vector for Z/H, (u,v)
    /// for M and C.
    fn vector_dims(&self) -> Vec<usize> {
        let dims = self.t.shape().dims();
        match self.f {
            SpectralFunctional::L2Singular | SpectralFunctional::LdSingular => dims.to_vec(),
            SpectralFunctional::ZEig | SpectralFunctional::HEig => vec![dims[0]],
            SpectralFunctional::MEig => vec![dims[0], dims[1]],
            SpectralFunctional::CEig => vec![dims[0], dims[0]],
        }
    }

    fn next_start(&mut self) -> Vec<Vec<f64>> {
        let issued = self.issued;
        self.issued += 1;
        if issued == 0 {
            return self.coordinate_start();
        }
        let mut src = NormalSource::new(SeedSpec::new(self.seed, issued as u64));
        self.vector_dims()
            .iter()
            .map(|&n| loop {
                let v: Vec<f64> = (0..n).map(|_| src.next_standard()).collect();
                let norm = lp_norm(&v, self.norm_p).unwrap_or(0.0);
                if norm > 1e-300 {
                    break v.into_iter().map(|x| x / norm).collect();
                }
            })
            .collect()
    }

    fn coordinate_start(&self) -> Vec<Vec<f64>> {
        let dims = self.t.shape().dims();
        // Multi-index of the largest-magnitude entry.
        let mut best = (0usize, 0.0f64);
        for (pos, &x) in self.t.data().iter().enumerate() {
            if x.abs() > best.1 {
                best = (pos, x.abs());
            }
        }
        let mut rem = best.0;
        let mut idx = vec![0usize; dims.len()];
        for j in (0..dims.len()).rev() {
            idx[j] = rem % dims[j];
            rem /= dims[j];
        }
        let unit = |n: usize, i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        match self.f {
            SpectralFunctional::L2Singular | SpectralFunctional::LdSingular => idx
                .iter()
                .zip(dims)
                .map(|(&i, &n)| unit(n, i))
                .collect(),
            SpectralFunctional::ZEig | SpectralFunctional::HEig => {
                // Largest-magnitude diagonal entry.
                let n = dims[0];
                let mut k_best = (0usize, -1.0f64);
                for k in 0..n {
                    let v = self.t.get(&vec![k; dims.len()]).unwrap_or(0.0).abs();
                    if v > k_best.1 {
                        k_best = (k, v);
                    }
                }
                vec![unit(n, k_best.0)]
            }
            SpectralFunctional::MEig => vec![unit(dims[0], idx[0]), unit(dims[1], idx[1])],
            SpectralFunctional::CEig => vec![unit(dims[0], idx[0]), unit(dims[0], idx[1])],
        }
    }
}

fn assemble_tuple(f: SpectralFunctional, d: usize, vectors: &[Vec<f64>]) -> Result<VectorTuple> {
    match f {
        SpectralFunctional::L2Singular | SpectralFunctional::LdSingular => {
            VectorTuple::new(vectors.to_vec())
        }
        SpectralFunctional::ZEig | SpectralFunctional::HEig => {
            VectorTuple::repeated(vectors[0].clone(), d)
        }
        SpectralFunctional::MEig => VectorTuple::new(vec![
            vectors[0].clone(),
            vectors[1].clone(),
            vectors[0].clone(),
            vectors[1].clone(),
        ]),
        SpectralFunctional::CEig => VectorTuple::new(vec![
            vectors[0].clone(),
            vectors[1].clone(),
            vectors[1].clone(),
        ]),
    }
}

fn run_start(
    t: &Tensor,
    f: SpectralFunctional,
    cfg: &SolverConfig,
    start: Vec<Vec<f64>>,
) -> Result<StartOutcome> {
    match f {
        SpectralFunctional::L2Singular => Ok(run_block_ascent(t, cfg, start, false)),
        SpectralFunctional::LdSingular => run_block_ascent_ld(t, cfg, start),
        SpectralFunctional::ZEig => Ok(run_shifted_symmetric(t, cfg, start, false)),
        SpectralFunctional::HEig => Ok(run_shifted_symmetric(t, cfg, start, true)),
        SpectralFunctional::MEig => run_alternating_m(t, cfg, start),
        SpectralFunctional::CEig => run_alternating_c(t, cfg, start),
    }
}

/// Higher-order power method: cyclically replace each mode vector by its
/// normalized contraction. Each block update is the exact maximizer over
/// that mode, so the objective never decreases.
fn run_block_ascent(
    t: &Tensor,
    cfg: &SolverConfig,
    mut u: Vec<Vec<f64>>,
    _ld: bool,
) -> StartOutcome {
    let d = t.shape().order();
    let mut last = t.rank1_raw(&slice_refs(&u));
    let mut trace = vec![last];
    let mut converged = false;
    let mut iters = 0;
    'outer: for it in 1..=cfg.max_iters {
        iters = it;
        let mut fcur = last;
        for j in 0..d {
            let g = t.contract_raw(&slice_refs(&u), j);
            let ng = l2_norm(&g);
            if ng < f64::MIN_POSITIVE {
                return StartOutcome::Degenerate;
            }
            u[j] = g.iter().map(|x| x / ng).collect();
            fcur = ng;
            trace.push(fcur);
        }
        if (fcur - last).abs() <= cfg.tol * fcur.abs().max(1.0) {
            converged = true;
            last = fcur;
            break 'outer;
        }
        last = fcur;
    }
    StartOutcome::Run(RunOutcome {
        vectors: u,
        objective: last,
        iterations: iters,
        converged,
        trace,
    })
}

/// Block ascent on the ld spheres: each mode update is the dual-norm
/// maximizer of the contraction, attaining `||g||_{d/(d-1)}`.
fn run_block_ascent_ld(
    t: &Tensor,
    cfg: &SolverConfig,
    mut u: Vec<Vec<f64>>,
) -> Result<StartOutcome> {
    let d = t.shape().order();
    let mut last = t.rank1_raw(&slice_refs(&u));
    let mut trace = vec![last];
    let mut converged = false;
    let mut iters = 0;
    'outer: for it in 1..=cfg.max_iters {
        iters = it;
        let mut fcur = last;
        for j in 0..d {
            let g = t.contract_raw(&slice_refs(&u), j);
            if l2_norm(&g) < f64::MIN_POSITIVE {
                return Ok(StartOutcome::Degenerate);
            }
            u[j] = dual_norm_maximizer(&g, d)?;
            fcur = dot(&g, &u[j]);
            trace.push(fcur);
        }
        if (fcur - last).abs() <= cfg.tol * fcur.abs().max(1.0) {
            converged = true;
            last = fcur;
            break 'outer;
        }
        last = fcur;
    }
    Ok(StartOutcome::Run(RunOutcome {
        vectors: u,
        objective: last,
        iterations: iters,
        converged,
        trace,
    }))
}

/// Gradient of the symmetric form in one mode: `c_i = <A, e_i (x) u ...>`.
fn symmetric_contraction(t: &Tensor, u: &[f64]) -> Vec<f64> {
    let d = t.shape().order();
    let vecs: Vec<&[f64]> = (0..d).map(|_| u).collect();
    t.contract_raw(&vecs, 0)
}

/// Shifted symmetric power step, with the ld variant selected by `ld`.
/// Proposal: `w = c + alpha * phi(u)` where `phi` is `u` on the l2 sphere
/// and `sign(u)|u|^(d-1)` on the ld sphere; the new iterate is the
/// feasible maximizer of `<w, .>`. A step that would decrease the
/// objective is rejected and the shift doubled (as the shift grows the
/// proposal contracts to the current iterate, so rejection terminates);
/// on slow progress the shift is halved to re-accelerate.
fn run_shifted_symmetric(
    t: &Tensor,
    cfg: &SolverConfig,
    start: Vec<Vec<f64>>,
    ld: bool,
) -> StartOutcome {
    let d = t.shape().order();
    let mut u = start.into_iter().next().expect("one start vector");
    let mut c = symmetric_contraction(t, &u);
    let mut f = dot(&c, &u);
    if d % 2 == 1 && f < 0.0 {
        // Odd order: negating u flips the sign of the form.
        for x in u.iter_mut() {
            *x = -*x;
        }
        f = -f;
    }
    let mut alpha = cfg
        .shift
        .unwrap_or_else(|| 1.0 + d as f64 * t.max_abs_entry());
    let mut trace = vec![f];
    let mut converged = false;
    let mut iters = 0;
    let mut stall = 0usize;
    let mut escalations = 0usize;
    for it in 1..=cfg.max_iters {
        iters = it;
        let w: Vec<f64> = if ld {
            let e = d as f64 - 1.0;
            c.iter()
                .zip(&u)
                .map(|(ci, ui)| ci + alpha * ui.signum() * ui.abs().powf(e))
                .collect()
        } else {
            c.iter().zip(&u).map(|(ci, ui)| ci + alpha * ui).collect()
        };
        let u_new = if ld {
            match dual_norm_maximizer(&w, d) {
                Ok(v) => v,
                Err(_) => return StartOutcome::Degenerate,
            }
        } else {
            let nw = l2_norm(&w);
            if nw < f64::MIN_POSITIVE {
                return StartOutcome::Degenerate;
            }
            w.iter().map(|x| x / nw).collect()
        };
        let c_new = symmetric_contraction(t, &u_new);
        let f_new = dot(&c_new, &u_new);
        if f_new < f - 1e-13 * f.abs().max(1.0) {
            // Monotonicity guard.
            alpha = 2.0 * alpha + 1.0;
            escalations += 1;
            if escalations > 60 {
                break;
            }
            continue;
        }
        let rel = (f_new - f).abs() / f_new.abs().max(1.0);
        u = u_new;
        c = c_new;
        f = f_new;
        trace.push(f);
        if rel <= cfg.tol {
            converged = true;
            break;
        }
        if rel <= 1e-6 {
            stall += 1;
            if stall >= 4 {
                alpha = (0.5 * alpha).max(1e-8);
                stall = 0;
            }
        } else {
            stall = 0;
        }
    }
    StartOutcome::Run(RunOutcome {
        vectors: vec![u],
        objective: f,
        iterations: iters,
        converged,
        trace,
    })
}

/// `B(u)_{jl} = sum_{ik} u_i u_k A_{ijkl}` (n x n), exactly symmetric by
/// upper-triangle construction.
fn m_eig_v_matrix(t: &Tensor, u: &[f64]) -> Vec<f64> {
    let dims = t.shape().dims();
    let (m, n) = (dims[0], dims[1]);
    let mut b = vec![0.0; n * n];
    let data = t.data();
    for i in 0..m {
        for j in 0..n {
            for k in 0..m {
                let w = u[i] * u[k];
                let row = ((i * n + j) * m + k) * n;
                for l in j..n {
                    b[j * n + l] += w * data[row + l];
                }
            }
        }
    }
    for j in 0..n {
        for l in j + 1..n {
            b[l * n + j] = b[j * n + l];
        }
    }
    b
}

/// `C(v)_{ik} = sum_{jl} v_j v_l A_{ijkl}` (m x m), exactly symmetric.
fn m_eig_u_matrix(t: &Tensor, v: &[f64]) -> Vec<f64> {
    let dims = t.shape().dims();
    let (m, n) = (dims[0], dims[1]);
    let mut c = vec![0.0; m * m];
    let data = t.data();
    for i in 0..m {
        for j in 0..n {
            for k in i..m {
                let base = ((i * n + j) * m + k) * n;
                let mut acc = 0.0;
                for l in 0..n {
                    acc += v[l] * data[base + l];
                }
                c[i * m + k] += v[j] * acc;
            }
        }
    }
    for i in 0..m {
        for k in i + 1..m {
            c[k * m + i] = c[i * m + k];
        }
    }
    c
}

/// Alternating exact maximization for the (u,v,u,v) objective: each half
/// step is the top eigenvector of the contracted symmetric matrix.
fn run_alternating_m(
    t: &Tensor,
    cfg: &SolverConfig,
    start: Vec<Vec<f64>>,
) -> Result<StartOutcome> {
    let mut it_vecs = start.into_iter();
    let mut u = it_vecs.next().expect("u start");
    let mut v = it_vecs.next().expect("v start");
    let mut b = m_eig_v_matrix(t, &u);
    let quad = |mat: &[f64], x: &[f64]| -> f64 {
        let n = x.len();
        let mut acc = 0.0;
        for r in 0..n {
            let mut row = 0.0;
            for c in 0..n {
                row += mat[r * n + c] * x[c];
            }
            acc += x[r] * row;
        }
        acc
    };
    let mut f = quad(&b, &v);
    let mut trace = vec![f];
    let mut converged = false;
    let mut iters = 0;
    for it in 1..=cfg.max_iters {
        iters = it;
        let (lam, v_new) = top_eig_symmetric(v.len(), &b)?;
        v = v_new;
        trace.push(lam);
        let cmat = m_eig_u_matrix(t, &v);
        let (mu, u_new) = top_eig_symmetric(u.len(), &cmat)?;
        u = u_new;
        trace.push(mu);
        let rel = (mu - f).abs() / mu.abs().max(1.0);
        f = mu;
        b = m_eig_v_matrix(t, &u);
        if rel <= cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(StartOutcome::Run(RunOutcome {
        vectors: vec![u, v],
        objective: f,
        iterations: iters,
        converged,
        trace,
    }))
}

/// `w_i(v) = sum_{jk} A_ijk v_j v_k`.
fn c_eig_u_vector(t: &Tensor, v: &[f64]) -> Vec<f64> {
    let n = t.shape().dims()[0];
    let data = t.data();
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let base = (i * n + j) * n;
            let mut inner = 0.0;
            for k in 0..n {
                inner += data[base + k] * v[k];
            }
            acc += v[j] * inner;
        }
        w[i] = acc;
    }
    w
}

/// `M(u)_{jk} = sum_i u_i A_ijk`, exactly symmetric by construction.
fn c_eig_v_matrix(t: &Tensor, u: &[f64]) -> Vec<f64> {
    let n = t.shape().dims()[0];
    let data = t.data();
    let mut mmat = vec![0.0; n * n];
    for j in 0..n {
        for k in j..n {
            let mut acc = 0.0;
            for (i, ui) in u.iter().enumerate() {
                acc += ui * data[(i * n + j) * n + k];
            }
            mmat[j * n + k] = acc;
            mmat[k * n + j] = acc;
        }
    }
    mmat
}

/// Alternating maximization for the (u,v,v) objective: `u` is the
/// normalized quadratic contraction (so the objective is nonnegative
/// after the first half step), `v` the top eigenvector of `M(u)`.
fn run_alternating_c(
    t: &Tensor,
    cfg: &SolverConfig,
    start: Vec<Vec<f64>>,
) -> Result<StartOutcome> {
    let mut it_vecs = start.into_iter();
    let mut u = it_vecs.next().expect("u start");
    let mut v = it_vecs.next().expect("v start");
    let mut f = f64::NEG_INFINITY;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iters = 0;
    for it in 1..=cfg.max_iters {
        iters = it;
        let w = c_eig_u_vector(t, &v);
        let nw = l2_norm(&w);
        if nw < f64::MIN_POSITIVE {
            return Ok(StartOutcome::Degenerate);
        }
        u = w.iter().map(|x| x / nw).collect();
        trace.push(nw);
        let mmat = c_eig_v_matrix(t, &u);
        let (lam, v_new) = top_eig_symmetric(v.len(), &mmat)?;
        v = v_new;
        trace.push(lam);
        let rel = if f.is_finite() {
            (lam - f).abs() / lam.abs().max(1.0)
        } else {
            f64::INFINITY
        };
        f = lam;
        if rel <= cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(StartOutcome::Run(RunOutcome {
        vectors: vec![u, v],
        objective: f,
        iterations: iters,
        converged,
        trace,
    }))
}

/// Exact matrix path for d = 2: largest singular value via the top
/// eigenpair of the smaller Gram matrix.
fn matrix_sigma_max(t: &Tensor, f: SpectralFunctional) -> Result<SolveResult> {
    let dims = t.shape().dims();
    let (m, n) = (dims[0], dims[1]);
    if t.max_abs_entry() == 0.0 {
        return Err(Error::AllStartsDegenerate);
    }
    let a = t.data();
    let (sigma, u, v) = if n <= m {
        let mut gram = vec![0.0; n * n];
        for i in 0..m {
            let row = &a[i * n..(i + 1) * n];
            for p in 0..n {
                for q in p..n {
                    gram[p * n + q] += row[p] * row[q];
                }
            }
        }
        for p in 0..n {
            for q in p + 1..n {
                gram[q * n + p] = gram[p * n + q];
            }
        }
        let (lam, v) = top_eig_symmetric(n, &gram)?;
        let sigma = lam.max(0.0).sqrt();
        let mut u: Vec<f64> = (0..m)
            .map(|i| dot(&a[i * n..(i + 1) * n], &v))
            .collect();
        let nu = l2_norm(&u);
        if nu < f64::MIN_POSITIVE {
            return Err(Error::AllStartsDegenerate);
        }
        for x in u.iter_mut() {
            *x /= nu;
        }
        (sigma, u, v)
    } else {
        let mut gram = vec![0.0; m * m];
        for p in 0..m {
            for q in p..m {
                gram[p * m + q] = dot(&a[p * n..(p + 1) * n], &a[q * n..(q + 1) * n]);
            }
        }
        for p in 0..m {
            for q in p + 1..m {
                gram[q * m + p] = gram[p * m + q];
            }
        }
        let (lam, u) = top_eig_symmetric(m, &gram)?;
        let sigma = lam.max(0.0).sqrt();
        let mut v = vec![0.0; n];
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter_mut().enumerate() {
                *vj += ui * a[i * n + j];
            }
        }
        let nv = l2_norm(&v);
        if nv < f64::MIN_POSITIVE {
            return Err(Error::AllStartsDegenerate);
        }
        for x in v.iter_mut() {
            *x /= nv;
        }
        (sigma, u, v)
    };
    let argmax = VectorTuple::new(vec![u, v])?;
    let value = t.rank1_value(&argmax)?;
    debug_assert!((value - sigma).abs() <= 1e-8 * sigma.max(1.0));
    Ok(SolveResult {
        value,
        argmax,
        iterations_total: 1,
        converged: true,
        degenerate_restarts: 0,
        functional: f,
    })
}

/// Iterative HOPM entry point kept separate from the matrix dispatch so
/// the two routes can cross-check each other in tests.
#[cfg(test)]
pub(crate) fn hopm_l2_for_tests(t: &Tensor, cfg: &SolverConfig) -> Result<SolveResult> {
    let mut starts = StartSource::new(t, SpectralFunctional::L2Singular, cfg);
    let mut best: Option<RunOutcome> = None;
    let mut total = 0;
    for _ in 0..cfg.restarts {
        match run_start(t, SpectralFunctional::L2Singular, cfg, starts.next_start())? {
            StartOutcome::Run(run) => {
                total += run.iterations;
                let better = match &best {
                    None => true,
                    Some(b) => run.objective > b.objective + 1e-12 * b.objective.abs().max(1.0),
                };
                if better {
                    best = Some(run);
                }
            }
            StartOutcome::Degenerate => {}
        }
    }
    let best = best.ok_or(Error::AllStartsDegenerate)?;
    let argmax = assemble_tuple(SpectralFunctional::L2Singular, t.shape().order(), &best.vectors)?;
    let value = t.rank1_value(&argmax)?;
    Ok(SolveResult {
        value,
        argmax,
        iterations_total: total,
        converged: best.converged,
        degenerate_restarts: 0,
        functional: SpectralFunctional::L2Singular,
    })
}

#[cfg(test)]
pub(crate) fn run_start_for_tests(
    t: &Tensor,
    f: SpectralFunctional,
    cfg: &SolverConfig,
    start: Vec<Vec<f64>>,
) -> Result<(f64, Vec<f64>)> {
    match run_start(t, f, cfg, start)? {
        StartOutcome::Run(run) => Ok((run.objective, run.trace)),
        StartOutcome::Degenerate => Err(Error::AllStartsDegenerate),
    }
}
