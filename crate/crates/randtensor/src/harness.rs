//! Seeded Monte Carlo experiments: sample -> solve batches, aggregation,
//! and the empirical expectation / tail checks.
//!
//! Trial `i` of an experiment draws its tensor from substream `2i` of the
//! master seed and its solver starts from substream `2i + 1`, so records
//! depend only on `(config, trial index)` and the trial list is
//! byte-identical no matter how many worker threads run it. With the
//! `parallel` feature (default) trials run on a rayon pool; without it
//! they run in a plain loop.
//!
//! Pass criteria: the expectation check requires `mean + 3 SE <= bound`
//! (the Gamma-constant bound when the functional has one); the tail check
//! at shift `t` requires the exact one-sided 99% binomial upper
//! confidence limit of `freq{value > bound_loose + t}` to be at most
//! `exp(-t^2/2)`. Unconverged trials are excluded from the statistics; an
//! experiment with more than 5% of them is an error.

use serde::{Deserialize, Serialize};

use crate::bounds::{bound, tail_prob, BoundReport};
use crate::error::{Error, Result};
use crate::sample::{derive_substream, sample, TensorClass};
use crate::solve::{solve, SolverConfig, SpectralFunctional};

/// Everything a reproducible experiment needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub class: TensorClass,
    pub functional: SpectralFunctional,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub tail_shifts: Vec<f64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        self.solver.validate()?;
        self.class.shape()?;
        for &t in &self.tail_shifts {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "tail shift must be > 0, got {t}"
                )));
            }
        }
        let ok = match self.functional {
            SpectralFunctional::ZEig | SpectralFunctional::HEig => {
                matches!(self.class, TensorClass::Symmetric { .. })
            }
            SpectralFunctional::MEig => {
                matches!(self.class, TensorClass::PartiallySymmetric { .. })
            }
            SpectralFunctional::CEig => matches!(self.class, TensorClass::Piezoelectric { .. }),
            _ => true,
        };
        if !ok {
            return Err(Error::IncompatibleFunctional(format!(
                "{} cannot run on the {} class",
                self.functional,
                self.class.label()
            )));
        }
        Ok(())
    }

    fn bound_report(&self) -> Result<BoundReport> {
        let shape = self.class.shape()?;
        bound(self.functional, shape.dims())
    }
}

/// One sample -> solve outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub substream_seed: u64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Tail check at one shift.
#[derive(Debug, Clone, Serialize)]
pub struct TailSummary {
    pub t: f64,
    pub exceed_count: usize,
    pub upper99: f64,
    pub tail_bound: f64,
    pub pass: bool,
}

/// Aggregated statistics without the config (the spec-level `summarize`).
#[derive(Debug, Clone, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub stderr: f64,
    pub bound_exact: Option<f64>,
    pub bound_loose: f64,
    pub mean_over_bound: f64,
    pub tails: Vec<TailSummary>,
    pub pass_expectation: bool,
}

/// Full experiment summary as written to `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    pub mean: f64,
    pub stderr: f64,
    pub bound_exact: Option<f64>,
    pub bound_loose: f64,
    pub mean_over_bound: f64,
    pub tails: Vec<TailSummary>,
    pub pass_expectation: bool,
}

impl ExperimentSummary {
    /// True when the expectation check and every tail check passed.
    pub fn all_pass(&self) -> bool {
        self.pass_expectation && self.tails.iter().all(|t| t.pass)
    }
}

fn run_one_trial(cfg: &ExperimentConfig, i: usize) -> TrialRecord {
    let sample_seed = derive_substream(cfg.master_seed, 2 * i as u64);
    let solver_seed = derive_substream(cfg.master_seed, 2 * i as u64 + 1);
    let substream_seed = sample_seed.substream_seed();
    let tensor = match sample(&cfg.class, sample_seed) {
        Ok(t) => t,
        Err(_) => {
            return TrialRecord {
                trial_index: i,
                substream_seed,
                value: 0.0,
                iterations: 0,
                converged: false,
            }
        }
    };
    let solver = SolverConfig { rng: solver_seed, ..cfg.solver.clone() };
    match solve(&tensor, cfg.functional, &solver) {
        Ok(r) => TrialRecord {
            trial_index: i,
            substream_seed,
            value: r.value,
            iterations: r.iterations_total,
            converged: r.converged,
        },
        Err(_) => TrialRecord {
            trial_index: i,
            substream_seed,
            value: 0.0,
            iterations: 0,
            converged: false,
        },
    }
}

/// Always-available sequential trial loop (also the benchmark baseline).
pub fn run_trials_sequential(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    Ok((0..cfg.trials).map(|i| run_one_trial(cfg, i)).collect())
}

/// Runs the trials, on a rayon pool when the `parallel` feature is on.
/// `threads` bounds the pool size (`None` = rayon default); it never
/// changes the output. Without the feature the loop is sequential.
#[cfg(feature = "parallel")]
pub fn run_trials(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<TrialRecord>> {
    use rayon::prelude::*;
    cfg.validate()?;
    let run = || (0..cfg.trials).into_par_iter().map(|i| run_one_trial(cfg, i)).collect();
    match threads {
        None => Ok(run()),
        Some(t) => {
            if t == 0 {
                return Err(Error::InvalidParameter("threads must be >= 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn run_trials(cfg: &ExperimentConfig, _threads: Option<usize>) -> Result<Vec<TrialRecord>> {
    run_trials_sequential(cfg)
}

/// Runs the experiment and aggregates. Returns the per-trial records and
/// the summary.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<(Vec<TrialRecord>, ExperimentSummary)> {
    let records = run_trials(cfg, threads)?;
    let unconverged = records.iter().filter(|r| !r.converged).count();
    if unconverged * 20 > cfg.trials {
        return Err(Error::TooManyUnconverged { unconverged, trials: cfg.trials });
    }
    let report = cfg.bound_report()?;
    let stats = summarize(&records, &report, &cfg.tail_shifts)?;
    let summary = ExperimentSummary {
        config: cfg.clone(),
        mean: stats.mean,
        stderr: stats.stderr,
        bound_exact: stats.bound_exact,
        bound_loose: stats.bound_loose,
        mean_over_bound: stats.mean_over_bound,
        tails: stats.tails,
        pass_expectation: stats.pass_expectation,
    };
    Ok((records, summary))
}

/// Aggregates converged records against a bound report: mean, standard
/// error (sd/sqrt(N), 0 for N = 1), the expectation flag, and exact
/// binomial tail checks at the given shifts.
pub fn summarize(
    records: &[TrialRecord],
    report: &BoundReport,
    tail_shifts: &[f64],
) -> Result<SummaryStats> {
    let values: Vec<f64> = records
        .iter()
        .filter(|r| r.converged)
        .map(|r| r.value)
        .collect();
    if values.is_empty() {
        return Err(Error::NoConvergedTrials);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stderr = if values.len() == 1 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };
    let applicable = report.applicable();
    let pass_expectation = mean + 3.0 * stderr <= applicable;
    let mut tails = Vec::with_capacity(tail_shifts.len());
    for &t in tail_shifts {
        let threshold = report.bound_loose + t;
        let exceed_count = values.iter().filter(|&&v| v > threshold).count();
        let upper99 = binomial_upper99(exceed_count, values.len());
        let tail_bound = tail_prob(t)?;
        tails.push(TailSummary {
            t,
            exceed_count,
            upper99,
            tail_bound,
            pass: upper99 <= tail_bound,
        });
    }
    Ok(SummaryStats {
        mean,
        stderr,
        bound_exact: report.bound_exact,
        bound_loose: report.bound_loose,
        mean_over_bound: mean / applicable,
        tails,
        pass_expectation,
    })
}

/// Exact one-sided 99% (Clopper-Pearson) upper confidence limit for a
/// binomial proportion with `x` successes in `n` trials: the `p` with
/// `P(Bin(n,p) <= x) = 0.01`, found by bisection on the exact CDF.
pub fn binomial_upper99(x: usize, n: usize) -> f64 {
    const ALPHA: f64 = 0.01;
    assert!(x <= n && n > 0, "binomial limit needs 0 <= x <= n, n > 0");
    if x == n {
        return 1.0;
    }
    let (mut lo, mut hi) = (x as f64 / n as f64, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binomial_cdf(x, n, mid) > ALPHA {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact binomial CDF `P(Bin(n,p) <= x)` with log-domain terms.
fn binomial_cdf(x: usize, n: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if x == n { 1.0 } else { 0.0 };
    }
    use crate::bounds::ln_gamma;
    let ln_n_fact = ln_gamma(n as f64 + 1.0);
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut acc = 0.0;
    for k in 0..=x {
        let ln_term = ln_n_fact - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
            + k as f64 * lp
            + (n - k) as f64 * lq;
        acc += ln_term.exp();
    }
    acc.min(1.0)
}

/// Renders the per-trial CSV: header
/// `trial,seed,class,dims,functional,value,iterations,converged`, dims
/// joined by `x`, values with 17 significant digits.
pub fn trial_csv(cfg: &ExperimentConfig, records: &[TrialRecord]) -> Result<String> {
    let dims_label = cfg.class.shape()?.label();
    let mut out = String::from("trial,seed,class,dims,functional,value,iterations,converged\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{:.16e},{},{}\n",
            r.trial_index,
            r.substream_seed,
            cfg.class.label(),
            dims_label,
            cfg.functional,
            r.value,
            r.iterations,
            r.converged
        ));
    }
    Ok(out)
}

/// Pretty JSON for the summary file / stdout.
pub fn summary_json(summary: &ExperimentSummary) -> Result<String> {
    Ok(serde_json::to_string_pretty(summary)?)
}
