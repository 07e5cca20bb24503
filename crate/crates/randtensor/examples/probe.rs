use std::time::Instant;

use randtensor::harness::{run_experiment, ExperimentConfig};
use randtensor::sample::TensorClass;
use randtensor::solve::{SolverConfig, SpectralFunctional};

fn main() {
    let cases = vec![
        ("c1 iid 50x50 l2", TensorClass::Iid { dims: vec![50, 50] }, SpectralFunctional::L2Singular, 200),
        ("l2 (3,4,5)", TensorClass::Iid { dims: vec![3, 4, 5] }, SpectralFunctional::L2Singular, 500),
        ("ld (3,4,5)", TensorClass::Iid { dims: vec![3, 4, 5] }, SpectralFunctional::LdSingular, 500),
        ("zeig d3 n5", TensorClass::Symmetric { d: 3, n: 5 }, SpectralFunctional::ZEig, 500),
        ("heig d3 n5", TensorClass::Symmetric { d: 3, n: 5 }, SpectralFunctional::HEig, 500),
        ("meig m3 n4", TensorClass::PartiallySymmetric { m: 3, n: 4 }, SpectralFunctional::MEig, 500),
        ("ceig n4", TensorClass::Piezoelectric { n: 4 }, SpectralFunctional::CEig, 500),
        ("iid 50x50 tails", TensorClass::Iid { dims: vec![50, 50] }, SpectralFunctional::L2Singular, 500),
    ];
    for (name, class, functional, trials) in cases {
        let cfg = ExperimentConfig {
            class,
            functional,
            trials,
            master_seed: 20240809,
            solver: SolverConfig::default(),
            tail_shifts: vec![0.5, 1.0, 2.0],
        };
        let t0 = Instant::now();
        match run_experiment(&cfg, None) {
            Ok((records, summary)) => {
                let unconv = records.iter().filter(|r| !r.converged).count();
                let avg_iters: f64 = records.iter().map(|r| r.iterations as f64).sum::<f64>()
                    / records.len() as f64;
                println!(
                    "{name}: {:.2?}  mean={:.4} bound={:.4} ratio={:.4} unconv={unconv}/{} avg_iters={avg_iters:.0} pass_exp={} tails={:?}",
                    t0.elapsed(),
                    summary.mean,
                    summary.bound_exact.unwrap_or(summary.bound_loose),
                    summary.mean_over_bound,
                    records.len(),
                    summary.pass_expectation,
                    summary.tails.iter().map(|t| (t.t, t.exceed_count, t.pass)).collect::<Vec<_>>()
                );
            }
            Err(e) => println!("{name}: ERROR after {:.2?}: {e}", t0.elapsed()),
        }
    }
}
