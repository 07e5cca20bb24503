//! Criterion benchmarks comparing the sequential trial loop with the
//! rayon-parallel path, plus per-functional solve timings.
//!
//! Run with `cargo bench -p randtensor`. Building with
//! `--no-default-features` benches only the sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use randtensor::harness::{run_trials, run_trials_sequential, ExperimentConfig};
use randtensor::sample::{sample, SeedSpec, TensorClass};
use randtensor::solve::{solve, SolverConfig, SpectralFunctional};

fn experiment_config(trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        class: TensorClass::Iid { dims: vec![6, 6, 6] },
        functional: SpectralFunctional::L2Singular,
        trials,
        master_seed: 2024,
        solver: SolverConfig {
            restarts: 8,
            max_iters: 200,
            ..SolverConfig::default()
        },
        tail_shifts: vec![],
    }
}

fn bench_trial_loop(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiment_trials");
    group.sample_size(10);
    for trials in [16usize, 64] {
        let cfg = experiment_config(trials);
        group.bench_with_input(
            BenchmarkId::new("sequential", trials),
            &cfg,
            |b, cfg| b.iter(|| run_trials_sequential(cfg).unwrap()),
        );
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", trials), &cfg, |b, cfg| {
            b.iter(|| run_trials(cfg, None).unwrap())
        });
    }
    group.finish();
    // Silence the unused-import lint when the parallel feature is off.
    #[cfg(not(feature = "parallel"))]
    let _ = run_trials;
}

fn bench_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    let cases: Vec<(&str, TensorClass, SpectralFunctional)> = vec![
        (
            "l2singular_3x4x5",
            TensorClass::Iid { dims: vec![3, 4, 5] },
            SpectralFunctional::L2Singular,
        ),
        (
            "zeig_sym_d3_n5",
            TensorClass::Symmetric { d: 3, n: 5 },
            SpectralFunctional::ZEig,
        ),
        (
            "meig_3x4",
            TensorClass::PartiallySymmetric { m: 3, n: 4 },
            SpectralFunctional::MEig,
        ),
    ];
    for (name, class, functional) in cases {
        let t = sample(&class, SeedSpec::new(7, 0)).unwrap();
        let cfg = SolverConfig::default();
        group.bench_function(name, |b| b.iter(|| solve(&t, functional, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_trial_loop, bench_solvers);
criterion_main!(benches);
