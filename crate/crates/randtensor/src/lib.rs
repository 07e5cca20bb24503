//! Gaussian random tensor ensembles, their largest singular values and
//! eigenvalues, and Monte Carlo certification of the expectation and tail
//! bounds those quantities satisfy.
//!
//! The crate has five parts:
//! - [`tensor`]: dense tensors, multilinear contractions, norms, and the
//!   `RTB1` file format ([`io`]).
//! - [`sample`]: the four Gaussian ensembles (iid, symmetric, partially
//!   symmetric, piezoelectric-type) under a deterministic seeding scheme.
//! - [`solve`]: multi-start iterative maximizers for six spectral
//!   functionals, with exact small-instance oracles ([`grid`], [`jacobi`]).
//! - [`bounds`]: closed-form expectation bounds and Gaussian tail
//!   probabilities.
//! - [`harness`]: seeded experiment runner with CSV/JSON outputs;
//!   [`selftest`] holds the standalone property suites.
//!
//! With the default `parallel` feature, experiment trials run on a rayon
//! pool; outputs are byte-identical to the sequential fallback.

pub mod bounds;
pub mod error;
pub mod grid;
pub mod harness;
pub mod io;
pub mod jacobi;
pub mod sample;
pub mod selftest;
pub mod solve;
pub mod tensor;

pub use error::{Error, Result};
pub use sample::{derive_substream, sample, SeedSpec, TensorClass};
pub use solve::{solve, SolveResult, SolverConfig, SpectralFunctional};
pub use tensor::{flat_index, lp_norm, Shape, Tensor, VectorTuple};
