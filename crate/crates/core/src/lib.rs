//! Self-adaptive evolutionary optimization where the genetic operators are
//! themselves genetic-programming trees, evolved alongside the candidate
//! solutions they transform.
//!
//! The crate is organised bottom-up:
//!
//! - [`types`] and [`rng`]: genomes, problems, populations and the
//!   deterministic random stream every run owns.
//! - [`benchmarks`]: the fifteen real-valued test functions.
//! - [`atomic`]: the fixed pool of atomic operators (null leaves, swap,
//!   gaussian noise and four crossovers).
//! - [`optree`]: binary operator trees built from atomics, with random
//!   initialisation, reservoir node sampling, mutation and subtree crossover.
//! - [`engine`]: the adaptive-operator algorithm (AOEA) and the HAEA and GA
//!   baselines, all producing a [`engine::RunTrace`].
//! - [`analysis`]: Zhang-Shasha tree edit distance, SMACOF embeddings and
//!   rate trajectories over operator populations.
//! - [`stats`]: Wilcoxon signed-rank comparison and result tables.

pub mod analysis;
pub mod atomic;
pub mod benchmarks;
pub mod engine;
mod error;
pub mod optree;
pub mod rng;
pub mod stats;
pub mod types;

pub use error::{Error, Result};
pub use rng::RandomStream;
pub use types::{clamp, init_population, Direction, Individual, Population, Problem, RealGenome};
