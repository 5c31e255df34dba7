//! The evolutionary engines.
//!
//! Three algorithms share one configuration type and one trace format:
//!
//! - [`Aoea`]: operator trees co-evolved with the candidate solutions,
//!   selected by punish/reward rates.
//! - [`Haea`]: the six atomic operators used directly, each individual
//!   carrying its own rates.
//! - [`Ga`]: roulette selection, linear crossover and gaussian mutation.
//!
//! All three replace an individual only by a child that is at least as good,
//! so the best fitness of a run never worsens. A run is fully determined by
//! its [`EngineConfig`]: the initial population comes from a stream keyed by
//! `init_seed` (defaulting to `seed`), everything else from a stream keyed by
//! `seed`.

mod aoea;
mod ga;
mod haea;
mod pool;
mod selection;
mod trace;

use std::fmt;
use std::str::FromStr;

pub use aoea::{aoea_run, aoea_run_on, crossover_population, Aoea};
pub use ga::{ga_run, ga_run_on, Ga};
pub use haea::{haea_run, haea_run_on, Haea};
pub use pool::{adjust_rate, normalize, random_rates, OperatorPool, OperatorSelection, VoteTally};
pub use selection::{fitness_selection_weights, roulette_select};
pub use trace::{GenerationRecord, RunTrace};

use crate::benchmarks::{self, Variant};
use crate::optree::{OperatorTree, DEFAULT_INIT_DEPTH, DEFAULT_MAX_NODES};
use crate::types::{init_population, Population, Problem};
use crate::{Error, RandomStream, Result};

const INIT_STREAM: u64 = 0x1417;
const RUN_STREAM: u64 = 0x2a0e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Ga,
    Haea,
    Aoea,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Ga, Algorithm::Haea, Algorithm::Aoea];

    /// Stable numeric id used in seed derivation.
    pub fn id(self) -> u64 {
        match self {
            Algorithm::Ga => 0,
            Algorithm::Haea => 1,
            Algorithm::Aoea => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ga => "GA",
            Algorithm::Haea => "HAEA",
            Algorithm::Aoea => "AOEA",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ga" => Ok(Algorithm::Ga),
            "haea" => Ok(Algorithm::Haea),
            "aoea" => Ok(Algorithm::Aoea),
            other => Err(Error::InvalidConfig(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub algorithm: Algorithm,
    /// Benchmark id (1..=15).
    pub function: u32,
    pub variant: Variant,
    /// Overrides the benchmark's default dimensionality.
    pub dimensionality: Option<usize>,
    pub population_size: usize,
    /// Operator pool size (AOEA only, but always validated).
    pub kappa: usize,
    pub generations: usize,
    pub seed: u64,
    /// Seed of the initial population; `None` uses `seed`.
    pub init_seed: Option<u64>,
    pub operator_selection: OperatorSelection,
    pub max_nodes: usize,
    pub init_depth: usize,
    /// Per-tree mutation probability; `None` means `1/κ`.
    pub operator_mutation_prob: Option<f64>,
    /// GA per-child mutation probability.
    pub ga_mutation_prob: f64,
    /// Record the operator trees every `n` generations (AOEA only).
    pub snapshot_every: Option<usize>,
    /// Start AOEA from these trees instead of random ones.
    pub initial_trees: Option<Vec<OperatorTree>>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Aoea,
            function: 1,
            variant: Variant::Repaired,
            dimensionality: None,
            population_size: 50,
            kappa: 16,
            generations: 500,
            seed: 0,
            init_seed: None,
            operator_selection: OperatorSelection::ShufflePair,
            max_nodes: DEFAULT_MAX_NODES,
            init_depth: DEFAULT_INIT_DEPTH,
            operator_mutation_prob: None,
            ga_mutation_prob: 0.1,
            snapshot_every: None,
            initial_trees: None,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if self.population_size < 2 {
            return fail(format!("population size {} < 2", self.population_size));
        }
        if self.kappa < 2 || self.kappa % 2 != 0 {
            return fail(format!("kappa {} must be even and at least 2", self.kappa));
        }
        if self.generations < 1 {
            return fail("generations must be at least 1".into());
        }
        if self.init_depth < 1 {
            return fail("init_depth must be at least 1".into());
        }
        if self.max_nodes < 1 {
            return fail("max_nodes must be at least 1".into());
        }
        for (name, p) in [
            ("operator mutation probability", self.operator_mutation_prob.unwrap_or(0.0)),
            ("GA mutation probability", self.ga_mutation_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} {p} outside [0, 1]"));
            }
        }
        if self.snapshot_every == Some(0) {
            return fail("snapshot cadence must be positive".into());
        }
        if let Some(trees) = &self.initial_trees {
            if trees.len() != self.kappa {
                return fail(format!("{} initial trees for kappa {}", trees.len(), self.kappa));
            }
            trees.iter().try_for_each(OperatorTree::validate)?;
        }
        benchmarks::spec_by_id(self.function)?;
        Ok(())
    }

    /// The benchmark problem this configuration runs on.
    pub fn problem(&self) -> Result<Problem> {
        benchmarks::problem(self.function, self.variant, self.dimensionality)
    }

    pub fn operator_mutation_probability(&self) -> f64 {
        self.operator_mutation_prob.unwrap_or(1.0 / self.kappa as f64)
    }

    pub(crate) fn streams(&self) -> (RandomStream, RandomStream) {
        (
            RandomStream::derived(self.init_seed.unwrap_or(self.seed), &[INIT_STREAM]),
            RandomStream::derived(self.seed, &[RUN_STREAM]),
        )
    }

    pub(crate) fn initial_population(&self, problem: &Problem, init_rng: &mut RandomStream) -> Result<Population> {
        init_population(problem, self.population_size, init_rng)
    }
}

/// Run the configured algorithm on its benchmark.
pub fn run(config: &EngineConfig) -> Result<RunTrace> {
    match config.algorithm {
        Algorithm::Aoea => aoea_run(config),
        Algorithm::Haea => haea_run(config),
        Algorithm::Ga => ga_run(config),
    }
}

/// Run the configured algorithm on an arbitrary problem.
pub fn run_on(problem: &Problem, config: &EngineConfig) -> Result<RunTrace> {
    match config.algorithm {
        Algorithm::Aoea => aoea_run_on(problem, config),
        Algorithm::Haea => haea_run_on(problem, config),
        Algorithm::Ga => ga_run_on(problem, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let ok = EngineConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            EngineConfig { population_size: 1, ..ok.clone() },
            EngineConfig { kappa: 15, ..ok.clone() },
            EngineConfig { kappa: 0, ..ok.clone() },
            EngineConfig { generations: 0, ..ok.clone() },
            EngineConfig { function: 16, ..ok.clone() },
            EngineConfig { ga_mutation_prob: 1.5, ..ok.clone() },
            EngineConfig { snapshot_every: Some(0), ..ok.clone() },
            EngineConfig { initial_trees: Some(vec![]), ..ok.clone() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("cmaes".parse::<Algorithm>().is_err());
    }
}
