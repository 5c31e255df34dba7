use crate::optree::OperatorTree;
use crate::types::{Direction, Individual, Population};
use crate::Result;

use super::Algorithm;

/// Statistics of one generation. Generation 0 is the initial population.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub median_fitness: f64,
    /// Largest operator rate; `None` for algorithms without rates.
    pub max_rate: Option<f64>,
    /// AOEA: the pool rates. HAEA: per-operator rates averaged over the
    /// population. GA: empty.
    pub rates: Vec<f64>,
    /// Cumulative objective evaluations.
    pub evaluations: u64,
    /// The operator trees, when snapshots are enabled for this generation.
    pub snapshot: Option<Vec<OperatorTree>>,
}

impl GenerationRecord {
    pub(crate) fn observe(
        generation: usize,
        population: &Population,
        direction: Direction,
        rates: Vec<f64>,
        evaluations: u64,
        snapshot: Option<Vec<OperatorTree>>,
    ) -> Result<Self> {
        let max_rate = if rates.is_empty() {
            None
        } else {
            Some(rates.iter().copied().fold(0.0, f64::max))
        };
        Ok(Self {
            generation,
            best_fitness: population.best(direction)?.fitness(),
            median_fitness: population.median_fitness(),
            max_rate,
            rates,
            evaluations,
            snapshot,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub function: u32,
    pub direction: Direction,
    pub records: Vec<GenerationRecord>,
    /// Best individual of the final population.
    pub best: Individual,
}

impl RunTrace {
    pub fn final_best_fitness(&self) -> f64 {
        self.best.fitness()
    }

    pub fn best_curve(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.best_fitness)
    }

    /// Generations that carry operator-tree snapshots.
    pub fn snapshots(&self) -> impl Iterator<Item = (usize, &[OperatorTree])> {
        self.records
            .iter()
            .filter_map(|r| r.snapshot.as_deref().map(|s| (r.generation, s)))
    }
}
