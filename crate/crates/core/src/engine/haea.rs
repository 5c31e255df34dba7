use crate::atomic::{ApplyContext, AtomicOp};
use crate::types::{Individual, Population, Problem, RealGenome};
use crate::{RandomStream, Result};

use super::pool::{adjust_rate, normalize, random_rates};
use super::selection::{fitness_selection_weights, roulette_select};
use super::trace::{GenerationRecord, RunTrace};
use super::{Algorithm, EngineConfig};

/// Operators available to HAEA, indexed like the per-individual rates.
pub const HAEA_OPERATORS: [AtomicOp; 6] = AtomicOp::NON_NULL;

/// A running HAEA instance: fixed atomic operators, one rate vector per
/// individual.
#[derive(Debug, Clone)]
pub struct Haea {
    problem: Problem,
    config: EngineConfig,
    population: Population,
    rates: Vec<Vec<f64>>,
    rng: RandomStream,
    generation: usize,
    evaluations: u64,
}

impl Haea {
    pub fn new(problem: Problem, config: &EngineConfig) -> Result<Self> {
        config.validate()?;
        let (mut init_rng, mut rng) = config.streams();
        let population = config.initial_population(&problem, &mut init_rng)?;
        let rates = (0..population.len())
            .map(|_| random_rates(HAEA_OPERATORS.len(), &mut rng))
            .collect();
        let evaluations = population.len() as u64;
        Ok(Self {
            problem,
            config: config.clone(),
            population,
            rates,
            rng,
            generation: 0,
            evaluations,
        })
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    /// Operator rates of each individual, in [`HAEA_OPERATORS`] order.
    pub fn rates(&self) -> &[Vec<f64>] {
        &self.rates
    }

    pub fn step(&mut self) -> Result<()> {
        let direction = self.problem.direction();
        let weights = fitness_selection_weights(&self.population, direction)?;
        let ctx = ApplyContext::new(&self.problem);
        let members = self.population.members();
        let rng = &mut self.rng;
        let mut next = Vec::with_capacity(members.len());
        for (ind, rates) in members.iter().zip(self.rates.iter_mut()) {
            let k = roulette_select(rates, rng)?;
            let op = HAEA_OPERATORS[k];
            let child = if op.arity() == 1 {
                let g = ctx.apply(op, ind.genome().to_vec(), None, rng);
                self.evaluations += 1;
                Individual::evaluate(RealGenome::new(g), &self.problem)?
            } else {
                let mate = &members[roulette_select(&weights, rng)?];
                let g1 = ctx.apply(op, ind.genome().to_vec(), Some(mate.genome()), rng);
                let c1 = Individual::evaluate(RealGenome::new(g1), &self.problem)?;
                let g2 = ctx.apply(op, mate.genome().to_vec(), Some(ind.genome()), rng);
                let c2 = Individual::evaluate(RealGenome::new(g2), &self.problem)?;
                self.evaluations += 2;
                if direction.better_or_equal(c1.fitness(), c2.fitness())? {
                    c1
                } else {
                    c2
                }
            };
            let vote = if direction.better(child.fitness(), ind.fitness())? { 1 } else { -1 };
            let delta = rng.uniform_open();
            rates[k] = adjust_rate(rates[k], vote, delta);
            normalize(rates);
            if direction.better_or_equal(child.fitness(), ind.fitness())? {
                next.push(child);
            } else {
                next.push(ind.clone());
            }
        }
        self.population = Population::new(next);
        self.generation += 1;
        Ok(())
    }

    /// Per-operator rates averaged over the population.
    pub fn mean_rates(&self) -> Vec<f64> {
        let n = self.rates.len() as f64;
        (0..HAEA_OPERATORS.len())
            .map(|k| self.rates.iter().map(|r| r[k]).sum::<f64>() / n)
            .collect()
    }

    pub fn record(&self) -> Result<GenerationRecord> {
        GenerationRecord::observe(
            self.generation,
            &self.population,
            self.problem.direction(),
            self.mean_rates(),
            self.evaluations,
            None,
        )
    }

    pub fn run(mut self) -> Result<RunTrace> {
        let mut records = Vec::with_capacity(self.config.generations + 1);
        records.push(self.record()?);
        while self.generation < self.config.generations {
            self.step()?;
            records.push(self.record()?);
        }
        Ok(RunTrace {
            algorithm: Algorithm::Haea,
            function: self.problem.id(),
            direction: self.problem.direction(),
            best: self.population.best(self.problem.direction())?.clone(),
            records,
        })
    }
}

pub fn haea_run(config: &EngineConfig) -> Result<RunTrace> {
    haea_run_on(&config.problem()?, config)
}

pub fn haea_run_on(problem: &Problem, config: &EngineConfig) -> Result<RunTrace> {
    Haea::new(problem.clone(), config)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_individual_rates_stay_on_the_simplex() {
        let config = EngineConfig {
            algorithm: Algorithm::Haea,
            function: 11,
            dimensionality: Some(20),
            population_size: 10,
            generations: 30,
            ..EngineConfig::default()
        };
        let mut h = Haea::new(config.problem().unwrap(), &config).unwrap();
        for _ in 0..30 {
            h.step().unwrap();
            for r in h.rates() {
                assert_eq!(r.len(), 6);
                assert!(r.iter().all(|&x| x >= 0.0));
                assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }
}
