use crate::atomic::{ApplyContext, AtomicOp};
use crate::types::{Individual, Population, Problem, RealGenome};
use crate::{RandomStream, Result};

use super::selection::{fitness_selection_weights, roulette_select};
use super::trace::{GenerationRecord, RunTrace};
use super::{Algorithm, EngineConfig};

/// A running GA: for every slot, two roulette-selected parents produce a
/// child by linear crossover, which is mutated with gaussian noise with
/// probability `ga_mutation_prob` and replaces the slot's occupant if it is
/// at least as good.
#[derive(Debug, Clone)]
pub struct Ga {
    problem: Problem,
    config: EngineConfig,
    population: Population,
    rng: RandomStream,
    generation: usize,
    evaluations: u64,
}

impl Ga {
    pub fn new(problem: Problem, config: &EngineConfig) -> Result<Self> {
        config.validate()?;
        let (mut init_rng, rng) = config.streams();
        let population = config.initial_population(&problem, &mut init_rng)?;
        let evaluations = population.len() as u64;
        Ok(Self {
            problem,
            config: config.clone(),
            population,
            rng,
            generation: 0,
            evaluations,
        })
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn step(&mut self) -> Result<()> {
        let direction = self.problem.direction();
        let weights = fitness_selection_weights(&self.population, direction)?;
        let ctx = ApplyContext::new(&self.problem);
        let members = self.population.members();
        let rng = &mut self.rng;
        let mut next = Vec::with_capacity(members.len());
        for ind in members {
            let p1 = &members[roulette_select(&weights, rng)?];
            let p2 = &members[roulette_select(&weights, rng)?];
            let mut g = ctx.apply(AtomicOp::LinearCrossover, p1.genome().to_vec(), Some(p2.genome()), rng);
            if rng.uniform() < self.config.ga_mutation_prob {
                g = ctx.apply(AtomicOp::GaussianNoise, g, None, rng);
            }
            let child = Individual::evaluate(RealGenome::new(g), &self.problem)?;
            if direction.better_or_equal(child.fitness(), ind.fitness())? {
                next.push(child);
            } else {
                next.push(ind.clone());
            }
        }
        self.evaluations += next.len() as u64;
        self.population = Population::new(next);
        self.generation += 1;
        Ok(())
    }

    pub fn record(&self) -> Result<GenerationRecord> {
        GenerationRecord::observe(
            self.generation,
            &self.population,
            self.problem.direction(),
            Vec::new(),
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
            algorithm: Algorithm::Ga,
            function: self.problem.id(),
            direction: self.problem.direction(),
            best: self.population.best(self.problem.direction())?.clone(),
            records,
        })
    }
}

pub fn ga_run(config: &EngineConfig) -> Result<RunTrace> {
    ga_run_on(&config.problem()?, config)
}

pub fn ga_run_on(problem: &Problem, config: &EngineConfig) -> Result<RunTrace> {
    Ga::new(problem.clone(), config)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_size_is_preserved() {
        let config = EngineConfig {
            algorithm: Algorithm::Ga,
            function: 8,
            dimensionality: Some(10),
            population_size: 14,
            generations: 25,
            ..EngineConfig::default()
        };
        let mut ga = Ga::new(config.problem().unwrap(), &config).unwrap();
        for _ in 0..25 {
            ga.step().unwrap();
            assert_eq!(ga.population().len(), 14);
        }
    }
}
