use crate::atomic::ApplyContext;
use crate::optree::OperatorTree;
use crate::types::{Individual, Population, Problem, RealGenome};
use crate::{RandomStream, Result};

use super::pool::{OperatorPool, VoteTally};
use super::selection::{fitness_selection_weights, roulette_select};
use super::trace::{GenerationRecord, RunTrace};
use super::{Algorithm, EngineConfig};

/// One generation of candidate-solution breeding.
///
/// For each individual, in order: pick an operator by rate, pick a mate by
/// windowed fitness roulette over the current population, apply the operator
/// both ways round and keep the better child. The operator earns a vote if
/// the child strictly improves on the individual and loses one otherwise;
/// the child takes the individual's slot if it is at least as good.
pub fn crossover_population(
    population: &Population,
    pool: &OperatorPool,
    problem: &Problem,
    rng: &mut RandomStream,
) -> Result<(Population, VoteTally)> {
    let direction = problem.direction();
    let weights = fitness_selection_weights(population, direction)?;
    let ctx = ApplyContext::new(problem);
    let members = population.members();
    let mut tally = VoteTally::new(pool.kappa());
    let mut next = Vec::with_capacity(members.len());
    for ind in members {
        let op = pool.select(rng)?;
        let mate = &members[roulette_select(&weights, rng)?];
        let tree = &pool.trees()[op];
        let child = best_of_both_orders(tree, ind, mate, problem, &ctx, rng)?;
        if direction.better(child.fitness(), ind.fitness())? {
            tally.up(op);
        } else {
            tally.down(op);
        }
        if direction.better_or_equal(child.fitness(), ind.fitness())? {
            next.push(child);
        } else {
            next.push(ind.clone());
        }
    }
    Ok((Population::new(next), tally))
}

fn best_of_both_orders(
    tree: &OperatorTree,
    ind: &Individual,
    mate: &Individual,
    problem: &Problem,
    ctx: &ApplyContext,
    rng: &mut RandomStream,
) -> Result<Individual> {
    let c1 = tree.evaluate_unchecked(ind.genome(), mate.genome(), ctx, rng);
    let c1 = Individual::evaluate(RealGenome::new(c1), problem)?;
    let c2 = tree.evaluate_unchecked(mate.genome(), ind.genome(), ctx, rng);
    let c2 = Individual::evaluate(RealGenome::new(c2), problem)?;
    Ok(if problem.direction().better_or_equal(c1.fitness(), c2.fitness())? {
        c1
    } else {
        c2
    })
}

/// A running AOEA instance.
#[derive(Debug, Clone)]
pub struct Aoea {
    problem: Problem,
    config: EngineConfig,
    population: Population,
    pool: OperatorPool,
    rng: RandomStream,
    generation: usize,
    evaluations: u64,
}

impl Aoea {
    pub fn new(problem: Problem, config: &EngineConfig) -> Result<Self> {
        config.validate()?;
        let (mut init_rng, mut rng) = config.streams();
        let population = config.initial_population(&problem, &mut init_rng)?;
        let pool = match &config.initial_trees {
            Some(trees) => {
                let rates = super::pool::random_rates(trees.len(), &mut rng);
                OperatorPool::new(trees.clone(), rates)?
            }
            None => OperatorPool::random(config.kappa, config.init_depth, &mut rng)?,
        };
        let evaluations = population.len() as u64;
        Ok(Self {
            problem,
            config: config.clone(),
            population,
            pool,
            rng,
            generation: 0,
            evaluations,
        })
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn pool(&self) -> &OperatorPool {
        &self.pool
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Breed the population, update rates, recombine and mutate operators.
    pub fn step(&mut self) -> Result<()> {
        let (next, tally) = crossover_population(&self.population, &self.pool, &self.problem, &mut self.rng)?;
        self.evaluations += 2 * next.len() as u64;
        self.population = next;
        let pool = self.pool.update_rates(&tally, &mut self.rng)?;
        let pool = pool.crossover_operators(self.config.operator_selection, self.config.max_nodes, &mut self.rng)?;
        let (pool, _) = pool.mutate_operators(self.config.operator_mutation_probability(), &mut self.rng);
        self.pool = pool;
        self.generation += 1;
        Ok(())
    }

    pub fn record(&self) -> Result<GenerationRecord> {
        let snapshot = self
            .config
            .snapshot_every
            .filter(|&every| self.generation % every == 0 || self.generation == self.config.generations)
            .map(|_| self.pool.trees().to_vec());
        GenerationRecord::observe(
            self.generation,
            &self.population,
            self.problem.direction(),
            self.pool.rates().to_vec(),
            self.evaluations,
            snapshot,
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
            algorithm: Algorithm::Aoea,
            function: self.problem.id(),
            direction: self.problem.direction(),
            best: self.population.best(self.problem.direction())?.clone(),
            records,
        })
    }
}

pub fn aoea_run(config: &EngineConfig) -> Result<RunTrace> {
    aoea_run_on(&config.problem()?, config)
}

pub fn aoea_run_on(problem: &Problem, config: &EngineConfig) -> Result<RunTrace> {
    Aoea::new(problem.clone(), config)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::AtomicOp;
    use crate::benchmarks::{problem, Variant};
    use crate::types::init_population;

    fn identity_pool(kappa: usize) -> OperatorPool {
        let t = OperatorTree::leaf(AtomicOp::NullFirst).unwrap();
        OperatorPool::new(vec![t; kappa], vec![1.0; kappa]).unwrap()
    }

    #[test]
    fn identity_operator_only_selects() {
        // child1 = ind, child2 = mate: nothing new is created, and a vote is
        // positive only when the mate was strictly better.
        let p = problem(11, Variant::Repaired, Some(5)).unwrap();
        let mut r = RandomStream::new(3);
        let pop = init_population(&p, 20, &mut r).unwrap();
        let pool = OperatorPool::new(vec![OperatorTree::leaf(AtomicOp::NullFirst).unwrap()], vec![1.0]).unwrap();
        let (next, tally) = crossover_population(&pop, &pool, &p, &mut r).unwrap();
        let mut improved = 0;
        for (old, new) in pop.members().iter().zip(next.members()) {
            assert!(pop.members().contains(new));
            assert!(new.fitness() <= old.fitness());
            if new.fitness() < old.fitness() {
                improved += 1;
            }
        }
        assert_eq!(tally.votes(), &[improved - (20 - improved)]);
    }

    #[test]
    fn identity_operator_on_clones_is_a_fixed_point() {
        let p = problem(11, Variant::Repaired, Some(5)).unwrap();
        let mut r = RandomStream::new(3);
        let one = init_population(&p, 2, &mut r).unwrap().members()[0].clone();
        let pop = Population::new(vec![one; 20]);
        let pool = OperatorPool::new(vec![OperatorTree::leaf(AtomicOp::NullFirst).unwrap()], vec![1.0]).unwrap();
        let (next, tally) = crossover_population(&pop, &pool, &p, &mut r).unwrap();
        assert_eq!(next, pop);
        assert_eq!(tally.votes(), &[-20]);
    }

    #[test]
    fn one_generation_is_elitist_per_slot() {
        let p = problem(8, Variant::Repaired, Some(30)).unwrap();
        let mut r = RandomStream::new(9);
        let pop = init_population(&p, 30, &mut r).unwrap();
        let pool = OperatorPool::random(16, 4, &mut r).unwrap();
        let (next, tally) = crossover_population(&pop, &pool, &p, &mut r).unwrap();
        assert_eq!(next.len(), pop.len());
        assert!(tally.votes().iter().map(|v| v.abs()).sum::<i64>() <= 30);
        for (a, b) in pop.members().iter().zip(next.members()) {
            assert!(b.fitness() <= a.fitness());
        }
    }

    #[test]
    fn frozen_identity_pool_never_creates_genomes() {
        let config = EngineConfig {
            function: 11,
            dimensionality: Some(8),
            population_size: 10,
            kappa: 4,
            generations: 20,
            operator_mutation_prob: Some(0.0),
            initial_trees: Some(identity_pool(4).trees().to_vec()),
            ..EngineConfig::default()
        };
        let p = config.problem().unwrap();
        let mut aoea = Aoea::new(p, &config).unwrap();
        let start = aoea.population().clone();
        let best = start.best(crate::Direction::Minimize).unwrap().fitness();
        for _ in 0..20 {
            aoea.step().unwrap();
            assert!(aoea.population().members().iter().all(|m| start.members().contains(m)));
            assert!(aoea.pool().trees().iter().all(|t| t == &identity_pool(1).trees()[0]));
            assert_eq!(aoea.population().best(crate::Direction::Minimize).unwrap().fitness(), best);
        }
    }

    #[test]
    fn evaluation_budget() {
        let config = EngineConfig {
            function: 1,
            dimensionality: Some(5),
            population_size: 12,
            kappa: 4,
            generations: 7,
            ..EngineConfig::default()
        };
        let trace = aoea_run(&config).unwrap();
        assert_eq!(trace.records.len(), 8);
        for (g, rec) in trace.records.iter().enumerate() {
            assert_eq!(rec.generation, g);
            assert_eq!(rec.evaluations, 12 + 24 * g as u64);
        }
    }

    #[test]
    fn snapshots_follow_cadence() {
        let config = EngineConfig {
            function: 1,
            dimensionality: Some(3),
            population_size: 4,
            kappa: 4,
            generations: 10,
            snapshot_every: Some(4),
            ..EngineConfig::default()
        };
        let trace = aoea_run(&config).unwrap();
        let gens: Vec<usize> = trace.snapshots().map(|(g, _)| g).collect();
        assert_eq!(gens, vec![0, 4, 8, 10]);
    }
}
