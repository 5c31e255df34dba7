//! Property checks shared by the proptest suite and the acceptance run.
//! Each takes a seed and reports the first violated condition.

use std::sync::Arc;

use aoea_core::analysis::tree_edit_distance;
use aoea_core::atomic::{apply_atomic, AtomicOp};
use aoea_core::engine::{run, Algorithm, EngineConfig, OperatorPool, VoteTally};
use aoea_core::optree::{OperatorTree, DEFAULT_MAX_NODES};
use aoea_core::{Direction, Problem, RandomStream, RealGenome};

pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Structural invariants of a tree: the arity rule at every node, and the
/// size bound.
pub fn structurally_valid(t: &OperatorTree, max_nodes: usize) -> Check {
    for n in t.nodes() {
        let kids = n.children().count();
        let ok = if n.op.is_null() {
            kids == 0
        } else if n.op.arity() == 1 {
            n.left.is_none() && n.right.is_some()
        } else {
            n.left.is_some() && n.right.is_some()
        };
        ensure(ok, || format!("node {} has {kids} children in {t}", n.op.id()))?;
    }
    ensure(t.validate().is_ok(), || format!("validate rejects {t}"))?;
    ensure(t.size() >= 1 && t.size() <= max_nodes, || format!("size {} out of range", t.size()))?;
    let reparsed: OperatorTree = t.to_string().parse().map_err(|e| format!("{e}"))?;
    ensure(&reparsed == t, || format!("{t} does not round-trip"))
}

/// Random trees put through a sequence of mutations and recombinations.
pub fn tree_operations(seed: u64) -> Check {
    let mut rng = RandomStream::new(seed);
    let max_nodes = 4 + rng.index(60);
    let mut a = OperatorTree::random(4, &mut rng).unwrap();
    let mut b = OperatorTree::random(4, &mut rng).unwrap();
    ensure(a.depth() <= 4 && b.depth() <= 4, || "initial depth exceeds 4".into())?;
    for _ in 0..8 {
        let m = a.mutate(&mut rng);
        ensure(m.size() == a.size() && m.depth() == a.depth(), || "mutation changed shape".into())?;
        let changed = a.nodes().iter().zip(m.nodes()).filter(|(x, y)| x.op != y.op).count();
        ensure(changed <= 1, || format!("mutation relabelled {changed} nodes"))?;
        for (x, y) in a.nodes().iter().zip(m.nodes()) {
            ensure(x.op.arity() == y.op.arity() && x.op.is_null() == y.op.is_null(), || {
                "mutation crossed arity classes".into()
            })?;
        }
        let before = a.size() + b.size();
        let (c, d) = OperatorTree::recombine(&m, &b, max_nodes.max(m.size()).max(b.size()), &mut rng);
        ensure(c.size() + d.size() == before, || "recombination lost nodes".into())?;
        structurally_valid(&c, max_nodes.max(m.size()).max(b.size()))?;
        structurally_valid(&d, max_nodes.max(m.size()).max(b.size()))?;
        a = c;
        b = d;
    }
    structurally_valid(&a, DEFAULT_MAX_NODES)
}

fn box_problem(rng: &mut RandomStream) -> Problem {
    let lower = rng.uniform_in(-1000.0, 10.0);
    let upper = lower + rng.uniform_in(1e-3, 1000.0);
    let dim = 1 + rng.index(12);
    Problem::new(0, "box", dim, lower, upper, Direction::Minimize, Arc::new(|x: &[f64]| x.iter().sum())).unwrap()
}

fn genome(p: &Problem, rng: &mut RandomStream) -> RealGenome {
    RealGenome::new(
        (0..p.dimensionality())
            .map(|_| match rng.index(8) {
                0 => p.lower(),
                1 => p.upper(),
                _ => rng.uniform_in(p.lower(), p.upper()),
            })
            .collect(),
    )
}

/// The Null-First leaf returns its first argument bit for bit.
pub fn null_first_identity(seed: u64) -> Check {
    let mut rng = RandomStream::new(seed);
    let p = box_problem(&mut rng);
    let (a, b) = (genome(&p, &mut rng), genome(&p, &mut rng));
    let t = OperatorTree::leaf(AtomicOp::NullFirst).unwrap();
    let out = t.evaluate(&a, &b, &p, &mut rng).map_err(|e| e.to_string())?;
    let same = out.iter().zip(a.iter()).all(|(x, y)| x.to_bits() == y.to_bits());
    ensure(same && out.len() == a.len(), || "Null-First changed its argument".into())
}

/// Every atomic operator and every random tree maps feasible inputs to
/// feasible outputs of the same length.
pub fn bound_closure(seed: u64) -> Check {
    let mut rng = RandomStream::new(seed);
    let p = box_problem(&mut rng);
    let (a, b) = (genome(&p, &mut rng), genome(&p, &mut rng));
    for op in AtomicOp::ALL {
        let out = if op.arity() == 1 {
            apply_atomic(op, &a, None, &p, &mut rng)
        } else {
            apply_atomic(op, &a, Some(&b), &p, &mut rng)
        }
        .map_err(|e| e.to_string())?;
        ensure(out.len() == a.len() && p.is_feasible(&out), || format!("{} left the box", op.name()))?;
        if matches!(op, AtomicOp::AverageCrossover | AtomicOp::UniformCrossover) {
            for ((o, x), y) in out.iter().zip(a.iter()).zip(b.iter()) {
                ensure(*o >= x.min(*y) && *o <= x.max(*y), || format!("{} not gene-wise bounded", op.name()))?;
            }
        }
    }
    let t = OperatorTree::random(4, &mut rng).unwrap();
    let out = t.evaluate(&a, &b, &p, &mut rng).map_err(|e| e.to_string())?;
    ensure(out.len() == a.len() && p.is_feasible(&out), || format!("tree {t} left the box"))
}

/// Rates stay on the simplex through random vote sequences.
pub fn rate_simplex(seed: u64) -> Check {
    let mut rng = RandomStream::new(seed);
    let kappa = 2 * (1 + rng.index(10));
    let mut pool = OperatorPool::random(kappa, 4, &mut rng).unwrap();
    for _ in 0..20 {
        let votes: Vec<i64> = (0..kappa).map(|_| rng.int_inclusive(0, 20) as i64 - 10).collect();
        pool = pool.update_rates(&VoteTally::from_votes(votes), &mut rng).unwrap();
        pool = pool
            .crossover_operators(Default::default(), DEFAULT_MAX_NODES, &mut rng)
            .unwrap();
        pool = pool.mutate_operators(1.0 / kappa as f64, &mut rng).0;
        let sum: f64 = pool.rates().iter().sum();
        ensure((sum - 1.0).abs() <= 1e-9, || format!("rates sum to {sum}"))?;
        ensure(pool.rates().iter().all(|r| *r >= 0.0), || "negative rate".into())?;
    }
    Ok(())
}

fn small_config(seed: u64, algorithm: Algorithm) -> EngineConfig {
    let mut rng = RandomStream::new(seed ^ 0x5eed);
    let functions = [1, 2, 3, 8, 10, 11, 12, 13, 14, 15];
    EngineConfig {
        algorithm,
        function: functions[rng.index(functions.len())],
        dimensionality: Some(2 + rng.index(8)),
        population_size: 4 + rng.index(12),
        kappa: 2 * (1 + rng.index(8)),
        generations: 5 + rng.index(20),
        seed,
        ..EngineConfig::default()
    }
}

/// Best fitness never worsens, and AOEA rates stay on the simplex, in
/// small runs of each algorithm.
pub fn run_monotone(seed: u64) -> Check {
    for alg in Algorithm::ALL {
        let config = small_config(seed, alg);
        let trace = run(&config).map_err(|e| e.to_string())?;
        ensure(trace.records.len() == config.generations + 1, || "record count".into())?;
        for w in trace.records.windows(2) {
            ensure(trace.direction.better_or_equal(w[1].best_fitness, w[0].best_fitness).unwrap(), || {
                format!("{alg} best worsened at generation {}", w[1].generation)
            })?;
        }
        if alg != Algorithm::Ga {
            for r in &trace.records {
                let sum: f64 = r.rates.iter().sum();
                ensure((sum - 1.0).abs() <= 1e-9, || format!("{alg} rates sum to {sum}"))?;
            }
        }
    }
    Ok(())
}

/// A seeded run replays bit for bit.
pub fn replay(seed: u64) -> Check {
    for alg in Algorithm::ALL {
        let config = EngineConfig {
            snapshot_every: Some(3),
            ..small_config(seed, alg)
        };
        let a = run(&config).map_err(|e| e.to_string())?;
        let b = run(&config).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{alg} replay diverged"))?;
        let bits: Vec<u64> = a.best.genome().iter().map(|x| x.to_bits()).collect();
        let bits_b: Vec<u64> = b.best.genome().iter().map(|x| x.to_bits()).collect();
        ensure(bits == bits_b, || "best genome differs in bits".into())?;
    }
    Ok(())
}

/// Identity, symmetry and the triangle inequality on random triples.
pub fn ted_metric(seed: u64) -> Check {
    let mut rng = RandomStream::new(seed);
    let t: Vec<OperatorTree> = (0..3).map(|_| OperatorTree::random(5, &mut rng).unwrap()).collect();
    let d = |i: usize, j: usize| tree_edit_distance(&t[i], &t[j]);
    ensure(d(0, 0) == 0, || "d(t,t) != 0".into())?;
    ensure(d(0, 1) == d(1, 0), || "asymmetric".into())?;
    ensure((d(0, 1) == 0) == (t[0] == t[1]), || "zero distance between distinct trees".into())?;
    ensure(d(0, 2) <= d(0, 1) + d(1, 2), || "triangle inequality".into())?;
    ensure(d(0, 1) <= t[0].size() + t[1].size(), || "exceeds size sum".into())
}
