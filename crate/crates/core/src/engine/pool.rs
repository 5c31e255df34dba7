//! The operator population and its punish/reward rate scheme.

use crate::optree::OperatorTree;
use crate::{Error, RandomStream, Result};

use super::selection::roulette_select;

/// How parent operators are paired for subtree crossover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OperatorSelection {
    /// Shuffle the pool and recombine adjacent pairs.
    #[default]
    ShufflePair,
    /// Draw each pair of parents by roulette over the rates.
    RateRoulette,
}

/// Per-operator vote counts for one generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteTally {
    votes: Vec<i64>,
}

impl VoteTally {
    pub fn new(kappa: usize) -> Self {
        Self { votes: vec![0; kappa] }
    }

    pub fn from_votes(votes: Vec<i64>) -> Self {
        Self { votes }
    }

    pub fn votes(&self) -> &[i64] {
        &self.votes
    }

    pub fn up(&mut self, op: usize) {
        self.votes[op] += 1;
    }

    pub fn down(&mut self, op: usize) {
        self.votes[op] -= 1;
    }

    pub fn len(&self) -> usize {
        self.votes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.votes.is_empty()
    }
}

/// Multiplicative rate update: reward with `(1 + δ)`, punish with `(1 − δ)`,
/// leave untouched on a zero vote.
pub fn adjust_rate(rate: f64, votes: i64, delta: f64) -> f64 {
    match votes.signum() {
        1 => (1.0 + delta) * rate,
        -1 => (1.0 - delta) * rate,
        _ => rate,
    }
}

/// Scale `rates` in place to sum to one.
pub fn normalize(rates: &mut [f64]) {
    let total: f64 = rates.iter().sum();
    if total > 0.0 && total.is_finite() {
        for r in rates.iter_mut() {
            *r /= total;
        }
    } else {
        let u = 1.0 / rates.len() as f64;
        rates.iter_mut().for_each(|r| *r = u);
    }
}

/// Uniform-random rates in `(0, 1)`, normalised.
pub fn random_rates(n: usize, rng: &mut RandomStream) -> Vec<f64> {
    let mut rates: Vec<f64> = (0..n).map(|_| rng.uniform_open()).collect();
    normalize(&mut rates);
    rates
}

/// `κ` operator trees with their selection rates.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPool {
    trees: Vec<OperatorTree>,
    rates: Vec<f64>,
}

impl OperatorPool {
    /// Pair `trees` with `rates`; rates are normalised.
    pub fn new(trees: Vec<OperatorTree>, mut rates: Vec<f64>) -> Result<Self> {
        if trees.is_empty() || trees.len() != rates.len() {
            return Err(Error::InvalidConfig(format!(
                "{} trees paired with {} rates",
                trees.len(),
                rates.len()
            )));
        }
        if rates.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) || rates.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidWeights("rates must be nonnegative with a positive sum".into()));
        }
        normalize(&mut rates);
        Ok(Self { trees, rates })
    }

    /// `κ` random trees of depth at most `depth` with random rates.
    pub fn random(kappa: usize, depth: usize, rng: &mut RandomStream) -> Result<Self> {
        let trees = (0..kappa)
            .map(|_| OperatorTree::random(depth, rng))
            .collect::<Result<Vec<_>>>()?;
        let rates = random_rates(kappa, rng);
        Ok(Self { trees, rates })
    }

    pub fn trees(&self) -> &[OperatorTree] {
        &self.trees
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn kappa(&self) -> usize {
        self.trees.len()
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.iter().copied().fold(0.0, f64::max)
    }

    /// Pick an operator index by roulette over the rates.
    pub fn select(&self, rng: &mut RandomStream) -> Result<usize> {
        roulette_select(&self.rates, rng)
    }

    /// Apply one generation's votes: an independent `δ ∈ (0, 1)` per
    /// operator, then a single normalisation.
    pub fn update_rates(&self, tally: &VoteTally, rng: &mut RandomStream) -> Result<OperatorPool> {
        self.update_rates_with(tally, || rng.uniform_open())
    }

    /// [`update_rates`](Self::update_rates) with a caller-supplied `δ` source.
    pub fn update_rates_with(
        &self,
        tally: &VoteTally,
        mut delta: impl FnMut() -> f64,
    ) -> Result<OperatorPool> {
        if tally.len() != self.kappa() {
            return Err(Error::InvalidConfig(format!(
                "tally has {} entries for {} operators",
                tally.len(),
                self.kappa()
            )));
        }
        let mut rates: Vec<f64> = self
            .rates
            .iter()
            .zip(tally.votes())
            .map(|(&r, &v)| adjust_rate(r, v, delta()))
            .collect();
        normalize(&mut rates);
        Ok(OperatorPool {
            trees: self.trees.clone(),
            rates,
        })
    }

    /// Recombine the operator trees. With [`OperatorSelection::ShufflePair`]
    /// each child takes the slot, and the rate, of the parent it replaces, so
    /// the rates are only permuted.
    pub fn crossover_operators(
        &self,
        selection: OperatorSelection,
        max_nodes: usize,
        rng: &mut RandomStream,
    ) -> Result<OperatorPool> {
        let kappa = self.kappa();
        if kappa % 2 != 0 {
            return Err(Error::InvalidConfig(format!("operator pool size {kappa} is odd")));
        }
        let mut trees = Vec::with_capacity(kappa);
        let mut rates = Vec::with_capacity(kappa);
        match selection {
            OperatorSelection::ShufflePair => {
                let mut order: Vec<usize> = (0..kappa).collect();
                rng.shuffle(&mut order);
                for pair in order.chunks_exact(2) {
                    let (i, j) = (pair[0], pair[1]);
                    let (c1, c2) = OperatorTree::recombine(&self.trees[i], &self.trees[j], max_nodes, rng);
                    trees.extend([c1, c2]);
                    rates.extend([self.rates[i], self.rates[j]]);
                }
            }
            OperatorSelection::RateRoulette => {
                for _ in 0..kappa / 2 {
                    let i = self.select(rng)?;
                    let j = self.select(rng)?;
                    let (c1, c2) = OperatorTree::recombine(&self.trees[i], &self.trees[j], max_nodes, rng);
                    trees.extend([c1, c2]);
                    rates.extend([self.rates[i], self.rates[j]]);
                }
                normalize(&mut rates);
            }
        }
        Ok(OperatorPool { trees, rates })
    }

    /// Mutate each tree independently with probability `probability`.
    /// Returns the new pool and the number of trees mutated.
    pub fn mutate_operators(&self, probability: f64, rng: &mut RandomStream) -> (OperatorPool, usize) {
        let mut mutated = 0;
        let trees = self
            .trees
            .iter()
            .map(|t| {
                if rng.uniform() < probability {
                    mutated += 1;
                    t.mutate(rng)
                } else {
                    t.clone()
                }
            })
            .collect();
        (
            OperatorPool {
                trees,
                rates: self.rates.clone(),
            },
            mutated,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::AtomicOp;

    fn pool(rates: Vec<f64>) -> OperatorPool {
        let trees = vec![OperatorTree::leaf(AtomicOp::NullFirst).unwrap(); rates.len()];
        OperatorPool::new(trees, rates).unwrap()
    }

    #[test]
    fn reward_arithmetic() {
        assert_eq!(adjust_rate(0.25, 3, 0.5), 0.375);
        assert_eq!(adjust_rate(0.25, -1, 0.5), 0.125);
        assert_eq!(adjust_rate(0.25, 0, 0.5), 0.25);
    }

    #[test]
    fn zero_tally_leaves_rates() {
        let p = pool(vec![0.1, 0.2, 0.3, 0.4]);
        let mut r = RandomStream::new(0);
        let q = p.update_rates(&VoteTally::new(4), &mut r).unwrap();
        for (a, b) in p.rates().iter().zip(q.rates()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn reward_and_punish_split_the_simplex() {
        let p = pool(vec![0.5, 0.5]);
        let mut r = RandomStream::new(0);
        for _ in 0..1000 {
            let q = p.update_rates(&VoteTally::from_votes(vec![1, -1]), &mut r).unwrap();
            assert!(q.rates()[0] > 0.5 && q.rates()[1] < 0.5);
            assert!((q.rates().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn forced_delta() {
        let p = pool(vec![0.25, 0.25, 0.25, 0.25]);
        let q = p
            .update_rates_with(&VoteTally::from_votes(vec![5, 0, 0, 0]), || 0.5)
            .unwrap();
        // 0.375 / (0.375 + 0.75)
        assert!((q.rates()[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn tally_length_checked() {
        let p = pool(vec![0.5, 0.5]);
        assert!(p.update_rates(&VoteTally::new(3), &mut RandomStream::new(0)).is_err());
    }

    #[test]
    fn crossover_preserves_size_and_simplex() {
        let mut r = RandomStream::new(5);
        let p = OperatorPool::random(16, 4, &mut r).unwrap();
        for sel in [OperatorSelection::ShufflePair, OperatorSelection::RateRoulette] {
            let q = p.crossover_operators(sel, 256, &mut r).unwrap();
            assert_eq!(q.kappa(), 16);
            assert!((q.rates().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let q = p.crossover_operators(OperatorSelection::ShufflePair, 256, &mut r).unwrap();
        let mut a = p.rates().to_vec();
        let mut b = q.rates().to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
    }

    #[test]
    fn odd_pool_rejected() {
        let p = pool(vec![1.0, 1.0, 1.0]);
        assert!(p
            .crossover_operators(OperatorSelection::ShufflePair, 256, &mut RandomStream::new(0))
            .is_err());
    }

    #[test]
    fn mutation_probability_extremes() {
        let mut r = RandomStream::new(2);
        let p = OperatorPool::random(16, 4, &mut r).unwrap();
        let (q, n) = p.mutate_operators(0.0, &mut r);
        assert_eq!((q.clone(), n), (p.clone(), 0));
        let (q, n) = p.mutate_operators(1.0, &mut r);
        assert_eq!(n, 16);
        for (a, b) in p.trees().iter().zip(q.trees()) {
            let differing = a
                .nodes()
                .iter()
                .zip(b.nodes())
                .filter(|(x, y)| x.op != y.op)
                .count();
            assert_eq!(a.size(), b.size());
            assert_eq!(differing, 1);
        }
    }
}
