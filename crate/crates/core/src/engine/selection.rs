//! Roulette-wheel selection and the fitness windowing that makes it usable
//! under minimisation.

use crate::types::{Direction, Population};
use crate::{Error, RandomStream, Result};

/// Index `i` drawn with probability `weights[i] / Σ weights`.
pub fn roulette_select(weights: &[f64], rng: &mut RandomStream) -> Result<usize> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("no candidates".into()));
    }
    let mut total = 0.0;
    for &w in weights {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidWeights(format!("weight {w} is not a finite nonnegative value")));
        }
        total += w;
    }
    if !(total > 0.0) {
        return Err(Error::InvalidWeights("weights sum to zero".into()));
    }
    let target = rng.uniform() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if target < acc {
                return Ok(i);
            }
        }
    }
    // Rounding can leave `target` a hair above the accumulated sum.
    Ok(last_positive)
}

/// Selection weights offset against the worst member of the population, so
/// that better members get larger weights under either direction.
///
/// `wᵢ = |fᵢ − f_worst| + ε` with `ε = 1e-12 · max(1, |f_worst|)`. Members
/// with non-finite fitness get weight `ε` when the worst value is finite.
pub fn fitness_selection_weights(population: &Population, direction: Direction) -> Result<Vec<f64>> {
    if population.is_empty() {
        return Err(Error::InsufficientData("empty population".into()));
    }
    let fitness: Vec<f64> = population.fitnesses().collect();
    if fitness.iter().any(|f| f.is_nan()) {
        return Err(Error::NanFitness);
    }
    let finite = fitness.iter().copied().filter(|f| f.is_finite());
    let worst = direction.worst(finite);
    if !worst.is_finite() {
        // Nothing finite to window against.
        return Ok(vec![1.0; fitness.len()]);
    }
    let eps = 1e-12 * worst.abs().max(1.0);
    Ok(fitness
        .iter()
        .map(|&f| {
            if !f.is_finite() {
                return eps;
            }
            let gap = match direction {
                Direction::Minimize => worst - f,
                Direction::Maximize => f - worst,
            };
            gap + eps
        })
        .collect())
}
