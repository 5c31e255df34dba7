//! Genomes, problems, individuals and populations.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::{Error, RandomStream, Result};

/// Optimisation direction of a [`Problem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// `true` iff `a` is strictly better than `b`.
    ///
    /// Infinite values always lose against finite ones, whatever their sign.
    pub fn better(self, a: f64, b: f64) -> Result<bool> {
        if a.is_nan() || b.is_nan() {
            return Err(Error::NanFitness);
        }
        Ok(match (a.is_finite(), b.is_finite()) {
            (true, false) => true,
            (false, true) | (false, false) => false,
            (true, true) => match self {
                Direction::Minimize => a < b,
                Direction::Maximize => a > b,
            },
        })
    }

    /// `true` iff `a` is better than or tied with `b`.
    pub fn better_or_equal(self, a: f64, b: f64) -> Result<bool> {
        if a.is_nan() || b.is_nan() {
            return Err(Error::NanFitness);
        }
        Ok(!self.better(b, a)?)
    }

    /// The worst of a non-empty set of fitness values under this direction.
    pub(crate) fn worst(self, values: impl IntoIterator<Item = f64>) -> f64 {
        values.into_iter().fold(
            match self {
                Direction::Minimize => f64::NEG_INFINITY,
                Direction::Maximize => f64::INFINITY,
            },
            |w, v| match self {
                Direction::Minimize => w.max(v),
                Direction::Maximize => w.min(v),
            },
        )
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Minimize => f.write_str("minimize"),
            Direction::Maximize => f.write_str("maximize"),
        }
    }
}

/// A candidate solution: a fixed-length vector of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGenome(Vec<f64>);

impl RealGenome {
    pub fn new(genes: Vec<f64>) -> Self {
        Self(genes)
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn genes_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for RealGenome {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for RealGenome {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

pub type Objective = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A box-bounded real optimisation problem.
#[derive(Clone)]
pub struct Problem {
    id: u32,
    name: String,
    dimensionality: usize,
    lower: f64,
    upper: f64,
    direction: Direction,
    objective: Objective,
}

impl Problem {
    pub fn new(
        id: u32,
        name: impl Into<String>,
        dimensionality: usize,
        lower: f64,
        upper: f64,
        direction: Direction,
        objective: Objective,
    ) -> Result<Self> {
        if dimensionality == 0 {
            return Err(Error::InvalidConfig("dimensionality must be positive".into()));
        }
        if !(lower < upper) {
            return Err(Error::InvalidConfig(format!(
                "lower bound {lower} must be below upper bound {upper}"
            )));
        }
        Ok(Self {
            id,
            name: name.into(),
            dimensionality,
            lower,
            upper,
            direction,
            objective,
        })
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimensionality(&self) -> usize {
        self.dimensionality
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Evaluate the objective. NaN results are reported as errors.
    pub fn evaluate(&self, genes: &[f64]) -> Result<f64> {
        if genes.len() != self.dimensionality {
            return Err(Error::DimensionMismatch {
                expected: self.dimensionality,
                actual: genes.len(),
            });
        }
        let f = (self.objective)(genes);
        if f.is_nan() {
            return Err(Error::NanFitness);
        }
        Ok(f)
    }

    pub fn is_feasible(&self, genes: &[f64]) -> bool {
        genes.len() == self.dimensionality
            && genes.iter().all(|&g| g >= self.lower && g <= self.upper)
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("id", &self.id)
            .field("name", &self.name)
            .field("dimensionality", &self.dimensionality)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("direction", &self.direction)
            .finish_non_exhaustive()
    }
}

/// Clamp every gene into the problem's interval.
pub fn clamp(genome: RealGenome, problem: &Problem) -> RealGenome {
    let mut genome = genome;
    clamp_in_place(genome.genes_mut(), problem.lower, problem.upper);
    genome
}

pub(crate) fn clamp_in_place(genes: &mut [f64], lower: f64, upper: f64) {
    for g in genes {
        *g = g.max(lower).min(upper);
    }
}

/// A genome together with its cached objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    genome: RealGenome,
    fitness: f64,
}

impl Individual {
    pub fn evaluate(genome: RealGenome, problem: &Problem) -> Result<Self> {
        let fitness = problem.evaluate(&genome)?;
        Ok(Self { genome, fitness })
    }

    pub fn genome(&self) -> &RealGenome {
        &self.genome
    }

    pub fn fitness(&self) -> f64 {
        self.fitness
    }
}

/// A fixed-size population.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Self { members }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn fitnesses(&self) -> impl Iterator<Item = f64> + '_ {
        self.members.iter().map(Individual::fitness)
    }

    /// The best member under `direction`; the earliest wins ties.
    pub fn best(&self, direction: Direction) -> Result<&Individual> {
        let mut best = self
            .members
            .first()
            .ok_or_else(|| Error::InsufficientData("empty population".into()))?;
        for m in &self.members[1..] {
            if direction.better(m.fitness, best.fitness)? {
                best = m;
            }
        }
        Ok(best)
    }

    pub fn median_fitness(&self) -> f64 {
        median(self.fitnesses().collect())
    }
}

/// Median of a sample (mean of the two central values for even sizes).
/// Returns NaN for an empty sample.
pub fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Draw `size` individuals uniformly inside the problem's box.
pub fn init_population(problem: &Problem, size: usize, rng: &mut RandomStream) -> Result<Population> {
    if size < 2 {
        return Err(Error::InvalidConfig(format!(
            "population size must be at least 2, got {size}"
        )));
    }
    let members = (0..size)
        .map(|_| {
            let genes = (0..problem.dimensionality())
                .map(|_| rng.uniform_in(problem.lower(), problem.upper()).min(problem.upper()))
                .collect::<Vec<_>>();
            Individual::evaluate(RealGenome::new(genes), problem)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Population::new(members))
}
