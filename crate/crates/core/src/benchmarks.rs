//! The fifteen real-valued benchmark functions, ordered by increasing
//! hardness.
//!
//! A few printed formulas in the reference table are internally
//! inconsistent with their stated optima. For those ids two readings are
//! available through [`Variant`]: `AsPrinted` follows the table literally,
//! `Repaired` applies the conventional form. `Repaired` is the default.
//!
//! | id | variant difference |
//! |----|--------------------|
//! | 3  | `Σ xᵢ^i` vs `Σ |xᵢ|^i` |
//! | 9  | `Σ cos((i+1)x + i)` vs `Σ i·cos((i+1)x + i)` |
//! | 13 | `100(xᵢ₊₁ − xᵢ²)` vs `100(xᵢ₊₁ − xᵢ²)²` |
//! | 15 | `418.9829·n·Σ …` vs `418.9829·n − Σ …` |

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::types::{Direction, Problem};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    AsPrinted,
    #[default]
    Repaired,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::AsPrinted => f.write_str("as-printed"),
            Variant::Repaired => f.write_str("repaired"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "as-printed" | "asprinted" | "printed" => Ok(Variant::AsPrinted),
            "repaired" => Ok(Variant::Repaired),
            other => Err(Error::InvalidConfig(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub id: u32,
    pub name: &'static str,
    /// Lower-case identifier accepted on the command line.
    pub key: &'static str,
    pub default_dimensionality: usize,
    /// `Some(n)` when the function is only defined for `n` dimensions.
    pub fixed_dimensionality: Option<usize>,
    pub lower: f64,
    pub upper: f64,
    pub direction: Direction,
    /// Whether `Variant` changes the formula.
    pub has_variants: bool,
}

const fn spec(
    id: u32,
    name: &'static str,
    key: &'static str,
    default_dimensionality: usize,
    fixed_dimensionality: Option<usize>,
    lower: f64,
    upper: f64,
    direction: Direction,
    has_variants: bool,
) -> BenchmarkSpec {
    BenchmarkSpec {
        id,
        name,
        key,
        default_dimensionality,
        fixed_dimensionality,
        lower,
        upper,
        direction,
        has_variants,
    }
}

use Direction::{Maximize, Minimize};

static SPECS: [BenchmarkSpec; 15] = [
    spec(1, "Jong 1", "jong1", 1000, None, -5.12, 5.12, Minimize, false),
    spec(2, "Jong 2", "jong2", 1000, None, -5.12, 5.12, Minimize, false),
    spec(3, "Jong 3", "jong3", 1000, None, -1.0, 1.0, Minimize, true),
    spec(4, "Himmelblau", "himmelblau", 2, Some(2), -6.0, 6.0, Minimize, false),
    spec(5, "Two peak trap", "two-peak-trap", 1, None, -15.0, 15.0, Minimize, false),
    spec(6, "Central two peak trap", "central-two-peak-trap", 1, None, -15.0, 15.0, Minimize, false),
    spec(7, "H1", "h1", 2, Some(2), -100.0, 100.0, Maximize, false),
    spec(8, "Ackley", "ackley", 1000, None, -5.0, 5.0, Minimize, false),
    spec(9, "Shubert 2D", "shubert", 2, Some(2), -5.12, 5.12, Minimize, true),
    spec(10, "Griewangk", "griewangk", 1000, None, -600.0, 600.0, Minimize, false),
    spec(11, "Rastrigin", "rastrigin", 1000, None, -5.12, 5.12, Minimize, false),
    spec(12, "Schaffer", "schaffer", 1000, None, -100.0, 100.0, Minimize, false),
    spec(13, "Rosenbrock", "rosenbrock", 1000, None, -2.048, 2.048, Minimize, true),
    spec(14, "Bohachevsky", "bohachevsky", 1000, None, -100.0, 100.0, Minimize, false),
    spec(15, "Schwefel", "schwefel", 1000, None, -500.0, 500.0, Minimize, true),
];

/// All benchmark specs, ids 1..=15 in table order.
pub fn list_benchmarks() -> &'static [BenchmarkSpec] {
    &SPECS
}

pub fn spec_by_id(id: u32) -> Result<&'static BenchmarkSpec> {
    SPECS
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownBenchmark(id.to_string()))
}

/// Look a benchmark up by numeric id or by its key (`"11"` or `"rastrigin"`).
pub fn lookup(name_or_id: &str) -> Result<&'static BenchmarkSpec> {
    let s = name_or_id.trim();
    if let Ok(id) = s.parse::<u32>() {
        return spec_by_id(id);
    }
    let lower = s.to_ascii_lowercase();
    SPECS
        .iter()
        .find(|spec| spec.key == lower || spec.name.eq_ignore_ascii_case(s))
        .ok_or_else(|| Error::UnknownBenchmark(s.to_string()))
}

impl BenchmarkSpec {
    /// Resolve the dimensionality to use: the fixed one if the function has
    /// one, else the override, else the default.
    pub fn resolve_dimensionality(&self, requested: Option<usize>) -> Result<usize> {
        match (self.fixed_dimensionality, requested) {
            (Some(fixed), Some(r)) if r != fixed => Err(Error::DimensionMismatch {
                expected: fixed,
                actual: r,
            }),
            (Some(fixed), _) => Ok(fixed),
            (None, Some(0)) => Err(Error::InvalidConfig("dimensionality must be positive".into())),
            (None, Some(r)) => Ok(r),
            (None, None) => Ok(self.default_dimensionality),
        }
    }
}

/// Evaluate benchmark `id` at `x`, checking dimensionality and bounds.
pub fn evaluate(id: u32, variant: Variant, x: &[f64]) -> Result<f64> {
    let spec = spec_by_id(id)?;
    if x.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: spec.default_dimensionality,
            actual: 0,
        });
    }
    if let Some(fixed) = spec.fixed_dimensionality {
        if x.len() != fixed {
            return Err(Error::DimensionMismatch {
                expected: fixed,
                actual: x.len(),
            });
        }
    }
    if let Some((index, &value)) = x
        .iter()
        .enumerate()
        .find(|(_, &v)| !(v >= spec.lower && v <= spec.upper))
    {
        return Err(Error::OutOfBounds {
            index,
            value,
            lower: spec.lower,
            upper: spec.upper,
        });
    }
    Ok(formula(id, variant)(x))
}

/// Build a [`Problem`] for benchmark `id`.
pub fn problem(id: u32, variant: Variant, dimensionality: Option<usize>) -> Result<Problem> {
    let spec = spec_by_id(id)?;
    let dim = spec.resolve_dimensionality(dimensionality)?;
    let f = formula(id, variant);
    Problem::new(
        id,
        spec.name,
        dim,
        spec.lower,
        spec.upper,
        spec.direction,
        Arc::new(f),
    )
}

fn formula(id: u32, variant: Variant) -> fn(&[f64]) -> f64 {
    use Variant::*;
    match (id, variant) {
        (1, _) => jong1,
        (2, _) => jong2,
        (3, AsPrinted) => jong3_printed,
        (3, Repaired) => jong3,
        (4, _) => himmelblau,
        (5, _) => two_peak_trap,
        (6, _) => central_two_peak_trap,
        (7, _) => h1,
        (8, _) => ackley,
        (9, AsPrinted) => shubert_printed,
        (9, Repaired) => shubert,
        (10, _) => griewangk,
        (11, _) => rastrigin,
        (12, _) => schaffer,
        (13, AsPrinted) => rosenbrock_printed,
        (13, Repaired) => rosenbrock,
        (14, _) => bohachevsky,
        (15, AsPrinted) => schwefel_printed,
        (15, Repaired) => schwefel,
        _ => unreachable!("benchmark ids are validated before dispatch"),
    }
}

pub fn jong1(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn jong2(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| (i as f64 + 2.0) * v * v)
        .sum()
}

pub fn jong3(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| v.abs().powi(i as i32 + 1))
        .sum()
}

pub fn jong3_printed(x: &[f64]) -> f64 {
    x.iter().enumerate().map(|(i, v)| v.powi(i as i32 + 1)).sum()
}

pub fn himmelblau(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (a * a + b - 11.0).powi(2) + (a + b * b - 7.0).powi(2)
}

fn trap(x: f64) -> f64 {
    if (10.0..15.0).contains(&x) {
        160.0 / 15.0 * (15.0 - x)
    } else {
        200.0 / 5.0 * (x - 15.0)
    }
}

fn central_trap(x: f64) -> f64 {
    if x < 10.0 {
        160.0 / 15.0 * x
    } else if x < 15.0 {
        160.0 / 15.0 * (15.0 - x)
    } else {
        200.0 / 5.0 * (x - 15.0)
    }
}

pub fn two_peak_trap(x: &[f64]) -> f64 {
    x.iter().copied().map(trap).sum()
}

pub fn central_two_peak_trap(x: &[f64]) -> f64 {
    x.iter().copied().map(central_trap).sum()
}

pub fn h1(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    let num = (a - b / 8.0).sin().powi(2) + (b + a / 8.0).sin().powi(2);
    let den = ((a - 8.6998).powi(2) + (b - 6.7665).powi(2) + 1.0).sqrt();
    num / den
}

pub fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    20.0 - 20.0 * (-0.2 * sq.sqrt()).exp() + E - cs.exp()
}

fn shubert_factor(v: f64, weighted: bool) -> f64 {
    (1..=5)
        .map(|i| {
            let i = i as f64;
            let w = if weighted { i } else { 1.0 };
            w * ((i + 1.0) * v + i).cos()
        })
        .sum()
}

pub fn shubert(x: &[f64]) -> f64 {
    shubert_factor(x[0], true) * shubert_factor(x[1], true)
}

pub fn shubert_printed(x: &[f64]) -> f64 {
    shubert_factor(x[0], false) * shubert_factor(x[1], false)
}

pub fn griewangk(x: &[f64]) -> f64 {
    let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product::<f64>();
    sum - prod + 1.0
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

pub fn schaffer(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let s = w[0] * w[0] + w[1] * w[1];
            s.powf(0.25) * ((50.0 * s.powf(0.1)).sin() + 1.0)
        })
        .sum()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

pub fn rosenbrock_printed(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]) + (1.0 - w[0]).powi(2))
        .sum()
}

pub fn bohachevsky(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            w[0] * w[0] + 2.0 * w[1] * w[1] - 0.3 * (3.0 * PI * w[0]).cos()
                - 0.4 * (4.0 * PI * w[1]).cos()
                + 0.7
        })
        .sum()
}

fn schwefel_sum(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v.abs().sqrt().sin()).sum()
}

pub fn schwefel(x: &[f64]) -> f64 {
    418.9829 * x.len() as f64 - schwefel_sum(x)
}

pub fn schwefel_printed(x: &[f64]) -> f64 {
    418.9829 * x.len() as f64 * schwefel_sum(x)
}
