//! Atomic operators: the fixed genome transformations operator trees are
//! built from.
//!
//! Ids are stable and appear in serialized trees:
//!
//! | id | operator | arity |
//! |----|----------|-------|
//! | 0 | null, returns first argument | 2 (leaf only) |
//! | 1 | null, returns second argument | 2 (leaf only) |
//! | 2 | swap two genes | 1 |
//! | 3 | gaussian noise on one gene | 1 |
//! | 4 | single-point crossover | 2 |
//! | 5 | uniform crossover | 2 |
//! | 6 | average crossover | 2 |
//! | 7 | linear crossover | 2 |
//!
//! Every stochastic choice is drawn from the caller's stream before the
//! result is clamped back into the problem's box.

use std::fmt;

use crate::types::{clamp_in_place, Problem, RealGenome};
use crate::{Error, RandomStream, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomicOp {
    NullFirst,
    NullSecond,
    SwapGenes,
    GaussianNoise,
    SinglePointCrossover,
    UniformCrossover,
    AverageCrossover,
    LinearCrossover,
}

impl AtomicOp {
    pub const ALL: [AtomicOp; 8] = [
        AtomicOp::NullFirst,
        AtomicOp::NullSecond,
        AtomicOp::SwapGenes,
        AtomicOp::GaussianNoise,
        AtomicOp::SinglePointCrossover,
        AtomicOp::UniformCrossover,
        AtomicOp::AverageCrossover,
        AtomicOp::LinearCrossover,
    ];

    /// The two leaf operators.
    pub const NULLS: [AtomicOp; 2] = [AtomicOp::NullFirst, AtomicOp::NullSecond];

    /// Arity-1 operators allowed at unary internal nodes.
    pub const UNARY: [AtomicOp; 2] = [AtomicOp::SwapGenes, AtomicOp::GaussianNoise];

    /// Non-null arity-2 operators allowed at binary internal nodes.
    pub const BINARY: [AtomicOp; 4] = [
        AtomicOp::SinglePointCrossover,
        AtomicOp::UniformCrossover,
        AtomicOp::AverageCrossover,
        AtomicOp::LinearCrossover,
    ];

    /// The six non-null operators, used directly by the HAEA and GA baselines.
    pub const NON_NULL: [AtomicOp; 6] = [
        AtomicOp::SwapGenes,
        AtomicOp::GaussianNoise,
        AtomicOp::SinglePointCrossover,
        AtomicOp::UniformCrossover,
        AtomicOp::AverageCrossover,
        AtomicOp::LinearCrossover,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Result<Self> {
        Self::ALL
            .get(id as usize)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown atomic operator id {id}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            AtomicOp::NullFirst => "null-first",
            AtomicOp::NullSecond => "null-second",
            AtomicOp::SwapGenes => "swap",
            AtomicOp::GaussianNoise => "gaussian",
            AtomicOp::SinglePointCrossover => "single-point",
            AtomicOp::UniformCrossover => "uniform",
            AtomicOp::AverageCrossover => "average",
            AtomicOp::LinearCrossover => "linear",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            AtomicOp::SwapGenes | AtomicOp::GaussianNoise => 1,
            _ => 2,
        }
    }

    pub fn is_null(self) -> bool {
        matches!(self, AtomicOp::NullFirst | AtomicOp::NullSecond)
    }

    /// Number of children a tree node labelled with this operator must have.
    pub fn child_count(self) -> usize {
        if self.is_null() {
            0
        } else {
            self.arity()
        }
    }

    /// Operators a node with this label may be relabelled to by mutation.
    pub fn same_arity_class(self) -> &'static [AtomicOp] {
        match self.child_count() {
            0 => &Self::NULLS,
            1 => &Self::UNARY,
            _ => &Self::BINARY,
        }
    }
}

impl fmt::Display for AtomicOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Standard deviation of the gaussian-noise operator for `problem`.
pub fn gaussian_sigma(problem: &Problem) -> f64 {
    0.1 * problem.range()
}

/// Apply `op` to `a` (and `b` for arity-2 operators).
///
/// Arguments must be feasible and of the problem's dimensionality; the result
/// is always feasible.
pub fn apply_atomic(
    op: AtomicOp,
    a: &RealGenome,
    b: Option<&RealGenome>,
    problem: &Problem,
    rng: &mut RandomStream,
) -> Result<RealGenome> {
    let given = 1 + b.is_some() as usize;
    if given != op.arity() {
        return Err(Error::ArityMismatch {
            op: op.name(),
            expected: op.arity(),
            actual: given,
        });
    }
    let dim = problem.dimensionality();
    for g in std::iter::once(a).chain(b) {
        if g.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: g.len(),
            });
        }
    }
    let ctx = ApplyContext::new(problem);
    let out = ctx.apply(op, a.genes().to_vec(), b.map(|b| b.genes()), rng);
    Ok(RealGenome::new(out))
}

/// Bounds and noise scale hoisted out of the inner evaluation loop.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ApplyContext {
    lower: f64,
    upper: f64,
    sigma: f64,
}

impl ApplyContext {
    pub(crate) fn new(problem: &Problem) -> Self {
        Self {
            lower: problem.lower(),
            upper: problem.upper(),
            sigma: gaussian_sigma(problem),
        }
    }

    /// Core dispatch. `a` is consumed and reused as the output buffer; `b`
    /// must be present for arity-2 operators.
    pub(crate) fn apply(
        &self,
        op: AtomicOp,
        mut a: Vec<f64>,
        b: Option<&[f64]>,
        rng: &mut RandomStream,
    ) -> Vec<f64> {
        let second = || b.expect("arity-2 operator applied without a second argument");
        match op {
            AtomicOp::NullFirst => a,
            AtomicOp::NullSecond => second().to_vec(),
            AtomicOp::SwapGenes => {
                let n = a.len();
                if n > 1 {
                    let i = rng.index(n);
                    let mut j = rng.index(n - 1);
                    if j >= i {
                        j += 1;
                    }
                    a.swap(i, j);
                }
                a
            }
            AtomicOp::GaussianNoise => {
                let i = rng.index(a.len());
                let noise = self.sigma * rng.normal();
                a[i] = (a[i] + noise).max(self.lower).min(self.upper);
                a
            }
            AtomicOp::SinglePointCrossover => {
                let n = a.len();
                if n > 1 {
                    let k = rng.int_inclusive(1, n - 1);
                    splice_at(&mut a, second(), k);
                }
                a
            }
            AtomicOp::UniformCrossover => {
                for (x, &y) in a.iter_mut().zip(second()) {
                    if rng.coin() {
                        *x = y;
                    }
                }
                a
            }
            AtomicOp::AverageCrossover => {
                for (x, &y) in a.iter_mut().zip(second()) {
                    *x = 0.5 * (*x + y);
                }
                clamp_in_place(&mut a, self.lower, self.upper);
                a
            }
            AtomicOp::LinearCrossover => {
                let w = rng.uniform();
                blend(&mut a, second(), w);
                clamp_in_place(&mut a, self.lower, self.upper);
                a
            }
        }
    }
}

/// Replace genes `[k, len)` of `a` with those of `b`.
fn splice_at(a: &mut [f64], b: &[f64], k: usize) {
    a[k..].copy_from_slice(&b[k..]);
}

fn blend(a: &mut [f64], b: &[f64], w: f64) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x = w * *x + (1.0 - w) * y;
    }
}

/// Single-point crossover with a fixed cut point `k` (genes `[0, k)` from
/// `a`, the rest from `b`).
pub fn single_point_at(a: &RealGenome, b: &RealGenome, k: usize) -> Result<RealGenome> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if k > a.len() {
        return Err(Error::InvalidConfig(format!(
            "cut point {k} exceeds dimensionality {}",
            a.len()
        )));
    }
    let mut out = a.genes().to_vec();
    splice_at(&mut out, b, k);
    Ok(RealGenome::new(out))
}

/// Linear crossover `w·a + (1 − w)·b` with a fixed weight, clamped.
pub fn linear_at(a: &RealGenome, b: &RealGenome, w: f64, problem: &Problem) -> Result<RealGenome> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let mut out = a.genes().to_vec();
    blend(&mut out, b, w);
    clamp_in_place(&mut out, problem.lower(), problem.upper());
    Ok(RealGenome::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{problem, Variant};

    fn g(v: &[f64]) -> RealGenome {
        RealGenome::new(v.to_vec())
    }

    fn rastrigin(dim: usize) -> Problem {
        problem(11, Variant::Repaired, Some(dim)).unwrap()
    }

    #[test]
    fn descriptor_table() {
        for (i, op) in AtomicOp::ALL.iter().enumerate() {
            assert_eq!(op.id() as usize, i);
            assert_eq!(AtomicOp::from_id(i as u8).unwrap(), *op);
        }
        assert!(AtomicOp::from_id(8).is_err());
        assert_eq!(AtomicOp::NullFirst.arity(), 2);
        assert_eq!(AtomicOp::NullSecond.arity(), 2);
        assert_eq!(AtomicOp::SwapGenes.arity(), 1);
        assert_eq!(AtomicOp::GaussianNoise.arity(), 1);
        for op in AtomicOp::BINARY {
            assert_eq!(op.arity(), 2);
            assert!(!op.is_null());
        }
    }

    #[test]
    fn nulls_are_identities() {
        let p = rastrigin(2);
        let mut r = RandomStream::new(1);
        let (a, b) = (g(&[1.0, -2.0]), g(&[3.0, 4.0]));
        assert_eq!(apply_atomic(AtomicOp::NullFirst, &a, Some(&b), &p, &mut r).unwrap(), a);
        assert_eq!(apply_atomic(AtomicOp::NullSecond, &a, Some(&b), &p, &mut r).unwrap(), b);
    }

    #[test]
    fn average_of_mirrored_parents() {
        let p = rastrigin(2);
        let mut r = RandomStream::new(1);
        let out = apply_atomic(
            AtomicOp::AverageCrossover,
            &g(&[0.0, 2.0]),
            Some(&g(&[2.0, 0.0])),
            &p,
            &mut r,
        )
        .unwrap();
        assert_eq!(out.genes(), &[1.0, 1.0]);
    }

    #[test]
    fn single_point_forced_cut() {
        let out = single_point_at(&g(&[1.0; 4]), &g(&[2.0; 4]), 2).unwrap();
        assert_eq!(out.genes(), &[1.0, 1.0, 2.0, 2.0]);
    }

    #[test]
    fn linear_degenerate_weights() {
        let p = rastrigin(3);
        let (a, b) = (g(&[1.0, -1.0, 0.5]), g(&[-5.0, 5.0, 2.0]));
        assert_eq!(linear_at(&a, &b, 1.0, &p).unwrap(), a);
        assert_eq!(linear_at(&a, &b, 0.0, &p).unwrap(), b);
    }

    #[test]
    fn gaussian_changes_exactly_one_gene() {
        let p = rastrigin(20);
        let a = g(&[0.5; 20]);
        for seed in 0..1000 {
            let mut r = RandomStream::new(seed);
            let out = apply_atomic(AtomicOp::GaussianNoise, &a, None, &p, &mut r).unwrap();
            let changed = out.iter().zip(a.iter()).filter(|(x, y)| x != y).count();
            assert_eq!(changed, 1, "seed {seed}");
            assert!(p.is_feasible(&out));
        }
    }

    #[test]
    fn swap_exchanges_two_positions() {
        let p = rastrigin(5);
        let a = g(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let mut r = RandomStream::new(2);
        let out = apply_atomic(AtomicOp::SwapGenes, &a, None, &p, &mut r).unwrap();
        let diffs: Vec<usize> = (0..5).filter(|&i| out[i] != a[i]).collect();
        assert_eq!(diffs.len(), 2);
        assert_eq!(out[diffs[0]], a[diffs[1]]);
        assert_eq!(out[diffs[1]], a[diffs[0]]);
    }

    #[test]
    fn one_dimensional_swap_and_cut_are_identities() {
        let p = problem(5, Variant::Repaired, None).unwrap();
        let mut r = RandomStream::new(3);
        let (a, b) = (g(&[1.0]), g(&[-3.0]));
        assert_eq!(apply_atomic(AtomicOp::SwapGenes, &a, None, &p, &mut r).unwrap(), a);
        assert_eq!(
            apply_atomic(AtomicOp::SinglePointCrossover, &a, Some(&b), &p, &mut r).unwrap(),
            a
        );
    }

    #[test]
    fn arity_and_dimension_errors() {
        let p = rastrigin(2);
        let mut r = RandomStream::new(0);
        let a = g(&[0.0, 0.0]);
        assert!(matches!(
            apply_atomic(AtomicOp::SwapGenes, &a, Some(&a), &p, &mut r),
            Err(Error::ArityMismatch { expected: 1, actual: 2, .. })
        ));
        assert!(matches!(
            apply_atomic(AtomicOp::UniformCrossover, &a, None, &p, &mut r),
            Err(Error::ArityMismatch { expected: 2, actual: 1, .. })
        ));
        assert!(matches!(
            apply_atomic(AtomicOp::UniformCrossover, &a, Some(&g(&[0.0])), &p, &mut r),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
