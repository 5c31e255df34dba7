use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

pub const ALPHA: f64 = 0.05;
/// Largest effective sample size handled by the exact null distribution.
pub const EXACT_MAX_N: usize = 25;
pub const MIN_EFFECTIVE: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    pub positive_sum: f64,
    pub negative_sum: f64,
    /// `min(positive_sum, negative_sum)`.
    pub w: f64,
    pub n_effective: usize,
    pub p_value: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WilcoxonOutcome {
    Test(WilcoxonResult),
    /// Every difference is zero; no decision.
    Degenerate,
}

impl WilcoxonOutcome {
    pub fn result(&self) -> Option<&WilcoxonResult> {
        match self {
            WilcoxonOutcome::Test(r) => Some(r),
            WilcoxonOutcome::Degenerate => None,
        }
    }

    pub fn rejects(&self) -> bool {
        self.result().is_some_and(|r| r.reject)
    }
}

/// Average ranks (1-based) of `values`, ties sharing the mean of their
/// positions.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Positive and negative rank sums of nonzero differences, with the
/// magnitude ranks.
fn signed_ranks(diffs: &[f64]) -> (f64, f64, Vec<f64>) {
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    let positive_sum = ranks.iter().zip(diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let negative_sum = ranks.iter().zip(diffs).filter(|(_, d)| **d < 0.0).map(|(r, _)| r).sum();
    (positive_sum, negative_sum, ranks)
}

/// `(positive_sum, negative_sum)` of the differences, zeros dropped. No
/// minimum sample size.
pub fn rank_sums(differences: &[f64]) -> (f64, f64) {
    let nonzero: Vec<f64> = differences.iter().copied().filter(|d| *d != 0.0).collect();
    let (p, n, _) = signed_ranks(&nonzero);
    (p, n)
}

/// Two-sided exact p-value `min(1, 2·P(T⁺ ≤ w))` under random signs on the
/// given ranks. Ranks are multiples of 1/2, so the count runs over doubled
/// ranks.
pub fn exact_p_value(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let limit = (2.0 * w).round() as usize;
    let tail: f64 = counts[..=limit.min(total)].iter().sum();
    (2.0 * tail / 2f64.powi(ranks.len() as i32)).min(1.0)
}

fn normal_p_value(ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    for group in sorted.chunk_by(|a, b| a == b) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (w - mean) / var.sqrt();
    let phi = Normal::standard().cdf(z);
    (2.0 * phi.min(1.0 - phi)).min(1.0)
}

/// Wilcoxon signed-rank test on paired samples `d = a − b`. Zero
/// differences are dropped; exact for up to 25 remaining pairs, normal
/// approximation with tie correction beyond.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonOutcome> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::NanFitness);
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() && !a.is_empty() {
        return Ok(WilcoxonOutcome::Degenerate);
    }
    if diffs.len() < MIN_EFFECTIVE {
        return Err(Error::InsufficientData(format!(
            "{} nonzero paired differences, need {MIN_EFFECTIVE}",
            diffs.len()
        )));
    }
    let (positive_sum, negative_sum, ranks) = signed_ranks(&diffs);
    let w = positive_sum.min(negative_sum);
    let p_value = if ranks.len() <= EXACT_MAX_N {
        exact_p_value(&ranks, w)
    } else {
        normal_p_value(&ranks, w)
    };
    Ok(WilcoxonOutcome::Test(WilcoxonResult {
        positive_sum,
        negative_sum,
        w,
        n_effective: ranks.len(),
        p_value,
        reject: p_value < ALPHA,
    }))
}

/// Sample standard deviation (`n − 1` denominator); zero below two values.
pub fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}
