use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::benchmarks::spec_by_id;
use crate::engine::Algorithm;
use crate::types::{median, Direction};
use crate::{Error, Result};

use super::wilcoxon::{sample_sd, wilcoxon_signed_rank, WilcoxonOutcome};

/// Final best fitness of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub function: u32,
    pub population: usize,
    pub algorithm: Algorithm,
    pub repetition: u64,
    pub best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCell {
    pub algorithm: Algorithm,
    pub median: f64,
    pub sd: f64,
    pub n: usize,
    pub bold: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairTest {
    pub a: Algorithm,
    pub b: Algorithm,
    /// `None` when fewer than five nonzero differences remain.
    pub outcome: Option<WilcoxonOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub function: u32,
    pub population: usize,
    pub cells: Vec<SummaryCell>,
    pub tests: Vec<PairTest>,
}

impl ComparisonRow {
    pub fn cell(&self, algorithm: Algorithm) -> Option<&SummaryCell> {
        self.cells.iter().find(|c| c.algorithm == algorithm)
    }

    pub fn test(&self, a: Algorithm, b: Algorithm) -> Option<&PairTest> {
        self.tests
            .iter()
            .find(|t| (t.a, t.b) == (a, b) || (t.a, t.b) == (b, a))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub algorithms: Vec<Algorithm>,
    pub rows: Vec<ComparisonRow>,
}

/// `1.8E+03` style, two significant digits.
pub fn format_sci(x: f64) -> String {
    if x == 0.0 {
        return "0.0E+00".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.1e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}E{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

/// Summaries, bold marks and pairwise signed-rank tests per
/// (function, population). Runs are paired by repetition index.
pub fn compare_tables(results: &[RunResult]) -> Result<ComparisonReport> {
    let mut groups: BTreeMap<(u32, usize), BTreeMap<Algorithm, BTreeMap<u64, f64>>> = BTreeMap::new();
    for r in results {
        let slot = groups
            .entry((r.function, r.population))
            .or_default()
            .entry(r.algorithm)
            .or_default();
        if slot.insert(r.repetition, r.best_fitness).is_some() {
            return Err(Error::InvalidConfig(format!(
                "duplicate repetition {} for {} on function {} with population {}",
                r.repetition, r.algorithm, r.function, r.population
            )));
        }
    }
    let mut algorithms: Vec<Algorithm> = results.iter().map(|r| r.algorithm).collect();
    algorithms.sort();
    algorithms.dedup();

    let mut rows = Vec::with_capacity(groups.len());
    for ((function, population), by_alg) in groups {
        if by_alg.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "function {function} with population {population} has results for one algorithm only"
            )));
        }
        let reps: Vec<&u64> = by_alg.values().next().expect("nonempty").keys().collect();
        if by_alg.values().any(|m| !m.keys().eq(reps.iter().copied())) {
            return Err(Error::InvalidConfig(format!(
                "repetitions of function {function} with population {population} do not pair up"
            )));
        }
        let (direction, magnitude) = reporting_rule(function);
        let mut cells: Vec<SummaryCell> = by_alg
            .iter()
            .map(|(&algorithm, runs)| {
                let values: Vec<f64> = runs.values().map(|v| if magnitude { v.abs() } else { *v }).collect();
                SummaryCell {
                    algorithm,
                    median: median(values.clone()),
                    sd: sample_sd(&values),
                    n: values.len(),
                    bold: false,
                }
            })
            .collect();
        mark_best(&mut cells, direction)?;
        let mut tests = Vec::new();
        let algs: Vec<Algorithm> = by_alg.keys().copied().collect();
        for (i, &a) in algs.iter().enumerate() {
            for &b in &algs[i + 1..] {
                let xa: Vec<f64> = by_alg[&a].values().copied().collect();
                let xb: Vec<f64> = by_alg[&b].values().copied().collect();
                let outcome = match wilcoxon_signed_rank(&xa, &xb) {
                    Ok(o) => Some(o),
                    Err(Error::InsufficientData(_)) => None,
                    Err(e) => return Err(e),
                };
                tests.push(PairTest { a, b, outcome });
            }
        }
        rows.push(ComparisonRow {
            function,
            population,
            cells,
            tests,
        });
    }
    Ok(ComparisonReport { algorithms, rows })
}

/// Direction used for bolding, and whether cells summarise magnitudes.
/// Shubert's optimum is reported by magnitude, so its larger absolute
/// values win.
fn reporting_rule(function: u32) -> (Direction, bool) {
    match spec_by_id(function).ok() {
        Some(s) if s.key == "shubert" => (Direction::Maximize, true),
        Some(s) => (s.direction, false),
        None => (Direction::Minimize, false),
    }
}

/// Bold every cell tied at the best median, unless all medians agree.
fn mark_best(cells: &mut [SummaryCell], direction: Direction) -> Result<()> {
    let first = cells[0].median;
    if cells.iter().all(|c| c.median == first) {
        return Ok(());
    }
    let mut best = first;
    for c in cells.iter() {
        if direction.better(c.median, best)? {
            best = c.median;
        }
    }
    for c in cells.iter_mut() {
        c.bold = c.median == best;
    }
    Ok(())
}

impl ComparisonReport {
    /// Header `function,population` then `<alg>_median,<alg>_sd,<alg>_bold`
    /// per algorithm.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("function,population");
        for a in &self.algorithms {
            let _ = write!(out, ",{a}_median,{a}_sd,{a}_bold");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{}", row.function, row.population);
            for a in &self.algorithms {
                match row.cell(*a) {
                    Some(c) => {
                        let _ = write!(out, ",{},{},{}", c.median, c.sd, c.bold);
                    }
                    None => out.push_str(",,,"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Aligned table of `median ± sd` cells; bold cells carry a `*`.
    pub fn to_text(&self) -> String {
        let mut header = vec!["Id".to_string(), "Pop".to_string()];
        header.extend(self.algorithms.iter().map(|a| format!("{a} median")));
        let mut table = vec![header];
        for row in &self.rows {
            let mut line = vec![row.function.to_string(), row.population.to_string()];
            for a in &self.algorithms {
                line.push(match row.cell(*a) {
                    Some(c) => format!(
                        "{}{} ± {}",
                        if c.bold { "*" } else { "" },
                        format_sci(c.median),
                        format_sci(c.sd)
                    ),
                    None => "-".into(),
                });
            }
            table.push(line);
        }
        align(&table)
    }

    /// Every pairwise test as
    /// `function,population,a,b,n_effective,positive_sum,negative_sum,w,p_value,reject`.
    /// Degenerate or undersized pairs have empty statistics.
    pub fn tests_csv(&self) -> String {
        let mut out = String::from("function,population,a,b,n_effective,positive_sum,negative_sum,w,p_value,reject\n");
        for row in &self.rows {
            for t in &row.tests {
                let _ = write!(out, "{},{},{},{},", row.function, row.population, t.a, t.b);
                match t.outcome.as_ref().and_then(WilcoxonOutcome::result) {
                    Some(r) => {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            r.n_effective, r.positive_sum, r.negative_sum, r.w, r.p_value, r.reject
                        );
                    }
                    None => out.push_str(",,,,,\n"),
                }
            }
        }
        out
    }

    /// Pairs whose null hypothesis was not rejected, as
    /// `function,population,a,b,positive_sum,negative_sum,w,p_value`.
    /// Degenerate pairs are listed with empty statistics.
    pub fn non_rejected_csv(&self) -> String {
        let mut out = String::from("function,population,a,b,positive_sum,negative_sum,w,p_value\n");
        for row in &self.rows {
            for t in &row.tests {
                match &t.outcome {
                    Some(WilcoxonOutcome::Test(r)) if !r.reject => {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{},{},{}",
                            row.function, row.population, t.a, t.b, r.positive_sum, r.negative_sum, r.w, r.p_value
                        );
                    }
                    Some(WilcoxonOutcome::Degenerate) | None => {
                        let _ = writeln!(out, "{},{},{},{},,,,", row.function, row.population, t.a, t.b);
                    }
                    _ => {}
                }
            }
        }
        out
    }
}

fn align(table: &[Vec<String>]) -> String {
    let cols = table[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in table {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
