//! Reports regenerated from a result store.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Result};
use aoea_core::analysis::{pairwise_distances, smacof_embed, write_embedding_csv, Normalization, SMACOF_MAX_ITERS, SMACOF_TOL};
use aoea_core::engine::Algorithm;
use aoea_core::stats::{compare_tables, ComparisonReport, RunResult};
use aoea_core::types::median;
use aoea_core::RandomStream;

use crate::config::ExperimentConfig;
use crate::store::{
    cell_hash, cells, experiment_hash, read_experiment, read_rates, read_snapshots, read_trace, write_atomic, Cell,
    Manifest, ManifestEntry, TraceRow,
};

pub const REPORTS: &str = "reports";
pub const GAPS_HEADER: &str = "# aoea-gaps v1";
const EMBED_TAG: u64 = 0xe3b;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReportKind {
    Tables,
    Traces,
    Embeddings,
    Rates,
    Stats,
}

impl ReportKind {
    pub const ALL: [ReportKind; 5] = [
        ReportKind::Tables,
        ReportKind::Traces,
        ReportKind::Embeddings,
        ReportKind::Rates,
        ReportKind::Stats,
    ];
}

impl FromStr for ReportKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "tables" => ReportKind::Tables,
            "traces" => ReportKind::Traces,
            "embeddings" => ReportKind::Embeddings,
            "rates" => ReportKind::Rates,
            "stats" => ReportKind::Stats,
            other => bail!("unknown report kind `{other}`"),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportOutcome {
    /// Written files, relative to the store root.
    pub files: Vec<PathBuf>,
    /// Expected cells with no completed run.
    pub gaps: Vec<Cell>,
}

struct Store {
    root: PathBuf,
    config: ExperimentConfig,
    manifest: Manifest,
    complete: Vec<Cell>,
    gaps: Vec<Cell>,
    traces: BTreeMap<Cell, Vec<TraceRow>>,
}

impl Store {
    fn open(root: &Path) -> Result<Self> {
        let config = read_experiment(root)?;
        let manifest = Manifest::load(root)?;
        let (complete, gaps): (Vec<Cell>, Vec<Cell>) = cells(&config)
            .into_iter()
            .partition(|c| manifest.is_complete(root, c, &cell_hash(&config, c)));
        let mut traces = BTreeMap::new();
        for c in &complete {
            traces.insert(*c, read_trace(&root.join(c.trace_path()))?);
        }
        Ok(Self {
            root: root.to_path_buf(),
            config,
            manifest,
            complete,
            gaps,
            traces,
        })
    }

    fn has(&self, path: &Path) -> bool {
        self.manifest.entries.contains_key(&path.to_string_lossy().replace('\\', "/")) && self.root.join(path).exists()
    }

    /// Final results per population, restricted so every algorithm in a
    /// (function, population) row shares the same repetitions.
    fn paired_results(&self) -> BTreeMap<usize, Vec<RunResult>> {
        let mut by_row: BTreeMap<(usize, u32), BTreeMap<Algorithm, BTreeMap<usize, f64>>> = BTreeMap::new();
        for (c, t) in &self.traces {
            if let Some(last) = t.last() {
                by_row
                    .entry((c.population, c.function))
                    .or_default()
                    .entry(c.algorithm)
                    .or_default()
                    .insert(c.repetition, last.best_fitness);
            }
        }
        let mut out: BTreeMap<usize, Vec<RunResult>> = BTreeMap::new();
        for ((population, function), algs) in by_row {
            if algs.len() < 2 {
                continue;
            }
            let shared: BTreeSet<usize> = algs
                .values()
                .map(|m| m.keys().copied().collect::<BTreeSet<_>>())
                .reduce(|a, b| a.intersection(&b).copied().collect())
                .unwrap_or_default();
            for (alg, runs) in algs {
                for (&rep, &best) in runs.iter().filter(|(r, _)| shared.contains(r)) {
                    out.entry(population).or_default().push(RunResult {
                        function,
                        population,
                        algorithm: alg,
                        repetition: rep as u64,
                        best_fitness: best,
                    });
                }
            }
        }
        out
    }
}

struct Writer<'a> {
    store: &'a Store,
    hash: String,
    files: Vec<(PathBuf, Option<Cell>)>,
}

impl Writer<'_> {
    fn write(&mut self, path: PathBuf, cell: Option<Cell>, contents: &str) -> Result<()> {
        write_atomic(&self.store.root.join(&path), contents)?;
        self.files.push((path, cell));
        Ok(())
    }
}

fn comparisons(store: &Store) -> Result<Vec<(usize, ComparisonReport)>> {
    store
        .paired_results()
        .into_iter()
        .map(|(p, results)| Ok((p, compare_tables(&results)?)))
        .collect()
}

/// Regenerate the requested reports under `reports/` and list the gaps.
/// Unchanged stores give byte-identical reports.
pub fn report(root: &Path, kinds: &[ReportKind]) -> Result<ReportOutcome> {
    let store = Store::open(root)?;
    let mut w = Writer {
        hash: experiment_hash(&store.config),
        store: &store,
        files: Vec::new(),
    };
    let dir = PathBuf::from(REPORTS);
    let kinds: BTreeSet<ReportKind> = kinds.iter().copied().collect();

    let mut gaps = format!("{GAPS_HEADER}\nfunction,algorithm,population,repetition\n");
    for c in &store.gaps {
        let _ = writeln!(gaps, "{},{},{},{}", c.function, c.algorithm, c.population, c.repetition);
    }
    w.write(dir.join("gaps.csv"), None, &gaps)?;

    if kinds.contains(&ReportKind::Tables) || kinds.contains(&ReportKind::Stats) {
        for (p, cmp) in comparisons(&store)? {
            if kinds.contains(&ReportKind::Tables) {
                w.write(dir.join(format!("table_p{p}.csv")), None, &cmp.to_csv())?;
                w.write(dir.join(format!("table_p{p}.txt")), None, &cmp.to_text())?;
            }
            if kinds.contains(&ReportKind::Stats) {
                w.write(dir.join(format!("stats_p{p}.csv")), None, &cmp.tests_csv())?;
                w.write(dir.join(format!("not_rejected_p{p}.csv")), None, &cmp.non_rejected_csv())?;
            }
        }
    }

    if kinds.contains(&ReportKind::Traces) {
        let algorithms = &store.config.algorithms;
        for &f in &store.config.functions {
            for &p in &store.config.populations {
                let mut s = String::from("generation");
                for a in algorithms {
                    let _ = write!(s, ",{a}");
                }
                s.push('\n');
                for g in 0..=store.config.generations {
                    let _ = write!(s, "{g}");
                    for &a in algorithms {
                        let values: Vec<f64> = store
                            .traces
                            .iter()
                            .filter(|(c, _)| c.function == f && c.population == p && c.algorithm == a)
                            .filter_map(|(_, t)| t.get(g).map(|r| r.best_fitness))
                            .collect();
                        if values.is_empty() {
                            s.push(',');
                        } else {
                            let _ = write!(s, ",{}", median(values));
                        }
                    }
                    s.push('\n');
                }
                w.write(dir.join("traces").join(format!("f{f:02}_p{p}.csv")), None, &s)?;
            }
        }
    }

    if kinds.contains(&ReportKind::Rates) {
        for c in &store.complete {
            if !store.has(&c.rates_path()) {
                continue;
            }
            let rates = read_rates(&root.join(c.rates_path()))?;
            let width = rates.first().map_or(0, |(_, r)| r.len());
            let mut s = String::from("generation,max_rate");
            for i in 0..width {
                let _ = write!(s, ",rate_{i}");
            }
            s.push('\n');
            for (g, r) in rates {
                let max = r.iter().copied().fold(0.0, f64::max);
                let _ = write!(s, "{g},{max}");
                for v in r {
                    let _ = write!(s, ",{v}");
                }
                s.push('\n');
            }
            let name = format!(
                "f{:02}_p{}_{}_r{:03}.csv",
                c.function,
                c.population,
                c.algorithm.name().to_ascii_lowercase(),
                c.repetition
            );
            w.write(dir.join("rates").join(name), Some(*c), &s)?;
        }
    }

    if kinds.contains(&ReportKind::Embeddings) {
        for c in &store.complete {
            if !store.has(&c.snapshots_path()) {
                continue;
            }
            let snapshots = read_snapshots(&root.join(c.snapshots_path()))?;
            let mut rng = RandomStream::derived(c.run_seed(store.config.seed), &[EMBED_TAG]);
            let mut buf = Vec::new();
            for (i, (g, trees)) in snapshots.iter().enumerate() {
                let d = pairwise_distances(trees, Normalization::SizeSum)?;
                let e = smacof_embed(&d, &mut rng, SMACOF_MAX_ITERS, SMACOF_TOL);
                write_embedding_csv(&mut buf, i == 0, *g, &e)?;
            }
            let name = format!("f{:02}_p{}_r{:03}.csv", c.function, c.population, c.repetition);
            w.write(dir.join("embeddings").join(name), Some(*c), &String::from_utf8(buf)?)?;
        }
    }

    let mut manifest = store.manifest.clone();
    for (path, cell) in &w.files {
        manifest.insert(
            path,
            ManifestEntry {
                kind: "report".into(),
                cell: *cell,
                seed: cell.map_or(store.config.seed, |c| c.run_seed(store.config.seed)),
                config_hash: w.hash.clone(),
            },
        );
    }
    manifest.save(root)?;
    Ok(ReportOutcome {
        files: w.files.into_iter().map(|(p, _)| p).collect(),
        gaps: store.gaps.clone(),
    })
}

/// The aligned comparison tables and non-rejected pairs, for printing.
pub fn compare_text(root: &Path, population: Option<usize>) -> Result<String> {
    let store = Store::open(root)?;
    let mut out = String::new();
    for (p, cmp) in comparisons(&store)? {
        if population.is_some_and(|want| want != p) {
            continue;
        }
        let _ = writeln!(out, "population {p}\n");
        out.push_str(&cmp.to_text());
        let _ = writeln!(out, "\npairs not rejected at alpha 0.05:");
        out.push_str(&cmp.non_rejected_csv());
        out.push('\n');
    }
    if !store.gaps.is_empty() {
        let _ = writeln!(out, "{} cells missing", store.gaps.len());
    }
    Ok(out)
}
