//! On-disk result store: per-run trace, rate and snapshot files, a summary
//! of final results, and a manifest naming every file with the config hash
//! and seed that produced it. Each file opens with a versioned header line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use aoea_core::engine::{Algorithm, RunTrace};
use aoea_core::optree::OperatorTree;
use aoea_core::rng::derive_seed;
use sha2::{Digest, Sha256};

use crate::config::{hex, ExperimentConfig};

pub const MANIFEST: &str = "manifest.txt";
pub const SUMMARY: &str = "summary.csv";
pub const EXPERIMENT: &str = "experiment.toml";

pub const MANIFEST_HEADER: &str = "# aoea-manifest v1";
pub const SUMMARY_HEADER: &str = "# aoea-summary v1";
pub const TRACE_HEADER: &str = "# aoea-trace v1";
pub const RATES_HEADER: &str = "# aoea-rates v1";
pub const SNAPSHOT_HEADER: &str = "# aoea-snapshots v1";

const INIT_TAG: u64 = 1;
const RUN_TAG: u64 = 2;

/// One (function, algorithm, population, repetition) experiment cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub function: u32,
    pub algorithm: Algorithm,
    pub population: usize,
    pub repetition: usize,
}

impl Cell {
    /// Seed of the initial population, shared by every algorithm in the
    /// same (function, population, repetition).
    pub fn init_seed(&self, base: u64) -> u64 {
        derive_seed(
            base,
            &[INIT_TAG, self.function as u64, self.population as u64, self.repetition as u64],
        )
    }

    /// Seed of the run's own stream.
    pub fn run_seed(&self, base: u64) -> u64 {
        derive_seed(
            base,
            &[
                RUN_TAG,
                self.function as u64,
                self.algorithm.id(),
                self.population as u64,
                self.repetition as u64,
            ],
        )
    }

    fn dir(&self) -> PathBuf {
        PathBuf::from("runs")
            .join(format!("f{:02}", self.function))
            .join(format!("p{}", self.population))
            .join(self.algorithm.name().to_ascii_lowercase())
    }

    pub fn trace_path(&self) -> PathBuf {
        self.dir().join(format!("r{:03}.trace.csv", self.repetition))
    }

    pub fn rates_path(&self) -> PathBuf {
        self.dir().join(format!("r{:03}.rates.csv", self.repetition))
    }

    pub fn snapshots_path(&self) -> PathBuf {
        self.dir().join(format!("r{:03}.snapshots.csv", self.repetition))
    }
}

/// Every cell of an experiment, in a fixed order.
pub fn cells(config: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for &function in &config.functions {
        for &population in &config.populations {
            for repetition in 0..config.repetitions {
                for &algorithm in &config.algorithms {
                    out.push(Cell {
                        function,
                        algorithm,
                        population,
                        repetition,
                    });
                }
            }
        }
    }
    out
}

fn sha256_hex(text: &str) -> String {
    hex(&Sha256::digest(text.as_bytes()))
}

/// Hash of everything that determines a cell's results.
pub fn cell_hash(config: &ExperimentConfig, cell: &Cell) -> String {
    let mut s = String::from("aoea-cell v1\n");
    let _ = writeln!(s, "function={}", cell.function);
    let _ = writeln!(s, "algorithm={}", cell.algorithm);
    let _ = writeln!(s, "population={}", cell.population);
    let _ = writeln!(s, "repetition={}", cell.repetition);
    let _ = writeln!(s, "generations={}", config.generations);
    let _ = writeln!(s, "kappa={}", config.kappa);
    let _ = writeln!(s, "dimensionality={:?}", config.dimensionality);
    let _ = writeln!(s, "variant={}", config.variant);
    let _ = writeln!(s, "init_seed={}", cell.init_seed(config.seed));
    let _ = writeln!(s, "run_seed={}", cell.run_seed(config.seed));
    let _ = writeln!(s, "snapshot_every={:?}", config.snapshot_every);
    sha256_hex(&s)
}

pub fn experiment_hash(config: &ExperimentConfig) -> String {
    sha256_hex(&config.to_toml())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub kind: String,
    pub cell: Option<Cell>,
    pub seed: u64,
    pub config_hash: String,
}

/// Path → entry, rewritten whole and sorted on every save.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: BTreeMap<String, ManifestEntry>,
}

fn rel(path: &Path) -> String {
    path.to_string_lossy().replace('\\', "/")
}

impl Manifest {
    pub fn load(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST);
        if !path.exists() {
            return Ok(Self::default());
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let mut lines = text.lines();
        if lines.next() != Some(MANIFEST_HEADER) {
            bail!("{} is not a version 1 manifest", path.display());
        }
        lines.next();
        let mut entries = BTreeMap::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 8 {
                bail!("malformed manifest line `{line}`");
            }
            let cell = if f[2] == "-" {
                None
            } else {
                Some(Cell {
                    function: f[2].parse()?,
                    algorithm: f[3].parse()?,
                    population: f[4].parse()?,
                    repetition: f[5].parse()?,
                })
            };
            entries.insert(
                f[0].to_string(),
                ManifestEntry {
                    kind: f[1].to_string(),
                    cell,
                    seed: f[6].parse()?,
                    config_hash: f[7].to_string(),
                },
            );
        }
        Ok(Self { entries })
    }

    pub fn save(&self, root: &Path) -> Result<()> {
        let mut s = format!("{MANIFEST_HEADER}\npath\tkind\tfunction\talgorithm\tpopulation\trepetition\tseed\tconfig_hash\n");
        for (path, e) in &self.entries {
            let cell = match &e.cell {
                Some(c) => format!("{}\t{}\t{}\t{}", c.function, c.algorithm, c.population, c.repetition),
                None => "-\t-\t-\t-".into(),
            };
            let _ = writeln!(s, "{path}\t{}\t{cell}\t{}\t{}", e.kind, e.seed, e.config_hash);
        }
        write_atomic(&root.join(MANIFEST), &s)
    }

    pub fn insert(&mut self, path: &Path, entry: ManifestEntry) {
        self.entries.insert(rel(path), entry);
    }

    /// Whether `cell` finished under `hash` and its trace is on disk.
    pub fn is_complete(&self, root: &Path, cell: &Cell, hash: &str) -> bool {
        self.entries
            .get(&rel(&cell.trace_path()))
            .is_some_and(|e| e.config_hash == hash && root.join(cell.trace_path()).exists())
    }
}

/// Write through a temporary sibling and rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))
}

pub fn trace_csv(trace: &RunTrace) -> String {
    let mut s = format!("{TRACE_HEADER}\ngeneration,best_fitness,median_fitness,max_rate,evals\n");
    for r in &trace.records {
        let max_rate = r.max_rate.map(|m| m.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.generation, r.best_fitness, r.median_fitness, max_rate, r.evaluations
        );
    }
    s
}

/// `None` for runs without rates.
pub fn rates_csv(trace: &RunTrace) -> Option<String> {
    let width = trace.records.first()?.rates.len();
    if width == 0 {
        return None;
    }
    let mut s = format!("{RATES_HEADER}\ngeneration");
    for i in 0..width {
        let _ = write!(s, ",rate_{i}");
    }
    s.push('\n');
    for r in &trace.records {
        let _ = write!(s, "{}", r.generation);
        for v in &r.rates {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    Some(s)
}

/// `None` when the run kept no snapshots.
pub fn snapshots_csv(trace: &RunTrace) -> Option<String> {
    let mut s = format!("{SNAPSHOT_HEADER}\ngeneration,tree_index,tree\n");
    let mut any = false;
    for (g, trees) in trace.snapshots() {
        any = true;
        for (i, t) in trees.iter().enumerate() {
            let _ = writeln!(s, "{g},{i},{t}");
        }
    }
    any.then_some(s)
}

fn body<'a>(text: &'a str, header: &str, path: &Path) -> Result<std::iter::Skip<std::str::Lines<'a>>> {
    if text.lines().next() != Some(header) {
        bail!("{} does not start with `{header}`", path.display());
    }
    Ok(text.lines().skip(2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub generation: usize,
    pub best_fitness: f64,
    pub median_fitness: f64,
    pub max_rate: Option<f64>,
    pub evaluations: u64,
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    body(&text, TRACE_HEADER, path)?
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(anyhow!("malformed trace line `{line}` in {}", path.display()));
            }
            Ok(TraceRow {
                generation: f[0].parse()?,
                best_fitness: f[1].parse()?,
                median_fitness: f[2].parse()?,
                max_rate: if f[3].is_empty() { None } else { Some(f[3].parse()?) },
                evaluations: f[4].parse()?,
            })
        })
        .collect()
}

pub fn read_rates(path: &Path) -> Result<Vec<(usize, Vec<f64>)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    body(&text, RATES_HEADER, path)?
        .filter(|l| !l.is_empty())
        .map(|line| {
            let mut f = line.split(',');
            let g = f.next().unwrap_or_default().parse()?;
            let rates = f.map(|v| v.parse::<f64>()).collect::<Result<Vec<_>, _>>()?;
            Ok((g, rates))
        })
        .collect()
}

pub fn read_snapshots(path: &Path) -> Result<BTreeMap<usize, Vec<OperatorTree>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out: BTreeMap<usize, Vec<OperatorTree>> = BTreeMap::new();
    for line in body(&text, SNAPSHOT_HEADER, path)?.filter(|l| !l.is_empty()) {
        let mut f = line.splitn(3, ',');
        let g: usize = f.next().unwrap_or_default().parse()?;
        let i: usize = f.next().unwrap_or_default().parse()?;
        let tree: OperatorTree = f.next().unwrap_or_default().parse()?;
        let trees = out.entry(g).or_default();
        if trees.len() != i {
            bail!("snapshot trees out of order at generation {g} in {}", path.display());
        }
        trees.push(tree);
    }
    Ok(out)
}

/// Final result of one completed cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub cell: Cell,
    pub seed: u64,
    pub init_seed: u64,
    pub best_fitness: f64,
    pub evaluations: u64,
    pub config_hash: String,
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{SUMMARY_HEADER}\nfunction,algorithm,population,repetition,seed,init_seed,best_fitness,evaluations,config_hash\n"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.cell.function,
            r.cell.algorithm,
            r.cell.population,
            r.cell.repetition,
            r.seed,
            r.init_seed,
            r.best_fitness,
            r.evaluations,
            r.config_hash
        );
    }
    s
}

pub fn read_summary(root: &Path) -> Result<Vec<SummaryRow>> {
    let path = root.join(SUMMARY);
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    body(&text, SUMMARY_HEADER, &path)?
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                bail!("malformed summary line `{line}`");
            }
            Ok(SummaryRow {
                cell: Cell {
                    function: f[0].parse()?,
                    algorithm: f[1].parse()?,
                    population: f[2].parse()?,
                    repetition: f[3].parse()?,
                },
                seed: f[4].parse()?,
                init_seed: f[5].parse()?,
                best_fitness: f[6].parse()?,
                evaluations: f[7].parse()?,
                config_hash: f[8].to_string(),
            })
        })
        .collect()
}

pub fn read_experiment(root: &Path) -> Result<ExperimentConfig> {
    let file = crate::config::ConfigFile::load(&root.join(EXPERIMENT))?;
    let mut config = ExperimentConfig::default().merge(&file)?;
    config.output = root.to_path_buf();
    Ok(config)
}
