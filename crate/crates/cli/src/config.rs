//! Experiment configuration, read from TOML and overridable from flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use aoea_core::benchmarks::{self, Variant};
use aoea_core::engine::Algorithm;
use serde::{Deserialize, Serialize};

/// A benchmark given by id or by name in the config file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionRef {
    Id(u32),
    Name(String),
}

impl FunctionRef {
    pub fn resolve(&self) -> Result<u32> {
        let key = match self {
            FunctionRef::Id(id) => id.to_string(),
            FunctionRef::Name(name) => name.clone(),
        };
        Ok(benchmarks::lookup(&key)?.id)
    }
}

/// The file form. Every field is optional; missing ones take the standard
/// protocol values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub functions: Option<Vec<FunctionRef>>,
    pub algorithms: Option<Vec<String>>,
    pub populations: Option<Vec<usize>>,
    pub generations: Option<usize>,
    pub kappa: Option<usize>,
    pub dimensionality: Option<usize>,
    pub repetitions: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    /// Operator-tree snapshot cadence in generations; 0 disables snapshots.
    pub snapshot_every: Option<usize>,
    pub variant: Option<String>,
    pub jobs: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub functions: Vec<u32>,
    pub algorithms: Vec<Algorithm>,
    pub populations: Vec<usize>,
    pub generations: usize,
    pub kappa: usize,
    pub dimensionality: Option<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub output: PathBuf,
    pub snapshot_every: Option<usize>,
    pub variant: Variant,
    /// Concurrent cells; `None` uses every core.
    pub jobs: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            functions: (1..=15).collect(),
            algorithms: Algorithm::ALL.to_vec(),
            populations: vec![50, 100],
            generations: 500,
            kappa: 16,
            dimensionality: None,
            repetitions: 50,
            seed: 0,
            output: PathBuf::from("results"),
            snapshot_every: Some(1),
            variant: Variant::Repaired,
            jobs: None,
        }
    }
}

impl ExperimentConfig {
    /// Apply the fields present in `file` over `self`.
    pub fn merge(mut self, file: &ConfigFile) -> Result<Self> {
        if let Some(f) = &file.functions {
            self.functions = f.iter().map(FunctionRef::resolve).collect::<Result<_>>()?;
        }
        if let Some(a) = &file.algorithms {
            self.algorithms = a.iter().map(|s| Ok(s.parse::<Algorithm>()?)).collect::<Result<_>>()?;
        }
        if let Some(p) = &file.populations {
            self.populations = p.clone();
        }
        if let Some(g) = file.generations {
            self.generations = g;
        }
        if let Some(k) = file.kappa {
            self.kappa = k;
        }
        if file.dimensionality.is_some() {
            self.dimensionality = file.dimensionality;
        }
        if let Some(r) = file.repetitions {
            self.repetitions = r;
        }
        if let Some(s) = file.seed {
            self.seed = s;
        }
        if let Some(o) = &file.output {
            self.output = o.clone();
        }
        if let Some(s) = file.snapshot_every {
            self.snapshot_every = (s > 0).then_some(s);
        }
        if let Some(v) = &file.variant {
            self.variant = v.parse()?;
        }
        if file.jobs.is_some() {
            self.jobs = file.jobs;
        }
        dedup(&mut self.functions);
        dedup(&mut self.algorithms);
        dedup(&mut self.populations);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.functions.is_empty() || self.algorithms.is_empty() || self.populations.is_empty() {
            bail!("functions, algorithms and populations must be nonempty");
        }
        for &f in &self.functions {
            let spec = benchmarks::spec_by_id(f)?;
            spec.resolve_dimensionality(self.dimensionality)?;
        }
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if self.generations == 0 {
            bail!("generations must be at least 1");
        }
        if let Some(&p) = self.populations.iter().find(|&&p| p < 2) {
            bail!("population size {p} is below 2");
        }
        if self.kappa < 2 || self.kappa % 2 != 0 {
            bail!("kappa must be even and at least 2, got {}", self.kappa);
        }
        if self.jobs == Some(0) {
            bail!("jobs must be at least 1");
        }
        Ok(())
    }

    /// The file form of this configuration, stored with the results.
    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            functions: Some(self.functions.iter().map(|&f| FunctionRef::Id(f)).collect()),
            algorithms: Some(self.algorithms.iter().map(|a| a.name().to_ascii_lowercase()).collect()),
            populations: Some(self.populations.clone()),
            generations: Some(self.generations),
            kappa: Some(self.kappa),
            dimensionality: self.dimensionality,
            repetitions: Some(self.repetitions),
            seed: Some(self.seed),
            output: None,
            snapshot_every: Some(self.snapshot_every.unwrap_or(0)),
            variant: Some(self.variant.to_string()),
            jobs: None,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("config serialises")
    }
}

/// Drop repeats, keeping first occurrences in order.
fn dedup<T: PartialEq + Copy>(items: &mut Vec<T>) {
    let mut seen = Vec::with_capacity(items.len());
    items.retain(|x| {
        let fresh = !seen.contains(x);
        if fresh {
            seen.push(*x);
        }
        fresh
    });
}

/// Hex encoding of a byte string.
pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
