//! Batch execution of an experiment into a result store.

use std::fs;
use std::path::Path;
use std::sync::Mutex;

use anyhow::{Context, Result};
use aoea_core::engine::{run, EngineConfig};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::store::{
    self, cell_hash, cells, experiment_hash, rates_csv, read_trace, snapshots_csv, summary_csv, trace_csv,
    write_atomic, Cell, Manifest, ManifestEntry, SummaryRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunStats {
    pub executed: usize,
    pub skipped: usize,
}

pub fn engine_config(config: &ExperimentConfig, cell: &Cell) -> EngineConfig {
    EngineConfig {
        algorithm: cell.algorithm,
        function: cell.function,
        variant: config.variant,
        dimensionality: config.dimensionality,
        population_size: cell.population,
        kappa: config.kappa,
        generations: config.generations,
        seed: cell.run_seed(config.seed),
        init_seed: Some(cell.init_seed(config.seed)),
        snapshot_every: config.snapshot_every,
        ..EngineConfig::default()
    }
}

/// Run every cell not already in the store under the same hash (all of them
/// when `force`), then rewrite the summary. Safe to interrupt: finished
/// cells are recorded one at a time.
pub fn run_experiment(config: &ExperimentConfig, force: bool) -> Result<RunStats> {
    config.validate()?;
    let root = config.output.as_path();
    fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
    let exp_hash = experiment_hash(config);
    write_atomic(&root.join(store::EXPERIMENT), &config.to_toml())?;

    let mut manifest = Manifest::load(root)?;
    manifest.insert(
        Path::new(store::EXPERIMENT),
        ManifestEntry {
            kind: "config".into(),
            cell: None,
            seed: config.seed,
            config_hash: exp_hash.clone(),
        },
    );
    manifest.save(root)?;

    let all = cells(config);
    let pending: Vec<Cell> = all
        .iter()
        .copied()
        .filter(|c| force || !manifest.is_complete(root, c, &cell_hash(config, c)))
        .collect();
    let stats = RunStats {
        executed: pending.len(),
        skipped: all.len() - pending.len(),
    };

    let manifest = Mutex::new(manifest);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .context("starting worker pool")?;
    pool.install(|| {
        pending
            .par_iter()
            .try_for_each(|cell| run_cell(config, cell, root, &manifest))
    })?;
    let mut manifest = manifest.into_inner().expect("no worker panicked");

    let mut rows = Vec::with_capacity(all.len());
    for cell in &all {
        let trace = read_trace(&root.join(cell.trace_path()))?;
        let last = trace.last().context("empty trace")?;
        rows.push(SummaryRow {
            cell: *cell,
            seed: cell.run_seed(config.seed),
            init_seed: cell.init_seed(config.seed),
            best_fitness: last.best_fitness,
            evaluations: last.evaluations,
            config_hash: cell_hash(config, cell),
        });
    }
    write_atomic(&root.join(store::SUMMARY), &summary_csv(&rows))?;
    manifest.insert(
        Path::new(store::SUMMARY),
        ManifestEntry {
            kind: "summary".into(),
            cell: None,
            seed: config.seed,
            config_hash: exp_hash,
        },
    );
    manifest.save(root)?;
    Ok(stats)
}

fn run_cell(config: &ExperimentConfig, cell: &Cell, root: &Path, manifest: &Mutex<Manifest>) -> Result<()> {
    let trace = run(&engine_config(config, cell)).with_context(|| format!("running {cell:?}"))?;
    let hash = cell_hash(config, cell);
    let seed = cell.run_seed(config.seed);
    let mut files = Vec::new();
    // Trace last: its manifest entry marks the cell complete.
    if let Some(s) = rates_csv(&trace) {
        files.push((cell.rates_path(), "rates", s));
    }
    if let Some(s) = snapshots_csv(&trace) {
        files.push((cell.snapshots_path(), "snapshots", s));
    }
    files.push((cell.trace_path(), "trace", trace_csv(&trace)));
    for (path, _, contents) in &files {
        write_atomic(&root.join(path), contents)?;
    }
    let mut m = manifest.lock().expect("manifest lock");
    for (path, kind, _) in &files {
        m.insert(
            path,
            ManifestEntry {
                kind: (*kind).into(),
                cell: Some(*cell),
                seed,
                config_hash: hash.clone(),
            },
        );
    }
    m.save(root)
}
