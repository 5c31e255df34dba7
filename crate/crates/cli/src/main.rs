use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use aoea_cli::config::{ConfigFile, ExperimentConfig, FunctionRef};
use aoea_cli::report::ReportKind;
use aoea_cli::store::{read_snapshots, write_atomic};
use aoea_cli::{compare_text, report, run_experiment};
use aoea_core::analysis::{pairwise_distances, smacof_embed, write_embedding_csv, Normalization, SMACOF_MAX_ITERS, SMACOF_TOL};
use aoea_core::RandomStream;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aoea", version, about = "Operator-evolving evolutionary algorithm experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) an experiment into a result store.
    Run(RunArgs),
    /// Regenerate reports from a result store.
    Report {
        /// Result store directory.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// tables, traces, embeddings, rates or stats; all when omitted.
        #[arg(long, value_delimiter = ',')]
        kind: Vec<ReportKind>,
    },
    /// Distance matrices and planar embeddings of stored operator trees.
    Analyze {
        /// A `*.snapshots.csv` file from a result store.
        snapshots: PathBuf,
        /// Only this generation.
        #[arg(long)]
        generation: Option<usize>,
        /// none or size_sum.
        #[arg(long, default_value = "size_sum")]
        normalization: Normalization,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write `distances_g<N>.csv` and `embedding.csv` here instead of
        /// printing the embedding.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print median tables and signed-rank results for a result store.
    Compare {
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        pop_size: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Benchmark ids or names.
    #[arg(long, value_delimiter = ',')]
    function: Vec<String>,
    /// ga, haea or aoea.
    #[arg(long, value_delimiter = ',')]
    algorithm: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pop_size: Vec<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    kappa: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Concurrent runs; all cores by default.
    #[arg(long)]
    jobs: Option<usize>,
    /// repaired or as-printed.
    #[arg(long)]
    variant: Option<String>,
    /// Operator snapshot cadence in generations; 0 disables.
    #[arg(long)]
    snapshot_every: Option<usize>,
    /// Recompute cells that are already stored.
    #[arg(long)]
    force: bool,
}

impl RunArgs {
    fn overrides(&self) -> ConfigFile {
        let nonempty = |v: &Vec<String>| (!v.is_empty()).then(|| v.clone());
        ConfigFile {
            functions: nonempty(&self.function).map(|v| v.into_iter().map(FunctionRef::Name).collect()),
            algorithms: nonempty(&self.algorithm),
            populations: (!self.pop_size.is_empty()).then(|| self.pop_size.clone()),
            generations: self.generations,
            kappa: self.kappa,
            dimensionality: self.dim,
            repetitions: self.reps,
            seed: self.seed,
            output: self.out.clone(),
            snapshot_every: self.snapshot_every,
            variant: self.variant.clone(),
            jobs: self.jobs,
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let mut config = ExperimentConfig::default();
            if let Some(path) = &args.config {
                config = config.merge(&ConfigFile::load(path)?)?;
            }
            let config = config.merge(&args.overrides())?;
            let stats = run_experiment(&config, args.force)?;
            println!(
                "{} runs executed, {} already stored, results in {}",
                stats.executed,
                stats.skipped,
                config.output.display()
            );
        }
        Command::Report { out, kind } => {
            let kinds = if kind.is_empty() { ReportKind::ALL.to_vec() } else { kind };
            let outcome = report(&out, &kinds)?;
            println!("{} report files written under {}", outcome.files.len(), out.display());
            if !outcome.gaps.is_empty() {
                eprintln!("{} cells have no completed run:", outcome.gaps.len());
                for c in &outcome.gaps {
                    eprintln!(
                        "  function {} {} population {} repetition {}",
                        c.function, c.algorithm, c.population, c.repetition
                    );
                }
            }
        }
        Command::Analyze {
            snapshots,
            generation,
            normalization,
            seed,
            out,
        } => {
            let all = read_snapshots(&snapshots)?;
            let mut rng = RandomStream::new(seed);
            let mut embedding = Vec::new();
            let mut first = true;
            for (g, trees) in all.iter().filter(|(g, _)| generation.is_none_or(|want| want == **g)) {
                let d = pairwise_distances(trees, normalization)?;
                if let Some(dir) = &out {
                    let mut buf = Vec::new();
                    d.write_csv(&mut buf)?;
                    write_atomic(&dir.join(format!("distances_g{g}.csv")), &String::from_utf8(buf)?)?;
                }
                let e = smacof_embed(&d, &mut rng, SMACOF_MAX_ITERS, SMACOF_TOL);
                write_embedding_csv(&mut embedding, first, *g, &e)?;
                first = false;
            }
            if first {
                anyhow::bail!("no matching snapshots in {}", snapshots.display());
            }
            match &out {
                Some(dir) => write_atomic(&dir.join("embedding.csv"), &String::from_utf8(embedding)?)?,
                None => std::io::stdout().write_all(&embedding).context("writing to stdout")?,
            }
        }
        Command::Compare { out, pop_size } => {
            print!("{}", compare_text(&out, pop_size)?);
        }
    }
    Ok(())
}
