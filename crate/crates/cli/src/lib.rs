//! Experiment runner for `aoea-core`: TOML configuration, a resumable result
//! store and reports.

pub mod config;
pub mod report;
pub mod runner;
pub mod store;

pub use config::{ConfigFile, ExperimentConfig};
pub use report::{compare_text, report, ReportKind, ReportOutcome};
pub use runner::{run_experiment, RunStats};
