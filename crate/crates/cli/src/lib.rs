//! Experiment runner: resolves configurations, writes CSV/JSON outputs and re-validates them.

pub mod config;
pub mod error;
pub mod run;
pub mod validate;

pub use config::{parse_override, ExperimentConfig, ExperimentKind, ResolvedExperiment};
pub use error::CliError;
pub use run::{run_experiment, RunSummary};
pub use validate::{validate_outputs, validate_table, ValidationReport};
