use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use semilab::experiments::{
    general_sweep, hodge_checks, lambda_sweep, potential_flow, random_suite, symmetric_sweep, Table,
};
use semilab::saddle::compute_constants;
use semilab::saddle::instances::{general_instance, symmetric_instance};

use crate::config::{ExperimentConfig, ResolvedExperiment};
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub rows: usize,
    pub csv: PathBuf,
    pub metadata: PathBuf,
    /// Only reported by the property suite.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks_passed: Option<bool>,
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Constants of the 2×2 instance, which do not depend on the direction of `f`.
fn sweep_constants(symmetric: bool, a: f64, b: f64, g: f64) -> Result<serde_json::Value, CliError> {
    let p = if symmetric {
        symmetric_instance(a, b, [1.0, 0.0], g)?
    } else {
        general_instance(a, b, [1.0, 0.0], g)?
    };
    let c = compute_constants(&p, symmetric)?;
    Ok(json!({
        "alpha0": c.alpha0,
        "alpha": c.alpha,
        "beta": c.beta,
        "norm_a": c.norm_a,
        "norm_b": c.norm_b,
    }))
}

/// Runs one experiment and writes `<name>.csv` and `<name>.json` into the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, CliError> {
    let resolved = cfg.resolve()?;
    let (table, details, checks_passed): (Table, serde_json::Value, Option<bool>) = match &resolved {
        ResolvedExperiment::Fig1(p) => (general_sweep(p)?, sweep_constants(false, p.a, p.b, p.g)?, None),
        ResolvedExperiment::Fig2(p) => (symmetric_sweep(p)?, sweep_constants(true, p.a, p.b, p.g)?, None),
        ResolvedExperiment::Fig3(p) => {
            let out = lambda_sweep(p)?;
            (out.table, out.metadata, None)
        }
        ResolvedExperiment::Fig4(p) => {
            let out = potential_flow(p)?;
            (out.table, out.metadata, None)
        }
        ResolvedExperiment::Hhd(p) => {
            let out = hodge_checks(p)?;
            (out.table, out.metadata, None)
        }
        ResolvedExperiment::RandomSuite(p) => {
            let (report, table) = random_suite(p)?;
            let passed = report.passed;
            let value = serde_json::to_value(&report).expect("report serializes");
            (table, value, Some(passed))
        }
    };

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let stem = cfg.experiment.file_stem();
    let csv = dir.join(format!("{stem}.csv"));
    let metadata = dir.join(format!("{stem}.json"));
    write(&csv, &table.to_csv())?;
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": resolved,
        "columns": table.columns(),
        "rows": table.len(),
        "details": details,
    });
    write(
        &metadata,
        &(serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n"),
    )?;
    Ok(RunSummary {
        experiment: stem.to_string(),
        rows: table.len(),
        csv,
        metadata,
        checks_passed,
    })
}
