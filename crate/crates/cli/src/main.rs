use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use semilab_cli::{parse_override, run_experiment, validate_outputs, CliError, ExperimentConfig, ExperimentKind};

/// Runs the stability experiments and writes their CSV/JSON outputs.
#[derive(Debug, Parser)]
#[command(name = "semilab", version)]
struct Args {
    /// Experiment to run.
    #[arg(long, value_enum, required_unless_present = "validate")]
    experiment: Option<ExperimentKind>,

    /// Output directory.
    #[arg(long, env = "SEMILAB_OUT", default_value = "results")]
    out: PathBuf,

    /// Parameter override, repeatable (e.g. `--set mu=1e-2`).
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, String)>,

    /// Seed of the random property suite.
    #[arg(long)]
    seed: Option<u64>,

    /// Number of random instances.
    #[arg(long)]
    count: Option<usize>,

    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    jobs: Option<usize>,

    /// Re-check the outputs in this directory instead of running an experiment.
    #[arg(long, value_name = "DIR", conflicts_with = "experiment")]
    validate: Option<PathBuf>,
}

fn config(args: &Args, experiment: ExperimentKind) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::new(experiment, &args.out);
    for (k, v) in &args.overrides {
        if cfg.overrides.insert(k.clone(), v.clone()).is_some() {
            return Err(CliError::Config(format!("override {k:?} given twice")));
        }
    }
    for (flag, value) in [
        ("seed", args.seed.map(|s| s.to_string())),
        ("count", args.count.map(|c| c.to_string())),
    ] {
        let Some(value) = value else { continue };
        if experiment != ExperimentKind::RandomSuite {
            return Err(CliError::Config(format!("--{flag} only applies to random_suite")));
        }
        if cfg.overrides.insert(flag.to_string(), value).is_some() {
            return Err(CliError::Config(format!(
                "{flag} given both as a flag and as an override"
            )));
        }
    }
    Ok(cfg)
}

fn run(args: &Args) -> Result<serde_json::Value, CliError> {
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    if let Some(dir) = &args.validate {
        let report = validate_outputs(dir)?;
        let value = serde_json::to_value(&report).expect("report serializes");
        if !report.passed {
            println!("{}", serde_json::to_string_pretty(&value).expect("report serializes"));
            return Err(CliError::Validation(report.violation_count()));
        }
        return Ok(value);
    }
    let experiment = args.experiment.expect("clap requires an experiment");
    let summary = run_experiment(&config(args, experiment)?)?;
    if summary.checks_passed == Some(false) {
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("summary serializes")
        );
        return Err(CliError::Validation(1));
    }
    Ok(serde_json::to_value(&summary).expect("summary serializes"))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("output serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
