use std::fs;
use std::path::Path;
use std::process::Command;

use semilab::experiments::Table;
use semilab_cli::{run_experiment, validate_outputs, ExperimentConfig, ExperimentKind};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semilab"))
}

fn read_table(path: &Path) -> Table {
    Table::from_csv(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fig1_default_writes_200_rows_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_experiment(&ExperimentConfig::new(ExperimentKind::Fig1, dir.path())).unwrap();
    assert_eq!(s.rows, 200);
    let t = read_table(&s.csv);
    for c in [
        "phi",
        "u_norm",
        "p_norm",
        "theta_u_r",
        "theta_u_c",
        "theta_p_r",
        "theta_p_c",
    ] {
        assert!(t.column_index(c).is_some(), "{c}");
    }
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(&s.metadata).unwrap()).unwrap();
    assert_eq!(meta["config"]["experiment"], "fig1");
    assert_eq!(meta["config"]["params"]["g"], -0.01);
    assert!(validate_outputs(dir.path()).unwrap().passed);
}

#[test]
fn fig2_has_the_second_pressure_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::new(ExperimentKind::Fig2, dir.path()).set("a", 0.001);
    let s = run_experiment(&cfg).unwrap();
    assert!(read_table(&s.csv).column_index("theta_p_r2").is_some());
    assert!(validate_outputs(dir.path()).unwrap().passed);
}

#[test]
fn corrupted_bound_is_reported_with_its_row() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_experiment(&ExperimentConfig::new(ExperimentKind::Fig1, dir.path()).set("points", 20)).unwrap();
    let text = fs::read_to_string(&s.csv).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let j = lines[0].split(',').position(|c| c == "theta_u_r").unwrap();
    // Data row 7 is line 8.
    let mut cells: Vec<String> = lines[8].split(',').map(str::to_string).collect();
    cells[j] = "1.0e-30".into();
    lines[8] = cells.join(",");
    fs::write(&s.csv, lines.join("\n") + "\n").unwrap();
    let report = validate_outputs(dir.path()).unwrap();
    assert!(!report.passed);
    let v = &report.files[0].violations;
    assert!(
        v.iter().any(|x| x.row == Some(7) && x.check == "u_norm <= theta_u_r"),
        "{v:?}"
    );
    assert!(v.iter().all(|x| x.row == Some(7)));

    let out = bin().arg("--validate").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let printed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(printed["passed"], false);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for (kind, sets) in [
        (ExperimentKind::Fig1, vec![]),
        (ExperimentKind::Fig3, vec![("points", "6")]),
        (ExperimentKind::RandomSuite, vec![("count", "12")]),
    ] {
        let runs: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
            .map(|_| {
                let dir = tempfile::tempdir().unwrap();
                let cfg = sets
                    .iter()
                    .fold(ExperimentConfig::new(kind, dir.path()), |c, (k, v)| c.set(k, v));
                let s = run_experiment(&cfg).unwrap();
                (fs::read(s.csv).unwrap(), fs::read(s.metadata).unwrap())
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{kind}");
    }
}

#[test]
fn finite_element_outputs_validate() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let fig3 = run_experiment(&ExperimentConfig::new(ExperimentKind::Fig3, p).set("points", 11)).unwrap();
    run_experiment(&ExperimentConfig::new(ExperimentKind::Fig4, p).set("n", 4).set("T", 0.2)).unwrap();
    run_experiment(&ExperimentConfig::new(ExperimentKind::Hhd, p).set("sizes", "4,8")).unwrap();
    let report = validate_outputs(p).unwrap();
    assert!(report.passed, "{report:#?}");
    assert_eq!(report.files.len(), 3);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(fig3.metadata).unwrap()).unwrap();
    assert_eq!(meta["details"]["scott_vogelius"]["pair"], "SV");
    assert_eq!(meta["config"]["params"]["mu"], 1e-3);
}

#[test]
fn fig3_validation_catches_a_large_sv_velocity() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_experiment(&ExperimentConfig::new(ExperimentKind::Fig3, dir.path()).set("points", 3)).unwrap();
    let mut t = read_table(&s.csv);
    let th = t.numeric("u_norm_th").unwrap()[0];
    let j = t.column_index("u_norm_sv").unwrap();
    let mut rows = t.rows().to_vec();
    rows[0][j] = semilab::experiments::Value::Num(th);
    t = Table::new(t.columns().to_vec());
    rows.into_iter().for_each(|r| t.push(r));
    fs::write(&s.csv, t.to_csv()).unwrap();
    let report = validate_outputs(dir.path()).unwrap();
    assert!(report.files[0]
        .violations
        .iter()
        .any(|v| v.row == Some(0) && v.check.contains("lambda = 0")));
}

#[test]
fn binary_runs_the_property_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "--experiment",
            "random_suite",
            "--seed",
            "7",
            "--count",
            "100",
            "--jobs",
            "2",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["checks_passed"], true);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("random_suite.json")).unwrap()).unwrap();
    assert_eq!(meta["details"]["passed"], true);
    assert!(meta["details"]["max_u_bound_ratio"].as_f64().unwrap() <= 1.0);
    assert_eq!(meta["config"]["params"]["count"], 100);
}

#[test]
fn output_directory_defaults_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--experiment", "fig2", "--set", "points=5"])
        .env("SEMILAB_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("fig2.csv").exists() && dir.path().join("fig2.json").exists());
}

#[test]
fn configuration_errors_are_reported_as_json() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["--experiment", "fig3", "--set", "mu=-1"],
        vec!["--experiment", "fig1", "--set", "dt=0.1"],
        vec!["--experiment", "fig1", "--seed", "3"],
        vec!["--experiment", "fig4", "--set", "T=0.015"],
    ] {
        let out = bin().args(&args).arg("--out").arg(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"], "ConfigError", "{args:?}");
    }
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
    let out = bin().arg("--validate").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
