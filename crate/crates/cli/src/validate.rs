//! Re-checks the invariants of emitted CSVs without re-solving anything.

use std::fs;
use std::path::Path;

use serde::Serialize;

use semilab::experiments::Table;

use crate::config::ExperimentKind;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Zero-based data row, `None` for whole-file checks.
    pub row: Option<usize>,
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileReport {
    pub file: String,
    pub rows: usize,
    pub checks: Vec<String>,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub files: Vec<FileReport>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn violation_count(&self) -> usize {
        self.files.iter().map(|f| f.violations.len()).sum()
    }
}

/// `lhs ≤ factor·rhs·(1 + rel) + abs` on every row.
struct Bound {
    lhs: &'static str,
    rhs: &'static str,
    factor: f64,
    rel: f64,
    abs: f64,
}

const fn le(lhs: &'static str, rhs: &'static str) -> Bound {
    Bound {
        lhs,
        rhs,
        factor: 1.0,
        rel: 1e-9,
        abs: 0.0,
    }
}

/// `lhs ≤ value` on every row.
struct Ceiling {
    column: &'static str,
    value: f64,
}

struct Rules {
    bounds: Vec<Bound>,
    ceilings: Vec<Ceiling>,
    nonnegative: &'static [&'static str],
}

fn rules(kind: ExperimentKind) -> Rules {
    match kind {
        ExperimentKind::Fig1 => Rules {
            bounds: vec![
                le("u_norm", "theta_u_r"),
                le("theta_u_r", "theta_u_c"),
                le("p_norm", "theta_p_r"),
                le("p_norm", "theta_p_c"),
            ],
            ceilings: vec![],
            nonnegative: &["u_norm", "p_norm", "theta_u_r", "theta_u_c", "theta_p_r", "theta_p_c"],
        },
        ExperimentKind::Fig2 => Rules {
            bounds: vec![
                le("u_norm", "theta_u_r"),
                le("u_norm", "theta_u_c"),
                le("p_norm", "theta_p_r2"),
                le("theta_p_r2", "theta_p_r"),
                le("p_norm", "theta_p_c"),
            ],
            ceilings: vec![],
            nonnegative: &[
                "u_norm",
                "p_norm",
                "theta_u_r",
                "theta_u_c",
                "theta_p_r",
                "theta_p_c",
                "theta_p_r2",
            ],
        },
        ExperimentKind::Fig3 => Rules {
            bounds: vec![
                Bound {
                    abs: 1e-6,
                    rel: 0.0,
                    ..le("u_norm_sv", "theta_u_r")
                },
                le("u_norm_sv", "theta_u_c"),
                le("u_norm_th", "theta_u_c"),
                // Relative to the velocity, with a round-off floor for the vanishing solution at λ = 0.
                Bound {
                    factor: 1e-9,
                    rel: 0.0,
                    abs: 1e-12,
                    ..le("div_l2_sv", "u_norm_sv")
                },
                Bound {
                    factor: 1e-9,
                    rel: 0.0,
                    abs: 1e-12,
                    ..le("div_linf_sv", "u_norm_sv")
                },
            ],
            ceilings: vec![],
            nonnegative: &[
                "lambda",
                "u_norm_th",
                "u_norm_sv",
                "p_norm_th",
                "p_norm_sv",
                "theta_u_c",
                "theta_u_r",
                "theta_p_c",
                "theta_p_r",
                "div_l2_th",
                "div_l2_sv",
                "div_linf_sv",
            ],
        },
        ExperimentKind::Fig4 => Rules {
            bounds: vec![],
            ceilings: vec![Ceiling {
                column: "u_err_sv",
                value: 1e-8,
            }],
            nonnegative: &[
                "t",
                "u_err_th",
                "u_err_sv",
                "p_norm_th",
                "p_norm_sv",
                "picard_th",
                "picard_sv",
            ],
        },
        ExperimentKind::Hhd => Rules {
            bounds: vec![],
            ceilings: vec![
                Ceiling {
                    column: "gradient_data_u_rel",
                    value: 1e-9,
                },
                Ceiling {
                    column: "solenoidal_data_p_rel",
                    value: 1e-9,
                },
                Ceiling {
                    column: "orthogonality_defect",
                    value: 1e-11,
                },
            ],
            nonnegative: &["n", "h", "smooth_data_residual_l2", "smooth_data_u_l2"],
        },
        ExperimentKind::RandomSuite => Rules {
            bounds: vec![],
            ceilings: vec![Ceiling {
                column: "ratio",
                value: 1.0,
            }],
            nonnegative: &["ratio"],
        },
    }
}

fn column<'a>(t: &Table, name: &str, cache: &'a mut Vec<(String, Vec<f64>)>) -> Result<&'a [f64], String> {
    if let Some(i) = cache.iter().position(|(n, _)| n == name) {
        return Ok(&cache[i].1);
    }
    let v = t.numeric(name).map_err(|e| e.to_string())?;
    cache.push((name.to_string(), v));
    Ok(&cache.last().expect("just pushed").1)
}

/// Checks one table against the invariants of its experiment.
pub fn validate_table(kind: ExperimentKind, table: &Table) -> FileReport {
    let mut report = FileReport {
        file: format!("{}.csv", kind.file_stem()),
        rows: table.len(),
        checks: Vec::new(),
        violations: Vec::new(),
    };
    let mut cols: Vec<(String, Vec<f64>)> = Vec::new();
    let whole = |report: &mut FileReport, check: String, detail: String| {
        report.violations.push(Violation {
            row: None,
            check,
            detail,
        });
    };
    if table.is_empty() {
        whole(&mut report, "rows".into(), "no data rows".into());
    }
    let r = rules(kind);

    for name in r.nonnegative {
        let check = format!("{name} finite and >= 0");
        match column(table, name, &mut cols) {
            Err(e) => whole(&mut report, check.clone(), e),
            Ok(v) => {
                for (i, x) in v.iter().enumerate() {
                    if !(x.is_finite() && *x >= 0.0) {
                        report.violations.push(Violation {
                            row: Some(i),
                            check: check.clone(),
                            detail: format!("{name} = {x:e}"),
                        });
                    }
                }
            }
        }
        report.checks.push(check);
    }

    for b in &r.bounds {
        let check = if b.factor == 1.0 {
            format!("{} <= {}", b.lhs, b.rhs)
        } else {
            format!("{} <= {:e} * {}", b.lhs, b.factor, b.rhs)
        };
        let lhs = column(table, b.lhs, &mut cols).map(<[f64]>::to_vec);
        let rhs = column(table, b.rhs, &mut cols).map(<[f64]>::to_vec);
        match (lhs, rhs) {
            (Ok(l), Ok(rv)) => {
                for (i, (x, y)) in l.iter().zip(&rv).enumerate() {
                    let limit = b.factor * y * (1.0 + b.rel) + b.abs;
                    if !(*x <= limit) {
                        report.violations.push(Violation {
                            row: Some(i),
                            check: check.clone(),
                            detail: format!("{} = {x:e} exceeds {limit:e}", b.lhs),
                        });
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => whole(&mut report, check.clone(), e),
        }
        report.checks.push(check);
    }

    for c in &r.ceilings {
        let check = format!("{} <= {:e}", c.column, c.value);
        match column(table, c.column, &mut cols) {
            Err(e) => whole(&mut report, check.clone(), e),
            Ok(v) => {
                for (i, x) in v.iter().enumerate() {
                    if !(*x <= c.value) {
                        report.violations.push(Violation {
                            row: Some(i),
                            check: check.clone(),
                            detail: format!("{} = {x:e}", c.column),
                        });
                    }
                }
            }
        }
        report.checks.push(check);
    }

    match kind {
        ExperimentKind::Fig3 => fig3_extra(table, &mut report),
        ExperimentKind::Fig4 => fig4_extra(table, &mut report),
        ExperimentKind::Hhd => hhd_extra(table, &mut report),
        _ => {}
    }
    report
}

fn fig3_extra(table: &Table, report: &mut FileReport) {
    let check = "u_norm_sv < 1e-6 * u_norm_th at lambda = 0".to_string();
    report.checks.push(check.clone());
    let (Ok(lam), Ok(sv), Ok(th)) = (
        table.numeric("lambda"),
        table.numeric("u_norm_sv"),
        table.numeric("u_norm_th"),
    ) else {
        return;
    };
    match lam.iter().position(|&l| l == 0.0) {
        None => report.violations.push(Violation {
            row: None,
            check,
            detail: "no row with lambda = 0".into(),
        }),
        Some(i) if !(sv[i] < 1e-6 * th[i]) => report.violations.push(Violation {
            row: Some(i),
            check,
            detail: format!("u_norm_sv = {:e}, u_norm_th = {:e}", sv[i], th[i]),
        }),
        Some(_) => {}
    }
}

fn fig4_extra(table: &Table, report: &mut FileReport) {
    let check = "u_err_th nondecreasing for t >= 0.1".to_string();
    report.checks.push(check.clone());
    let (Ok(t), Ok(th)) = (table.numeric("t"), table.numeric("u_err_th")) else {
        return;
    };
    for i in 1..t.len() {
        if t[i - 1] >= 0.1 - 1e-12 && th[i] < th[i - 1] {
            report.violations.push(Violation {
                row: Some(i),
                check: check.clone(),
                detail: format!("u_err_th drops from {:e} to {:e}", th[i - 1], th[i]),
            });
        }
    }
}

fn hhd_extra(table: &Table, report: &mut FileReport) {
    let check = "smooth_data_residual_l2 decreases under refinement".to_string();
    report.checks.push(check.clone());
    let (Ok(variant), Ok(h), Ok(res)) = (
        table.text("variant"),
        table.numeric("h"),
        table.numeric("smooth_data_residual_l2"),
    ) else {
        return;
    };
    for i in 1..table.len() {
        if variant[i] == variant[i - 1] && h[i] < h[i - 1] && !(res[i] < res[i - 1]) {
            report.violations.push(Violation {
                row: Some(i),
                check: check.clone(),
                detail: format!("residual {:e} after {:e}", res[i], res[i - 1]),
            });
        }
    }
}

/// Validates every known experiment CSV found in `dir`.
pub fn validate_outputs(dir: &Path) -> Result<ValidationReport, CliError> {
    let mut files = Vec::new();
    for kind in ExperimentKind::ALL {
        let path = dir.join(format!("{}.csv", kind.file_stem()));
        if !path.exists() {
            continue;
        }
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let report = match Table::from_csv(&text) {
            Ok(t) => validate_table(kind, &t),
            Err(e) => FileReport {
                file: format!("{}.csv", kind.file_stem()),
                rows: 0,
                checks: vec!["parse".into()],
                violations: vec![Violation {
                    row: None,
                    check: "parse".into(),
                    detail: e.to_string(),
                }],
            },
        };
        files.push(report);
    }
    if files.is_empty() {
        return Err(CliError::Config(format!(
            "no experiment outputs found in {}",
            dir.display()
        )));
    }
    let passed = files.iter().all(|f| f.violations.is_empty());
    Ok(ValidationReport { files, passed })
}
