use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use serde::Serialize;

use semilab::experiments::{HodgeParams, LambdaSweepParams, PotentialFlowParams, SuiteParams, SweepParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Hhd,
    RandomSuite,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        Self::Fig1,
        Self::Fig2,
        Self::Fig3,
        Self::Fig4,
        Self::Hhd,
        Self::RandomSuite,
    ];

    /// Base name of the CSV and JSON files.
    pub fn file_stem(self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Hhd => "hhd",
            Self::RandomSuite => "random_suite",
        }
    }

    /// Keys accepted by `--set`.
    pub fn override_keys(self) -> &'static [&'static str] {
        match self {
            Self::Fig1 | Self::Fig2 => &["a", "b", "g", "points", "phi_max"],
            Self::Fig3 => &["mu", "n", "levels", "points", "beta"],
            Self::Fig4 => &["mu", "dt", "T", "n", "levels", "picard_tol", "max_picard"],
            Self::Hhd => &["sizes"],
            Self::RandomSuite => &[
                "seed",
                "count",
                "max_n",
                "max_m",
                "bound_tol",
                "equivalence_tol",
                "oracle_tol",
                "oracle_max_n",
            ],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_stem())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub output_dir: PathBuf,
    pub overrides: BTreeMap<String, String>,
}

/// Fully validated parameters of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "experiment", content = "params", rename_all = "snake_case")]
pub enum ResolvedExperiment {
    Fig1(SweepParams),
    Fig2(SweepParams),
    Fig3(LambdaSweepParams),
    Fig4(PotentialFlowParams),
    Hhd(HodgeParams),
    RandomSuite(SuiteParams),
}

/// Parses `key=value`.
pub fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return Err(format!("expected key=value, got {s:?}"));
    }
    Ok((k.to_string(), v.to_string()))
}

struct Overrides {
    experiment: ExperimentKind,
    map: BTreeMap<String, String>,
}

impl Overrides {
    fn take<T: FromStr>(&mut self, key: &str, target: &mut T) -> Result<(), CliError> {
        if let Some(raw) = self.map.remove(key) {
            *target = raw
                .parse()
                .map_err(|_| CliError::Config(format!("{}: cannot parse {key}={raw:?}", self.experiment)))?;
        }
        Ok(())
    }

    fn finish(self) -> Result<(), CliError> {
        match self.map.keys().next() {
            None => Ok(()),
            Some(k) => Err(CliError::Config(format!(
                "{}: unknown override {k:?} (accepted: {})",
                self.experiment,
                self.experiment.override_keys().join(", ")
            ))),
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            experiment,
            output_dir: output_dir.into(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.overrides.insert(key.to_string(), value.to_string());
        self
    }

    /// Applies the overrides to the defaults and checks every precondition.
    pub fn resolve(&self) -> Result<ResolvedExperiment, CliError> {
        let mut o = Overrides {
            experiment: self.experiment,
            map: self.overrides.clone(),
        };
        let invalid = |e: semilab::Error| CliError::Config(format!("{}: {e}", self.experiment));
        let resolved = match self.experiment {
            ExperimentKind::Fig1 | ExperimentKind::Fig2 => {
                let mut p = if self.experiment == ExperimentKind::Fig1 {
                    SweepParams::general_default()
                } else {
                    SweepParams::symmetric_default()
                };
                o.take("a", &mut p.a)?;
                o.take("b", &mut p.b)?;
                o.take("g", &mut p.g)?;
                o.take("points", &mut p.points)?;
                o.take("phi_max", &mut p.phi_max)?;
                p.validate().map_err(invalid)?;
                if self.experiment == ExperimentKind::Fig1 {
                    ResolvedExperiment::Fig1(p)
                } else {
                    ResolvedExperiment::Fig2(p)
                }
            }
            ExperimentKind::Fig3 => {
                let mut p = LambdaSweepParams::default();
                o.take("mu", &mut p.mu)?;
                o.take("n", &mut p.n)?;
                o.take("levels", &mut p.levels)?;
                o.take("points", &mut p.points)?;
                o.take("beta", &mut p.beta)?;
                p.validate().map_err(invalid)?;
                ResolvedExperiment::Fig3(p)
            }
            ExperimentKind::Fig4 => {
                let mut p = PotentialFlowParams::default();
                o.take("mu", &mut p.transient.mu)?;
                o.take("dt", &mut p.transient.dt)?;
                o.take("T", &mut p.transient.t_end)?;
                o.take("n", &mut p.n)?;
                o.take("levels", &mut p.levels)?;
                o.take("picard_tol", &mut p.transient.picard_tol)?;
                o.take("max_picard", &mut p.transient.max_picard)?;
                p.validate().map_err(invalid)?;
                ResolvedExperiment::Fig4(p)
            }
            ExperimentKind::Hhd => {
                let mut p = HodgeParams::default();
                if let Some(raw) = o.map.remove("sizes") {
                    p.sizes = raw
                        .split(',')
                        .map(|s| s.trim().parse())
                        .collect::<Result<_, _>>()
                        .map_err(|_| CliError::Config(format!("hhd: cannot parse sizes={raw:?}")))?;
                }
                p.validate().map_err(invalid)?;
                ResolvedExperiment::Hhd(p)
            }
            ExperimentKind::RandomSuite => {
                let mut p = SuiteParams::default();
                o.take("seed", &mut p.seed)?;
                o.take("count", &mut p.count)?;
                o.take("max_n", &mut p.max_n)?;
                o.take("max_m", &mut p.max_m)?;
                o.take("bound_tol", &mut p.bound_tol)?;
                o.take("equivalence_tol", &mut p.equivalence_tol)?;
                o.take("oracle_tol", &mut p.oracle_tol)?;
                o.take("oracle_max_n", &mut p.oracle_max_n)?;
                p.validate().map_err(invalid)?;
                ResolvedExperiment::RandomSuite(p)
            }
        };
        o.finish()?;
        Ok(resolved)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        for kind in ExperimentKind::ALL {
            ExperimentConfig::new(kind, "out").resolve().unwrap();
        }
    }

    #[test]
    fn overrides_are_parsed_and_checked() {
        let cfg = ExperimentConfig::new(ExperimentKind::Fig3, "out")
            .set("mu", 0.01)
            .set("points", 11);
        match cfg.resolve().unwrap() {
            ResolvedExperiment::Fig3(p) => assert_eq!((p.mu, p.points), (0.01, 11)),
            other => panic!("{other:?}"),
        }
        let bad = ExperimentConfig::new(ExperimentKind::Fig3, "out").set("mu", -1.0);
        assert!(matches!(bad.resolve(), Err(CliError::Config(_))));
        let unknown = ExperimentConfig::new(ExperimentKind::Fig1, "out").set("mu", 1.0);
        assert!(matches!(unknown.resolve(), Err(CliError::Config(m)) if m.contains("unknown override")));
        let commensurate = ExperimentConfig::new(ExperimentKind::Fig4, "out").set("T", 0.105);
        assert!(commensurate.resolve().is_err());
        let sizes = ExperimentConfig::new(ExperimentKind::Hhd, "out").set("sizes", "2, 3");
        assert_eq!(
            sizes.resolve().unwrap(),
            ResolvedExperiment::Hhd(HodgeParams { sizes: vec![2, 3] })
        );
    }

    #[test]
    fn override_syntax() {
        assert_eq!(parse_override("mu=1e-3").unwrap(), ("mu".into(), "1e-3".into()));
        assert!(parse_override("mu").is_err());
        assert!(parse_override("=1").is_err());
    }
}
