//! Parameter sweeps over the two-by-two model instances.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::table::Table;
use crate::saddle::bounds::StabilityReport;
use crate::saddle::instances::{general_instance, symmetric_instance};
use crate::saddle::problem::solve_mixed;

/// Sweep of `f = (cos φ, sin φ)` over a uniform grid on `[0, phi_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepParams {
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub points: usize,
    pub phi_max: f64,
}

impl SweepParams {
    /// Nonsymmetric instance, `φ ∈ [0, π]`.
    pub fn general_default() -> Self {
        Self {
            a: 0.01,
            b: 0.1,
            g: -0.01,
            points: 200,
            phi_max: std::f64::consts::PI,
        }
    }

    /// Symmetric instance, `φ ∈ [0, π/2]`.
    pub fn symmetric_default() -> Self {
        Self {
            a: 0.001,
            b: 0.1,
            g: 0.5,
            points: 200,
            phi_max: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.a > 0.0
            && self.a.is_finite()
            && self.b != 0.0
            && self.b.is_finite()
            && self.g.is_finite()
            && self.points >= 2
            && self.phi_max > 0.0
            && self.phi_max.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidProblem(format!("invalid sweep parameters {self:?}")))
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n).map(|k| self.phi_max * k as f64 / (n - 1) as f64).collect()
    }
}

pub const GENERAL_COLUMNS: [&str; 9] = [
    "phi",
    "f1",
    "f2",
    "u_norm",
    "p_norm",
    "theta_u_r",
    "theta_u_c",
    "theta_p_r",
    "theta_p_c",
];

pub const SYMMETRIC_COLUMNS: [&str; 11] = [
    "phi",
    "f1",
    "f2",
    "u_norm",
    "p_norm",
    "u2",
    "theta_u_r",
    "theta_u_c",
    "theta_p_r",
    "theta_p_c",
    "theta_p_r2",
];

/// Exact norms and general refined/classical bounds for `A = [[1, −1], [1, a]]`, `B = [b, 0]`.
pub fn general_sweep(params: &SweepParams) -> Result<Table> {
    params.validate()?;
    let rows: Vec<Vec<f64>> = params
        .grid()
        .into_par_iter()
        .map(|phi| {
            let f = [phi.cos(), phi.sin()];
            let p = general_instance(params.a, params.b, f, params.g)?;
            let r = StabilityReport::general(&p)?;
            Ok(vec![
                phi,
                f[0],
                f[1],
                r.u_norm,
                r.p_norm,
                r.theta_u_refined,
                r.theta_u_classical,
                r.theta_p_refined,
                r.theta_p_classical,
            ])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(GENERAL_COLUMNS);
    rows.iter().for_each(|r| t.push_numbers(r));
    Ok(t)
}

/// Exact norms and symmetric refined/classical bounds for `A = [[2, √a], [√a, a]]`, `B = [b, 0]`.
pub fn symmetric_sweep(params: &SweepParams) -> Result<Table> {
    params.validate()?;
    let rows: Vec<Vec<f64>> = params
        .grid()
        .into_par_iter()
        .map(|phi| {
            let f = [phi.cos(), phi.sin()];
            let p = symmetric_instance(params.a, params.b, f, params.g)?;
            let r = StabilityReport::symmetric(&p)?;
            let u2 = solve_mixed(&p)?.u[1];
            Ok(vec![
                phi,
                f[0],
                f[1],
                r.u_norm,
                r.p_norm,
                u2,
                r.theta_u_refined,
                r.theta_u_classical,
                r.theta_p_refined,
                r.theta_p_classical,
                r.theta_p_refined2.expect("symmetric report carries the second p-bound"),
            ])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(SYMMETRIC_COLUMNS);
    rows.iter().for_each(|r| t.push_numbers(r));
    Ok(t)
}
