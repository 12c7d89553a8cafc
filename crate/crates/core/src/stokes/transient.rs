//! Implicit Euler time stepping for the incompressible Navier–Stokes equations with Picard
//! linearization of the convective term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::assembly::assemble_convection;
use crate::fem::sparse::{norm2, CsrMatrix};
use crate::stokes::system::{StokesSolution, StokesSystem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransientConfig {
    pub mu: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Picard stops once the nonlinear residual is below `picard_tol·max(‖u⁰‖, ‖g_D‖, 1)`.
    pub picard_tol: f64,
    pub max_picard: usize,
}

impl Default for TransientConfig {
    fn default() -> Self {
        Self {
            mu: 1e-4,
            dt: 0.01,
            t_end: 1.0,
            picard_tol: 1e-10,
            max_picard: 50,
        }
    }
}

impl TransientConfig {
    /// Number of time steps; `t_end` must be a whole multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "final time must be positive, got {}",
                self.t_end
            )));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "viscosity must be positive, got {}",
                self.mu
            )));
        }
        let ratio = self.t_end / self.dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidProblem(format!(
                "final time {} is not a multiple of the time step {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }
}

/// Solution at every time level, starting with the initial state.
#[derive(Debug, Clone)]
pub struct TransientSolution {
    pub times: Vec<f64>,
    pub states: Vec<StokesSolution>,
    /// Picard iterations used per step (zero for the initial state).
    pub picard_iterations: Vec<usize>,
}

/// Advances `u0` with implicit Euler:
/// `M(uᵏ⁺¹ − uᵏ)/dt + μAuᵏ⁺¹ + N(uᵏ⁺¹)uᵏ⁺¹ + Bᵀp = 0`, `Buᵏ⁺¹ = 0`, `uᵏ⁺¹ = g_D` on the boundary.
///
/// `g_d` is a full velocity vector whose boundary entries carry the Dirichlet values.
pub fn solve_navier_stokes_transient(
    system: &StokesSystem,
    cfg: &TransientConfig,
    u0: &[f64],
    g_d: &[f64],
) -> Result<TransientSolution> {
    let steps = cfg.steps()?;
    let nv = system.nv();
    if u0.len() != nv || g_d.len() != nv {
        return Err(Error::InvalidProblem(
            "initial or boundary vector has the wrong length".into(),
        ));
    }
    let space = system.velocity_space();
    let mass_dt = system.velocity_mass().scale(1.0 / cfg.dt);
    let linear = mass_dt.add_scaled(system.stiffness(), cfg.mu);
    let bnd: Vec<f64> = space.boundary_dofs().iter().map(|&i| g_d[i]).collect();
    let scale = norm2(u0).max(norm2(&bnd)).max(1.0);
    let threshold = cfg.picard_tol * scale;

    let mut times = vec![0.0];
    let mut states = vec![StokesSolution {
        u: u0.to_vec(),
        p: vec![0.0; system.nq()],
        multiplier: 0.0,
    }];
    let mut iterations = vec![0];
    let mut u_prev = u0.to_vec();
    for k in 1..=steps {
        let rhs = mass_dt.mul_vec(&u_prev);
        let mut conv = assemble_convection(space, &u_prev);
        let mut converged = None;
        let mut residual = f64::INFINITY;
        for it in 1..=cfg.max_picard {
            let solver = system.factor(&linear.add_scaled(&conv, 1.0))?;
            let sol = solver.solve(&rhs, None, Some(g_d))?;
            conv = assemble_convection(space, &sol.u);
            residual = nonlinear_residual(system, &linear, &conv, &rhs, &sol);
            if residual <= threshold {
                converged = Some((sol, it));
                break;
            }
        }
        let Some((sol, it)) = converged else {
            return Err(Error::NonlinearDivergence {
                iterations: cfg.max_picard,
                residual,
            });
        };
        u_prev = sol.u.clone();
        times.push(k as f64 * cfg.dt);
        states.push(sol);
        iterations.push(it);
    }
    Ok(TransientSolution {
        times,
        states,
        picard_iterations: iterations,
    })
}

/// Euclidean norm of the momentum and continuity residuals on the free rows.
fn nonlinear_residual(
    system: &StokesSystem,
    linear: &CsrMatrix,
    conv: &CsrMatrix,
    rhs: &[f64],
    sol: &StokesSolution,
) -> f64 {
    let lu = linear.mul_vec(&sol.u);
    let nu = conv.mul_vec(&sol.u);
    let btp = system.divergence().transpose_mul_vec(&sol.p);
    let mut is_bnd = vec![false; system.nv()];
    for &i in system.velocity_space().boundary_dofs() {
        is_bnd[i] = true;
    }
    let mut sq = 0.0;
    for i in 0..system.nv() {
        if !is_bnd[i] {
            let r = lu[i] + nu[i] + btp[i] - rhs[i];
            sq += r * r;
        }
    }
    let div = system.divergence().mul_vec(&sol.u);
    for (i, d) in div.iter().enumerate() {
        let r = d + system.mean_row()[i] * sol.multiplier;
        sq += r * r;
    }
    sq.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::Mesh2D;
    use crate::stokes::system::Pair;
    use std::sync::Arc;

    #[test]
    fn rest_state_stays_at_rest() {
        let sys = StokesSystem::new(Arc::new(Mesh2D::structured(2).unwrap()), Pair::TaylorHood);
        let zero = vec![0.0; sys.nv()];
        let cfg = TransientConfig {
            t_end: 0.05,
            ..Default::default()
        };
        let sol = solve_navier_stokes_transient(&sys, &cfg, &zero, &zero).unwrap();
        assert_eq!(sol.states.len(), 6);
        assert!(sol.states.iter().all(|s| s.u.iter().all(|x| *x == 0.0)));
    }

    #[test]
    fn rejects_incommensurate_final_time() {
        let cfg = TransientConfig {
            t_end: 0.105,
            ..Default::default()
        };
        assert!(cfg.steps().is_err());
        assert_eq!(TransientConfig::default().steps().unwrap(), 100);
    }
}
