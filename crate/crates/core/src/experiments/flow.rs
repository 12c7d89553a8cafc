//! Finite element experiments: the λ-sweep between a solenoidal and a gradient forcing, transient
//! potential flow, and Helmholtz–Hodge consistency checks.

use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiments::table::{Table, Value};
use crate::fem::assembly::{assemble_convection, DiscreteVectorField, FnField, PotentialOperator};
use crate::fem::mesh::Mesh2D;
use crate::fem::poly::{Poly2, PolyField};
use crate::stokes::dual::{discrete_dual_seminorm_kh, discrete_inf_sup, velocity_riesz_representatives};
use crate::stokes::hodge::{HodgeSystem, PotentialField};
use crate::stokes::system::{Pair, StokesSystem};
use crate::stokes::transient::{solve_navier_stokes_transient, TransientConfig};

/// Continuous inf-sup constant of the unit square used in the pressure reference bounds.
pub const UNIT_SQUARE_BETA: f64 = 0.382683;

/// Largest pressure dimension for which the dense inf-sup eigenproblem is attempted.
const INF_SUP_MAX_DIM: usize = 1500;

/// `x²(x−1)²y²(y−1)²`.
pub fn stream_function() -> Poly2 {
    let one = Poly2::constant(1.0);
    let bump = |t: Poly2| &t.pow(2) * &(&t - &one).pow(2);
    &bump(Poly2::x()) * &bump(Poly2::y())
}

/// Exact velocity for λ = 1: `curl` of [`stream_function`].
pub fn solenoidal_velocity() -> PolyField {
    PolyField::curl(&stream_function())
}

/// `x³ − 1/4`, the zero-mean pressure for λ = 0.
pub fn gradient_pressure() -> Poly2 {
    &Poly2::x().pow(3) - &Poly2::constant(0.25)
}

/// `‖∇u(1)‖_{L²}` of the exact λ = 1 velocity.
pub fn solenoidal_velocity_h1() -> f64 {
    solenoidal_velocity().h1_seminorm_squared().sqrt()
}

/// `‖p(0)‖_{L²} = (9/112)^{1/2}`.
pub fn gradient_pressure_l2() -> f64 {
    let p = gradient_pressure();
    (&p * &p).integrate_unit_square().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaSweepParams {
    pub mu: f64,
    /// Cells per side of the structured base mesh.
    pub n: usize,
    /// Uniform refinements applied to the base mesh.
    pub levels: usize,
    pub points: usize,
    pub beta: f64,
}

impl Default for LambdaSweepParams {
    fn default() -> Self {
        Self {
            mu: 1e-3,
            n: 4,
            levels: 0,
            points: 101,
            beta: UNIT_SQUARE_BETA,
        }
    }
}

impl LambdaSweepParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mu > 0.0 && self.mu.is_finite() && self.n >= 1 && self.points >= 2 && self.beta > 0.0;
        if ok && self.n <= 64 && self.levels <= 5 {
            Ok(())
        } else {
            Err(Error::InvalidProblem(format!("invalid λ-sweep parameters {self:?}")))
        }
    }
}

pub const LAMBDA_COLUMNS: [&str; 14] = [
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
    "kh_seminorm_th",
    "kh_seminorm_sv",
];

/// Output of a finite element experiment: the table and a metadata record.
#[derive(Debug, Clone)]
pub struct FlowOutput {
    pub table: Table,
    pub metadata: serde_json::Value,
}

fn mesh_info(sys: &StokesSystem) -> serde_json::Value {
    let m = sys.mesh();
    json!({
        "pair": sys.pair().tag(),
        "vertices": m.num_vertices(),
        "triangles": m.num_triangles(),
        "mesh_size": m.mesh_size(),
        "velocity_dofs": sys.nv(),
        "pressure_dofs": sys.nq(),
        "warnings": sys.warnings(),
    })
}

fn inf_sup_if_small(sys: &StokesSystem) -> Result<Option<f64>> {
    if sys.nq() <= INF_SUP_MAX_DIM {
        discrete_inf_sup(sys).map(Some)
    } else {
        Ok(None)
    }
}

/// Taylor–Hood on the structured mesh and Scott–Vogelius on its barycentric refinement.
pub fn pair_systems(n: usize, levels: usize) -> Result<(StokesSystem, StokesSystem)> {
    let base = Mesh2D::structured(n)?.refined(levels);
    let sv_mesh = Arc::new(base.barycentric_refine());
    let th = StokesSystem::new(Arc::new(base), Pair::TaylorHood);
    let sv = StokesSystem::new(sv_mesh, Pair::ScottVogelius);
    Ok((th, sv))
}

/// Forcing `−λμΔu(1) + (1−λ)∇(x³)` split into its two λ-independent parts.
pub fn sweep_forcing_parts(mu: f64) -> (PolyField, PolyField) {
    let f_u = solenoidal_velocity().laplacian().scale(-mu);
    let f_p = PolyField::gradient(&Poly2::x().pow(3));
    (f_u, f_p)
}

/// λ-sweep of the Stokes problem with `f = −λμΔu(1) + (1−λ)∇(x³)`, exact solution
/// `u = λ u(1)`, `p = (1−λ)(x³ − 1/4)`.
pub fn lambda_sweep(params: &LambdaSweepParams) -> Result<FlowOutput> {
    params.validate()?;
    let (th, sv) = pair_systems(params.n, params.levels)?;
    let (f_u, f_p) = sweep_forcing_parts(params.mu);
    let grid: Vec<f64> = (0..params.points)
        .map(|k| k as f64 / (params.points - 1) as f64)
        .collect();
    let combine = |a: &[f64], b: &[f64], lam: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| lam * x + (1.0 - lam) * y).collect()
    };

    struct PairRun {
        u_norm: Vec<f64>,
        p_norm: Vec<f64>,
        div_l2: Vec<f64>,
        div_linf: Vec<f64>,
        kh: Vec<f64>,
    }
    let run = |sys: &StokesSystem| -> Result<PairRun> {
        let (lu, lp) = (sys.load(&f_u)?, sys.load(&f_p)?);
        let loads: Vec<Vec<f64>> = grid.iter().map(|&l| combine(&lu, &lp, l)).collect();
        let solver = sys.factor(&sys.stiffness().scale(params.mu))?;
        let sols = solver.solve_many(&loads, None, None)?;
        let unit = sys.factor(sys.stiffness())?;
        let riesz = unit.solve_many(&loads, None, None)?;
        let mut out = PairRun {
            u_norm: vec![],
            p_norm: vec![],
            div_l2: vec![],
            div_linf: vec![],
            kh: vec![],
        };
        for (s, z) in sols.iter().zip(&riesz) {
            let (dl2, dinf) = sys.divergence_norms(&s.u);
            out.u_norm.push(sys.h1_seminorm(&s.u));
            out.p_norm.push(sys.pressure_l2(&s.p));
            out.div_l2.push(dl2);
            out.div_linf.push(dinf);
            out.kh.push(sys.h1_seminorm(&z.u));
        }
        Ok(out)
    };
    let (rth, rsv) = rayon::join(|| run(&th), || run(&sv));
    let (rth, rsv) = (rth?, rsv?);

    // Dual norm of the forcing over all of V_h, on the finer (barycentric) mesh.
    let z = velocity_riesz_representatives(&sv, &[sv.load(&f_u)?, sv.load(&f_p)?])?;
    let u1 = solenoidal_velocity_h1();
    let p0 = gradient_pressure_l2();

    let mut table = Table::new(LAMBDA_COLUMNS);
    for (k, &lam) in grid.iter().enumerate() {
        let zl = combine(&z[0], &z[1], lam);
        let fv = sv.h1_seminorm(&zl);
        table.push_numbers(&[
            lam,
            rth.u_norm[k],
            rsv.u_norm[k],
            rth.p_norm[k],
            rsv.p_norm[k],
            fv / params.mu,
            lam * u1,
            fv / params.beta,
            (1.0 - lam) * p0 / params.beta,
            rth.div_l2[k],
            rsv.div_l2[k],
            rsv.div_linf[k],
            rth.kh[k],
            rsv.kh[k],
        ]);
    }
    let metadata = json!({
        "experiment": "lambda_sweep",
        "params": params,
        "taylor_hood": mesh_info(&th),
        "scott_vogelius": mesh_info(&sv),
        "discrete_inf_sup": {
            "TH": inf_sup_if_small(&th)?,
            "SV": inf_sup_if_small(&sv)?,
        },
        "exact": { "grad_u1_l2": u1, "p0_l2": p0 },
        "quadrature_degree_load": crate::fem::assembly::LOAD_DEGREE,
        "solve_tolerance": crate::fem::sparse::SOLVE_TOL,
    });
    Ok(FlowOutput { table, metadata })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialFlowParams {
    pub n: usize,
    pub levels: usize,
    pub transient: TransientConfig,
}

impl Default for PotentialFlowParams {
    fn default() -> Self {
        Self {
            n: 8,
            levels: 0,
            transient: TransientConfig::default(),
        }
    }
}

impl PotentialFlowParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 64 || self.levels > 4 {
            return Err(Error::InvalidProblem(format!(
                "invalid mesh parameters n = {}, levels = {}",
                self.n, self.levels
            )));
        }
        if !(self.transient.picard_tol > 0.0) || self.transient.max_picard == 0 {
            return Err(Error::InvalidProblem(
                "Picard tolerance and iteration limit must be positive".into(),
            ));
        }
        self.transient.steps().map(|_| ())
    }
}

pub const POTENTIAL_FLOW_COLUMNS: [&str; 7] = [
    "t",
    "u_err_th",
    "u_err_sv",
    "p_norm_th",
    "p_norm_sv",
    "picard_th",
    "picard_sv",
];

/// `u₀ = ∇(x³ − 3xy²)`.
pub fn potential_velocity() -> PolyField {
    PolyField::gradient(&(&Poly2::x().pow(3) - &(&Poly2::x() * &Poly2::y().pow(2)).scale(3.0)))
}

/// `‖(u₀·∇)u₀‖_{K_h'}` for a pair: zero exactly when the discrete kernel is pointwise solenoidal.
pub fn convection_kh_seminorm(sys: &StokesSystem) -> Result<f64> {
    let u0 = potential_velocity();
    let coeffs = sys.interpolate(|x| u0.eval(x[0], x[1]));
    let load = assemble_convection(sys.velocity_space(), &coeffs).mul_vec(&coeffs);
    discrete_dual_seminorm_kh(sys, &load)
}

/// Transient Navier–Stokes from the steady potential flow `u₀` with `u = u₀` on the boundary;
/// records the L² distance to `u₀` over time.
pub fn potential_flow(params: &PotentialFlowParams) -> Result<FlowOutput> {
    params.validate()?;
    let (th, sv) = pair_systems(params.n, params.levels)?;
    let u0 = potential_velocity();
    let run = |sys: &StokesSystem| {
        let init = sys.interpolate(|x| u0.eval(x[0], x[1]));
        let sol = solve_navier_stokes_transient(sys, &params.transient, &init, &init)?;
        let rows: Vec<(f64, f64, f64, usize)> = sol
            .times
            .iter()
            .zip(&sol.states)
            .zip(&sol.picard_iterations)
            .map(|((&t, s), &it)| {
                let e: Vec<f64> = s.u.iter().zip(&init).map(|(a, b)| a - b).collect();
                (t, sys.velocity_l2(&e), sys.pressure_l2(&s.p), it)
            })
            .collect();
        Ok::<_, Error>(rows)
    };
    let (rth, rsv) = rayon::join(|| run(&th), || run(&sv));
    let (rth, rsv) = (rth?, rsv?);
    let mut table = Table::new(POTENTIAL_FLOW_COLUMNS);
    for (a, b) in rth.iter().zip(&rsv) {
        table.push_numbers(&[a.0, a.1, b.1, a.2, b.2, a.3 as f64, b.3 as f64]);
    }
    let metadata = json!({
        "experiment": "potential_flow",
        "params": params,
        "taylor_hood": mesh_info(&th),
        "scott_vogelius": mesh_info(&sv),
        "convection_kh_seminorm": {
            "TH": convection_kh_seminorm(&th)?,
            "SV": convection_kh_seminorm(&sv)?,
        },
        "quadrature_degree_convection": crate::fem::assembly::CONVECTION_DEGREE,
    });
    Ok(FlowOutput { table, metadata })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HodgeParams {
    /// Structured mesh sizes to run.
    pub sizes: Vec<usize>,
}

impl Default for HodgeParams {
    fn default() -> Self {
        Self { sizes: vec![4, 8, 16] }
    }
}

impl HodgeParams {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n == 0 || n > 64) {
            return Err(Error::InvalidProblem(format!("invalid mesh sizes {:?}", self.sizes)));
        }
        Ok(())
    }
}

pub const HODGE_COLUMNS: [&str; 8] = [
    "variant",
    "n",
    "h",
    "gradient_data_u_rel",
    "solenoidal_data_p_rel",
    "orthogonality_defect",
    "smooth_data_residual_l2",
    "smooth_data_u_l2",
];

/// Helmholtz–Hodge consistency checks on a sequence of meshes, for both variants.
pub fn hodge_checks(params: &HodgeParams) -> Result<FlowOutput> {
    params.validate()?;
    use std::f64::consts::PI;
    let smooth = FnField(|x: [f64; 2]| {
        [
            (PI * x[0]).sin() * (PI * x[1]).cos() + x[1] * x[1],
            (2.0 * x[0] * x[1]).exp() - x[0],
        ]
    });
    let mut table = Table::new(HODGE_COLUMNS);
    for op in [PotentialOperator::Gradient, PotentialOperator::Curl] {
        let name = match op {
            PotentialOperator::Gradient => "gradient",
            PotentialOperator::Curl => "curl",
        };
        for &n in &params.sizes {
            let mesh = Arc::new(Mesh2D::structured(n)?);
            let sys = HodgeSystem::new(mesh.clone(), op)?;

            // (ii) f = D q_h with q_h in the discrete potential space.
            let q = sys
                .potential_space()
                .interpolate_scalar(|x| (x[0] * x[1]).sin() + x[0] * x[0] * x[0] - x[1]);
            let dec = sys.decompose(&PotentialField { system: &sys, q: &q })?;
            let u_rel = sys.velocity_l2(&dec.u) / sys.potential_seminorm(&q);

            // (i) a discretely solenoidal field: the velocity part of a previous decomposition.
            let first = sys.decompose(&smooth)?;
            let field = DiscreteVectorField {
                space: sys.velocity_space(),
                coeffs: &first.u,
            };
            let second = sys.decompose(&field)?;
            let p_rel = sys.potential_seminorm(&second.p) / sys.velocity_l2(&first.u);

            let defect = sys
                .orthogonality_defect(&dec.u)
                .max(sys.orthogonality_defect(&first.u))
                .max(sys.orthogonality_defect(&second.u));
            let residual = sys.residual_l2(&smooth, &first);
            table.push(vec![
                Value::Text(name.into()),
                Value::Num(n as f64),
                Value::Num(mesh.mesh_size()),
                Value::Num(u_rel),
                Value::Num(p_rel),
                Value::Num(defect),
                Value::Num(residual),
                Value::Num(sys.velocity_l2(&first.u)),
            ]);
        }
    }
    let metadata = json!({
        "experiment": "hodge",
        "params": params,
        "velocity_space": "continuous P2 vector, no boundary conditions",
        "potential_space": "continuous P1, zero mean",
    });
    Ok(FlowOutput { table, metadata })
}
