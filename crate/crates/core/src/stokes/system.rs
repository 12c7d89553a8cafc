//! Discrete Stokes block systems for the Taylor–Hood and Scott–Vogelius pairs.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::assembly::{
    assemble_divergence, assemble_load, assemble_mean_row, assemble_scalar_mass, assemble_stiffness,
    assemble_vector_mass, divergence_norms, VectorField, LOAD_DEGREE,
};
use crate::fem::dirichlet::free_indices;
use crate::fem::mesh::Mesh2D;
use crate::fem::space::{FeSpace, SpaceKind};
use crate::fem::sparse::{block_matrix, norm2, CsrMatrix, SparseLu, TripletBuilder};

/// Velocity/pressure element pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    /// Continuous P2 velocity, continuous P1 pressure.
    TaylorHood,
    /// Continuous P2 velocity, discontinuous P1 pressure.
    ScottVogelius,
}

impl Pair {
    pub fn tag(self) -> &'static str {
        match self {
            Pair::TaylorHood => "TH",
            Pair::ScottVogelius => "SV",
        }
    }

    fn pressure_kind(self) -> SpaceKind {
        match self {
            Pair::TaylorHood => SpaceKind::P1Continuous,
            Pair::ScottVogelius => SpaceKind::P1Discontinuous,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Assembled Stokes operators on one mesh, with unit viscosity.
///
/// Unknowns are ordered `[u (velocity), p (pressure), m (mean multiplier)]`.
#[derive(Debug, Clone)]
pub struct StokesSystem {
    pair: Pair,
    velocity: FeSpace,
    pressure: FeSpace,
    stiffness: CsrMatrix,
    divergence: CsrMatrix,
    mean_row: Vec<f64>,
    velocity_mass: CsrMatrix,
    pressure_mass: CsrMatrix,
    warnings: Vec<String>,
}

impl StokesSystem {
    pub fn new(mesh: Arc<Mesh2D>, pair: Pair) -> Self {
        let mut warnings = Vec::new();
        if pair == Pair::ScottVogelius && !mesh.is_barycentric_refinement() {
            warnings.push(
                "UnstablePair: Scott–Vogelius requested on a mesh that is not a barycentric refinement".to_string(),
            );
        }
        let velocity = FeSpace::new(mesh.clone(), SpaceKind::P2Vector);
        let pressure = FeSpace::new(mesh, pair.pressure_kind());
        Self {
            pair,
            stiffness: assemble_stiffness(&velocity, 1.0),
            divergence: assemble_divergence(&velocity, &pressure),
            mean_row: assemble_mean_row(&pressure),
            velocity_mass: assemble_vector_mass(&velocity),
            pressure_mass: assemble_scalar_mass(&pressure),
            velocity,
            pressure,
            warnings,
        }
    }

    pub fn pair(&self) -> Pair {
        self.pair
    }

    pub fn mesh(&self) -> &Mesh2D {
        self.velocity.mesh()
    }

    pub fn velocity_space(&self) -> &FeSpace {
        &self.velocity
    }

    pub fn pressure_space(&self) -> &FeSpace {
        &self.pressure
    }

    /// `(∇u, ∇v)` without boundary conditions.
    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// `−(div v, q)`, pressure rows by velocity columns.
    pub fn divergence(&self) -> &CsrMatrix {
        &self.divergence
    }

    pub fn mean_row(&self) -> &[f64] {
        &self.mean_row
    }

    pub fn velocity_mass(&self) -> &CsrMatrix {
        &self.velocity_mass
    }

    pub fn pressure_mass(&self) -> &CsrMatrix {
        &self.pressure_mass
    }

    /// Diagnostics such as an unstable pair/mesh combination.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn nv(&self) -> usize {
        self.velocity.dof_count()
    }

    pub fn nq(&self) -> usize {
        self.pressure.dof_count()
    }

    pub fn size(&self) -> usize {
        self.nv() + self.nq() + 1
    }

    /// `[[V, Bᵀ, 0], [B, 0, m], [0, mᵀ, 0]]` for a given velocity block `V`.
    pub fn block_system(&self, velocity_block: &CsrMatrix) -> CsrMatrix {
        let (nv, nq) = (self.nv(), self.nq());
        let mut mean_col = TripletBuilder::new(nq, 1);
        for (i, &v) in self.mean_row.iter().enumerate() {
            mean_col.push(i, 0, v);
        }
        let mean_col = mean_col.build();
        let bt = self.divergence.transpose();
        let mt = mean_col.transpose();
        block_matrix(
            self.size(),
            self.size(),
            &[
                (0, 0, velocity_block),
                (0, nv, &bt),
                (nv, 0, &self.divergence),
                (nv, nv + nq, &mean_col),
                (nv + nq, nv, &mt),
            ],
        )
    }

    /// Velocity load `∫ f·φ_i` with the default high-order rule.
    pub fn load(&self, f: &dyn VectorField) -> Result<Vec<f64>> {
        assemble_load(&self.velocity, f, LOAD_DEGREE)
    }

    /// Nodal interpolant of a velocity field.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        self.velocity.interpolate_vector(f)
    }

    /// `‖∇u_h‖_{L²}`.
    pub fn h1_seminorm(&self, u: &[f64]) -> f64 {
        self.stiffness.bilinear(u, u).max(0.0).sqrt()
    }

    /// `‖u_h‖_{L²}`.
    pub fn velocity_l2(&self, u: &[f64]) -> f64 {
        self.velocity_mass.bilinear(u, u).max(0.0).sqrt()
    }

    /// `‖p_h‖_{L²}`.
    pub fn pressure_l2(&self, p: &[f64]) -> f64 {
        self.pressure_mass.bilinear(p, p).max(0.0).sqrt()
    }

    /// `∫ p_h`.
    pub fn pressure_mean(&self, p: &[f64]) -> f64 {
        self.mean_row.iter().zip(p).map(|(a, b)| a * b).sum()
    }

    /// `(‖div u_h‖_{L²}, max_T ‖div u_h‖_{L∞(T)})`.
    pub fn divergence_norms(&self, u: &[f64]) -> (f64, f64) {
        divergence_norms(&self.velocity, u)
    }

    /// Factorizes the block system with velocity block `V` and Dirichlet boundary.
    pub fn factor(&self, velocity_block: &CsrMatrix) -> Result<SaddleSolver> {
        SaddleSolver::new(self, velocity_block)
    }
}

/// Factorized block system with the velocity boundary dofs eliminated.
pub struct SaddleSolver {
    matrix: CsrMatrix,
    free: Vec<usize>,
    boundary: Vec<usize>,
    lu: SparseLu,
    nv: usize,
    nq: usize,
}

/// Velocity, zero-mean pressure, and the mean multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesSolution {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub multiplier: f64,
}

impl SaddleSolver {
    fn new(system: &StokesSystem, velocity_block: &CsrMatrix) -> Result<Self> {
        let matrix = system.block_system(velocity_block);
        let boundary = system.velocity.boundary_dofs().to_vec();
        let fixed: Vec<(usize, f64)> = boundary.iter().map(|&i| (i, 0.0)).collect();
        let free = free_indices(matrix.nrows(), &fixed);
        let lu = SparseLu::new(&matrix.select(&free, &free))?;
        Ok(Self {
            matrix,
            free,
            boundary,
            lu,
            nv: system.nv(),
            nq: system.nq(),
        })
    }

    /// Solves with velocity load `f`, divergence data `g` (pressure rows, `None` for zero) and
    /// Dirichlet values taken from `boundary_values` at the boundary dofs (`None` for zero).
    pub fn solve(&self, f: &[f64], g: Option<&[f64]>, boundary_values: Option<&[f64]>) -> Result<StokesSolution> {
        Ok(self
            .solve_many(&[f.to_vec()], g, boundary_values)?
            .pop()
            .expect("one solution per right-hand side"))
    }

    /// Like [`SaddleSolver::solve`] for several loads sharing `g` and the boundary data.
    pub fn solve_many(
        &self,
        loads: &[Vec<f64>],
        g: Option<&[f64]>,
        boundary_values: Option<&[f64]>,
    ) -> Result<Vec<StokesSolution>> {
        let n = self.matrix.nrows();
        let mut lift = vec![0.0; n];
        if let Some(bv) = boundary_values {
            if bv.len() != self.nv {
                return Err(Error::InvalidProblem("boundary vector has the wrong length".into()));
            }
            for &i in &self.boundary {
                lift[i] = bv[i];
            }
        }
        let correction = self.matrix.mul_vec(&lift);
        let mut rhs = Vec::with_capacity(loads.len());
        for f in loads {
            if f.len() != self.nv {
                return Err(Error::InvalidProblem("load vector has the wrong length".into()));
            }
            let mut full = vec![0.0; n];
            full[..self.nv].copy_from_slice(f);
            if let Some(g) = g {
                full[self.nv..self.nv + self.nq].copy_from_slice(g);
            }
            rhs.push(self.free.iter().map(|&i| full[i] - correction[i]).collect());
        }
        let xs = self.lu.solve_many(&rhs)?;
        Ok(xs
            .into_iter()
            .map(|x| {
                let mut full = lift.clone();
                for (&i, v) in self.free.iter().zip(x) {
                    full[i] = v;
                }
                StokesSolution {
                    u: full[..self.nv].to_vec(),
                    p: full[self.nv..self.nv + self.nq].to_vec(),
                    multiplier: full[n - 1],
                }
            })
            .collect())
    }

    /// Relative residual of the free equations at a full solution.
    pub fn relative_residual(&self, f: &[f64], sol: &StokesSolution) -> f64 {
        let mut x = sol.u.clone();
        x.extend_from_slice(&sol.p);
        x.push(sol.multiplier);
        let ax = self.matrix.mul_vec(&x);
        let mut rhs = vec![0.0; x.len()];
        rhs[..self.nv].copy_from_slice(f);
        let r: Vec<f64> = self.free.iter().map(|&i| ax[i] - rhs[i]).collect();
        let scale = norm2(f) + self.matrix.max_abs() * norm2(&x);
        if scale == 0.0 {
            0.0
        } else {
            norm2(&r) / scale
        }
    }
}

/// Solves `−μΔu + ∇p = f`, `div u = 0`, `u = g_D` on the boundary, `∫p = 0`.
pub fn solve_stokes(
    system: &StokesSystem,
    mu: f64,
    f: &dyn VectorField,
    g_d: Option<&dyn Fn([f64; 2]) -> [f64; 2]>,
) -> Result<StokesSolution> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidProblem(format!("viscosity must be positive, got {mu}")));
    }
    let load = system.load(f)?;
    let boundary = g_d.map(|g| system.interpolate(g));
    let solver = system.factor(&system.stiffness().scale(mu))?;
    solver.solve(&load, None, boundary.as_deref())
}
