//! Discrete Helmholtz–Hodge decomposition `f = u_h + D p_h`, with `D` the gradient or the curl.
//!
//! `u_h` is a continuous P2 vector field without boundary conditions, `p_h` a zero-mean continuous
//! P1 function. The mixed system uses the L² inner product as the velocity form:
//! `(u_h, v) + (v, D p_h) = (f, v)` and `(u_h, D q) = 0`.

use std::sync::Arc;

use crate::error::Result;
use crate::fem::assembly::{
    assemble_load, assemble_mean_row, assemble_potential_coupling, assemble_scalar_stiffness, assemble_vector_mass,
    field_l2_squared, PotentialOperator, VectorField, LOAD_DEGREE,
};
use crate::fem::mesh::Mesh2D;
use crate::fem::space::{Element, FeSpace, SpaceKind};
use crate::fem::sparse::{block_matrix, CsrMatrix, SparseLu, TripletBuilder};

pub struct HodgeSystem {
    op: PotentialOperator,
    velocity: FeSpace,
    potential: FeSpace,
    mass: CsrMatrix,
    coupling: CsrMatrix,
    potential_stiffness: CsrMatrix,
    lu: SparseLu,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HodgeDecomposition {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

impl HodgeSystem {
    pub fn new(mesh: Arc<Mesh2D>, op: PotentialOperator) -> Result<Self> {
        let velocity = FeSpace::new(mesh.clone(), SpaceKind::P2Vector);
        let potential = FeSpace::new(mesh, SpaceKind::P1Continuous);
        let mass = assemble_vector_mass(&velocity);
        let coupling = assemble_potential_coupling(&velocity, &potential, op);
        let mean = assemble_mean_row(&potential);
        let (nv, nq) = (velocity.dof_count(), potential.dof_count());
        let mut mean_col = TripletBuilder::new(nq, 1);
        for (i, &v) in mean.iter().enumerate() {
            mean_col.push(i, 0, v);
        }
        let mean_col = mean_col.build();
        let matrix = block_matrix(
            nv + nq + 1,
            nv + nq + 1,
            &[
                (0, 0, &mass),
                (0, nv, &coupling.transpose()),
                (nv, 0, &coupling),
                (nv, nv + nq, &mean_col),
                (nv + nq, nv, &mean_col.transpose()),
            ],
        );
        let lu = SparseLu::new(&matrix)?;
        Ok(Self {
            op,
            potential_stiffness: assemble_scalar_stiffness(&potential),
            velocity,
            potential,
            mass,
            coupling,
            lu,
        })
    }

    pub fn operator(&self) -> PotentialOperator {
        self.op
    }

    pub fn velocity_space(&self) -> &FeSpace {
        &self.velocity
    }

    pub fn potential_space(&self) -> &FeSpace {
        &self.potential
    }

    /// `G_{ij} = (φ_j, D ψ_i)`.
    pub fn coupling(&self) -> &CsrMatrix {
        &self.coupling
    }

    pub fn decompose(&self, f: &dyn VectorField) -> Result<HodgeDecomposition> {
        let (nv, nq) = (self.velocity.dof_count(), self.potential.dof_count());
        let mut rhs = assemble_load(&self.velocity, f, LOAD_DEGREE)?;
        rhs.resize(nv + nq + 1, 0.0);
        let x = self.lu.solve(&rhs)?;
        Ok(HodgeDecomposition {
            u: x[..nv].to_vec(),
            p: x[nv..nv + nq].to_vec(),
        })
    }

    /// `‖u_h‖_{L²}`.
    pub fn velocity_l2(&self, u: &[f64]) -> f64 {
        self.mass.bilinear(u, u).max(0.0).sqrt()
    }

    /// `‖D p_h‖_{L²}`; the curl and the gradient of a scalar have the same length.
    pub fn potential_seminorm(&self, p: &[f64]) -> f64 {
        self.potential_stiffness.bilinear(p, p).max(0.0).sqrt()
    }

    /// Largest `|(u_h, D ψ_i)|` over the potential basis.
    pub fn orthogonality_defect(&self, u: &[f64]) -> f64 {
        self.coupling.mul_vec(u).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖f − u_h − D p_h‖_{L²}` by quadrature.
    pub fn residual_l2(&self, f: &dyn VectorField, d: &HodgeDecomposition) -> f64 {
        let residual = Residual { system: self, f, d };
        field_l2_squared(self.velocity.mesh(), &residual, LOAD_DEGREE).sqrt()
    }

    /// `D p_h` on triangle `t`.
    fn potential_field(&self, p: &[f64], t: usize) -> [f64; 2] {
        let el = Element::new(self.potential.mesh(), t);
        let dofs = self.potential.dofs(t);
        let mut g = [0.0; 2];
        for (i, gl) in el.grad_lambda.iter().enumerate() {
            g[0] += p[dofs[i]] * gl[0];
            g[1] += p[dofs[i]] * gl[1];
        }
        match self.op {
            PotentialOperator::Gradient => g,
            PotentialOperator::Curl => [g[1], -g[0]],
        }
    }
}

struct Residual<'a> {
    system: &'a HodgeSystem,
    f: &'a dyn VectorField,
    d: &'a HodgeDecomposition,
}

impl VectorField for Residual<'_> {
    fn eval_in(&self, t: usize, bary: [f64; 3], x: [f64; 2]) -> [f64; 2] {
        let f = self.f.eval_in(t, bary, x);
        let u = self.system.velocity.eval_vector(&self.d.u, t, bary);
        let dp = self.system.potential_field(&self.d.p, t);
        [f[0] - u[0] - dp[0], f[1] - u[1] - dp[1]]
    }
}

/// Piecewise-constant field `D q_h` of a P1 function, usable as data.
pub struct PotentialField<'a> {
    pub system: &'a HodgeSystem,
    pub q: &'a [f64],
}

impl VectorField for PotentialField<'_> {
    fn eval_in(&self, t: usize, _bary: [f64; 3], _x: [f64; 2]) -> [f64; 2] {
        self.system.potential_field(self.q, t)
    }

    fn degree(&self) -> Option<usize> {
        Some(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assembly::DiscreteVectorField;
    use crate::fem::poly::{Poly2, PolyField};

    #[test]
    fn consistency_checks_for_both_variants() {
        let mesh = Arc::new(Mesh2D::structured(3).unwrap());
        for op in [PotentialOperator::Gradient, PotentialOperator::Curl] {
            let sys = HodgeSystem::new(mesh.clone(), op).unwrap();
            let q = sys
                .potential_space()
                .interpolate_scalar(|x| x[0] * x[0] - x[1] + x[0] * x[1]);
            let f = PotentialField { system: &sys, q: &q };
            let d = sys.decompose(&f).unwrap();
            let fnorm = sys.potential_seminorm(&q);
            assert!(sys.velocity_l2(&d.u) <= 1e-9 * fnorm);

            let g = PolyField::new(
                &Poly2::y().pow(2) + &Poly2::x(),
                &(&Poly2::x() * &Poly2::y()) - &Poly2::constant(1.0),
            );
            let first = sys.decompose(&g).unwrap();
            assert!(sys.orthogonality_defect(&first.u) < 1e-13);
            let sol = DiscreteVectorField {
                space: sys.velocity_space(),
                coeffs: &first.u,
            };
            let second = sys.decompose(&sol).unwrap();
            assert!(sys.potential_seminorm(&second.p) <= 1e-9 * sys.velocity_l2(&first.u));
        }
    }
}
