//! Assembly of the bilinear and trilinear forms used by the Stokes experiments.
//!
//! Velocity matrices act on P2 vector coefficients numbered `component·N + node`.

use crate::error::Result;
use crate::fem::poly::PolyField;
use crate::fem::quadrature::QuadratureRule;
use crate::fem::space::{Element, FeSpace, SpaceKind};
use crate::fem::sparse::{CsrMatrix, TripletBuilder};

/// Quadrature degree for stiffness, mass and divergence forms.
pub const BILINEAR_DEGREE: usize = 4;
/// Quadrature degree for the convective trilinear form (2 + 1 + 2).
pub const CONVECTION_DEGREE: usize = 5;
/// Quadrature degree for loads built from the manufactured forcings.
pub const LOAD_DEGREE: usize = 8;

/// A vector field that can be sampled inside mesh elements.
pub trait VectorField: Sync {
    /// Value at point `x`, which lies in triangle `t` with barycentric coordinates `bary`.
    fn eval_in(&self, t: usize, bary: [f64; 3], x: [f64; 2]) -> [f64; 2];

    /// Polynomial degree on each triangle, when known.
    fn degree(&self) -> Option<usize> {
        None
    }
}

impl VectorField for PolyField {
    fn eval_in(&self, _t: usize, _bary: [f64; 3], x: [f64; 2]) -> [f64; 2] {
        self.eval(x[0], x[1])
    }

    fn degree(&self) -> Option<usize> {
        Some(PolyField::degree(self).unwrap_or(0))
    }
}

/// Closure-backed field of unknown degree.
pub struct FnField<F>(pub F);

impl<F: Fn([f64; 2]) -> [f64; 2] + Sync> VectorField for FnField<F> {
    fn eval_in(&self, _t: usize, _bary: [f64; 3], x: [f64; 2]) -> [f64; 2] {
        (self.0)(x)
    }
}

/// A P2 vector finite element function.
pub struct DiscreteVectorField<'a> {
    pub space: &'a FeSpace,
    pub coeffs: &'a [f64],
}

impl VectorField for DiscreteVectorField<'_> {
    fn eval_in(&self, t: usize, bary: [f64; 3], _x: [f64; 2]) -> [f64; 2] {
        self.space.eval_vector(self.coeffs, t, bary)
    }

    fn degree(&self) -> Option<usize> {
        Some(2)
    }
}

/// Gradient of a P1 continuous function, piecewise constant.
pub struct DiscreteGradient<'a> {
    pub space: &'a FeSpace,
    pub coeffs: &'a [f64],
}

impl VectorField for DiscreteGradient<'_> {
    fn eval_in(&self, t: usize, _bary: [f64; 3], _x: [f64; 2]) -> [f64; 2] {
        let el = Element::new(self.space.mesh(), t);
        let dofs = self.space.dofs(t);
        let mut g = [0.0; 2];
        for (i, gl) in el.grad_lambda.iter().enumerate() {
            g[0] += self.coeffs[dofs[i]] * gl[0];
            g[1] += self.coeffs[dofs[i]] * gl[1];
        }
        g
    }

    fn degree(&self) -> Option<usize> {
        Some(0)
    }
}

fn assert_vector(space: &FeSpace) {
    assert_eq!(
        space.kind(),
        SpaceKind::P2Vector,
        "velocity forms need the P2 vector space"
    );
}

/// Scalar P2 element matrix `∫ ∇φ_a·∇φ_b`, reused for both components.
fn local_stiffness(el: &Element, rule: &QuadratureRule) -> [[f64; 6]; 6] {
    let mut k = [[0.0; 6]; 6];
    for (b, w) in rule.points.iter().zip(&rule.weights) {
        let g = el.p2_gradients(*b);
        let s = w * el.area;
        for i in 0..6 {
            for j in 0..6 {
                k[i][j] += s * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
    }
    k
}

fn local_mass(el: &Element, rule: &QuadratureRule) -> [[f64; 6]; 6] {
    let mut m = [[0.0; 6]; 6];
    for (b, w) in rule.points.iter().zip(&rule.weights) {
        let phi = Element::p2_values(*b);
        let s = w * el.area;
        for i in 0..6 {
            for j in 0..6 {
                m[i][j] += s * phi[i] * phi[j];
            }
        }
    }
    m
}

fn scatter_componentwise(builder: &mut TripletBuilder, dofs: &[usize], local: &[[f64; 6]; 6], scale: f64) {
    for c in 0..2 {
        for i in 0..6 {
            for j in 0..6 {
                builder.push(dofs[6 * c + i], dofs[6 * c + j], scale * local[i][j]);
            }
        }
    }
}

/// `μ(∇u, ∇v)` on the P2 vector space, without boundary conditions.
pub fn assemble_stiffness(space: &FeSpace, mu: f64) -> CsrMatrix {
    assert_vector(space);
    let rule = QuadratureRule::triangle(BILINEAR_DEGREE);
    let n = space.dof_count();
    let mut b = TripletBuilder::new(n, n);
    for t in 0..space.mesh().num_triangles() {
        let el = Element::new(space.mesh(), t);
        scatter_componentwise(&mut b, space.dofs(t), &local_stiffness(&el, &rule), mu);
    }
    b.build()
}

/// `(u, v)` on the P2 vector space.
pub fn assemble_vector_mass(space: &FeSpace) -> CsrMatrix {
    assert_vector(space);
    let rule = QuadratureRule::triangle(BILINEAR_DEGREE);
    let n = space.dof_count();
    let mut b = TripletBuilder::new(n, n);
    for t in 0..space.mesh().num_triangles() {
        let el = Element::new(space.mesh(), t);
        scatter_componentwise(&mut b, space.dofs(t), &local_mass(&el, &rule), 1.0);
    }
    b.build()
}

/// `(p, q)` on a scalar P1 space (continuous or discontinuous).
pub fn assemble_scalar_mass(space: &FeSpace) -> CsrMatrix {
    let rule = QuadratureRule::triangle(2);
    let n = space.dof_count();
    let mut b = TripletBuilder::new(n, n);
    for t in 0..space.mesh().num_triangles() {
        let el = Element::new(space.mesh(), t);
        let dofs = space.dofs(t);
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            for i in 0..3 {
                for j in 0..3 {
                    b.push(dofs[i], dofs[j], w * el.area * bary[i] * bary[j]);
                }
            }
        }
    }
    b.build()
}

/// `(∇p, ∇q)` on the P1 continuous space.
pub fn assemble_scalar_stiffness(space: &FeSpace) -> CsrMatrix {
    assert_eq!(space.kind(), SpaceKind::P1Continuous);
    let n = space.dof_count();
    let mut b = TripletBuilder::new(n, n);
    for t in 0..space.mesh().num_triangles() {
        let el = Element::new(space.mesh(), t);
        let dofs = space.dofs(t);
        let g = el.grad_lambda;
        for i in 0..3 {
            for j in 0..3 {
                b.push(dofs[i], dofs[j], el.area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]));
            }
        }
    }
    b.build()
}

/// `∫ ψ_i` for each pressure basis function: the mean-value constraint row.
pub fn assemble_mean_row(space: &FeSpace) -> Vec<f64> {
    let mut row = vec![0.0; space.dof_count()];
    for t in 0..space.mesh().num_triangles() {
        let a = space.mesh().area(t) / 3.0;
        for &d in space.dofs(t) {
            row[d] += a;
        }
    }
    row
}

/// `B_{ij} = −∫ div φ_j ψ_i`, rows indexed by the scalar P1 space.
pub fn assemble_divergence(v_space: &FeSpace, q_space: &FeSpace) -> CsrMatrix {
    assert_vector(v_space);
    assert!(std::ptr::eq(v_space.mesh(), q_space.mesh()) || v_space.mesh() == q_space.mesh());
    let rule = QuadratureRule::triangle(BILINEAR_DEGREE);
    let mut b = TripletBuilder::new(q_space.dof_count(), v_space.dof_count());
    for t in 0..v_space.mesh().num_triangles() {
        let el = Element::new(v_space.mesh(), t);
        let vd = v_space.dofs(t);
        let qd = q_space.dofs(t);
        let mut local = [[0.0; 12]; 3];
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let g = el.p2_gradients(*bary);
            let s = w * el.area;
            for i in 0..3 {
                for a in 0..6 {
                    local[i][a] -= s * bary[i] * g[a][0];
                    local[i][6 + a] -= s * bary[i] * g[a][1];
                }
            }
        }
        for i in 0..3 {
            for j in 0..12 {
                b.push(qd[i], vd[j], local[i][j]);
            }
        }
    }
    b.build()
}

/// Which first-order operator pairs velocities with a P1 potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialOperator {
    /// `(v, ∇q)`.
    Gradient,
    /// `(v, curl q)` with `curl q = (∂ᵧq, −∂ₓq)`.
    Curl,
}

/// `G_{ij} = ∫ φ_j · D ψ_i` for `D` the gradient or the curl of P1 continuous functions.
pub fn assemble_potential_coupling(v_space: &FeSpace, q_space: &FeSpace, op: PotentialOperator) -> CsrMatrix {
    assert_vector(v_space);
    assert_eq!(q_space.kind(), SpaceKind::P1Continuous);
    let rule = QuadratureRule::triangle(2);
    let mut b = TripletBuilder::new(q_space.dof_count(), v_space.dof_count());
    for t in 0..v_space.mesh().num_triangles() {
        let el = Element::new(v_space.mesh(), t);
        let vd = v_space.dofs(t);
        let qd = q_space.dofs(t);
        let d: [[f64; 2]; 3] = el.grad_lambda.map(|g| match op {
            PotentialOperator::Gradient => g,
            PotentialOperator::Curl => [g[1], -g[0]],
        });
        let mut phi_int = [0.0; 6];
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let phi = Element::p2_values(*bary);
            for a in 0..6 {
                phi_int[a] += w * el.area * phi[a];
            }
        }
        for i in 0..3 {
            for a in 0..6 {
                b.push(qd[i], vd[a], phi_int[a] * d[i][0]);
                b.push(qd[i], vd[6 + a], phi_int[a] * d[i][1]);
            }
        }
    }
    b.build()
}

/// `N(w)_{ij} = ∫ ((w·∇)φ_j)·φ_i` for a P2 vector coefficient field `w`.
pub fn assemble_convection(space: &FeSpace, w: &[f64]) -> CsrMatrix {
    assert_vector(space);
    assert_eq!(w.len(), space.dof_count());
    let rule = QuadratureRule::triangle(CONVECTION_DEGREE);
    let n = space.dof_count();
    let mut b = TripletBuilder::new(n, n);
    for t in 0..space.mesh().num_triangles() {
        let el = Element::new(space.mesh(), t);
        let dofs = space.dofs(t);
        if dofs.iter().all(|&d| w[d] == 0.0) {
            continue;
        }
        let mut local = [[0.0; 6]; 6];
        for (bary, wq) in rule.points.iter().zip(&rule.weights) {
            let phi = Element::p2_values(*bary);
            let g = el.p2_gradients(*bary);
            let wv = space.eval_vector(w, t, *bary);
            let s = wq * el.area;
            for j in 0..6 {
                let adv = wv[0] * g[j][0] + wv[1] * g[j][1];
                for i in 0..6 {
                    local[i][j] += s * adv * phi[i];
                }
            }
        }
        scatter_componentwise(&mut b, dofs, &local, 1.0);
    }
    b.build()
}

/// `∫ f·φ_i` with a rule of degree `quad_degree`.
///
/// Fails with `QuadratureTooLow` when `f` reports a polynomial degree that, times the quadratic
/// test functions, exceeds the rule.
pub fn assemble_load(space: &FeSpace, f: &dyn VectorField, quad_degree: usize) -> Result<Vec<f64>> {
    assert_vector(space);
    let rule = QuadratureRule::triangle(quad_degree);
    if let Some(d) = f.degree() {
        rule.check_degree(d + 2)?;
    }
    let mut load = vec![0.0; space.dof_count()];
    for t in 0..space.mesh().num_triangles() {
        let el = Element::new(space.mesh(), t);
        let dofs = space.dofs(t);
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let fx = f.eval_in(t, *bary, el.point(*bary));
            let phi = Element::p2_values(*bary);
            let s = w * el.area;
            for a in 0..6 {
                load[dofs[a]] += s * fx[0] * phi[a];
                load[dofs[6 + a]] += s * fx[1] * phi[a];
            }
        }
    }
    Ok(load)
}

/// `‖f‖²_{L²}` of a field by quadrature.
pub fn field_l2_squared(mesh: &crate::fem::mesh::Mesh2D, f: &dyn VectorField, quad_degree: usize) -> f64 {
    let rule = QuadratureRule::triangle(quad_degree);
    let mut sum = 0.0;
    for t in 0..mesh.num_triangles() {
        let el = Element::new(mesh, t);
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let v = f.eval_in(t, *bary, el.point(*bary));
            sum += w * el.area * (v[0] * v[0] + v[1] * v[1]);
        }
    }
    sum
}

/// `(‖div u‖_{L²}, max_T ‖div u‖_{L∞(T)})` of a P2 vector field.
pub fn divergence_norms(space: &FeSpace, u: &[f64]) -> (f64, f64) {
    assert_vector(space);
    let rule = QuadratureRule::triangle(2);
    let corners = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    for t in 0..space.mesh().num_triangles() {
        let el = Element::new(space.mesh(), t);
        let div = |b: [f64; 3]| {
            let g = space.grad_vector(u, t, &el, b);
            g[0][0] + g[1][1]
        };
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            l2 += w * el.area * div(*b).powi(2);
        }
        // The divergence is affine on each triangle, so its extremes sit at the corners.
        for c in corners {
            linf = linf.max(div(c).abs());
        }
    }
    (l2.sqrt(), linf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::Mesh2D;
    use crate::fem::poly::Poly2;
    use std::sync::Arc;

    fn spaces(n: usize) -> (FeSpace, FeSpace, FeSpace) {
        let mesh = Arc::new(Mesh2D::structured(n).unwrap());
        (
            FeSpace::new(mesh.clone(), SpaceKind::P2Vector),
            FeSpace::new(mesh.clone(), SpaceKind::P1Continuous),
            FeSpace::new(mesh, SpaceKind::P1Discontinuous),
        )
    }

    #[test]
    fn stiffness_is_symmetric_with_constant_kernel() {
        let (v, _, _) = spaces(3);
        let a = assemble_stiffness(&v, 1.0);
        assert!(a.asymmetry() < 1e-13);
        let c = v.interpolate_vector(|_| [1.0, -2.0]);
        assert!(a.mul_vec(&c).iter().all(|x| x.abs() < 1e-12));
        let a2 = assemble_stiffness(&v, 2.0);
        assert!(a2.triplets().all(|(i, j, x)| (x - 2.0 * a.get(i, j)).abs() < 1e-14));
        let shear = v.interpolate_vector(|x| [x[1], 0.0]);
        assert!((a.bilinear(&shear, &shear) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn divergence_sign_and_flux() {
        let (v, q, d) = spaces(3);
        for qs in [&q, &d] {
            let b = assemble_divergence(&v, qs);
            let ones = vec![1.0; qs.dof_count()];
            let u = v.interpolate_vector(|x| [x[0], 0.0]);
            assert!(
                (b.transpose_mul_vec(&ones)
                    .iter()
                    .zip(&u)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    + 1.0)
                    .abs()
                    < 1e-13
            );
            // Fields vanishing on the boundary carry no flux.
            let bt1 = b.transpose_mul_vec(&ones);
            let bnd = v.boundary_dofs();
            for (j, val) in bt1.iter().enumerate() {
                if bnd.binary_search(&j).is_err() {
                    assert!(val.abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn convection_matches_directional_derivative() {
        let (v, _, _) = spaces(2);
        let zero = vec![0.0; v.dof_count()];
        assert_eq!(assemble_convection(&v, &zero).nnz(), 0);
        let w = v.interpolate_vector(|_| [1.0, 0.0]);
        let n = assemble_convection(&v, &w);
        let u = v.interpolate_vector(|x| [x[0] * x[0], x[0] * x[1]]);
        let test = v.interpolate_vector(|x| [x[1], 1.0 - x[0]]);
        // ∂ₓu = (2x, y); ∫ (2x·y + y·(1 − x)) over the unit square = 1/2 + 1/4 = 3/4.
        assert!((n.bilinear(&test, &u) - 0.75).abs() < 1e-13);
    }

    #[test]
    fn load_partition_of_unity_and_degree_check() {
        let (v, _, _) = spaces(3);
        let f = PolyField::new(Poly2::constant(1.0), Poly2::zero());
        let load = assemble_load(&v, &f, 4).unwrap();
        let n2 = v.scalar_nodes();
        assert!((load[..n2].iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(load[n2..].iter().all(|x| *x == 0.0));
        let high = PolyField::new(Poly2::x().pow(5), Poly2::zero());
        assert!(assemble_load(&v, &high, 4).is_err());
        assert!(assemble_load(&v, &high, LOAD_DEGREE).is_ok());
    }

    #[test]
    fn mean_row_and_masses() {
        let (v, q, d) = spaces(2);
        assert!((assemble_mean_row(&q).iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((assemble_mean_row(&d).iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let m = assemble_vector_mass(&v);
        let one = v.interpolate_vector(|_| [1.0, 1.0]);
        assert!((m.bilinear(&one, &one) - 2.0).abs() < 1e-13);
        let mq = assemble_scalar_mass(&q);
        let x = q.interpolate_scalar(|p| p[0]);
        assert!((mq.bilinear(&x, &x) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn lamb_identity_holds_at_quadrature_points() {
        let h = &Poly2::x().pow(3) - &(&Poly2::x() * &Poly2::y().pow(2)).scale(3.0);
        let u = PolyField::gradient(&h);
        let conv = u.convection();
        let grad = PolyField::gradient(&u.norm_squared()).scale(0.5);
        let mesh = Mesh2D::structured(2).unwrap();
        let rule = QuadratureRule::triangle(CONVECTION_DEGREE);
        for t in 0..mesh.num_triangles() {
            let el = Element::new(&mesh, t);
            for b in &rule.points {
                let x = el.point(*b);
                let (l, r) = (conv.eval(x[0], x[1]), grad.eval(x[0], x[1]));
                assert!((l[0] - r[0]).abs() < 1e-12 && (l[1] - r[1]).abs() < 1e-12);
            }
        }
    }
}
