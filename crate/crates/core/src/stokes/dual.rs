//! Discrete dual (semi) norms through Riesz representatives, and the discrete inf-sup constant.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fem::dirichlet::free_indices;
use crate::fem::sparse::SparseLu;
use crate::stokes::system::StokesSystem;

/// `sup_{v ∈ K_h} ⟨f, v⟩ / ‖∇v‖`, where `K_h` is the discretely divergence-free subspace with zero
/// boundary values. Realized as `‖∇z_h‖` for the unit-viscosity Stokes solution `z_h` with load `f`.
pub fn discrete_dual_seminorm_kh(system: &StokesSystem, load: &[f64]) -> Result<f64> {
    Ok(discrete_dual_seminorms_kh(system, &[load.to_vec()])?[0])
}

/// Batched [`discrete_dual_seminorm_kh`] sharing one factorization.
pub fn discrete_dual_seminorms_kh(system: &StokesSystem, loads: &[Vec<f64>]) -> Result<Vec<f64>> {
    let solver = system.factor(system.stiffness())?;
    let sols = solver.solve_many(loads, None, None)?;
    Ok(sols.iter().map(|s| system.h1_seminorm(&s.u)).collect())
}

/// Riesz representatives in `V_h` (zero boundary values) for the `(∇·, ∇·)` inner product.
pub fn velocity_riesz_representatives(system: &StokesSystem, loads: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let nv = system.nv();
    let fixed: Vec<(usize, f64)> = system
        .velocity_space()
        .boundary_dofs()
        .iter()
        .map(|&i| (i, 0.0))
        .collect();
    let free = free_indices(nv, &fixed);
    let lu = SparseLu::new(&system.stiffness().select(&free, &free))?;
    let rhs: Vec<Vec<f64>> = loads.iter().map(|l| free.iter().map(|&i| l[i]).collect()).collect();
    Ok(lu
        .solve_many(&rhs)?
        .into_iter()
        .map(|z| {
            let mut full = vec![0.0; nv];
            for (&i, v) in free.iter().zip(z) {
                full[i] = v;
            }
            full
        })
        .collect())
}

/// `sup_{v ∈ V_h} ⟨f, v⟩ / ‖∇v‖` over all velocities with zero boundary values.
pub fn discrete_dual_norm_vh(system: &StokesSystem, load: &[f64]) -> Result<f64> {
    let z = velocity_riesz_representatives(system, &[load.to_vec()])?;
    Ok(system.h1_seminorm(&z[0]))
}

/// Discrete inf-sup constant `inf_q sup_v b(v, q) / (‖∇v‖ ‖q‖)` over zero-mean pressures.
///
/// Computed as the square root of the smallest eigenvalue of `S q = λ M q` on the
/// `M`-orthogonal complement of the constants, with `S = B A⁻¹ Bᵀ` the pressure Schur complement.
pub fn discrete_inf_sup(system: &StokesSystem) -> Result<f64> {
    let nq = system.nq();
    let nv = system.nv();
    let fixed: Vec<(usize, f64)> = system
        .velocity_space()
        .boundary_dofs()
        .iter()
        .map(|&i| (i, 0.0))
        .collect();
    let free = free_indices(nv, &fixed);
    let a = system.stiffness().select(&free, &free);
    let rows: Vec<usize> = (0..nq).collect();
    let b = system.divergence().select(&rows, &free);
    let bt = b.transpose();
    let lu = SparseLu::new(&a)?;
    let cols: Vec<Vec<f64>> = (0..nq)
        .map(|i| {
            let mut e = vec![0.0; nq];
            e[i] = 1.0;
            bt.mul_vec(&e)
        })
        .collect();
    let sol = lu.solve_many(&cols)?;
    let mut s = DMatrix::zeros(nq, nq);
    for (j, x) in sol.iter().enumerate() {
        let col = b.mul_vec(x);
        for i in 0..nq {
            s[(i, j)] = col[i];
        }
    }
    let s = (&s + s.transpose()) * 0.5;
    let m = system.pressure_mass().to_dense();
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Eigen("pressure mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv_s = l
        .solve_lower_triangular(&s)
        .ok_or_else(|| Error::Eigen("triangular solve failed".into()))?;
    let c = l
        .solve_lower_triangular(&linv_s.transpose())
        .ok_or_else(|| Error::Eigen("triangular solve failed".into()))?;
    let c = (&c + c.transpose()) * 0.5;

    // Deflate the constant pressure: in coordinates y = Lᵀq it is the direction Lᵀ·1.
    let mut v: DVector<f64> = l.transpose() * DVector::from_element(nq, 1.0);
    let norm = v.norm();
    v /= norm;
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign;
    let vn = v.norm();
    v /= vn;
    // Householder reflector H maps the constant direction onto the first axis.
    let h = DMatrix::identity(nq, nq) - (&v * v.transpose()) * 2.0;
    let reduced = &h * c * &h;
    let sub = reduced.view((1, 1), (nq - 1, nq - 1)).into_owned();
    let lambda_min = sub.symmetric_eigenvalues().min();
    if !lambda_min.is_finite() {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    Ok(lambda_min.max(0.0).sqrt())
}
