//! Two-by-two model instances with closed-form solutions, and a seeded generator of random
//! well-posed instances.

use nalgebra::{dmatrix, DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::saddle::problem::MixedProblem;

/// Nonsymmetric instance `A = [[1, −1], [1, a]]`, `B = [b, 0]`.
pub fn general_instance(a: f64, b: f64, f: [f64; 2], g: f64) -> Result<MixedProblem> {
    MixedProblem::new(
        dmatrix![1.0, -1.0; 1.0, a],
        dmatrix![b, 0.0],
        DVector::from_vec(f.to_vec()),
        DVector::from_vec(vec![g]),
    )
}

/// Closed-form solution `(u1, u2, p)` of [`general_instance`].
pub fn general_closed_form(a: f64, b: f64, f: [f64; 2], g: f64) -> (f64, f64, f64) {
    let u1 = g / b;
    let u2 = f[1] / a - g / (b * a);
    let p = (f[0] + f[1] / a) / b - (1.0 + 1.0 / a) * g / (b * b);
    (u1, u2, p)
}

/// Symmetric instance `A = [[2, √a], [√a, a]]`, `B = [b, 0]`.
pub fn symmetric_instance(a: f64, b: f64, f: [f64; 2], g: f64) -> Result<MixedProblem> {
    let s = a.sqrt();
    MixedProblem::new(
        dmatrix![2.0, s; s, a],
        dmatrix![b, 0.0],
        DVector::from_vec(f.to_vec()),
        DVector::from_vec(vec![g]),
    )
}

/// Closed-form solution `(u1, u2, p)` of [`symmetric_instance`].
pub fn symmetric_closed_form(a: f64, b: f64, f: [f64; 2], g: f64) -> (f64, f64, f64) {
    let s = a.sqrt();
    let u1 = g / b;
    let u2 = f[1] / a - g / (b * s);
    let p = (s * f[0] - f[1]) / (s * b) - g / (b * b);
    (u1, u2, p)
}

/// Bounds of the symmetric instance written with the rounded constants `α ≈ a/2`, `|a| ≈ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundedSymmetricBounds {
    pub theta_u_r: f64,
    pub theta_p_r: f64,
    pub theta_u_c: f64,
    pub theta_p_c: f64,
}

pub fn symmetric_rounded_bounds(a: f64, b: f64, f: [f64; 2], g: f64) -> RoundedSymmetricBounds {
    let s = a.sqrt();
    let fnorm = (f[0] * f[0] + f[1] * f[1]).sqrt();
    let g_u = 2.0 / (s * b) * g.abs();
    let g_p = 2.0 / (b * b) * g.abs();
    RoundedSymmetricBounds {
        theta_u_r: 2.0 / a * f[1].abs() + g_u,
        theta_p_r: 2.0 / (s * b) * (s * f[0] - f[1]).abs() / (a + 1.0).sqrt() + g_p,
        theta_u_c: 2.0 / a * fnorm + g_u,
        theta_p_c: 2.0 / (s * b) * fnorm + g_p,
    }
}

/// Largest condition number of the generated energy matrices.
pub const MAX_CONDITION: f64 = 1e6;

/// Seeded source of random well-posed instances.
///
/// `A = RᵀR (+ skew part)` with its condition number capped at [`MAX_CONDITION`], and
/// `B = diag(s)·Qᵀ` with orthonormal rows `Q` and scales `s ∈ [0.2, 2]`.
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn gaussian(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| self.rng.sample(StandardNormal))
    }

    fn gaussian_vec(&mut self, len: usize) -> DVector<f64> {
        DVector::from_fn(len, |_, _| self.rng.sample(StandardNormal))
    }

    /// Uniform integer in `lo..=hi`.
    pub fn dim(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    fn spd(&mut self, n: usize) -> DMatrix<f64> {
        let r = self.gaussian(n, n);
        let mut a = r.tr_mul(&r);
        let eig = a.symmetric_eigenvalues();
        let (lmin, lmax) = (eig.min(), eig.max());
        if lmax > MAX_CONDITION * lmin {
            let shift = (lmax - MAX_CONDITION * lmin) / (MAX_CONDITION - 1.0);
            for i in 0..n {
                a[(i, i)] += shift;
            }
        }
        a
    }

    fn constraint(&mut self, m: usize, n: usize) -> DMatrix<f64> {
        let q = self.gaussian(n, m).qr().q();
        let scales: Vec<f64> = (0..m).map(|_| self.rng.gen_range(0.2..2.0)).collect();
        DMatrix::from_diagonal(&DVector::from_vec(scales)) * q.transpose()
    }

    /// Symmetric positive definite instance of size `n×n`, `m×n`.
    pub fn symmetric(&mut self, n: usize, m: usize) -> Result<MixedProblem> {
        let a = self.spd(n);
        let b = self.constraint(m, n);
        let f = self.gaussian_vec(n);
        let g = self.gaussian_vec(m);
        MixedProblem::new(a, b, f, g)
    }

    /// Nonsymmetric instance whose symmetric part is positive definite.
    pub fn general(&mut self, n: usize, m: usize) -> Result<MixedProblem> {
        let mut a = self.spd(n);
        let s = self.gaussian(n, n);
        let skew = &s - s.transpose();
        let size = a.symmetric_eigenvalues().mean();
        let skew_norm = skew.norm().max(f64::MIN_POSITIVE);
        a += skew * (0.5 * size / skew_norm);
        let b = self.constraint(m, n);
        let f = self.gaussian_vec(n);
        let g = self.gaussian_vec(m);
        MixedProblem::new(a, b, f, g)
    }

    pub fn vector(&mut self, len: usize) -> DVector<f64> {
        self.gaussian_vec(len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saddle::problem::solve_mixed;

    #[test]
    fn closed_forms_solve_the_instances() {
        for &(f1, f2, g) in &[(1.0, 0.0, -0.01), (0.3, -0.7, 0.2), (0.0, 1.0, 0.5)] {
            let p = general_instance(0.01, 0.1, [f1, f2], g).unwrap();
            let s = solve_mixed(&p).unwrap();
            let (u1, u2, pp) = general_closed_form(0.01, 0.1, [f1, f2], g);
            assert!((s.u[0] - u1).abs() <= 1e-10 * (1.0 + u1.abs()));
            assert!((s.u[1] - u2).abs() <= 1e-10 * (1.0 + u2.abs()));
            assert!((s.p[0] - pp).abs() <= 1e-10 * (1.0 + pp.abs()));

            let p = symmetric_instance(0.001, 0.1, [f1, f2], g).unwrap();
            let s = solve_mixed(&p).unwrap();
            let (u1, u2, pp) = symmetric_closed_form(0.001, 0.1, [f1, f2], g);
            assert!((s.u[0] - u1).abs() <= 1e-10 * (1.0 + u1.abs()));
            assert!((s.u[1] - u2).abs() <= 1e-10 * (1.0 + u2.abs()));
            assert!((s.p[0] - pp).abs() <= 1e-10 * (1.0 + pp.abs()));
        }
    }

    #[test]
    fn rounded_bound_reference_values() {
        let r = symmetric_rounded_bounds(0.001, 0.1, [1.0, 0.0], 0.5);
        assert!((r.theta_u_c - 2316.227766).abs() < 1e-5);
        assert!((r.theta_u_r - 316.227766).abs() < 1e-5);
    }

    #[test]
    fn generator_is_deterministic_and_well_conditioned() {
        let mut g1 = InstanceGenerator::new(7);
        let mut g2 = InstanceGenerator::new(7);
        let p1 = g1.symmetric(6, 3).unwrap();
        let p2 = g2.symmetric(6, 3).unwrap();
        assert_eq!(p1.a_matrix(), p2.a_matrix());
        let eig = p1.a_matrix().symmetric_eigenvalues();
        assert!(eig.max() / eig.min() <= MAX_CONDITION * (1.0 + 1e-9));
        let q = g1.general(5, 2).unwrap();
        assert!(crate::saddle::subspace::asymmetry(q.a_matrix()) > 1e-3);
    }
}
