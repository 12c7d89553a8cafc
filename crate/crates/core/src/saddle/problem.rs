use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::saddle::linalg::{singular_values, RANK_TOL};

/// Finite-dimensional saddle-point problem
///
/// ```text
/// A u + Bᵀ p = f
/// B u        = g
/// ```
///
/// with `A ∈ R^{n×n}`, `B ∈ R^{m×n}` of full row rank and Euclidean norms on all spaces.
#[derive(Debug, Clone)]
pub struct MixedProblem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    f: DVector<f64>,
    g: DVector<f64>,
}

impl MixedProblem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, f: DVector<f64>, g: DVector<f64>) -> Result<Self> {
        let n = a.nrows();
        let m = b.nrows();
        if n == 0 || m == 0 {
            return Err(Error::InvalidProblem("n and m must be at least 1".into()));
        }
        if a.ncols() != n {
            return Err(Error::InvalidProblem(format!(
                "A must be square, got {}x{}",
                n,
                a.ncols()
            )));
        }
        if b.ncols() != n {
            return Err(Error::InvalidProblem(format!(
                "B has {} columns, expected {}",
                b.ncols(),
                n
            )));
        }
        if m > n {
            return Err(Error::InvalidProblem(format!(
                "more constraints ({m}) than unknowns ({n})"
            )));
        }
        if f.len() != n || g.len() != m {
            return Err(Error::InvalidProblem(format!(
                "data sizes ({}, {}) do not match ({n}, {m})",
                f.len(),
                g.len()
            )));
        }
        if a.iter()
            .chain(b.iter())
            .chain(f.iter())
            .chain(g.iter())
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidProblem("non-finite entry".into()));
        }
        let s = singular_values(&b);
        let rank = s.iter().filter(|&&x| x > RANK_TOL * s[0]).count();
        if rank < m {
            return Err(Error::RankDeficient { rank, rows: m });
        }
        Ok(Self { a, b, f, g })
    }

    /// Same operators with different data.
    pub fn with_data(&self, f: DVector<f64>, g: DVector<f64>) -> Result<Self> {
        if f.len() != self.n() || g.len() != self.m() {
            return Err(Error::InvalidProblem("data size mismatch".into()));
        }
        Ok(Self {
            a: self.a.clone(),
            b: self.b.clone(),
            f,
            g,
        })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.nrows()
    }

    pub fn a_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b_matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn f(&self) -> &DVector<f64> {
        &self.f
    }

    pub fn g(&self) -> &DVector<f64> {
        &self.g
    }

    /// The `(n+m)×(n+m)` block matrix `[[A, Bᵀ], [B, 0]]`.
    pub fn system_matrix(&self) -> DMatrix<f64> {
        let (n, m) = (self.n(), self.m());
        let mut k = DMatrix::zeros(n + m, n + m);
        k.view_mut((0, 0), (n, n)).copy_from(&self.a);
        k.view_mut((0, n), (n, m)).copy_from(&self.b.transpose());
        k.view_mut((n, 0), (m, n)).copy_from(&self.b);
        k
    }

    /// Residuals `(|A u + Bᵀ p − f|, |B u − g|)`.
    pub fn residuals(&self, u: &DVector<f64>, p: &DVector<f64>) -> (f64, f64) {
        let r1 = &self.a * u + self.b.tr_mul(p) - &self.f;
        let r2 = &self.b * u - &self.g;
        (r1.norm(), r2.norm())
    }
}

/// Solution pair of a [`MixedProblem`].
#[derive(Debug, Clone)]
pub struct MixedSolution {
    pub u: DVector<f64>,
    pub p: DVector<f64>,
}

/// Pivot ratio below which the block system is declared singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-14;

/// Solves the block system with a fully pivoted LU and one step of iterative refinement.
pub fn solve_mixed(problem: &MixedProblem) -> Result<MixedSolution> {
    let (n, m) = (problem.n(), problem.m());
    let k = problem.system_matrix();
    let lu = k.clone().full_piv_lu();
    let u_diag = lu.u().diagonal().abs();
    let (dmin, dmax) = (u_diag.min(), u_diag.max());
    if !(dmax > 0.0) || dmin <= SINGULAR_PIVOT_RATIO * dmax {
        return Err(Error::SingularSystem(format!(
            "pivot ratio {:e}",
            if dmax > 0.0 { dmin / dmax } else { 0.0 }
        )));
    }
    let mut rhs = DVector::zeros(n + m);
    rhs.rows_mut(0, n).copy_from(problem.f());
    rhs.rows_mut(n, m).copy_from(problem.g());
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("LU solve failed".into()))?;
    let r = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    Ok(MixedSolution {
        u: x.rows(0, n).into_owned(),
        p: x.rows(n, m).into_owned(),
    })
}

/// Splits a functional as `f = A w0 + Bᵀ q` with `w0 ∈ ker B`.
///
/// The pair is the solution of the mixed problem with data `(f, 0)`.
pub fn decompose_functional(problem: &MixedProblem, f: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
    let homogeneous = problem.with_data(f.clone(), DVector::zeros(problem.m()))?;
    let sol = solve_mixed(&homogeneous)?;
    Ok((sol.u, sol.p))
}
