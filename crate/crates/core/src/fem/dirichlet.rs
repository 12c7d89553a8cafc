//! Elimination of prescribed (Dirichlet) unknowns from a square linear system.

use crate::fem::sparse::CsrMatrix;

/// System restricted to the free unknowns, with the prescribed values moved to the right-hand side.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    free: Vec<usize>,
    lift: Vec<f64>,
}

impl ReducedSystem {
    /// Global indices of the free unknowns, in reduced order.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    /// Full vector holding the prescribed values and zeros elsewhere.
    pub fn lift(&self) -> &[f64] {
        &self.lift
    }

    /// Scatters a reduced solution into a full vector that carries the prescribed values.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = self.lift.clone();
        for (&g, &v) in self.free.iter().zip(reduced) {
            full[g] = v;
        }
        full
    }

    /// Restricts a full-length vector to the free unknowns.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&g| full[g]).collect()
    }
}

/// Free-index list for `n` unknowns with the given fixed set.
pub fn free_indices(n: usize, fixed: &[(usize, f64)]) -> Vec<usize> {
    let mut is_fixed = vec![false; n];
    for &(i, _) in fixed {
        is_fixed[i] = true;
    }
    (0..n).filter(|&i| !is_fixed[i]).collect()
}

/// Eliminates `fixed = [(index, value)]` from `matrix · x = rhs`.
///
/// The reduced right-hand side is `rhs_f − M_{f,d}·x_d`; for homogeneous data this is plain
/// row and column deletion.
pub fn apply_dirichlet(matrix: &CsrMatrix, rhs: &[f64], fixed: &[(usize, f64)]) -> ReducedSystem {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols());
    assert_eq!(rhs.len(), n);
    let free = free_indices(n, fixed);
    let mut lift = vec![0.0; n];
    for &(i, v) in fixed {
        lift[i] = v;
    }
    let correction = matrix.mul_vec(&lift);
    let reduced_rhs = free.iter().map(|&i| rhs[i] - correction[i]).collect();
    ReducedSystem {
        matrix: matrix.select(&free, &free),
        rhs: reduced_rhs,
        free,
        lift,
    }
}
