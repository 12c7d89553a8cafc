//! Dense helpers shared by the saddle-point routines.

use nalgebra::DMatrix;

/// Singular values at or below `RANK_TOL·σ_max` count as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Singular values of `m`, sorted in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest of the `min(rows, cols)` singular values.
pub fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Returns `(null space basis, row space basis, numerical rank)` of an `r×n` matrix.
///
/// Both bases are orthonormal and stored column-wise in `R^n`. The matrix is padded with zero
/// rows to a square one so that the SVD yields a full right singular basis.
pub fn null_and_row_space(m: &DMatrix<f64>, tol: f64) -> (DMatrix<f64>, DMatrix<f64>, usize) {
    let n = m.ncols();
    if n == 0 {
        return (DMatrix::zeros(0, 0), DMatrix::zeros(0, 0), 0);
    }
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let smax = svd.singular_values[order[0]];
    let rank = order
        .iter()
        .filter(|&&i| smax > 0.0 && svd.singular_values[i] > tol * smax)
        .count();
    let pick = |idx: &[usize]| {
        let mut out = DMatrix::zeros(n, idx.len());
        for (c, &i) in idx.iter().enumerate() {
            out.set_column(c, &v_t.row(i).transpose());
        }
        out
    };
    (pick(&order[rank..]), pick(&order[..rank]), rank)
}

/// Smallest eigenvalue of the symmetric part of a square matrix.
pub fn min_sym_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}
