//! Compressed sparse row matrices and a direct sparse solver.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Coordinate-format builder; duplicate entries are summed on compression.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.entries.push((i, j, v));
    }

    pub fn build(mut self) -> CsrMatrix {
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut data: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                data.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr,
            indices,
            data,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        TripletBuilder::new(nrows, ncols).build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// Iterates `(column, value)` over stored entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()]
            .iter()
            .copied()
            .zip(self.data[r].iter().copied())
    }

    /// Iterates all stored `(row, column, value)` triplets.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn transpose_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.nrows);
        let mut out = vec![0.0; self.ncols];
        for (i, j, v) in self.triplets() {
            out[j] += v * y[i];
        }
        out
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mul_vec(y))
    }

    pub fn transpose(&self) -> Self {
        let mut b = TripletBuilder::new(self.ncols, self.nrows);
        for (i, j, v) in self.triplets() {
            b.push(j, i, v);
        }
        b.build()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut b = TripletBuilder::new(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            b.push(i, j, v);
        }
        for (i, j, v) in other.triplets() {
            b.push(i, j, s * v);
        }
        b.build()
    }

    /// Submatrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_pos[c] = k;
        }
        let mut b = TripletBuilder::new(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                if col_pos[j] != usize::MAX {
                    b.push(r, col_pos[j], v);
                }
            }
        }
        b.build()
    }

    /// Largest `|M − Mᵀ|` entry.
    pub fn asymmetry(&self) -> f64 {
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    /// Max-norm of the stored entries.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let trips: Vec<Triplet<usize, usize, f64>> = self.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &trips)
            .map_err(|e| Error::SingularSystem(format!("sparse conversion failed: {e:?}")))
    }
}

/// Assembles a block matrix from `(row offset, column offset, block)` pieces.
pub fn block_matrix(nrows: usize, ncols: usize, blocks: &[(usize, usize, &CsrMatrix)]) -> CsrMatrix {
    let mut b = TripletBuilder::new(nrows, ncols);
    for &(r0, c0, m) in blocks {
        for (i, j, v) in m.triplets() {
            b.push(r0 + i, c0 + j, v);
        }
    }
    b.build()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Relative residual accepted after a sparse direct solve.
pub const SOLVE_TOL: f64 = 1e-10;

/// Sparse LU factorization with residual-checked solves and iterative refinement.
pub struct SparseLu {
    matrix: CsrMatrix,
    lu: Lu<usize, f64>,
}

impl SparseLu {
    pub fn new(matrix: &CsrMatrix) -> Result<Self> {
        if matrix.nrows != matrix.ncols {
            return Err(Error::SingularSystem("matrix is not square".into()));
        }
        let a = matrix.to_faer()?;
        // The factorization panics on an exactly zero pivot instead of reporting it.
        let lu = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| a.sp_lu()))
            .map_err(|_| Error::SingularSystem("zero pivot in sparse LU".into()))?
            .map_err(|e| Error::SingularSystem(format!("sparse LU failed: {e:?}")))?;
        Ok(Self {
            matrix: matrix.clone(),
            lu,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows
    }

    fn raw_solve(&self, cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = self.dim();
        let b = Mat::<f64>::from_fn(n, cols.len(), |i, j| cols[j][i]);
        let x = self.lu.solve(&b);
        (0..cols.len()).map(|j| (0..n).map(|i| x[(i, j)]).collect()).collect()
    }

    /// Solves `M x = b` for each right-hand side.
    pub fn solve_many(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if rhs.is_empty() {
            return Ok(Vec::new());
        }
        let mut xs = self.raw_solve(rhs);
        for _ in 0..3 {
            let residuals: Vec<Vec<f64>> = xs
                .iter()
                .zip(rhs)
                .map(|(x, b)| {
                    let ax = self.matrix.mul_vec(x);
                    b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
                })
                .collect();
            let worst = residuals
                .iter()
                .zip(rhs)
                .zip(&xs)
                .map(|((r, b), x)| norm2(r) / self.residual_scale(b, x))
                .fold(0.0, f64::max);
            if !worst.is_finite() {
                return Err(Error::SingularSystem("sparse solve produced non-finite values".into()));
            }
            if worst <= 1e-3 * SOLVE_TOL {
                return Ok(xs);
            }
            let corrections = self.raw_solve(&residuals);
            for (x, d) in xs.iter_mut().zip(corrections) {
                x.iter_mut().zip(d).for_each(|(xi, di)| *xi += di);
            }
        }
        for (x, b) in xs.iter().zip(rhs) {
            let ax = self.matrix.mul_vec(x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            let rel = norm2(&r) / self.residual_scale(b, x);
            if !(rel <= SOLVE_TOL) {
                return Err(Error::SingularSystem(format!(
                    "relative residual {rel:e} after refinement; matrix is numerically singular"
                )));
            }
        }
        Ok(xs)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.solve_many(&[rhs.to_vec()])?.pop().unwrap())
    }

    /// Normalizes residuals by `‖b‖ + ‖M‖_max·‖x‖`, with a floor for zero data.
    fn residual_scale(&self, b: &[f64], x: &[f64]) -> f64 {
        (norm2(b) + self.matrix.max_abs() * norm2(x)).max(f64::MIN_POSITIVE)
    }
}
