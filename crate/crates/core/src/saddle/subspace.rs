use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::saddle::linalg::{null_and_row_space, RANK_TOL};
use crate::saddle::problem::MixedProblem;

/// Which subspace of the primal space a [`Subspace`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    /// Null space of the constraint operator.
    Kernel,
    /// Annihilator of the kernel, identified with the row space of the constraint.
    Polar,
    /// Complement of the kernel that is orthogonal in the energy inner product of `A`.
    AOrthComplement,
    /// Image of the kernel under `A`.
    RangeAK,
    /// Whole ambient space.
    Full,
}

/// Orthonormal basis of a subspace of `R^n`, stored column-wise.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: DMatrix<f64>,
    kind: SubspaceKind,
}

impl Subspace {
    /// Wraps a basis whose columns are already orthonormal.
    ///
    /// Panics in debug builds if `basisᵀ·basis` deviates from the identity by more than 1e-10.
    pub fn from_orthonormal(basis: DMatrix<f64>, kind: SubspaceKind) -> Self {
        debug_assert!(orthonormality_defect(&basis) < 1e-10, "basis is not orthonormal");
        Self { basis, kind }
    }

    /// Orthonormalizes the columns of `spanning` (which must be linearly independent).
    pub fn from_spanning(spanning: &DMatrix<f64>, kind: SubspaceKind) -> Result<Self> {
        let (_, row, rank) = null_and_row_space(&spanning.transpose(), RANK_TOL);
        if rank < spanning.ncols() {
            return Err(Error::RankDeficient {
                rank,
                rows: spanning.ncols(),
            });
        }
        Ok(Self { basis: row, kind })
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn kind(&self) -> SubspaceKind {
        self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Euclidean orthogonal projector `Q·Qᵀ` onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn coordinates(&self, v: &DVector<f64>) -> DVector<f64> {
        self.basis.tr_mul(v)
    }
}

/// Largest entry of `|QᵀQ − I|`.
pub fn orthonormality_defect(basis: &DMatrix<f64>) -> f64 {
    let gram = basis.tr_mul(basis);
    let k = gram.nrows();
    (gram - DMatrix::identity(k, k)).abs().max()
}

/// Orthonormal basis of `ker B`.
///
/// Singular values below `tol·σ_max(B)` are treated as zero. Fails if the numerical rank of
/// `B` is smaller than its number of rows.
pub fn kernel_basis(b: &DMatrix<f64>, tol: f64) -> Result<Subspace> {
    let (null, _, rank) = null_and_row_space(b, tol);
    if rank < b.nrows() {
        return Err(Error::RankDeficient { rank, rows: b.nrows() });
    }
    Ok(Subspace {
        basis: null,
        kind: SubspaceKind::Kernel,
    })
}

/// Orthonormal basis of the polar space of `ker B`, i.e. of `range Bᵀ`.
pub fn polar_basis(b: &DMatrix<f64>) -> Result<Subspace> {
    let (_, row, rank) = null_and_row_space(b, RANK_TOL);
    if rank < b.nrows() {
        return Err(Error::RankDeficient { rank, rows: b.nrows() });
    }
    Ok(Subspace {
        basis: row,
        kind: SubspaceKind::Polar,
    })
}

/// Dual semi norm `sup_{v ∈ S, |v| = 1} fᵀv`, which equals `|Sᵀf|` for an orthonormal basis.
///
/// Zero for an empty subspace.
pub fn dual_seminorm(f: &DVector<f64>, space: &Subspace) -> f64 {
    assert_eq!(
        f.len(),
        space.ambient_dim(),
        "functional and subspace dimensions differ"
    );
    if space.dim() == 0 {
        return 0.0;
    }
    space.coordinates(f).norm()
}

/// Decomposition of `R^n` into the kernel and its `A`-orthogonal complement.
#[derive(Debug, Clone)]
pub struct AOrthogonalSplit {
    pub kernel: Subspace,
    pub complement: Subspace,
    /// Energy projector onto the kernel: `a(Π_K v − v, w) = 0` for every kernel vector `w`.
    pub proj_kernel: DMatrix<f64>,
}

impl AOrthogonalSplit {
    /// `1 − Π_K`, the energy projector onto the complement.
    pub fn proj_complement(&self) -> DMatrix<f64> {
        let n = self.proj_kernel.nrows();
        DMatrix::identity(n, n) - &self.proj_kernel
    }
}

/// Relative asymmetry `|A − Aᵀ|_max / |A|_max`.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let scale = a.abs().max().max(f64::MIN_POSITIVE);
    (a - a.transpose()).abs().max() / scale
}

pub(crate) const SYMMETRY_TOL: f64 = 1e-12;
pub(crate) const COERCIVITY_TOL: f64 = 1e-14;

/// Checks symmetry and positive definiteness of `A`; returns its smallest eigenvalue.
pub(crate) fn check_spd(a: &DMatrix<f64>) -> Result<f64> {
    let asym = asymmetry(a);
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let min = eig.min();
    let max = eig.max();
    if min <= COERCIVITY_TOL * max.abs().max(1.0) {
        return Err(Error::NotCoercive(min));
    }
    Ok(min)
}

/// Splits `R^n = K ⊕ K_a^⊥` for a symmetric positive definite `A`.
pub fn a_orthogonal_split(p: &MixedProblem) -> Result<AOrthogonalSplit> {
    let a = p.a_matrix();
    check_spd(a)?;
    let kernel = kernel_basis(p.b_matrix(), RANK_TOL)?;
    let n = p.n();
    let k = kernel.dim();
    if k == 0 {
        return Ok(AOrthogonalSplit {
            kernel,
            complement: Subspace::from_orthonormal(DMatrix::identity(n, n), SubspaceKind::AOrthComplement),
            proj_kernel: DMatrix::zeros(n, n),
        });
    }
    let kb = kernel.basis();
    // Kᵀ A, whose null space is the a-orthogonal complement.
    let kta = kb.tr_mul(a);
    let restricted = &kta * kb;
    let chol = restricted
        .clone()
        .cholesky()
        .ok_or(Error::NotCoercive(restricted.symmetric_eigenvalues().min()))?;
    let proj_kernel = kb * chol.solve(&kta);
    let (null, _, _) = null_and_row_space(&kta, RANK_TOL);
    Ok(AOrthogonalSplit {
        kernel,
        complement: Subspace::from_orthonormal(null, SubspaceKind::AOrthComplement),
        proj_kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn kernel_of_single_row() {
        let b = dmatrix![0.1, 0.0];
        let k = kernel_basis(&b, RANK_TOL).unwrap();
        assert_eq!(k.dim(), 1);
        assert!((k.basis()[(0, 0)]).abs() < 1e-15);
        assert!((k.basis()[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polar_of_single_row() {
        let b = dmatrix![0.1, 0.0];
        let k0 = polar_basis(&b).unwrap();
        assert_eq!(k0.dim(), 1);
        assert!((k0.basis()[(0, 0)].abs() - 1.0).abs() < 1e-15);

        let b = dmatrix![0.0, 3.0];
        let k0 = polar_basis(&b).unwrap();
        assert!((k0.basis()[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn square_constraint_has_trivial_kernel() {
        let b = DMatrix::<f64>::identity(2, 2);
        let k = kernel_basis(&b, RANK_TOL).unwrap();
        assert_eq!(k.dim(), 0);
        assert_eq!(k.ambient_dim(), 2);
        let f = DVector::from_vec(vec![3.0, 4.0]);
        assert_eq!(dual_seminorm(&f, &k), 0.0);
    }

    #[test]
    fn rank_deficient_rows_are_rejected() {
        let b = dmatrix![1.0, 2.0, 3.0; 2.0, 4.0, 6.0];
        assert!(matches!(
            kernel_basis(&b, RANK_TOL),
            Err(Error::RankDeficient { rank: 1, rows: 2 })
        ));
        assert!(polar_basis(&b).is_err());
    }

    #[test]
    fn seminorm_of_vector_in_span_is_full_norm() {
        let b = dmatrix![1.0, 1.0, 0.0];
        let k = kernel_basis(&b, RANK_TOL).unwrap();
        let f = k.basis() * DVector::from_vec(vec![2.0, -1.0]);
        assert!((dual_seminorm(&f, &k) - f.norm()).abs() < 1e-14);
    }

    #[test]
    fn identity_energy_gives_euclidean_complement() {
        let a = DMatrix::<f64>::identity(3, 3);
        let b = dmatrix![1.0, 2.0, 0.5];
        let p = MixedProblem::new(a, b.clone(), DVector::zeros(3), DVector::zeros(1)).unwrap();
        let split = a_orthogonal_split(&p).unwrap();
        let polar = polar_basis(&b).unwrap();
        let diff = split.complement.projector() - polar.projector();
        assert!(diff.abs().max() < 1e-13);
    }

    #[test]
    fn nonsymmetric_energy_is_rejected() {
        let a = dmatrix![1.0, -1.0; 1.0, 0.01];
        let b = dmatrix![0.1, 0.0];
        let p = MixedProblem::new(a, b, DVector::zeros(2), DVector::zeros(1)).unwrap();
        assert!(matches!(a_orthogonal_split(&p), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn indefinite_energy_is_rejected() {
        let a = dmatrix![1.0, 0.0; 0.0, -1.0];
        let b = dmatrix![1.0, 0.0];
        let p = MixedProblem::new(a, b, DVector::zeros(2), DVector::zeros(1)).unwrap();
        assert!(matches!(a_orthogonal_split(&p), Err(Error::NotCoercive(_))));
    }
}
