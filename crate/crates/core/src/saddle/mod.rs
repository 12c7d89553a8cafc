//! Finite-dimensional saddle-point problems: solution, stability constants, kernel and polar
//! subspaces, dual semi norms of the data, and refined versus classical a priori bounds.

pub mod bounds;
pub mod constants;
pub mod instances;
pub mod linalg;
pub mod problem;
pub mod subspace;

pub use bounds::{
    bounds_bbf_perturbed, bounds_classical, bounds_general_refined, bounds_symmetric_refined, kernel_infimum,
    BoundPair, KernelInfimum, StabilityReport, SymmetricBounds,
};
pub use constants::{compute_constants, ProblemConstants};
pub use problem::{decompose_functional, solve_mixed, MixedProblem, MixedSolution};
pub use subspace::{
    a_orthogonal_split, dual_seminorm, kernel_basis, polar_basis, AOrthogonalSplit, Subspace, SubspaceKind,
};
