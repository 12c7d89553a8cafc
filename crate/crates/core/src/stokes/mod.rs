//! Discrete Stokes and Navier–Stokes problems with the Taylor–Hood and Scott–Vogelius pairs,
//! discrete dual norms, and Helmholtz–Hodge decompositions.

pub mod dual;
pub mod hodge;
pub mod system;
pub mod transient;

pub use dual::{
    discrete_dual_norm_vh, discrete_dual_seminorm_kh, discrete_dual_seminorms_kh, discrete_inf_sup,
    velocity_riesz_representatives,
};
pub use hodge::{HodgeDecomposition, HodgeSystem, PotentialField};
pub use system::{solve_stokes, Pair, SaddleSolver, StokesSolution, StokesSystem};
pub use transient::{solve_navier_stokes_transient, TransientConfig, TransientSolution};
