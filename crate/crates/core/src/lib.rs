//! Numerical laboratory for semi-norm stability estimates of saddle-point problems.
//!
//! * [`saddle`]: dense finite-dimensional mixed problems and their refined bounds.
//! * [`fem`]: P1/P2 triangular finite elements on the unit square.
//! * [`stokes`]: Taylor–Hood and Scott–Vogelius Stokes/Navier–Stokes solvers, discrete dual
//!   norms and the experiment drivers.

pub mod error;
pub mod experiments;
pub mod fem;
pub mod saddle;
pub mod stokes;

pub use error::{Error, Result};
