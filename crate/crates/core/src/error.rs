use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("constraint matrix is rank deficient: numerical rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("operator restricted to the kernel is singular (smallest singular value {sigma_min:e})")]
    DegenerateKernelOperator { sigma_min: f64 },

    #[error("system matrix is numerically singular: {0}")]
    SingularSystem(String),

    #[error("operator is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("operator is not coercive (smallest eigenvalue {0:e})")]
    NotCoercive(f64),

    #[error("quadrature of degree {rule} cannot integrate an integrand of degree {needed}")]
    QuadratureTooLow { rule: usize, needed: usize },

    #[error("nonlinear iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonlinearDivergence { iterations: usize, residual: f64 },

    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    #[error("mesh error: {0}")]
    Mesh(String),
}

pub type Result<T> = std::result::Result<T, Error>;
