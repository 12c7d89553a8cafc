use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver error: {0}")]
    Solver(#[from] semilab::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("validation failed: {0} violation(s)")]
    Validation(usize),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "ConfigError",
            Self::Solver(_) => "SolverError",
            Self::Io { .. } => "IoError",
            Self::Validation(_) => "ValidationFailure",
        }
    }

    /// Solver errors carry the name of the underlying failure.
    fn detail(&self) -> Option<&'static str> {
        use semilab::Error as E;
        match self {
            Self::Solver(e) => Some(match e {
                E::InvalidProblem(_) => "InvalidProblem",
                E::RankDeficient { .. } => "RankDeficient",
                E::DegenerateKernelOperator { .. } => "DegenerateKernelOperator",
                E::SingularSystem(_) => "SingularSystem",
                E::NotSymmetric(_) => "NotSymmetric",
                E::NotCoercive(_) => "NotCoercive",
                E::QuadratureTooLow { .. } => "QuadratureTooLow",
                E::NonlinearDivergence { .. } => "NonlinearDivergence",
                E::Eigen(_) => "Eigen",
                E::Mesh(_) => "Mesh",
            }),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Validation(_) => 3,
            Self::Solver(_) | Self::Io { .. } => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "error": self.kind(),
            "cause": self.detail(),
            "message": self.to_string(),
        })
    }
}
