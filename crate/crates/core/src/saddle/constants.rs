use crate::error::{Error, Result};
use crate::saddle::linalg::{min_sym_eigenvalue, singular_values, spectral_norm, RANK_TOL};
use crate::saddle::problem::MixedProblem;
use crate::saddle::subspace::{check_spd, kernel_basis};

/// Stability constants of a [`MixedProblem`] in Euclidean norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConstants {
    /// Inf-sup (or coercivity) constant of `A` restricted to the kernel.
    pub alpha0: f64,
    /// Global coercivity constant; only computed for symmetric problems.
    pub alpha: Option<f64>,
    /// Smallest singular value of `B`.
    pub beta: f64,
    pub norm_a: f64,
    pub norm_b: f64,
}

impl ProblemConstants {
    /// `|a|/α₀`, the ratio that multiplies every data term involving `g`.
    pub fn kernel_ratio(&self) -> f64 {
        self.norm_a / self.alpha0
    }

    /// `|a|/α`; panics if the global coercivity constant was not computed.
    pub fn coercivity_ratio(&self) -> f64 {
        self.norm_a
            / self
                .alpha
                .expect("global coercivity constant requires the symmetric setting")
    }
}

/// Computes `α₀`, `β`, `|a|`, `|b|` (and `α` when `symmetric` is set).
///
/// `α₀` is `σ_min(KᵀAK)` in general and `λ_min(KᵀAK)` in the symmetric case, `K` being an
/// orthonormal kernel basis. For a trivial kernel every kernel term vanishes, and `α₀ := |a|` is
/// used as a finite admissible value.
pub fn compute_constants(p: &MixedProblem, symmetric: bool) -> Result<ProblemConstants> {
    let a = p.a_matrix();
    let sb = singular_values(p.b_matrix());
    let beta = *sb.last().expect("B has at least one row");
    let norm_b = sb[0];
    let norm_a = spectral_norm(a);

    let alpha = if symmetric { Some(check_spd(a)?) } else { None };

    let kernel = kernel_basis(p.b_matrix(), RANK_TOL)?;
    let alpha0 = if kernel.dim() == 0 {
        norm_a
    } else {
        let kb = kernel.basis();
        let restricted = kb.tr_mul(a) * kb;
        let value = if symmetric {
            min_sym_eigenvalue(&restricted)
        } else {
            *singular_values(&restricted).last().unwrap()
        };
        if !(value > RANK_TOL * norm_a) {
            return Err(Error::DegenerateKernelOperator { sigma_min: value });
        }
        value
    };

    Ok(ProblemConstants {
        alpha0,
        alpha,
        beta,
        norm_a,
        norm_b,
    })
}
