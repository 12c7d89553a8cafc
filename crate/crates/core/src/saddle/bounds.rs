//! Refined (semi-norm) and classical a priori bounds for `|u|` and `|p|`.
//!
//! All functionals are vectors in `R^n`; a dual (semi) norm over a subspace is the length of the
//! projection onto that subspace.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::saddle::constants::{compute_constants, ProblemConstants};
use crate::saddle::linalg::RANK_TOL;
use crate::saddle::problem::{solve_mixed, MixedProblem};
use crate::saddle::subspace::{
    a_orthogonal_split, dual_seminorm, kernel_basis, polar_basis, AOrthogonalSplit, Subspace,
};

/// A pair of upper bounds for `|u|` and `|p|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    pub theta_u: f64,
    pub theta_p: f64,
}

/// Bounds of the symmetric refined estimate, including the sharper middle expression for `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricBounds {
    pub theta_u: f64,
    pub theta_p: f64,
    /// `β⁻¹|f∘Π_{K_a^⊥}| + |a|β⁻²|g|`, never larger than `theta_p`.
    pub theta_p2: f64,
}

/// Minimizer of `J(c) = |r| + κ|Kᵀr|` with `r = f − A·K·c`.
#[derive(Debug, Clone)]
pub struct KernelInfimum {
    pub value: f64,
    pub coefficients: DVector<f64>,
}

/// Evaluates `J(c)` for the p-bound infimum.
pub fn kernel_objective(
    f: &DVector<f64>,
    ak: &DMatrix<f64>,
    kernel: &DMatrix<f64>,
    kappa: f64,
    c: &DVector<f64>,
) -> f64 {
    let r = f - ak * c;
    r.norm() + kappa * kernel.tr_mul(&r).norm()
}

/// Minimizes `|f − A w⁰| + κ |f − A w⁰|_{K'}` over `w⁰ ∈ K`.
///
/// The objective is convex but not smooth. The search starts from the best of three seeds (the
/// origin, the least-squares minimizer of the first term and the zero of the second term), follows
/// a smoothed Newton continuation `sqrt(|·|² + ε²)` with `ε → 0`, and finishes with a compass
/// search on the exact objective down to step size `1e-10` relative to the coefficient scale.
pub fn kernel_infimum(f: &DVector<f64>, a: &DMatrix<f64>, kernel: &Subspace, kappa: f64) -> KernelInfimum {
    let k = kernel.dim();
    let kb = kernel.basis();
    if k == 0 {
        return KernelInfimum {
            value: f.norm(),
            coefficients: DVector::zeros(0),
        };
    }
    let ak = a * kb;
    let h = kb.tr_mul(&ak);
    let ktf = kb.tr_mul(f);
    let obj = |c: &DVector<f64>| kernel_objective(f, &ak, kb, kappa, c);

    let mut seeds = vec![DVector::zeros(k)];
    if let Ok(c) = ak.clone().svd(true, true).solve(f, RANK_TOL) {
        seeds.push(c);
    }
    if let Some(c) = h.clone().lu().solve(&ktf) {
        seeds.push(c);
    }
    let mut best = seeds
        .into_iter()
        .filter(|c| c.iter().all(|x| x.is_finite()))
        .min_by(|x, y| obj(x).total_cmp(&obj(y)))
        .unwrap();
    let mut best_val = obj(&best);
    if best_val == 0.0 {
        return KernelInfimum {
            value: 0.0,
            coefficients: best,
        };
    }

    // Smoothed Newton continuation.
    let scale = f.norm().max(f64::MIN_POSITIVE);
    let mut eps = 1e-2 * scale;
    let mut c = best.clone();
    while eps > 1e-15 * scale {
        c = smoothed_newton(f, &ak, &ktf, &h, kappa, eps, c);
        let v = obj(&c);
        if v < best_val {
            best_val = v;
            best = c.clone();
        }
        eps *= 0.1;
    }

    // Compass search on the exact objective.
    let cscale = 1.0 + best.amax();
    let mut step = 1e-3 * cscale;
    while step > 1e-10 * cscale {
        let mut improved = false;
        for i in 0..k {
            for sign in [1.0, -1.0] {
                let mut trial = best.clone();
                trial[i] += sign * step;
                let v = obj(&trial);
                if v < best_val {
                    best_val = v;
                    best = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    KernelInfimum {
        value: best_val,
        coefficients: best,
    }
}

fn smoothed_newton(
    f: &DVector<f64>,
    ak: &DMatrix<f64>,
    ktf: &DVector<f64>,
    h: &DMatrix<f64>,
    kappa: f64,
    eps: f64,
    mut c: DVector<f64>,
) -> DVector<f64> {
    let k = c.len();
    let smooth = |c: &DVector<f64>| {
        let r = f - ak * c;
        let s = ktf - h * c;
        (r.norm_squared() + eps * eps).sqrt() + kappa * (s.norm_squared() + eps * eps).sqrt()
    };
    for _ in 0..100 {
        let r = f - ak * &c;
        let s = ktf - h * &c;
        let rho = (r.norm_squared() + eps * eps).sqrt();
        let sig = (s.norm_squared() + eps * eps).sqrt();
        let grad = -(ak.tr_mul(&r) / rho) - (h.tr_mul(&s) * (kappa / sig));
        let gr = ak.tr_mul(&r);
        let gs = h.tr_mul(&s);
        let hess = (ak.tr_mul(ak) / rho - &gr * gr.transpose() / rho.powi(3))
            + (h.tr_mul(h) / sig - &gs * gs.transpose() / sig.powi(3)) * kappa;
        let reg = 1e-14 * hess.diagonal().amax().max(f64::MIN_POSITIVE);
        let step = (hess + DMatrix::identity(k, k) * reg)
            .cholesky()
            .map(|ch| ch.solve(&(-&grad)))
            .unwrap_or_else(|| -&grad);
        let f0 = smooth(&c);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let trial = &c + &step * t;
            if smooth(&trial) <= f0 + 1e-4 * t * grad.dot(&step) {
                c = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || (&step * t).amax() <= 1e-15 * (1.0 + c.amax()) {
            break;
        }
    }
    c
}

/// Refined bounds for a general (possibly nonsymmetric) `A`.
///
/// ```text
/// θ_u = |f|_{K'}/α₀ + (1 + |a|/α₀)|g|/β
/// θ_p = inf_{w⁰∈K} (|f − Aw⁰| + (|a|/α₀)|f − Aw⁰|_{K'})/β + (|a|/β²)(1 + |a|/α₀)|g|
/// ```
pub fn bounds_general_refined(p: &MixedProblem, c: &ProblemConstants) -> Result<BoundPair> {
    let kernel = kernel_basis(p.b_matrix(), RANK_TOL)?;
    let kappa = c.kernel_ratio();
    let f_k = dual_seminorm(p.f(), &kernel);
    let g = p.g().norm();
    let theta_u = f_k / c.alpha0 + (1.0 + kappa) * g / c.beta;
    let inf = kernel_infimum(p.f(), p.a_matrix(), &kernel, kappa);
    let theta_p = inf.value / c.beta + c.norm_a / (c.beta * c.beta) * (1.0 + kappa) * g;
    Ok(BoundPair { theta_u, theta_p })
}

/// Refined bounds for symmetric coercive `A`.
///
/// ```text
/// θ_u  = |f|_{K'}/α₀ + (|a|/α)^{1/2}|g|/β
/// θ_p2 = |f∘Π_{K_a^⊥}|/β + |a||g|/β²
/// θ_p  = (|a|/α)^{1/2}|f|_{(K_a^⊥)'}/β + |a||g|/β²
/// ```
pub fn bounds_symmetric_refined(p: &MixedProblem, c: &ProblemConstants, split: &AOrthogonalSplit) -> SymmetricBounds {
    let ratio = c.coercivity_ratio().sqrt();
    let g = p.g().norm();
    let g_term = c.norm_a / (c.beta * c.beta) * g;
    let theta_u = dual_seminorm(p.f(), &split.kernel) / c.alpha0 + ratio * g / c.beta;
    let theta_p = ratio * dual_seminorm(p.f(), &split.complement) / c.beta + g_term;
    // f∘Π as a vector is Πᵀf.
    let composed = split.proj_complement().tr_mul(p.f()).norm();
    let theta_p2 = composed / c.beta + g_term;
    SymmetricBounds {
        theta_u,
        theta_p,
        theta_p2,
    }
}

/// Classical bounds with full norms of `f`.
///
/// The general form uses the constants of the refined general estimate; the symmetric form uses
/// `θ_u = |f|/α₀ + 2(|a|/α₀)^{1/2}|g|/β`, `θ_p = 2(|a|/α₀)^{1/2}|f|/β + |a||g|/β²`.
pub fn bounds_classical(p: &MixedProblem, c: &ProblemConstants, symmetric: bool) -> BoundPair {
    let f = p.f().norm();
    let g = p.g().norm();
    if symmetric {
        let r = c.kernel_ratio().sqrt();
        BoundPair {
            theta_u: f / c.alpha0 + 2.0 * r * g / c.beta,
            theta_p: 2.0 * r * f / c.beta + c.norm_a / (c.beta * c.beta) * g,
        }
    } else {
        let k = 1.0 + c.kernel_ratio();
        BoundPair {
            theta_u: f / c.alpha0 + k * g / c.beta,
            theta_p: k * f / c.beta + c.norm_a / (c.beta * c.beta) * k * g,
        }
    }
}

/// Limit bounds of the perturbed symmetric saddle-point estimate, measured with the Euclidean
/// complement `K^⊥` of the kernel.
pub fn bounds_bbf_perturbed(p: &MixedProblem, c: &ProblemConstants) -> Result<BoundPair> {
    crate::saddle::subspace::check_spd(p.a_matrix())?;
    let kernel = kernel_basis(p.b_matrix(), RANK_TOL)?;
    let perp = polar_basis(p.b_matrix())?;
    let r = c.kernel_ratio().sqrt();
    let f_k = dual_seminorm(p.f(), &kernel);
    let f_perp = dual_seminorm(p.f(), &perp);
    let g = p.g().norm();
    Ok(BoundPair {
        theta_u: 2.0 / c.alpha0 * f_k + (1.0 + r) * g / c.beta,
        theta_p: f_perp / c.beta + 3.0 * r * f_k / c.beta + c.norm_a / (c.beta * c.beta) * g,
    })
}

/// Exact norms, semi norms and all bounds for one problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub constants: ProblemConstants,
    pub u_norm: f64,
    pub p_norm: f64,
    pub norm_f: f64,
    pub norm_g: f64,
    pub seminorm_f_kdual: f64,
    pub seminorm_f_kaperp_dual: Option<f64>,
    pub theta_u_refined: f64,
    pub theta_p_refined: f64,
    pub theta_u_classical: f64,
    pub theta_p_classical: f64,
    pub theta_p_refined2: Option<f64>,
}

impl StabilityReport {
    /// Report with the general refined and general classical bounds.
    pub fn general(p: &MixedProblem) -> Result<Self> {
        let constants = compute_constants(p, false)?;
        let sol = solve_mixed(p)?;
        let kernel = kernel_basis(p.b_matrix(), RANK_TOL)?;
        let refined = bounds_general_refined(p, &constants)?;
        let classical = bounds_classical(p, &constants, false);
        Ok(Self {
            constants,
            u_norm: sol.u.norm(),
            p_norm: sol.p.norm(),
            norm_f: p.f().norm(),
            norm_g: p.g().norm(),
            seminorm_f_kdual: dual_seminorm(p.f(), &kernel),
            seminorm_f_kaperp_dual: None,
            theta_u_refined: refined.theta_u,
            theta_p_refined: refined.theta_p,
            theta_u_classical: classical.theta_u,
            theta_p_classical: classical.theta_p,
            theta_p_refined2: None,
        })
    }

    /// Report with the symmetric refined and symmetric classical bounds.
    pub fn symmetric(p: &MixedProblem) -> Result<Self> {
        let constants = compute_constants(p, true)?;
        let split = a_orthogonal_split(p)?;
        let sol = solve_mixed(p)?;
        let refined = bounds_symmetric_refined(p, &constants, &split);
        let classical = bounds_classical(p, &constants, true);
        Ok(Self {
            constants,
            u_norm: sol.u.norm(),
            p_norm: sol.p.norm(),
            norm_f: p.f().norm(),
            norm_g: p.g().norm(),
            seminorm_f_kdual: dual_seminorm(p.f(), &split.kernel),
            seminorm_f_kaperp_dual: Some(dual_seminorm(p.f(), &split.complement)),
            theta_u_refined: refined.theta_u,
            theta_p_refined: refined.theta_p,
            theta_u_classical: classical.theta_u,
            theta_p_classical: classical.theta_p,
            theta_p_refined2: Some(refined.theta_p2),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn general(f: [f64; 2], g: f64) -> MixedProblem {
        MixedProblem::new(
            dmatrix![1.0, -1.0; 1.0, 0.01],
            dmatrix![0.1, 0.0],
            DVector::from_vec(f.to_vec()),
            DVector::from_vec(vec![g]),
        )
        .unwrap()
    }

    fn symmetric(f: [f64; 2], g: f64) -> MixedProblem {
        let a = 0.001_f64;
        MixedProblem::new(
            dmatrix![2.0, a.sqrt(); a.sqrt(), a],
            dmatrix![0.1, 0.0],
            DVector::from_vec(f.to_vec()),
            DVector::from_vec(vec![g]),
        )
        .unwrap()
    }

    #[test]
    fn u_bound_vanishes_for_polar_data() {
        let p = general([0.7, 0.0], 0.0);
        let c = compute_constants(&p, false).unwrap();
        let b = bounds_general_refined(&p, &c).unwrap();
        assert_eq!(b.theta_u, 0.0);
        assert!(b.theta_p > 0.0);
    }

    #[test]
    fn p_bound_vanishes_for_kernel_energy_data() {
        let p0 = general([0.0, 0.0], 0.0);
        let w0 = DVector::from_vec(vec![0.0, 3.0]);
        let p = p0.with_data(p0.a_matrix() * &w0, DVector::zeros(1)).unwrap();
        let c = compute_constants(&p, false).unwrap();
        let b = bounds_general_refined(&p, &c).unwrap();
        assert!(b.theta_p < 1e-12, "theta_p = {}", b.theta_p);
    }

    #[test]
    fn general_infimum_matches_hand_computation() {
        // The minimizer is w⁰ = (0, f2/a), leaving (f1 + f2/a, 0) in the polar space.
        let (f1, f2) = (0.3, -0.8);
        let p = general([f1, f2], 0.0);
        let c = compute_constants(&p, false).unwrap();
        let kernel = kernel_basis(p.b_matrix(), RANK_TOL).unwrap();
        let inf = kernel_infimum(p.f(), p.a_matrix(), &kernel, c.kernel_ratio());
        assert!((inf.value - (f1 + f2 / 0.01).abs()).abs() < 1e-9);
    }

    #[test]
    fn classical_equals_refined_u_bound_for_kernel_data() {
        let p = general([0.0, 1.0], -0.01);
        let c = compute_constants(&p, false).unwrap();
        let r = bounds_general_refined(&p, &c).unwrap();
        let cl = bounds_classical(&p, &c, false);
        assert!((r.theta_u - cl.theta_u).abs() < 1e-12 * cl.theta_u);
    }

    #[test]
    fn zero_data_gives_zero_bounds() {
        let p = symmetric([0.0, 0.0], 0.0);
        let c = compute_constants(&p, true).unwrap();
        for sym in [false, true] {
            let b = bounds_classical(&p, &c, sym);
            assert_eq!((b.theta_u, b.theta_p), (0.0, 0.0));
        }
        let b = bounds_bbf_perturbed(&p, &c).unwrap();
        assert_eq!((b.theta_u, b.theta_p), (0.0, 0.0));
    }

    #[test]
    fn symmetric_complement_seminorm() {
        let a = 0.001_f64;
        let (f1, f2) = (0.6, 0.8);
        let p = symmetric([f1, f2], 0.0);
        let split = a_orthogonal_split(&p).unwrap();
        let expected = (a.sqrt() * f1 - f2).abs() / (a + 1.0).sqrt();
        assert!((dual_seminorm(p.f(), &split.complement) - expected).abs() < 1e-14);
        let v = split.complement.basis().column(0);
        let dir = DVector::from_vec(vec![a.sqrt(), -1.0]) / (a + 1.0).sqrt();
        assert!((v.dot(&dir).abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_u_bound_against_rounded_closed_form() {
        // The closed form (2/a)|f2| + 2|g|/(√a b) uses α₀ ≈ a/2 and |a| ≈ 2; the computed
        // constants are α₀ = a and |a| = 2.0005…, so the f2-term is half and the g-term agrees
        // up to O(a).
        let (a, b) = (0.001_f64, 0.1);
        let (f2, g) = (0.4, 0.5);
        let p = symmetric([0.3, f2], g);
        let c = compute_constants(&p, true).unwrap();
        let split = a_orthogonal_split(&p).unwrap();
        let s = bounds_symmetric_refined(&p, &c, &split);
        let g_term_closed = 2.0 / (a.sqrt() * b) * g;
        let g_term = s.theta_u - f2 / a;
        assert!((g_term - g_term_closed).abs() < 1e-3 * g_term_closed);
        assert!(s.theta_u <= 2.0 / a * f2 + g_term_closed * (1.0 + 1e-3));
    }

    #[test]
    fn symmetric_classical_u_bound_value() {
        // f = (1, 0): K-part vanishes, |f| = 1.
        let p = symmetric([1.0, 0.0], 0.5);
        let c = compute_constants(&p, true).unwrap();
        let split = a_orthogonal_split(&p).unwrap();
        let r = bounds_symmetric_refined(&p, &c, &split);
        let cl = bounds_classical(&p, &c, true);
        let expected_refined = 0.5 / 0.1 * (c.norm_a / c.alpha.unwrap()).sqrt();
        assert!((r.theta_u - expected_refined).abs() < 1e-12 * expected_refined);
        assert!((r.theta_u - 316.2).abs() < 0.2);
        let expected_classical = 1.0 / c.alpha0 + 2.0 * (c.norm_a / c.alpha0).sqrt() * 0.5 / 0.1;
        assert!((cl.theta_u - expected_classical).abs() < 1e-9 * expected_classical);
        assert!(cl.theta_u > 4.0 * r.theta_u);
    }

    #[test]
    fn bbf_u_bound_vanishes_for_polar_data() {
        let p = symmetric([2.0, 0.0], 0.0);
        let c = compute_constants(&p, true).unwrap();
        assert_eq!(bounds_bbf_perturbed(&p, &c).unwrap().theta_u, 0.0);
    }

    #[test]
    fn bbf_p_bound_is_looser_for_kernel_heavy_data() {
        for i in 0..50 {
            let phi = std::f64::consts::FRAC_PI_2 * (0.5 + i as f64) / 50.0;
            let p = symmetric([phi.cos(), phi.sin()], 0.5);
            let c = compute_constants(&p, true).unwrap();
            let split = a_orthogonal_split(&p).unwrap();
            let s = bounds_symmetric_refined(&p, &c, &split);
            let bbf = bounds_bbf_perturbed(&p, &c).unwrap();
            if phi.sin() > 0.5 {
                assert!(bbf.theta_p >= s.theta_p, "phi = {phi}");
            }
        }
    }

    #[test]
    fn reports_dominate_exact_norms() {
        let r = StabilityReport::general(&general([0.2, 0.9], -0.01)).unwrap();
        assert!(r.u_norm <= r.theta_u_refined && r.theta_u_refined <= r.theta_u_classical);
        assert!(r.p_norm <= r.theta_p_refined);
        let r = StabilityReport::symmetric(&symmetric([0.2, 0.9], 0.5)).unwrap();
        assert!(r.u_norm <= r.theta_u_refined && r.theta_u_refined <= r.theta_u_classical);
        assert!(r.p_norm <= r.theta_p_refined2.unwrap());
        assert!(r.theta_p_refined2.unwrap() <= r.theta_p_refined * (1.0 + 1e-12));
    }
}
