use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use semilab::saddle::bounds::StabilityReport;
use semilab::saddle::instances::InstanceGenerator;
use semilab::saddle::linalg::RANK_TOL;
use semilab::saddle::{a_orthogonal_split, compute_constants, dual_seminorm, kernel_basis, solve_mixed, MixedProblem};

const BOUND_TOL: f64 = 1e-9;
const EQUIV_TOL: f64 = 1e-10;

fn instance(seed: u64, n: usize, m: usize, symmetric: bool) -> (InstanceGenerator, MixedProblem) {
    let mut gen = InstanceGenerator::new(seed);
    let m = m.min(n);
    let p = if symmetric {
        gen.symmetric(n, m)
    } else {
        gen.general(n, m)
    }
    .unwrap();
    (gen, p)
}

fn dims() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 2usize..=12, 1usize..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn general_bounds_dominate_and_are_ordered((seed, n, m) in dims()) {
        let (_, p) = instance(seed, n, m, false);
        let r = StabilityReport::general(&p).unwrap();
        let slack = 1.0 + BOUND_TOL;
        prop_assert!(r.u_norm <= r.theta_u_refined * slack);
        prop_assert!(r.theta_u_refined <= r.theta_u_classical * slack);
        prop_assert!(r.p_norm <= r.theta_p_refined * slack);
        prop_assert!(r.p_norm <= r.theta_p_classical * slack);
    }

    #[test]
    fn symmetric_bounds_dominate((seed, n, m) in dims()) {
        let (_, p) = instance(seed, n, m, true);
        let r = StabilityReport::symmetric(&p).unwrap();
        let slack = 1.0 + BOUND_TOL;
        prop_assert!(r.u_norm <= r.theta_u_refined * slack);
        prop_assert!(r.u_norm <= r.theta_u_classical * slack);
        prop_assert!(r.p_norm <= r.theta_p_refined * slack);
        let p2 = r.theta_p_refined2.unwrap();
        prop_assert!(r.p_norm <= p2 * slack && p2 <= r.theta_p_refined * slack);
        prop_assert!(r.seminorm_f_kdual <= r.norm_f * slack);
    }

    #[test]
    fn u_equivalence((seed, n, m) in dims(), symmetric in any::<bool>()) {
        let (mut gen, p) = instance(seed, n, m, symmetric);
        let base = solve_mixed(&p).unwrap();
        let q = gen.vector(p.m());
        let s = solve_mixed(&p.with_data(p.f() + p.b_matrix().tr_mul(&q), p.g().clone()).unwrap()).unwrap();
        let scale = base.u.norm() + base.p.norm() + q.norm();
        prop_assert!((&s.u - &base.u).norm() <= EQUIV_TOL * scale);
        prop_assert!((&s.p - &base.p - &q).norm() <= EQUIV_TOL * scale);
    }

    #[test]
    fn p_equivalence((seed, n, m) in dims(), symmetric in any::<bool>()) {
        let (mut gen, p) = instance(seed, n, m, symmetric);
        let kernel = kernel_basis(p.b_matrix(), RANK_TOL).unwrap();
        let w0 = kernel.basis() * gen.vector(kernel.dim());
        let base = solve_mixed(&p).unwrap();
        let s = solve_mixed(&p.with_data(p.f() + p.a_matrix() * &w0, p.g().clone()).unwrap()).unwrap();
        let scale = base.u.norm() + base.p.norm() + w0.norm();
        prop_assert!((&s.p - &base.p).norm() <= EQUIV_TOL * scale);
        prop_assert!((&s.u - &base.u - &w0).norm() <= EQUIV_TOL * scale);
    }

    #[test]
    fn kernel_seminorm_vanishes_exactly_on_the_range_of_bt((seed, n, m) in dims(), t in 1e-3f64..1e3) {
        let (mut gen, p) = instance(seed, n, m, true);
        let kernel = kernel_basis(p.b_matrix(), RANK_TOL).unwrap();
        let in_range = p.b_matrix().tr_mul(&gen.vector(p.m()));
        prop_assert!(dual_seminorm(&in_range, &kernel) <= 1e-12 * in_range.norm());
        if kernel.dim() > 0 {
            let w = kernel.basis() * gen.vector(kernel.dim()) * t;
            let v = dual_seminorm(&(&in_range + &w), &kernel);
            prop_assert!((v - w.norm()).abs() <= 1e-10 * (w.norm() + in_range.norm()));
        }
    }

    #[test]
    fn energy_projectors((seed, n, m) in dims()) {
        let (mut gen, p) = instance(seed, n, m, true);
        let split = a_orthogonal_split(&p).unwrap();
        let pk = &split.proj_kernel;
        let pc = split.proj_complement();
        let id = DMatrix::<f64>::identity(p.n(), p.n());
        let scale = pk.norm().max(1.0);
        prop_assert!((pk * pk - pk).norm() <= 1e-9 * scale * scale);
        prop_assert!((&pc * &pc - &pc).norm() <= 1e-9 * scale * scale);
        prop_assert!((pk + &pc - id).norm() <= 1e-12 * scale);
        let c = compute_constants(&p, true).unwrap();
        let v: DVector<f64> = gen.vector(p.n());
        let perp = &pc * &v;
        prop_assert!(perp.norm() <= c.coercivity_ratio().sqrt() * v.norm() * (1.0 + BOUND_TOL));
        // The kernel component is a-orthogonal to the complement.
        if split.kernel.dim() > 0 {
            let w = split.kernel.basis().tr_mul(&(p.a_matrix() * &perp));
            prop_assert!(w.norm() <= 1e-9 * p.a_matrix().norm() * v.norm());
        }
    }
}

/// The symmetric refined `g`-term carries `(|a|/α)^{1/2}` where the classical one carries
/// `|a|/α₀`, so the refined u-bound is not termwise below the classical one.
#[test]
fn symmetric_refined_u_bound_can_exceed_classical() {
    let found = (0..50u64).any(|seed| {
        let (_, p) = instance(seed, 6, 3, true);
        let r = StabilityReport::symmetric(&p).unwrap();
        r.theta_u_refined > r.theta_u_classical
    });
    assert!(found);
}
