//! End-to-end acceptance checks. Each criterion prints one `PASS`/`FAIL` line; the process exits
//! nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use semilab::experiments::flow::{lambda_sweep, potential_flow, LambdaSweepParams, PotentialFlowParams};
use semilab::experiments::{
    general_sweep, hodge_checks, random_suite, symmetric_sweep, HodgeParams, SuiteParams, SweepParams,
};
use semilab::fem::mesh::Mesh2D;
use semilab::fem::quadrature::QuadratureRule;
use semilab::saddle::bounds::StabilityReport;
use semilab::saddle::instances::general_instance;
use semilab::stokes::dual::discrete_inf_sup;
use semilab::stokes::system::{Pair, StokesSystem};

const BOUND_TOL: f64 = 1e-9;

struct Outcome {
    name: &'static str,
    passed: bool,
    details: Vec<String>,
}

struct Checks {
    name: &'static str,
    passed: bool,
    details: Vec<String>,
}

impl Checks {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, label: &str, ok: bool, detail: String) {
        self.passed &= ok;
        self.details
            .push(format!("{} {label}: {detail}", if ok { "ok  " } else { "FAIL" }));
    }

    fn runtime(&mut self, start: Instant, limit: Duration) {
        let t = start.elapsed();
        self.check("runtime", t < limit, format!("{t:.2?} (limit {limit:?})"));
    }

    fn finish(self) -> Outcome {
        Outcome {
            name: self.name,
            passed: self.passed,
            details: self.details,
        }
    }
}

fn fig1() -> Outcome {
    let mut c = Checks::new("fig1 nonsymmetric 2x2 sweep");
    let start = Instant::now();
    let params = SweepParams::general_default();
    let t = general_sweep(&params).expect("sweep");
    let col = |n: &str| t.numeric(n).unwrap();
    let (phi, u, p) = (col("phi"), col("u_norm"), col("p_norm"));
    let (ur, uc, pr) = (col("theta_u_r"), col("theta_u_c"), col("theta_p_r"));
    let mut worst = (0.0f64, 0usize);
    for k in 0..t.len() {
        let r = (u[k] / (ur[k] * (1.0 + BOUND_TOL)))
            .max(ur[k] / (uc[k] * (1.0 + BOUND_TOL)))
            .max(p[k] / (pr[k] * (1.0 + BOUND_TOL)));
        if r > worst.0 {
            worst = (r, k);
        }
    }
    c.check(
        "(i) |u| <= theta_u_r <= theta_u_c, |p| <= theta_p_r",
        t.len() == 200 && worst.0 <= 1.0,
        format!(
            "{} points, worst ratio {:.6} at phi = {:.4}",
            t.len(),
            worst.0,
            phi[worst.1]
        ),
    );

    let mid = general_sweep(&SweepParams { points: 3, ..params }).unwrap();
    let (r, cl) = (
        mid.numeric("theta_u_r").unwrap()[1],
        mid.numeric("theta_u_c").unwrap()[1],
    );
    c.check(
        "(ii) theta_u_r = theta_u_c at phi = pi/2",
        ((r - cl) / cl).abs() <= BOUND_TOL,
        format!("refined {r:.12e}, classical {cl:.12e}"),
    );

    for phi in [0.0, PI] {
        let rep =
            StabilityReport::general(&general_instance(params.a, params.b, [phi.cos(), phi.sin()], params.g).unwrap())
                .unwrap();
        let k = &rep.constants;
        let g_term = (1.0 + k.norm_a / k.alpha0) * params.g.abs() / k.beta;
        let factor = rep.theta_u_classical / rep.theta_u_refined;
        c.check(
            &format!("(iii) f in K0 (phi = {phi:.4}): theta_u_r <= g-term"),
            rep.theta_u_refined <= g_term * (1.0 + BOUND_TOL),
            format!("theta_u_r {:.6e}, g-term {:.6e}", rep.theta_u_refined, g_term),
        );
        c.check(
            &format!("(iii) f in K0 (phi = {phi:.4}): theta_u_c >= 50 theta_u_r"),
            factor >= 50.0,
            format!("classical/refined = {factor:.4}"),
        );
    }
    c.runtime(start, Duration::from_secs(1));
    c.finish()
}

fn fig2() -> Outcome {
    let mut c = Checks::new("fig2 symmetric 2x2 sweep");
    let start = Instant::now();
    let t = symmetric_sweep(&SweepParams::symmetric_default()).expect("sweep");
    let col = |n: &str| t.numeric(n).unwrap();
    let (phi, f2, u2, p, ur, pr2) = (
        col("phi"),
        col("f2"),
        col("u2"),
        col("p_norm"),
        col("theta_u_r"),
        col("theta_p_r2"),
    );
    let mut worst = (0.0f64, 0usize);
    let mut used = 0;
    for k in 0..t.len() {
        // f₂ ≈ 0 excluded.
        if f2[k].abs() < 0.05 {
            continue;
        }
        used += 1;
        let r = ur[k] / u2[k].abs();
        if !(r <= worst.0) {
            worst = (r, k);
        }
    }
    c.check(
        "theta_u_r / |u2| <= 8 where |f2| >= 0.05",
        worst.0 <= 8.0,
        format!(
            "{used} points, max ratio {:.4} at phi = {:.4} (u2 = {:.3e})",
            worst.0, phi[worst.1], u2[worst.1]
        ),
    );
    let worst_p = (0..t.len())
        .map(|k| p[k] / (pr2[k] * (1.0 + BOUND_TOL)))
        .fold(0.0, f64::max);
    c.check(
        "|p| <= theta_p_r2 pointwise",
        worst_p <= 1.0,
        format!("max |p|/theta_p_r2 = {worst_p:.6}"),
    );
    c.check(
        "grid",
        t.len() == 200 && (phi[199] - FRAC_PI_2).abs() < 1e-15,
        format!("{} points on [0, pi/2]", t.len()),
    );
    c.runtime(start, Duration::from_secs(1));
    c.finish()
}

fn property_suite() -> Outcome {
    let mut c = Checks::new("random property suite (100 instances, n <= 12, m <= 6)");
    let start = Instant::now();
    let params = SuiteParams::default();
    let (report, _) = random_suite(&params).expect("suite");
    for (name, s) in &report.checks {
        c.check(
            name,
            s.failed == 0,
            format!(
                "{} evaluated, {} failed, worst normalized value {:.3e}",
                s.evaluated, s.failed, s.worst
            ),
        );
    }
    c.check(
        "instances",
        params.count == 100 && params.max_n == 12 && params.max_m == 6 && report.oracle_instances > 0,
        format!("seed {}, {} oracle comparisons", params.seed, report.oracle_instances),
    );
    c.runtime(start, Duration::from_secs(10));
    c.finish()
}

fn fig3() -> Outcome {
    let mut c = Checks::new("fig3 lambda sweep (mu = 1e-3, n = 4)");
    let start = Instant::now();
    let params = LambdaSweepParams::default();
    let out = lambda_sweep(&params).expect("lambda sweep");
    let t = &out.table;
    let col = |n: &str| t.numeric(n).unwrap();
    let (lam, u_sv, u_th, div_sv, ur) = (
        col("lambda"),
        col("u_norm_sv"),
        col("u_norm_th"),
        col("div_l2_sv"),
        col("theta_u_r"),
    );

    let mut worst = (0.0f64, 0usize);
    for k in 0..t.len() {
        let r = div_sv[k] / (1e-9 * u_sv[k]);
        if !(r <= worst.0) {
            worst = (r, k);
        }
    }
    c.check(
        "||div u_SV|| <= 1e-9 ||grad u_SV|| at all lambda",
        worst.0 <= 1.0,
        format!(
            "worst at lambda = {:.2}: ||div u|| = {:.3e}, ||grad u|| = {:.3e}",
            lam[worst.1], div_sv[worst.1], u_sv[worst.1]
        ),
    );
    c.check(
        "lambda = 0: ||grad u_SV|| <= 1e-6",
        u_sv[0] <= 1e-6,
        format!("{:.3e}", u_sv[0]),
    );
    c.check(
        "lambda = 0: ||grad u_TH|| >= 1e3 ||grad u_SV||",
        u_th[0] >= 1e3 * u_sv[0],
        format!("TH {:.3e}, SV {:.3e}", u_th[0], u_sv[0]),
    );
    let coarse_mu = lambda_sweep(&LambdaSweepParams {
        mu: 1e-2,
        points: 2,
        ..params
    })
    .expect("lambda sweep");
    let factor = u_th[0] / coarse_mu.table.numeric("u_norm_th").unwrap()[0];
    c.check(
        "mu 1e-2 -> 1e-3 scales ||grad u_TH(0)|| by 10 +- 20%",
        (8.0..=12.0).contains(&factor),
        format!("factor {factor:.6}"),
    );
    let worst_r = (0..t.len()).map(|k| u_sv[k] - ur[k]).fold(f64::NEG_INFINITY, f64::max);
    c.check(
        "||grad u_SV|| <= theta_u_r + 1e-6 at all lambda",
        worst_r <= 1e-6,
        format!("max excess {worst_r:.3e}"),
    );
    c.runtime(start, Duration::from_secs(60));
    c.finish()
}

fn fig4() -> Outcome {
    let mut c = Checks::new("fig4 transient potential flow (mu = 1e-4, dt = 0.01, T = 1)");
    let start = Instant::now();
    let out = potential_flow(&PotentialFlowParams::default()).expect("potential flow");
    let t = &out.table;
    let col = |n: &str| t.numeric(n).unwrap();
    let (time, th, sv) = (col("t"), col("u_err_th"), col("u_err_sv"));
    let sv_max = sv.iter().cloned().fold(0.0, f64::max);
    c.check(
        "SV L2 error <= 1e-8 at every step",
        sv_max <= 1e-8,
        format!("max {sv_max:.3e}"),
    );
    let from = time.iter().position(|&s| s >= 0.1 - 1e-12).unwrap();
    let drops: Vec<usize> = (from + 1..t.len()).filter(|&k| th[k] < th[k - 1]).collect();
    c.check(
        "TH L2 error nondecreasing for t >= 0.1",
        drops.is_empty(),
        match drops.first() {
            None => format!("{} steps checked", t.len() - from),
            Some(&k) => format!("{} decreases, first at t = {:.2}", drops.len(), time[k]),
        },
    );
    let last = t.len() - 1;
    c.check(
        "TH error >= 1e3 SV error at T",
        (time[last] - 1.0).abs() < 1e-12 && th[last] >= 1e3 * sv[last],
        format!("TH {:.3e}, SV {:.3e}", th[last], sv[last]),
    );
    c.runtime(start, Duration::from_secs(300));
    c.finish()
}

fn hodge() -> Outcome {
    let mut c = Checks::new("Helmholtz-Hodge consistency (gradient and curl, n = 4, 8, 16)");
    let out = hodge_checks(&HodgeParams::default()).expect("hodge");
    let t = &out.table;
    let col = |n: &str| t.numeric(n).unwrap();
    let max = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
    let u = max(col("gradient_data_u_rel"));
    let p = max(col("solenoidal_data_p_rel"));
    let o = max(col("orthogonality_defect"));
    c.check(
        "f = D q_h: ||u_h|| <= 1e-9 ||f||",
        u <= 1e-9,
        format!("max ratio {u:.3e}"),
    );
    c.check(
        "solenoidal f: ||D p_h|| <= 1e-9 ||f||",
        p <= 1e-9,
        format!("max ratio {p:.3e}"),
    );
    c.check("(u_h, D q_i) = 0 for all basis q_i", o <= 1e-11, format!("max {o:.3e}"));
    c.finish()
}

/// `∫ x^i y^j` over the reference triangle: `i! j! / (i + j + 2)!`.
fn reference_monomial(i: u32, j: u32) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    fact(i) * fact(j) / fact(i + j + 2)
}

fn mesh_assembly() -> Outcome {
    let mut c = Checks::new("mesh and assembly");
    let mut worst = 0.0f64;
    for degree in 1..=10 {
        let rule = QuadratureRule::triangle(degree);
        for i in 0..=degree as u32 {
            for j in 0..=(degree as u32 - i) {
                let q: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(b, w)| 0.5 * w * b[1].powi(i as i32) * b[2].powi(j as i32))
                    .sum();
                worst = worst.max((q - reference_monomial(i, j)).abs());
            }
        }
    }
    c.check(
        "quadrature monomial exactness, degrees 1..=10",
        worst <= 1e-14,
        format!("max error {worst:.3e}"),
    );

    for n in [1, 3, 4] {
        let m = Mesh2D::structured(n).unwrap().refined(1);
        let b = m.barycentric_refine();
        c.check(
            &format!("barycentric refinement of {} triangles", m.num_triangles()),
            b.num_triangles() == 3 * m.num_triangles() && (b.total_area() - m.total_area()).abs() <= 1e-12,
            format!(
                "{} triangles, area change {:.3e}",
                b.num_triangles(),
                (b.total_area() - m.total_area()).abs()
            ),
        );
    }

    let base = Mesh2D::structured(2).unwrap();
    let mut values = Vec::new();
    for level in 0..3 {
        let sys = StokesSystem::new(Arc::new(base.refined(level)), Pair::TaylorHood);
        values.push(discrete_inf_sup(&sys).unwrap());
    }
    c.check(
        "TH discrete inf-sup > 0 on 3 levels",
        values.iter().all(|&b| b > 0.0),
        format!("beta_h = {values:.6?}"),
    );
    c.finish()
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 7] = [fig1, fig2, property_suite, fig3, fig4, hodge, mesh_assembly];
    let mut failed = 0;
    for run in criteria {
        let o = run();
        println!("{} {}", if o.passed { "PASS" } else { "FAIL" }, o.name);
        for d in &o.details {
            println!("    {d}");
        }
        failed += usize::from(!o.passed);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
