//! Acceptance criteria 1 to 10. Each test prints one PASS/FAIL line (run with
//! `--nocapture` to see them) and fails if any of its checks fails.

use std::time::{Duration, Instant};

use g2glue_core::cone_spectral::*;
use g2glue_core::eguchi_hanson::{
    ale_decay_ratio, asd_triple, harmonic_forms, nu_decay_slope, rescaling_invariance_check, Coframe, EhChart,
    RadialForm, Expr,
};
use g2glue_core::exterior_algebra::{metric_from_g2, phi0, theta_split, Form, Metric};
use g2glue_core::kummer::{
    fixed_point_tori, singular_components, torsion_decay_fit, FixedLocus, GluingChart, TorusIsometry, ZETA,
};
use g2glue_core::torus_solver::{iterate, make_model_problem, OperatorMode, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Criterion {
    id: u8,
    title: &'static str,
    budget: Duration,
    start: Instant,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: u8, title: &'static str, budget_secs: u64) -> Self {
        Criterion { id, title, budget: Duration::from_secs(budget_secs), start: Instant::now(), checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        self.check(format!("runtime {:.2}s <= {}s", elapsed.as_secs_f64(), self.budget.as_secs()), elapsed <= self.budget);
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} criterion {}: {} ({} checks, {:.2}s)", self.id, self.title, self.checks.len(), elapsed.as_secs_f64());
        for name in &failed {
            println!("    failed: {name}");
        }
        assert!(failed.is_empty(), "criterion {} failed: {failed:?}", self.id);
    }
}

fn random_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (10f64.powf(rng.random_range(-4.0..1.0)), 10f64.powf(rng.random_range(-3.0..3.0))))
        .collect()
}

fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>()
}

#[test]
fn criterion_01_gamma_combinatorics() {
    let mut c = Criterion::new(1, "Gamma combinatorics", 1);
    let (a, b, g) = (TorusIsometry::alpha(), TorusIsometry::beta(), TorusIsometry::gamma());
    for (name, el) in [("alpha", &a), ("beta", &b), ("gamma", &g)] {
        let locus = fixed_point_tori(el);
        let three = matches!(&locus, FixedLocus::Tori(t) if t.iter().all(|x| x.dimension() == 3));
        c.check(format!("{name} fixes 16 copies of T^3"), locus.count() == 16 && three);
    }
    for (name, el) in
        [("beta gamma", b.compose(&g)), ("gamma alpha", g.compose(&a)), ("alpha beta", a.compose(&b)), ("alpha beta gamma", a.compose(&b).compose(&g))]
    {
        c.check(format!("{name} acts freely"), fixed_point_tori(&el) == FixedLocus::Empty);
    }
    let s = singular_components();
    let counts: Vec<usize> = s.counts.iter().filter(|x| !x.identity).map(|x| x.tori).collect();
    c.check("counts 16/16/16/0/0/0/0", counts == vec![16, 16, 16, 0, 0, 0, 0]);
    c.check("12 singular components", s.components.len() == 12);
    c.check("orbit sizes 4", s.orbit_sizes == vec![4; 12] && s.free_action);
    c.check("components disjoint", s.disjoint);
    c.finish();
}

#[test]
fn criterion_02_eguchi_hanson_identities() {
    let mut c = Criterion::new(2, "Eguchi-Hanson identities", 10);
    let tol = 1e-10;
    let (mut closed, mut potential, mut tau, mut asd_nu, mut asd_hat, mut hat_closed) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let flat = EhChart::new(0.0).unwrap().hyperkaehler_triple();
    for (k, r) in random_points(1000, 2) {
        let chart = EhChart::new(k).unwrap();
        let triple = chart.hyperkaehler_triple();
        for w in &triple {
            closed = closed.max(w.d().unwrap().relative_residual(r));
        }
        let (nu, lambda, tau1) = chart.harmonic_forms();
        potential = potential.max(lambda.d().unwrap().sub(&nu).unwrap().relative_residual(r));
        let diff = triple[0].sub(&flat[0]).unwrap();
        tau = tau.max(tau1.d().unwrap().sub(&diff).unwrap().relative_residual(r));
        let v = nu.eval(r);
        let g = chart.metric(r).unwrap();
        asd_nu = asd_nu.max((g.star(&v).unwrap() + v.clone()).max_abs() / v.max_abs());
        for w in chart.asd_triple() {
            hat_closed = hat_closed.max(w.d().unwrap().relative_residual(r));
        }
        let e = Metric::identity(4).unwrap();
        for w in asd_triple(k, r).unwrap() {
            asd_hat = asd_hat.max((e.star(&w).unwrap() + w.clone()).max_abs() / w.max_abs());
        }
    }
    c.check(format!("d omega_i = 0: {closed:.1e}"), closed <= tol);
    c.check(format!("d lambda = nu: {potential:.1e}"), potential <= tol);
    c.check(format!("d tau_1 = omega_1 - omega_1^0: {tau:.1e}"), tau <= tol);
    c.check(format!("*nu = -nu: {asd_nu:.1e}"), asd_nu <= tol);
    c.check(format!("*hat omega_i = -hat omega_i: {asd_hat:.1e}"), asd_hat <= tol);
    c.check(format!("d hat omega_i = 0: {hat_closed:.1e}"), hat_closed <= tol);
    c.finish();
}

#[test]
fn criterion_03_ale_decay() {
    let mut c = Criterion::new(3, "ALE decay", 10);
    for k in [1.0f64, 1e-2, 1e-4] {
        let sup = (0..400)
            .map(|i| 1.01 * (1e4f64 / 1.01).powf(i as f64 / 399.0))
            .map(|r| ale_decay_ratio(k, r).unwrap())
            .fold(0.0, f64::max);
        c.check(format!("k = {k:e}: sup |tau_1| / (k (k^1/4 + sqrt r)^-3) = {sup:.4} <= 4"), sup <= 4.0);
        let slope = nu_decay_slope(k, 1e2, 1e6, 60).unwrap();
        c.check(format!("k = {k:e}: |nu| log-slope {slope:.4}"), (slope + 4.0).abs() <= 0.05);
    }
    c.finish();
}

#[test]
fn criterion_04_cone_critical_rates() {
    let mut c = Criterion::new(4, "cone critical rates", 1);
    let so3 = LinkSpectrum::so3(12);
    let one = critical_rates(&so3, 1, &RateInterval::half_open(qi(-2), qi(0))).unwrap();
    c.check("degree 1 rates in [-2, 0) empty", one.is_empty());
    let delta = q(1, 100);
    let two = rate_dimensions(&critical_rates(&so3, 2, &RateInterval::half_open(qi(-4) + &delta, qi(0))).unwrap());
    c.check("degree 2 rates in [-4 + delta, 0) = {-2: 6}", two == vec![(Surd::int(-2), 6)]);
    c.check("no log terms at -2", log_kernel_check(&so3, 2, &Surd::int(-2)).unwrap());
    c.check("index jump across -2 is 6", index_change(&so3, 2, &qi(-3), &qi(-1)).unwrap() == 6);
    c.finish();
}

#[test]
fn criterion_05_sphere_spectrum_oracle() {
    let mut c = Criterion::new(5, "S^3/SO(3) spectrum oracle", 10);
    let mut so3 = Vec::new();
    for m in 0..=8u32 {
        let check = s3_function_spectrum_check(m).unwrap();
        c.check(
            format!("m = {m}: eigenvalue {} exact", check.eigenvalue),
            check.eigenvalue == u64::from(m * (m + 2)) && check.residual == 0.0,
        );
        if check.descends_to_so3 && check.eigenvalue <= 24 {
            so3.push(check.eigenvalue);
        }
    }
    c.check(format!("SO(3) eigenvalues {so3:?}"), so3 == vec![0, 8, 24]);
    let forms = order_minus_two_forms();
    c.check("six order -2 forms", forms.len() == 6);
    for f in &forms {
        let residual = harmonic_oracle_r4(f);
        c.check(format!("{} harmonic", f.name), residual.is_ok_and(|x| x == 0.0));
    }
    c.finish();
}

#[test]
fn criterion_06_theta_expansion() {
    let mut c = Criterion::new(6, "Theta expansion", 30);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let phi = phi0::<f64>();
    let scales = [1e-1, 1e-2, 1e-3, 1e-4];
    let (mut worst_slope, mut worst_linear) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let raw = Form::from_coeffs(7, 3, (0..35).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let chi = raw.scale(1.0 / raw.coeff_norm());
        let norms: Vec<f64> = scales.iter().map(|&s| theta_split(&phi, &chi.scale(s)).unwrap().1.coeff_norm()).collect();
        worst_slope = worst_slope.max((log_slope(&scales, &norms) - 2.0).abs());
        let (t1, _) = theta_split(&phi, &chi).unwrap();
        for s in [0.5, 1e-2, 1e-3] {
            let (ts, _) = theta_split(&phi, &chi.scale(s)).unwrap();
            worst_linear = worst_linear.max(ts.try_sub(&t1.scale(s)).unwrap().coeff_norm());
        }
    }
    c.check(format!("|F(s chi)| log-slope within {worst_slope:.4} of 2"), worst_slope <= 0.05);
    c.check(format!("T linear to {worst_linear:.1e}"), worst_linear <= 1e-10);
    let (g, _) = metric_from_g2(&phi).unwrap();
    let id = Metric::<f64>::identity(7).unwrap();
    let defect = g.entries().iter().zip(id.entries()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    c.check(format!("g(phi_0) = id to {defect:.1e}"), defect <= 1e-12);
    c.finish();
}

#[test]
fn criterion_07_kummer_torsion_law() {
    let mut c = Criterion::new(7, "Kummer torsion law", 300);
    let t_list = [0.2, 0.1, 0.05, 0.025];
    let beta = -1.0 / 20.0;
    match torsion_decay_fit::<f64>(&t_list, 20_000, beta) {
        Ok(fit) => {
            c.check(format!("sup |psi^t| slope {:.4}", fit.slope), (3.9..=4.1).contains(&fit.slope));
            c.check(format!("weighted C^0 slope {:.4}", fit.weighted_slope), fit.weighted_slope >= 3.9);
        }
        Err(e) => c.check(format!("torsion fit over t = {t_list:?}: {e}"), false),
    }
    let mut outside = 0.0f64;
    let mut evaluated = true;
    for t in t_list {
        let chart = GluingChart::new(1, t).unwrap();
        let forms = chart.forms().unwrap();
        for s in [ZETA / 8.0, ZETA / 5.0, 0.24 * ZETA, 0.51 * ZETA, 0.75 * ZETA, 0.9 * ZETA] {
            match chart.torsion_form(&forms, chart.radius_at(s)) {
                Ok(p) => outside = outside.max(p.norm),
                Err(_) => evaluated = false,
            }
        }
    }
    c.check(format!("psi^t vanishes off the annulus: {outside:.1e}"), evaluated && outside <= 1e-14);
    c.finish();
}

#[test]
fn criterion_08_flat_model_iteration() {
    let mut c = Criterion::new(8, "existence iteration on the flat model", 600);
    let config = SolverConfig { n: 6, eps: 1e-2, seed: 7, tol: 1e-8, max_iter: 50, mode: OperatorMode::Flat };
    let problem = make_model_problem::<f64>(&config).unwrap();
    let report = iterate(&problem).unwrap().report;
    c.check(format!("converged in {} <= 50 iterations", report.iterations), report.converged && report.iterations <= 50);
    c.check(format!("sup |d Theta(phi~)| = {:.2e} <= 1e-8", report.residual), report.residual <= 1e-8);
    c.check(format!("sup |phi~ - phi_0| = {:.2e} <= 1e-8", report.distance_to_flat), report.distance_to_flat <= 1e-8);
    c.check(format!("zero mode of phi~ - phi_0 = {:.1e}", report.zero_mode_shift), report.zero_mode_shift <= 1e-14);
    c.finish();
}

#[test]
fn criterion_09_rate_calculator() {
    let mut c = Criterion::new(9, "rate calculator", 1);
    let eps = q(1, 20);
    let beta = -eps.clone();
    let naive = torsion_exponent(&naive_torsion_table(), &beta, &q(-1, 5)).unwrap().exponent;
    c.check(format!("naive table, B = -1/5: {naive}"), naive == TExponent::Finite(q(4, 5) * (qi(2) - &beta)));
    let f = kappa_feasibility(&q(8, 5), &beta, &eps, &naive);
    c.check(format!("kappa = 8/5 feasible, L-inf exponent {}", f.linf_exponent), f.feasible() && f.linf_exponent == q(3, 5) - &eps);
    let refined = torsion_exponent(&refined_torsion_table(&eps), &beta, &q(-1, 5)).unwrap().exponent;
    c.check(format!("refined table: {refined} = 13/5"), refined == TExponent::Finite(q(13, 5)));
    let f = kappa_feasibility(&q(13, 5), &beta, &eps, &TExponent::Finite(q(13, 5)));
    c.check(format!("kappa = 13/5 L-inf exponent {}", f.linf_exponent), f.feasible() && f.linf_exponent == q(8, 5) - &eps);
    c.finish();
}

#[test]
fn criterion_10_rescaling_invariance() {
    let mut c = Criterion::new(10, "rescaling invariance", 30);
    let radii: Vec<f64> = (0..120).map(|i| 1e-3 * 1e7f64.powf(i as f64 / 119.0)).collect();
    for t in [0.5, 0.1, 0.02] {
        let (nu, _, _) = harmonic_forms(f64::powi(t, 4)).unwrap();
        let d = rescaling_invariance_check(&nu, -4.0, t, &radii).unwrap();
        c.check(format!("nu, beta = -4, t = {t}: {d:.1e}"), d <= 1e-8);
        let flat = RadialForm::term(Coframe::eh_left(), &[2, 3], Expr::lit(1.5));
        let d = rescaling_invariance_check(&flat, 0.0, t, &radii).unwrap();
        c.check(format!("constant form, beta = 0, t = {t}: {d:.1e}"), d <= 1e-8);
    }
    c.finish();
}
