//! One function per subcommand; each returns a populated [`Report`].

use g2glue_core::cone_spectral::{
    critical_rates, harmonic_oracle_r4, index_change, kappa_feasibility, log_kernel_check, naive_torsion_table,
    order_minus_two_forms, rate_dimensions, refined_torsion_table, required_ceiling, s3_function_spectrum_check,
    torsion_exponent, LinkSpectrum, Rational, RateInterval, Surd, TExponent,
};
use g2glue_core::eguchi_hanson::{
    ale_decay_ratio, asd_triple, harmonic_forms, nu_decay_slope, radial_distance, rescaling_invariance_check,
    sphere_geometry, EhChart,
};
use g2glue_core::exterior_algebra::Metric;
use g2glue_core::kummer::{
    decay_from_rows, fixed_point_tori, orbifold_b2, singular_components, torsion_table, FixedLocus, GluingChart,
    TorusIsometry, ZETA,
};
use g2glue_core::torus_solver::{iterate, make_model_problem, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{RunConfig, Table as TableKind};
use crate::error::CliError;
use crate::report::{json, write_atomic, Report, Table};

const IDENTITY_TOL: f64 = 1e-10;
const RESCALING_TOL: f64 = 1e-8;
const ALE_CONSTANT: f64 = 4.0;
const SLOPE_TOL: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    EhVerify,
    EhDecay,
    ConeRates,
    ConeIndex,
    ConeOracle,
    RatesJk,
    KummerFixedPoints,
    KummerTorsion,
    TorusSolve,
    All,
}

impl Suite {
    pub fn id(self) -> &'static str {
        match self {
            Suite::EhVerify => "eh-verify",
            Suite::EhDecay => "eh-decay",
            Suite::ConeRates => "cone-rates",
            Suite::ConeIndex => "cone-index",
            Suite::ConeOracle => "cone-oracle",
            Suite::RatesJk => "rates-jk",
            Suite::KummerFixedPoints => "kummer-fixed-points",
            Suite::KummerTorsion => "kummer-torsion",
            Suite::TorusSolve => "torus-solve",
            Suite::All => "all",
        }
    }
}

pub fn run(suite: Suite, cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    match suite {
        Suite::EhVerify => eh_verify(cfg),
        Suite::EhDecay => eh_decay(cfg),
        Suite::ConeRates => cone_rates(cfg),
        Suite::ConeIndex => cone_index(cfg),
        Suite::ConeOracle => cone_oracle(),
        Suite::RatesJk => rates_jk(cfg),
        Suite::KummerFixedPoints => kummer_fixed_points(cfg),
        Suite::KummerTorsion => kummer_torsion(cfg),
        Suite::TorusSolve => torus_solve(cfg),
        Suite::All => all(cfg),
    }
}

fn all(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(Suite::All.id());
    report.data = Value::Object(Default::default());
    report.absorb(kummer_fixed_points(cfg)?);
    report.absorb(eh_verify(cfg)?);
    report.absorb(eh_decay(cfg)?);
    report.absorb(cone_index(cfg)?);
    report.absorb(cone_oracle()?);
    for table in [TableKind::Naive, TableKind::Refined] {
        let mut c = cfg.clone();
        c.rates.table = table;
        let mut r = rates_jk(&c)?;
        r.suite = format!("rates-jk-{}", json(&table).as_str().unwrap_or_default());
        report.absorb(r);
    }
    report.absorb(kummer_torsion(cfg)?);
    report.absorb(torus_solve(cfg)?);
    Ok(report)
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn eh_verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(Suite::EhVerify.id());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.eh.seed);
    let points: Vec<(f64, f64)> = (0..cfg.eh.samples)
        .map(|_| (10f64.powf(rng.random_range(-4.0..1.0)), 10f64.powf(rng.random_range(-3.0..3.0))))
        .collect();
    let flat = EhChart::new(0.0)?.hyperkaehler_triple();
    let euclid = Metric::identity(4)?;
    let mut worst = [0.0f64; 6];
    for &(k, r) in &points {
        let chart = EhChart::new(k)?;
        let triple = chart.hyperkaehler_triple();
        for w in &triple {
            worst[0] = worst[0].max(w.d()?.relative_residual(r));
        }
        let (nu, lambda, tau) = chart.harmonic_forms();
        worst[1] = worst[1].max(lambda.d()?.sub(&nu)?.relative_residual(r));
        worst[2] = worst[2].max(tau.d()?.sub(&triple[0].sub(&flat[0])?)?.relative_residual(r));
        let v = nu.eval(r);
        worst[3] = worst[3].max((chart.metric(r)?.star(&v)? + v.clone()).max_abs() / v.max_abs());
        for w in chart.asd_triple() {
            worst[4] = worst[4].max(w.d()?.relative_residual(r));
        }
        for w in asd_triple(k, r)? {
            worst[5] = worst[5].max((euclid.star(&w)? + w.clone()).max_abs() / w.max_abs());
        }
    }
    let names = [
        ("hyperkaehler triple closed", "d omega_i = 0"),
        ("nu exact", "d lambda = nu"),
        ("tau_1 potential", "d tau_1 = omega_1 - omega_1 of the flat cone"),
        ("nu anti-self-dual", "*nu = -nu"),
        ("right-invariant triple closed", "d hat omega_i = 0"),
        ("right-invariant triple anti-self-dual", "*hat omega_i = -hat omega_i"),
    ];
    for ((name, law), w) in names.iter().zip(worst) {
        report.at_most(name, w, IDENTITY_TOL, &format!("{law}, relative residual over {} random (k, r)", points.len()));
    }
    let radii = log_spaced(1e-3, 1e4, 120);
    for t in [0.5, 0.1, 0.02] {
        let (nu, _, _) = harmonic_forms(f64::powi(t, 4))?;
        let d = rescaling_invariance_check(&nu, -4.0, t, &radii)?;
        report.at_most(
            &format!("rescaling invariance t = {t}"),
            d,
            RESCALING_TOL,
            "weighted norm at scale t equals the rescaled norm at scale 1",
        );
    }
    let sphere = sphere_geometry(1.0)?;
    report.reported(
        "exceptional sphere diameter / k^(1/4)",
        sphere.diameter_constant.into(),
        sphere.claimed_diameter_constant.into(),
        "diameter of the exceptional sphere scales as k^(1/4)",
    );
    report.reported(
        "exceptional sphere area / k^(1/2)",
        sphere.area_constant.into(),
        sphere.claimed_area_constant.into(),
        "area of the exceptional sphere scales as k^(1/2)",
    );
    let r = 1e6;
    let d = radial_distance(0.0, r)?;
    report.reported("r / d^2 at k = 0", (r / (d * d)).into(), 1.0.into(), "distance normalisation of the flat cone");
    report.data = json!({ "samples": points.len(), "seed": cfg.eh.seed, "sphere": json(&sphere) });
    Ok(report)
}

fn eh_decay(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(Suite::EhDecay.id());
    let mut table = Table::new("decay", &["r", "k", "value", "bound", "ratio"]);
    let radii = log_spaced(cfg.eh.r_min, cfg.eh.r_max, cfg.eh.points);
    let mut sups = Vec::new();
    for &k in &cfg.eh.k {
        let mut sup = 0.0f64;
        for &r in &radii {
            let ratio = ale_decay_ratio(k, r)?;
            let bound = k * (k.powf(0.25) + r.sqrt()).powi(-3);
            table.push(vec![r.to_string(), k.to_string(), (ratio * bound).to_string(), bound.to_string(), ratio.to_string()]);
            sup = sup.max(ratio);
        }
        report.at_most(
            &format!("ALE ratio k = {k}"),
            sup,
            ALE_CONSTANT,
            "|tau_1| <= c k (k^(1/4) + sqrt r)^-3 with c = 4",
        );
        let slope = nu_decay_slope(k, 1e2, 1e6, 60)?;
        report.near(&format!("|nu| log-slope k = {k}"), slope, -4.0, SLOPE_TOL, "|nu_k| decays like w_t^-4");
        sups.push(json!({ "k": k, "sup_ratio": sup, "nu_slope": slope }));
    }
    report.data = Value::Array(sups);
    report.tables.push(table);
    Ok(report)
}

fn rate_entries(rates: &[g2glue_core::cone_spectral::HomogeneousRate]) -> Vec<Value> {
    rates.iter().map(|r| json!({ "rate": r.lambda.to_string(), "dim": r.dimension, "case": r.case.label() })).collect()
}

fn cone_rates(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(Suite::ConeRates.id());
    let iv = RateInterval::half_open(cfg.cone.from.clone(), cfg.cone.to.clone());
    let link = LinkSpectrum::so3_covering(&required_ceiling(cfg.cone.degree, 4, &iv)?);
    let rates = critical_rates(&link, cfg.cone.degree, &iv)?;
    let mut table = Table::new("rates", &["rate", "dim", "case"]);
    for r in &rates {
        table.push(vec![r.lambda.to_string(), r.dimension.to_string(), r.case.label().into()]);
    }
    let totals: serde_json::Map<String, Value> =
        rate_dimensions(&rates).into_iter().map(|(l, d)| (l.to_string(), d.into())).collect();
    report.reported(
        &format!("degree {} rates in [{}, {})", cfg.cone.degree, cfg.cone.from, cfg.cone.to),
        Value::Object(totals.clone()),
        Value::Null,
        "orders of homogeneous harmonic forms on the cone over S^3/SO(3)",
    );
    report.data = json!({
        "degree": cfg.cone.degree,
        "from": cfg.cone.from.to_string(),
        "to": cfg.cone.to.to_string(),
        "rates": rate_entries(&rates),
        "dimensions": totals,
    });
    report.tables.push(table);
    Ok(report)
}

fn cone_index(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(Suite::ConeIndex.id());
    let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let so3 = LinkSpectrum::so3(12);
    let one = critical_rates(&so3, 1, &RateInterval::half_open(q(-2, 1), q(0, 1)))?;
    report.equal("degree 1 rates in [-2, 0)", one.len(), 0, "no harmonic 1-forms of order in [-2, 0)");
    let two = critical_rates(&so3, 2, &RateInterval::half_open(q(-399, 100), q(0, 1)))?;
    let dims: Vec<(String, u64)> = rate_dimensions(&two).into_iter().map(|(l, d)| (l.to_string(), d)).collect();
    report.equal(
        "degree 2 rates in [-4 + 1/100, 0)",
        dims,
        vec![("-2".to_string(), 6)],
        "the only critical rate of 2-forms in (-4, 0) is -2, of dimension 6",
    );
    let logs = log_kernel_check(&so3, 2, &Surd::int(-2))?;
    report.holds("no log terms at -2", logs, logs.into(), "harmonic 2-forms of order -2 are homogeneous");
    let jump = index_change(&so3, 2, &q(-3, 1), &q(-1, 1))?;
    report.equal("index jump across -2", jump, 6, "the index changes by the kernel dimension at -2");
    match index_change(&so3, cfg.cone.degree, &cfg.cone.from, &cfg.cone.to) {
        Ok(n) => report.reported(
            &format!("degree {} index change over ({}, {})", cfg.cone.degree, cfg.cone.from, cfg.cone.to),
            n.into(),
            Value::Null,
            "sum of kernel dimensions over the critical rates in the interval",
        ),
        Err(e) => report.reported(
            &format!("degree {} index change over ({}, {})", cfg.cone.degree, cfg.cone.from, cfg.cone.to),
            e.to_string().into(),
            Value::Null,
            "sum of kernel dimensions over the critical rates in the interval",
        ),
    }
    report.data = json!({ "degree_two_rates": rate_entries(&two) });
    Ok(report)
}

fn cone_oracle() -> Result<Report, CliError> {
    let mut report = Report::new(Suite::ConeOracle.id());
    let mut table = Table::new("spectrum", &["m", "eigenvalue", "multiplicity", "parity", "so3"]);
    let mut so3 = Vec::new();
    for m in 0..=8u32 {
        let c = s3_function_spectrum_check(m)?;
        report.equal(
            &format!("S^3 eigenvalue m = {m}"),
            (c.eigenvalue, c.residual),
            (u64::from(m * (m + 2)), 0.0),
            "restrictions of harmonic polynomials of degree m have eigenvalue m(m+2)",
        );
        if c.descends_to_so3 && c.eigenvalue <= 24 {
            so3.push(c.eigenvalue);
        }
        table.push(vec![
            m.to_string(),
            c.eigenvalue.to_string(),
            c.multiplicity.to_string(),
            json(&c.parity).as_str().unwrap_or_default().to_string(),
            c.descends_to_so3.to_string(),
        ]);
    }
    report.equal("SO(3) eigenvalues up to 24", so3, vec![0, 8, 24], "only even degrees descend to S^3/SO(3)");
    let forms = order_minus_two_forms();
    report.equal("order -2 harmonic 2-forms", forms.len(), 6, "six independent harmonic 2-forms of order -2 on R^4 \\ 0");
    for f in &forms {
        match harmonic_oracle_r4(f) {
            Ok(res) => report.at_most(&format!("{} harmonic", f.name), res, 0.0, "symbolic Laplacian residual vanishes"),
            Err(e) => report.error(&format!("{} harmonic", f.name), e, "symbolic Laplacian residual vanishes"),
        }
    }
    report.tables.push(table);
    Ok(report)
}

fn rates_jk(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(Suite::RatesJk.id());
    let r = &cfg.rates;
    let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let pieces = match r.table {
        TableKind::Naive => naive_torsion_table(),
        TableKind::Refined => refined_torsion_table(&r.gamma),
    };
    let bound = torsion_exponent(&pieces, &r.beta, &r.big_b)?;
    let eps = -r.beta.clone();
    let (kappa, linf) = match r.table {
        TableKind::Naive => {
            let law = "weighted torsion exponent (4/5)(2 - beta) at B = -1/5";
            if r.big_b == q(-1, 5) {
                let expected = TExponent::Finite(q(4, 5) * (q(2, 1) - &r.beta));
                report.equal("torsion exponent", bound.exponent.clone(), expected, law);
            } else {
                report.reported("torsion exponent", json(&bound.exponent), Value::Null, law);
            }
            (q(8, 5), q(3, 5) - &eps)
        }
        TableKind::Refined => {
            report.equal(
                "torsion exponent",
                bound.exponent.clone(),
                TExponent::Finite(q(13, 5)),
                "refined weighted torsion exponent 13/5",
            );
            (q(13, 5), q(8, 5) - &eps)
        }
    };
    let f = kappa_feasibility(&kappa, &r.beta, &eps, &bound.exponent);
    report.holds(
        &format!("kappa = {kappa} feasible"),
        f.feasible(),
        json(&f),
        "kappa > 1 - beta + alpha with beta in (-4, 0), alpha = -beta, kappa within the torsion exponent",
    );
    report.equal(
        "L-inf exponent",
        f.linf_exponent.to_string(),
        linf.to_string(),
        "correction is O(t^(kappa - 1 + beta)) in L-inf",
    );
    report.data = json!({
        "table": r.table,
        "beta": r.beta.to_string(),
        "B": r.big_b.to_string(),
        "exponent": bound.exponent,
        "dominant_region": bound.dominant_region,
        "feasibility": f,
    });
    Ok(report)
}

fn kummer_fixed_points(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(Suite::KummerFixedPoints.id());
    let (a, b, g) = (TorusIsometry::alpha(), TorusIsometry::beta(), TorusIsometry::gamma());
    for (name, el) in [("alpha", &a), ("beta", &b), ("gamma", &g)] {
        let locus = fixed_point_tori(el);
        let dims: Vec<usize> = match &locus {
            FixedLocus::Tori(t) => t.iter().map(|x| x.dimension()).collect(),
            _ => Vec::new(),
        };
        let dimension = dims.first().copied().filter(|d| dims.iter().all(|x| x == d));
        report.equal(
            &format!("{name} fixed tori"),
            json!({ "tori": locus.count(), "dimension": dimension }),
            json!({ "tori": 16, "dimension": 3 }),
            "fixed set is 16 copies of T^3");
    }
    let s = singular_components();
    let counts: Vec<usize> = s.counts.iter().filter(|c| !c.identity).map(|c| c.tori).collect();
    report.equal(
        "fixed tori per element",
        counts,
        vec![16, 16, 16, 0, 0, 0, 0],
        "alpha, beta, gamma each fix 16 tori; beta gamma, gamma alpha, alpha beta, alpha beta gamma act freely",
    );
    report.equal("singular components", s.components.len(), 12, "the singular set of T^7/Gamma has 12 components");
    report.equal("orbit sizes", s.orbit_sizes.clone(), vec![4; 12], "the other generators act freely on the fixed tori");
    report.holds("components disjoint", s.disjoint, s.disjoint.into(), "no two singular components meet");
    let computed = orbifold_b2();
    let b2 = cfg.kummer.b2.unwrap_or(computed);
    report.reported(
        "approximate kernel dimension",
        (12 + b2).into(),
        Value::Null,
        "12 cut-off harmonic forms plus b^2(T^7/Gamma)",
    );
    report.data = json!({
        "counts": s.counts.iter().map(|c| json!({ "element": c.element, "tori": c.tori })).collect::<Vec<_>>(),
        "components": json(&s.components),
        "orbit_sizes": s.orbit_sizes,
        "b2_orbifold": b2,
        "b2_computed": computed,
    });
    Ok(report)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn kummer_torsion(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(Suite::KummerTorsion.id());
    let k = &cfg.kummer;
    let rows = torsion_table(&k.t, k.samples, k.beta)?;
    let mut table = Table::new(
        "torsion",
        &["t", "positive", "sup_psi", "sup_grad_psi", "weighted_c0", "sup_ale_difference", "failure"],
    );
    for r in &rows {
        table.push(vec![
            r.t.to_string(),
            r.positive.to_string(),
            opt(r.sup_psi),
            opt(r.sup_grad_psi),
            opt(r.weighted_c0),
            r.sup_ale_difference.to_string(),
            r.failure.clone().unwrap_or_default(),
        ]);
    }
    let slope_law = "sup |psi^t| = O(t^4)";
    let weighted_law = "weighted C^0 torsion norm decays at least like t^3.9";
    match decay_from_rows(rows.clone(), k.samples, k.beta) {
        Ok(fit) => {
            report.near("sup |psi^t| slope", fit.slope, 4.0, 0.1, slope_law);
            report.holds("weighted C^0 slope", fit.weighted_slope >= 3.9, fit.weighted_slope.into(), weighted_law);
            report.reported("ALE difference slope", fit.ale_difference_slope.into(), 4.0.into(), "|d tau_1| on the annulus");
            report.reported("halving ratios", json(&fit.halving_ratios), 16.0.into(), "sup |psi^t| / sup |psi^(t/2)|");
            report.data = json!({ "fit": json(&fit) });
        }
        Err(e) => {
            report.error("sup |psi^t| slope", &e, slope_law);
            report.error("weighted C^0 slope", &e, weighted_law);
            report.data = json!({ "rows": json(&rows) });
        }
    }
    let t0 = rows.iter().filter(|r| r.positive).map(|r| r.t).fold(None, |m: Option<f64>, t| Some(m.map_or(t, |x| x.max(t))));
    report.reported("largest admissible t", json(&t0), Value::Null, "phi^t is positive on the whole annulus");
    let mut outside = 0.0f64;
    let mut failure = None;
    for &t in &k.t {
        let chart = GluingChart::new(1, t)?;
        let forms = chart.forms()?;
        for s in [ZETA / 8.0, ZETA / 5.0, 0.24 * ZETA, 0.51 * ZETA, 0.75 * ZETA, 0.9 * ZETA] {
            match chart.torsion_form(&forms, chart.radius_at(s)) {
                Ok(p) => outside = outside.max(p.norm),
                Err(e) => failure = Some(e),
            }
        }
    }
    let law = "psi^t vanishes outside zeta/4 < s < zeta/2";
    match failure {
        None => report.at_most("torsion off the annulus", outside, 1e-14, law),
        Some(e) => report.error("torsion off the annulus", e, law),
    }
    report.tables.push(table);
    Ok(report)
}

fn torus_solve(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(Suite::TorusSolve.id());
    let t = &cfg.torus;
    let config = SolverConfig { n: t.n, eps: t.eps, seed: t.seed, tol: t.tol, max_iter: t.max_iter, mode: t.mode };
    let problem = make_model_problem::<f64>(&config)?;
    let solution = iterate(&problem)?;
    let s = &solution.report;
    report.holds(
        &format!("converged within {} iterations", t.max_iter),
        s.converged,
        s.iterations.into(),
        "the Picard iteration contracts",
    );
    report.at_most("torsion residual", s.residual, t.tol, "sup |d phi~| and sup |d Theta(phi~)| vanish");
    report.at_most("distance to phi_0", s.distance_to_flat, t.tol, "the fixed point is the flat structure");
    report.at_most("zero mode shift", s.zero_mode_shift, 1e-14, "the cohomology class of phi is preserved");
    let mut table = Table::new("iteration", &["step", "update", "contraction"]);
    for (i, u) in s.updates.iter().enumerate() {
        let q = if i == 0 { None } else { s.contraction_factors.get(i - 1).copied() };
        table.push(vec![(i + 1).to_string(), u.to_string(), opt(q)]);
    }
    report.tables.push(table);
    if let Some(path) = &t.dump {
        let mut bytes = Vec::new();
        solution.phi_tilde.write_le(&mut bytes)?;
        write_atomic(path, &bytes)?;
    }
    report.data = json(s);
    Ok(report)
}
