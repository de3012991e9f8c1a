use std::collections::BTreeSet;

use g2glue_core::eguchi_hanson::{hyperkaehler_triple, rescale_basis, EhChart};
use g2glue_core::exterior_algebra::{metric_from_g2, product_structure, Form};
use g2glue_core::kummer::*;
use g2glue_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn gamma_is_z2_cubed() {
    let g = gamma_elements();
    assert_eq!(g.len(), 8);
    let maps: BTreeSet<TorusIsometry> = g.iter().map(|e| e.map).collect();
    for a in &g {
        assert!(a.map.compose(&a.map).is_identity(), "{}", a.name);
        for b in &g {
            assert_eq!(a.map.compose(&b.map), b.map.compose(&a.map));
            assert!(maps.contains(&a.map.compose(&b.map)));
        }
    }
    let (a, b) = (TorusIsometry::alpha(), TorusIsometry::beta());
    assert_eq!(a.compose(&b), b.compose(&a));
}

#[test]
fn gamma_preserves_flat_structure() {
    let phi = torus_phi0::<f64>();
    for e in gamma_elements() {
        assert!(e.map.preserves(&phi), "{}", e.name);
    }
    assert!(metric_from_g2(&phi).is_ok());
}

#[test]
fn literal_beta_preserves_no_relabelling() {
    let (a, c) = (TorusIsometry::alpha(), TorusIsometry::gamma());
    let mut literal = 0;
    let mut corrected = 0;
    for p in permutations(7) {
        let perm: [usize; 7] = p.try_into().unwrap();
        let phi = relabelled_phi0::<f64>(&perm);
        let base = a.preserves(&phi) && c.preserves(&phi);
        literal += (base && TorusIsometry::beta_literal().preserves(&phi)) as usize;
        corrected += (base && TorusIsometry::beta().preserves(&phi)) as usize;
    }
    assert_eq!(literal, 0);
    assert_eq!(corrected, 168);
    // the literal map also fixes 2-tori instead of 3-tori
    let FixedLocus::Tori(t) = fixed_point_tori(&TorusIsometry::beta_literal()) else { panic!() };
    assert_eq!((t.len(), t[0].dimension()), (32, 2));
}

#[test]
fn fixed_tori_counts() {
    let locus = fixed_point_tori(&TorusIsometry::alpha());
    let FixedLocus::Tori(tori) = &locus else { panic!("alpha fixes tori") };
    assert_eq!(tori.len(), 16);
    assert!(tori.iter().all(|t| t.free == vec![4, 5, 6]));
    for g in [TorusIsometry::beta(), TorusIsometry::gamma()] {
        let l = fixed_point_tori(&g);
        assert_eq!(l.count(), 16);
        let FixedLocus::Tori(t) = l else { panic!() };
        assert!(t.iter().all(|x| x.dimension() == 3));
    }
    let (a, b, c) = (TorusIsometry::alpha(), TorusIsometry::beta(), TorusIsometry::gamma());
    for g in [b.compose(&c), c.compose(&a), a.compose(&b), a.compose(&b).compose(&c)] {
        assert_eq!(fixed_point_tori(&g), FixedLocus::Empty);
    }
    assert_eq!(fixed_point_tori(&TorusIsometry::identity()), FixedLocus::Everything);
}

/// Quarter-lattice points of `T^7` fixed by `g`, counted by brute force.
fn lattice_fixed(g: &TorusIsometry) -> Vec<[u8; 7]> {
    let mut out = Vec::new();
    for code in 0..(1u32 << 14) {
        let x: [u8; 7] = std::array::from_fn(|i| ((code >> (2 * i)) & 3) as u8);
        if (0..7).all(|i| g.apply_quarters(i, x[i]) == x[i]) {
            out.push(x);
        }
    }
    out
}

#[test]
fn fixed_tori_agree_with_lattice_oracle() {
    for e in gamma_elements().into_iter().filter(|e| !e.map.is_identity()) {
        let pts = lattice_fixed(&e.map);
        let expected = match fixed_point_tori(&e.map) {
            FixedLocus::Tori(t) => t.iter().map(|x| 4usize.pow(x.dimension() as u32)).sum(),
            _ => 0,
        };
        assert_eq!(pts.len(), expected, "{}", e.name);
    }
}

#[test]
fn twelve_disjoint_components() {
    let s = singular_components();
    assert_eq!(s.components.len(), 12);
    assert_eq!(s.orbit_sizes, vec![4; 12]);
    assert!(s.free_action && s.disjoint);
    let counts: Vec<usize> = s.counts.iter().filter(|c| !c.identity).map(|c| c.tori).collect();
    assert_eq!(counts, vec![16, 16, 16, 0, 0, 0, 0]);
    // oracle: Gamma-orbits of fixed lattice points, grouped by the connected
    // torus they lie on, give 12 classes
    let g = gamma_elements();
    let mut classes = BTreeSet::new();
    for gen in [TorusIsometry::alpha(), TorusIsometry::beta(), TorusIsometry::gamma()] {
        let FixedLocus::Tori(tori) = fixed_point_tori(&gen) else { panic!() };
        for p in lattice_fixed(&gen) {
            let on: Vec<&FixedTorus> = tori.iter().filter(|t| t.pinned.iter().all(|&(i, q)| p[i] == q)).collect();
            assert_eq!(on.len(), 1);
            let orbit: BTreeSet<FixedTorus> = g.iter().map(|h| on[0].image(&h.map)).collect();
            classes.insert(orbit);
        }
    }
    assert_eq!(classes.len(), 12);
}

#[test]
fn flat_orbifold_has_no_harmonic_two_forms() {
    let g = gamma_elements();
    assert_eq!(invariant_form_count(&g, 2), 0);
    assert_eq!(invariant_form_count(&g, 3), 7);
    assert_eq!(orbifold_b2(), 0);
}

fn seven(form: &Form<f64>, dims: usize) -> Form<f64> {
    // places a form on the last four directions of the 7-frame
    let mut out = Form::zero(7, form.degree()).unwrap();
    for (mask, c) in form.iter() {
        let idx: Vec<usize> = (0..dims).filter(|a| mask & (1 << a) != 0).map(|a| a + 3).collect();
        out.add_term(&idx, c).unwrap();
    }
    out
}

#[test]
fn plateaux_are_product_structures() {
    let t = 0.01;
    let chart = GluingChart::new(3, t).unwrap();
    let forms = chart.forms().unwrap();
    let k = chart.k();
    let z = chart.zeta();
    for s in [z / 10.0, z / 5.0, z / 4.0 * 0.999] {
        let r = chart.radius_at(s);
        let (phi, _) = chart.glued_structure(&forms, r).unwrap();
        let w = hyperkaehler_triple(k, r).unwrap().map(|x| seven(&x, 4));
        let product = product_structure(&w).unwrap();
        assert!(phi.try_sub(&product).unwrap().max_abs() < 1e-12);
        let g = chart.metric(&forms, r).unwrap();
        for (i, &x) in g.entries().iter().enumerate() {
            assert!((x - if i % 8 == 0 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
    // beyond zeta/2 the triple is the flat one, written in the g_(k) frame
    let flat = EhChart::new(0.0).unwrap().hyperkaehler_triple();
    for s in [z / 2.0 * 1.001, 0.7 * z] {
        let r = chart.radius_at(s);
        let (phi, _) = chart.glued_structure(&forms, r).unwrap();
        let scales = chart.eh().orthonormal_scales(r);
        let w = flat.clone().map(|x| seven(&rescale_basis(&x.eval(r), &scales), 4));
        assert!(phi.try_sub(&product_structure(&w).unwrap()).unwrap().max_abs() < 1e-12);
    }
    assert!(product_metric_defect(t, &[chart.radius_at(z / 8.0)]).unwrap() < 1e-12);
}

#[test]
fn glued_forms_are_closed() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let t: f64 = rng.random_range(0.001..0.2);
        let chart = GluingChart::new(rng.random_range(1..=12), t).unwrap();
        let forms = chart.forms().unwrap();
        let s = rng.random_range(chart.zeta() / 4.0..chart.zeta() / 2.0);
        let (a, b) = chart.closedness(&forms, chart.radius_at(s)).unwrap();
        assert!(a <= 1e-10 && b <= 1e-10, "t={t} s={s}: {a:e} {b:e}");
    }
}

#[test]
fn torsion_is_supported_on_the_annulus() {
    let chart = GluingChart::new(1, 0.01).unwrap();
    let forms = chart.forms().unwrap();
    let z = chart.zeta();
    for s in [z / 8.0, 3.0 * z / 4.0, z / 5.0, 0.9 * z] {
        let p = chart.torsion_form(&forms, chart.radius_at(s)).unwrap();
        assert!(p.norm <= 1e-14, "s={s}: {:e}", p.norm);
    }
    let p = chart.torsion_form(&forms, chart.radius_at(3.0 * z / 8.0)).unwrap();
    let c = p.norm / 0.01f64.powi(4);
    println!("|psi| at 3 zeta/8, t = 0.01: {:e}, c = {c:.3e}", p.norm);
    assert!(p.norm > 0.0);
}

#[test]
fn large_t_leaves_the_positive_cone() {
    // for these t the sphere of size t is not small against zeta/4
    for t in [0.2, 0.1, 0.05, 0.025] {
        let chart = GluingChart::new(1, t).unwrap();
        let forms = chart.forms().unwrap();
        let res = chart.torsion_form(&forms, chart.radius_at(3.0 * ZETA / 8.0));
        assert!(matches!(res, Err(Error::NotG2(_))), "t={t}");
    }
    let r = torsion_decay_fit(&[0.2, 0.1, 0.05, 0.025], 64, -0.05);
    assert!(matches!(r, Err(Error::DegenerateFit(0))));
    let t0 = positivity_threshold(&[0.025, 0.02, 0.015, 0.0125, 0.01], 64).unwrap();
    println!("largest admissible t: {t0:?}");
    assert!(t0.is_some_and(|t| t < 0.025));
}

#[test]
fn torsion_decays_like_t_to_the_fourth() {
    let fit = torsion_decay_fit::<f64>(&[0.008, 0.004, 0.002, 0.001], 2000, -0.05).unwrap();
    println!("slope {} grad {} weighted {} ale {}", fit.slope, fit.grad_slope, fit.weighted_slope, fit.ale_difference_slope);
    assert!((3.9..=4.1).contains(&fit.slope));
    assert!(fit.weighted_slope >= 3.9);
    assert!((3.9..=4.1).contains(&fit.ale_difference_slope));
    for q in &fit.halving_ratios {
        assert!((q / 16.0f64 - 1.0).abs() <= 0.1, "ratio {q}");
    }
    assert_eq!(fit.t0, Some(0.008));
}

#[test]
fn ale_difference_matches_closed_form() {
    for (t, s) in [(0.01f64, 0.03f64), (0.003, 0.05), (0.2, 0.04)] {
        let k: f64 = t * t * t * t;
        let r = (s / 2.0) * (s / 2.0);
        let f2 = (k + r * r).sqrt();
        let g = k / (f2 + r);
        let dg = -k * (r / f2 + 1.0) / ((f2 + r) * (f2 + r));
        let d = ale_difference(t, r).unwrap();
        assert!((d.get(&[0, 1]).unwrap() - dg * f2 / r).abs() < 1e-12 * (1.0 + dg.abs() * f2 / r));
        assert!((d.get(&[2, 3]).unwrap() - g / f2).abs() < 1e-13);
    }
}

#[test]
fn approximate_kernel() {
    let k = ApproximateKernel::new(0.01, orbifold_b2()).unwrap();
    let summary = k.summary().unwrap();
    assert_eq!(summary.dimension, 12);
    assert_eq!(summary.chart_rank, 12);
    for d in &summary.descriptors {
        assert!(d.jump_at_inner_cutoff <= 1e-12);
        // nu is cut to zero at the chart edge where chi = 1
        assert!(d.jump_at_chart_edge > 0.0);
        assert!(d.l2_squared > 0.0);
    }
    let r = 0.0006;
    assert_eq!(k.pointwise_inner(1, 2, 1, r).unwrap(), 0.0);
    assert!(k.pointwise_inner(1, 1, 1, r).unwrap() > 0.0);
    assert_eq!(ApproximateKernel::new(0.01, 3).unwrap().summary().unwrap().dimension, 15);
}

#[test]
fn chart_validation() {
    assert!(GluingChart::new(0, 0.1).is_err());
    assert!(GluingChart::new(13, 0.1).is_err());
    assert!(GluingChart::new(1, 1.0).is_err());
    assert!(torsion_table(&[0.2, 0.1, 0.05], 10, -0.05).is_err());
    assert!(torsion_table(&[0.4, 0.2, 0.1, 0.05], 10, -0.05).is_err());
    assert!(torsion_table(&[0.2, 0.1, 0.07, 0.05], 10, -0.05).is_err());
}

#[test]
fn single_precision_chart() {
    let chart = GluingChart::<f32>::new(1, 0.01).unwrap();
    let forms = chart.forms().unwrap();
    let p = chart.torsion_form(&forms, chart.radius_at(3.0 * chart.zeta() / 8.0)).unwrap();
    let p64 = GluingChart::<f64>::new(1, 0.01).unwrap();
    let q = p64.torsion_form(&p64.forms().unwrap(), p64.radius_at(3.0 * p64.zeta() / 8.0)).unwrap();
    assert!((p.norm as f64 / q.norm - 1.0).abs() < 0.05);
}

fn element() -> impl Strategy<Value = TorusIsometry> {
    (0usize..8).prop_map(|i| gamma_elements()[i].map)
}

proptest! {
    #[test]
    fn words_stay_in_gamma(word in prop::collection::vec(element(), 0..12)) {
        let g = word.iter().fold(TorusIsometry::identity(), |acc, x| acc.compose(x));
        prop_assert!(gamma_elements().iter().any(|e| e.map == g));
        prop_assert!(g.compose(&g).is_identity());
    }

    #[test]
    fn gamma_permutes_fixed_tori(h in element(), which in 0usize..3, idx in 0usize..16) {
        let gen = [TorusIsometry::alpha(), TorusIsometry::beta(), TorusIsometry::gamma()][which];
        let FixedLocus::Tori(tori) = fixed_point_tori(&gen) else { panic!() };
        let image = tori[idx].image(&h);
        prop_assert!(tori.contains(&image));
    }
}
