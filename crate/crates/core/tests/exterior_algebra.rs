use g2glue_core::exterior_algebra::{
    cross_product, flat_hyperkaehler_triple, hodge_star, interior_product, metric_from_g2, phi0, pi1_project,
    product_dual, product_structure, psi0, theta, theta_split, wedge, Form, Metric, Vector,
};
use g2glue_core::Error;
use proptest::prelude::*;

fn mono(dim: usize, idx: &[usize]) -> Form<f64> {
    Form::monomial(dim, idx).unwrap()
}

fn close(a: &Form<f64>, b: &Form<f64>, tol: f64) -> bool {
    a.dim() == b.dim() && a.degree() == b.degree() && a.try_sub(b).unwrap().max_abs() <= tol
}

/// Parity of a permutation given as a list of distinct integers.
fn parity(p: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn det_small(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            s * m[0][j] * det_small(&minor)
        })
        .sum()
}

/// Oracle evaluation `a(v_1, .., v_p) = sum_I a_I det(v_k[I])`, independent of the interior product.
fn eval(a: &Form<f64>, vs: &[Vec<f64>]) -> f64 {
    a.iter()
        .map(|(mask, c)| {
            let idx: Vec<usize> = (0..a.dim()).filter(|&i| mask & (1 << i) != 0).collect();
            let m: Vec<Vec<f64>> = vs.iter().map(|v| idx.iter().map(|&i| v[i]).collect()).collect();
            c * det_small(&m)
        })
        .sum()
}

fn e(dim: usize, i: usize) -> Vector<f64> {
    Vector::basis(dim, i).unwrap()
}

#[test]
fn wedge_examples() {
    assert!(close(&wedge(&mono(7, &[0]), &mono(7, &[1])).unwrap(), &mono(7, &[0, 1]), 0.0));
    assert!(close(&wedge(&mono(7, &[1]), &mono(7, &[0])).unwrap(), &-mono(7, &[0, 1]), 0.0));
}

#[test]
fn phi0_wedge_psi0_is_seven_volumes() {
    // oracle: pair every term of phi_0 with every term of *phi_0 by explicit permutation parity
    let phi = phi0::<f64>();
    let psi = psi0::<f64>();
    let mut total = 0.0;
    for (ma, a) in phi.iter() {
        for (mb, b) in psi.iter() {
            if ma & mb != 0 || a == 0.0 || b == 0.0 {
                continue;
            }
            let mut perm: Vec<usize> = (0..7).filter(|&i| ma & (1 << i) != 0).collect();
            perm.extend((0..7).filter(|&i| mb & (1 << i) != 0));
            total += parity(&perm) * a * b;
        }
    }
    assert_eq!(total, 7.0);
    let w = wedge(&phi, &psi).unwrap();
    assert!(close(&w, &mono(7, &[0, 1, 2, 3, 4, 5, 6]).scale(7.0), 1e-14));
}

#[test]
fn coordinate_star_and_conformal_scaling() {
    let g0 = Metric::identity(7).unwrap();
    assert!(close(&hodge_star(&g0, &mono(7, &[0, 1, 2])).unwrap(), &mono(7, &[3, 4, 5, 6]), 0.0));
    let c: f64 = 1.7;
    let g = Metric::diagonal(&[c * c; 7]).unwrap();
    // oracle: sqrt(det g) = c^7, raising three indices gives c^-6
    let expected = c.powi(7) * c.powi(-6);
    let s = hodge_star(&g, &mono(7, &[0, 1, 2])).unwrap();
    assert!(close(&s, &mono(7, &[3, 4, 5, 6]).scale(expected), 1e-13));
}

#[test]
fn star_of_phi0_matches_product_formula() {
    let omega = flat_hyperkaehler_triple::<f64>();
    let phi = product_structure(&omega).unwrap();
    let psi = product_dual(&omega).unwrap();
    assert!(close(&theta(&phi).unwrap(), &psi, 1e-13));
    // phi_0 is the product structure after reversing the first two coordinates
    let mut flip = vec![0.0; 49];
    for i in 0..7 {
        flip[i * 8] = if i < 2 { -1.0 } else { 1.0 };
    }
    assert!(close(&phi.pullback(&flip).unwrap(), &phi0(), 0.0));
    assert!(close(&psi.pullback(&flip).unwrap(), &psi0(), 0.0));
    let g0 = Metric::identity(7).unwrap();
    assert!(close(&hodge_star(&g0, &phi0()).unwrap(), &psi.pullback(&flip).unwrap(), 0.0));
}

#[test]
fn interior_examples() {
    assert!(close(&interior_product(&e(7, 0), &mono(7, &[0, 1])).unwrap(), &mono(7, &[1]), 0.0));
    assert!(close(&interior_product(&e(7, 1), &mono(7, &[0, 1])).unwrap(), &-mono(7, &[0]), 0.0));
    let expected = mono(7, &[1, 2]) + mono(7, &[3, 4]) + mono(7, &[5, 6]);
    assert!(close(&interior_product(&e(7, 0), &phi0()).unwrap(), &expected, 0.0));
    assert!(matches!(
        interior_product(&e(7, 0), &Form::constant(7, 1.0).unwrap()),
        Err(Error::InvalidDegree { .. })
    ));
}

#[test]
fn metric_reconstruction_examples() {
    let (g, vol) = metric_from_g2(&phi0::<f64>()).unwrap();
    let id = Metric::<f64>::identity(7).unwrap();
    for (a, b) in g.entries().iter().zip(id.entries()) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((vol - 1.0).abs() < 1e-12);

    let c: f64 = 1.3;
    let (gc, volc) = metric_from_g2(&phi0::<f64>().scale(c * c * c)).unwrap();
    for (a, b) in gc.entries().iter().zip(id.entries()) {
        assert!((a - c * c * b).abs() < 1e-12);
    }
    assert!((volc - c.powi(7)).abs() < 1e-11);
}

#[test]
fn small_perturbation_keeps_metric_close() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let coeffs: Vec<f64> = (0..35).map(|_| rng.random_range(-1.0..1.0)).collect();
        let chi = Form::from_coeffs(7, 3, coeffs).unwrap();
        let chi = chi.scale(1e-3 / chi.coeff_norm());
        let (g, _) = metric_from_g2(&(phi0() + chi)).unwrap();
        let dev: f64 = g
            .entries()
            .iter()
            .enumerate()
            .map(|(k, &x)| (x - if k % 8 == 0 { 1.0 } else { 0.0 }).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(dev <= 1e-2, "deviation {dev}");
    }
}

#[test]
fn cross_product_examples() {
    let phi = phi0::<f64>();
    let g = Metric::identity(7).unwrap();
    let x = |u, v| cross_product(&phi, &g, &e(7, u), &e(7, v)).unwrap();
    assert_eq!(x(0, 1), e(7, 2));
    assert_eq!(x(0, 0), Vector::zero(7).unwrap());
    // oracle: the unique w with <w, e_b> = phi(e_1, e_4, e_b) for all b
    let w: Vec<f64> = (0..7)
        .map(|b| eval(&phi, &[e(7, 0).into_components(), e(7, 3).into_components(), e(7, b).into_components()]))
        .collect();
    assert_eq!(w, e(7, 4).into_components());
    assert_eq!(x(0, 3), e(7, 4));
}

#[test]
fn theta_examples() {
    assert!(close(&theta(&phi0::<f64>()).unwrap(), &psi0(), 1e-13));
    let lambda: f64 = 2.0;
    let scaled = theta(&phi0::<f64>().scale(lambda * lambda * lambda)).unwrap();
    assert!(close(&scaled, &psi0().scale(lambda.powi(4)), 1e-12));
}

#[test]
fn theta_split_zero() {
    let (t, f) = theta_split(&phi0::<f64>(), &Form::zero(7, 3).unwrap()).unwrap();
    assert_eq!(t.max_abs(), 0.0);
    assert!(f.max_abs() < 1e-15);
}

fn unit_chi() -> Form<f64> {
    let coeffs: Vec<f64> = (0..35).map(|k| ((k * 37 % 11) as f64 - 5.0) / 5.0).collect();
    let chi = Form::from_coeffs(7, 3, coeffs).unwrap();
    chi.scale(1.0 / chi.coeff_norm())
}

#[test]
fn theta_split_is_quadratic() {
    let chi = unit_chi();
    let norm_f = |s: f64| theta_split(&phi0(), &chi.scale(s)).unwrap().1.coeff_norm();
    let ratio = norm_f(1e-2) / norm_f(1e-3);
    assert!((ratio.log10() - 2.0).abs() <= 0.05, "ratio {ratio}");
    let s: Vec<f64> = vec![1e-1, 1e-2, 1e-3, 1e-4];
    let y: Vec<f64> = s.iter().map(|&x| norm_f(x).ln()).collect();
    let x: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let (mx, my) = (x.iter().sum::<f64>() / 4.0, y.iter().sum::<f64>() / 4.0);
    let slope = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
        / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
    assert!((slope - 2.0).abs() <= 0.05, "slope {slope}");
}

#[test]
fn theta_split_linear_part_is_linear() {
    let chi = unit_chi();
    let (t1, _) = theta_split(&phi0(), &chi).unwrap();
    for s in [1e-2, 1e-3] {
        let (ts, _) = theta_split(&phi0(), &chi.scale(s)).unwrap();
        assert!(ts.try_sub(&t1.scale(s)).unwrap().coeff_norm() <= 1e-10);
    }
    // T = -d/ds Theta(phi + s chi) at s = 0; for phi_0 a multiple of itself: T(phi0) = -(4/3) psi0
    let (tphi, _) = theta_split(&phi0(), &phi0()).unwrap();
    assert!(close(&tphi, &psi0().scale(-4.0 / 3.0), 1e-8));
}

#[test]
fn theta_split_rejects_degenerate_sum() {
    assert!(matches!(theta_split(&phi0::<f64>(), &-phi0::<f64>()), Err(Error::NotG2(_))));
}

#[test]
fn pi1_examples() {
    let p = pi1_project(&phi0::<f64>(), &phi0()).unwrap();
    assert!(close(&p, &phi0(), 1e-14));
    assert_eq!(pi1_project(&phi0::<f64>(), &mono(7, &[0, 1, 3])).unwrap().max_abs(), 0.0);
    let chi = unit_chi();
    let once = pi1_project(&phi0(), &chi).unwrap();
    let twice = pi1_project(&phi0(), &once).unwrap();
    assert!(close(&once, &twice, 1e-12));
}

#[test]
fn inner_product_identity_on_phi_line() {
    // <chi, phi> vol = chi ^ Theta(phi)
    let phi = phi0::<f64>() + unit_chi().scale(0.2);
    let (g, vol) = metric_from_g2(&phi).unwrap();
    let chi = unit_chi();
    let lhs = g.inner(&chi, &phi).unwrap() * vol;
    let rhs = wedge(&chi, &theta(&phi).unwrap()).unwrap().coeffs()[0];
    assert!((lhs - rhs).abs() < 1e-12);
    assert!((g.inner(&phi, &phi).unwrap() - 7.0).abs() < 1e-12);
}

#[test]
fn json_round_trip() {
    let s = serde_json::to_string(&phi0::<f64>()).unwrap();
    assert!(s.starts_with(r#"{"dim":7,"degree":3,"coeffs":{"123":1.0,"145":1.0"#));
    let back: Form<f64> = serde_json::from_str(&s).unwrap();
    assert_eq!(back, phi0());
}

/// Signed permutation matrices preserving phi_0, found by checking the term list.
fn g2_signed_permutations() -> Vec<Vec<f64>> {
    fn perms(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !cur.contains(&i) {
                cur.push(i);
                perms(k, cur, out);
                cur.pop();
            }
        }
    }
    let phi = phi0::<f64>();
    let mut all = Vec::new();
    perms(7, &mut Vec::new(), &mut all);
    let mut found = Vec::new();
    for p in &all {
        for signs in 0u32..128 {
            let sg = |i: usize| if signs & (1 << i) != 0 { -1.0 } else { 1.0 };
            // x_i -> s_i x_{p(i)}: dx_I pulls back to prod s_i dx_{p(I)}
            let ok = phi.iter().filter(|(_, c)| *c != 0.0).all(|(mask, c)| {
                let idx: Vec<usize> = (0..7).filter(|&i| mask & (1 << i) != 0).collect();
                let image: Vec<usize> = idx.iter().map(|&i| p[i]).collect();
                let sign: f64 = idx.iter().map(|&i| sg(i)).product();
                let coeff = phi.get(&image).unwrap();
                (coeff * sign - c).abs() < 1e-15
            });
            if ok {
                let mut a = vec![0.0; 49];
                for i in 0..7 {
                    a[i * 7 + p[i]] = sg(i);
                }
                found.push(a);
            }
        }
    }
    found
}

#[test]
fn g2_signed_permutation_group_order() {
    let group = g2_signed_permutations();
    assert_eq!(group.len(), 1344);
    for a in group.iter().step_by(97) {
        assert!(close(&phi0().pullback(a).unwrap(), &phi0(), 0.0));
        assert!(close(&psi0().pullback(a).unwrap(), &psi0(), 0.0));
    }
}

fn arb_form(dim: usize, degree: usize) -> impl Strategy<Value = Form<f64>> {
    let n = Form::<f64>::zero(dim, degree).unwrap().coeffs().len();
    prop::collection::vec(-1.0f64..1.0, n).prop_map(move |c| Form::from_coeffs(dim, degree, c).unwrap())
}

fn arb_pair() -> impl Strategy<Value = (Form<f64>, Form<f64>)> {
    (1usize..=7, 0usize..=7, 0usize..=7)
        .prop_filter("degrees fit", |(n, p, q)| p + q <= *n)
        .prop_flat_map(|(n, p, q)| (arb_form(n, p), arb_form(n, q)))
}

fn arb_spd7() -> impl Strategy<Value = Metric<f64>> {
    prop::collection::vec(-0.5f64..0.5, 49).prop_map(|a| {
        let mut m = vec![0.0; 49];
        for i in 0..7 {
            for j in 0..7 {
                m[i * 7 + j] = (0..7).map(|k| a[i * 7 + k] * a[j * 7 + k]).sum::<f64>();
            }
            m[i * 8] += 0.5;
        }
        Metric::new(7, m).unwrap()
    })
}

proptest! {
    #[test]
    fn graded_commutativity((a, b) in arb_pair()) {
        let s = if (a.degree() * b.degree()) % 2 == 0 { 1.0 } else { -1.0 };
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap().scale(s);
        prop_assert!(close(&ab, &ba, 1e-12));
    }

    #[test]
    fn wedge_matches_shuffle_evaluation((a, b) in arb_pair(), seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (n, p, q) = (a.dim(), a.degree(), b.degree());
        let vs: Vec<Vec<f64>> = (0..p + q).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        // (a ^ b)(v) = sum over (p, q) shuffles of sign * a(v_S) b(v_S^c)
        let mut expected = 0.0;
        for mask in 0u32..(1 << (p + q)) {
            if mask.count_ones() as usize != p {
                continue;
            }
            let first: Vec<usize> = (0..p + q).filter(|&i| mask & (1 << i) != 0).collect();
            let second: Vec<usize> = (0..p + q).filter(|&i| mask & (1 << i) == 0).collect();
            let perm: Vec<usize> = first.iter().chain(&second).copied().collect();
            let va: Vec<Vec<f64>> = first.iter().map(|&i| vs[i].clone()).collect();
            let vb: Vec<Vec<f64>> = second.iter().map(|&i| vs[i].clone()).collect();
            expected += parity(&perm) * eval(&a, &va) * eval(&b, &vb);
        }
        prop_assert!((eval(&a.wedge(&b).unwrap(), &vs) - expected).abs() < 1e-10);
    }

    #[test]
    fn odd_forms_square_to_zero(a in (2usize..=7).prop_flat_map(|n| arb_form(n, 1))) {
        prop_assert!(a.wedge(&a).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn star_is_involutive_in_seven_dimensions(g in arb_spd7(), p in 0usize..=7, seed in prop::collection::vec(-1.0f64..1.0, 35)) {
        let n = Form::<f64>::zero(7, p).unwrap().coeffs().len();
        let a = Form::from_coeffs(7, p, seed[..n].to_vec()).unwrap();
        let back = g.star(&g.star(&a).unwrap()).unwrap();
        prop_assert!(close(&back, &a, 1e-12));
        // <a, a> vol = a ^ *a
        let lhs = g.inner(&a, &a).unwrap() * g.volume();
        let rhs = a.wedge(&g.star(&a).unwrap()).unwrap().coeffs()[0];
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn interior_is_nilpotent((a, _) in arb_pair(), v in prop::collection::vec(-1.0f64..1.0, 7)) {
        prop_assume!(a.degree() >= 2);
        let v = Vector::new(v[..a.dim()].to_vec()).unwrap();
        prop_assert!(a.interior(&v).unwrap().interior(&v).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn cross_product_is_orthogonal(chi in arb_form(7, 3), u in prop::collection::vec(-1.0f64..1.0, 7), v in prop::collection::vec(-1.0f64..1.0, 7)) {
        let phi = phi0() + chi.scale(0.05);
        let (g, _) = metric_from_g2(&phi).unwrap();
        let (u, v) = (Vector::new(u).unwrap(), Vector::new(v).unwrap());
        let w = cross_product(&phi, &g, &u, &v).unwrap();
        prop_assert!(g.apply(&w, &u).abs() < 1e-12);
        prop_assert!(g.apply(&w, &v).abs() < 1e-12);
        let w2 = cross_product(&phi, &g, &v, &u).unwrap();
        for (a, b) in w.components().iter().zip(w2.components()) {
            prop_assert!((a + b).abs() < 1e-14);
        }
    }

    #[test]
    fn theta_is_equivariant_under_signed_permutations(k in 0usize..1344) {
        let group = g2_signed_permutations_cached();
        let a = &group[k];
        let lhs = theta(&phi0::<f64>().pullback(a).unwrap()).unwrap();
        let rhs = psi0::<f64>().pullback(a).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn theta_is_equivariant_under_linear_maps(m in prop::collection::vec(-0.2f64..0.2, 49), chi in arb_form(7, 3)) {
        let mut a = m;
        for i in 0..7 {
            a[i * 8] += 1.0;
        }
        let phi = phi0() + chi.scale(0.1);
        let lhs = theta(&phi.pullback(&a).unwrap()).unwrap();
        let rhs = theta(&phi).unwrap().pullback(&a).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-11 * (1.0 + rhs.max_abs())));
    }

    #[test]
    fn pi1_is_idempotent(chi in arb_form(7, 3), x in arb_form(7, 3)) {
        let phi = phi0() + chi.scale(0.1);
        let once = pi1_project(&phi, &x).unwrap();
        prop_assert!(close(&pi1_project(&phi, &once).unwrap(), &once, 1e-12));
        prop_assert!(close(&pi1_project(&phi, &phi).unwrap(), &phi, 1e-12));
    }

    #[test]
    fn json_round_trip_any_form((a, _) in arb_pair()) {
        let back: Form<f64> = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        prop_assert_eq!(back, a);
    }
}

fn g2_signed_permutations_cached() -> &'static [Vec<f64>] {
    static GROUP: std::sync::OnceLock<Vec<Vec<f64>>> = std::sync::OnceLock::new();
    GROUP.get_or_init(g2_signed_permutations)
}
