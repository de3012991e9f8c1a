//! The standard 3-form on R^7 and the nonlinear maps built from it.

use std::sync::OnceLock;

use super::basis;
use super::form::Form;
use super::metric::{Metric, Vector};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

/// Terms of `phi_0` as 0-based index triples with signs.
pub const PHI0_TERMS: [([usize; 3], i8); 7] = [
    ([0, 1, 2], 1),
    ([0, 3, 4], 1),
    ([0, 5, 6], 1),
    ([1, 3, 5], 1),
    ([1, 4, 6], -1),
    ([2, 3, 6], -1),
    ([2, 4, 5], -1),
];

/// `phi_0 = dx123 + dx145 + dx167 + dx246 - dx257 - dx347 - dx356`.
pub fn phi0<T: Real>() -> Form<T> {
    let mut f = Form::zero(7, 3).expect("valid degree");
    for (idx, s) in PHI0_TERMS {
        f.add_term(&idx, T::lit(s as f64)).expect("valid index");
    }
    f
}

/// `*phi_0` for the Euclidean metric.
pub fn psi0<T: Real>() -> Form<T> {
    Metric::identity(7).and_then(|g| g.star(&phi0())).expect("Euclidean star")
}

/// One contribution `sign * phi_a * phi_b * phi_c` to the bilinear form `B_ij`,
/// with `a`, `b`, `c` coefficient positions.
#[derive(Clone, Copy)]
struct BTerm {
    a: u8,
    b: u8,
    c: u8,
    sign: i8,
}

/// `b_terms()[i * 7 + j]` expands `(e_i ⌟ phi) ^ (e_j ⌟ phi) ^ phi` in the coefficients of `phi`.
fn b_terms() -> &'static [Vec<BTerm>] {
    static TERMS: OnceLock<Vec<Vec<BTerm>>> = OnceLock::new();
    TERMS.get_or_init(|| {
        let full = basis::full_mask(7);
        let mut out = vec![Vec::new(); 49];
        for i in 0..7 {
            for j in 0..7 {
                for &a in basis::masks(7, 3).iter().filter(|&&m| m & (1 << i) != 0) {
                    let p = a & !(1 << i);
                    let sa = if basis::rank_in(a, i) % 2 == 0 { 1 } else { -1 };
                    for &b in basis::masks(7, 3).iter().filter(|&&m| m & (1 << j) != 0) {
                        let q = b & !(1 << j);
                        let sb = if basis::rank_in(b, j) % 2 == 0 { 1 } else { -1 };
                        let spq = basis::wedge_sign(p, q);
                        if spq == 0 {
                            continue;
                        }
                        let c = full & !(p | q);
                        let sign = sa * sb * spq * basis::wedge_sign(p | q, c);
                        let pos = |m: u8| basis::position(7, m) as u8;
                        out[i * 7 + j].push(BTerm { a: pos(a), b: pos(b), c: pos(c), sign });
                    }
                }
            }
        }
        out
    })
}

fn check_three_form<T: Real>(phi: &Form<T>) -> Result<()> {
    if phi.dim() != 7 {
        return Err(Error::DimensionMismatch { expected: 7, found: phi.dim() });
    }
    if phi.degree() != 3 {
        return Err(Error::InvalidDegree { degree: phi.degree(), op: "G2 structure" });
    }
    Ok(())
}

/// The symmetric form `B` with `B_ij vol_0 = (e_i ⌟ phi) ^ (e_j ⌟ phi) ^ phi`.
pub fn bilinear_b<T: Real>(phi: &Form<T>) -> Result<Vec<T>> {
    check_three_form(phi)?;
    let terms = b_terms();
    let mut b = vec![T::zero(); 49];
    let x = phi.coeffs();
    for i in 0..7 {
        for j in i..7 {
            let v: T = terms[i * 7 + j]
                .iter()
                .map(|t| {
                    let v = x[t.a as usize] * x[t.b as usize] * x[t.c as usize];
                    if t.sign > 0 {
                        v
                    } else {
                        -v
                    }
                })
                .sum();
            b[i * 7 + j] = v;
            b[j * 7 + i] = v;
        }
    }
    Ok(b)
}

/// Metric and volume density determined by a positive 3-form.
pub fn metric_from_g2<T: Real>(phi: &Form<T>) -> Result<(Metric<T>, T)> {
    let b = bilinear_b(phi)?;
    if linalg::cholesky(&b, 7).is_none() {
        return Err(Error::NotG2("bilinear form B is not positive definite".into()));
    }
    let det_b = linalg::det(&b, 7);
    let c = T::lit(6.0).powf(T::lit(-2.0 / 9.0)) * det_b.powf(T::lit(-1.0 / 9.0));
    let g = Metric::new(7, b.into_iter().map(|x| x * c).collect())
        .map_err(|_| Error::NotG2("reconstructed metric is not positive definite".into()))?;
    let vol = g.volume();
    Ok((g, vol))
}

/// `Theta(phi) = *_{g(phi)} phi`.
pub fn theta<T: Real>(phi: &Form<T>) -> Result<Form<T>> {
    let (g, _) = metric_from_g2(phi)?;
    g.star(phi)
}

/// Finite difference step: `1e-5`, raised to `eps^(1/3)` for low precision scalars.
fn fd_step<T: Real>() -> T {
    T::lit(1e-5).max(T::tiny().cbrt())
}

/// Splits `Theta(phi + chi) = *phi - T(chi) - F(chi)` into its linear part `T`
/// and remainder `F`.
pub fn theta_split<T: Real>(phi: &Form<T>, chi: &Form<T>) -> Result<(Form<T>, Form<T>)> {
    check_three_form(chi)?;
    let theta_phi = theta(phi)?;
    let size = chi.coeff_norm();
    let t = if size == T::zero() {
        Form::zero(7, 4)?
    } else {
        let dir = chi.scale(size.recip());
        let central = |h: T| -> Result<Form<T>> {
            let plus = theta(&phi.try_add(&dir.scale(h))?)?;
            let minus = theta(&phi.try_sub(&dir.scale(h))?)?;
            Ok(plus.try_sub(&minus)?.scale((h + h).recip()))
        };
        let h = fd_step::<T>();
        let coarse = central(h)?;
        let fine = central(h / T::lit(2.0))?;
        fine.scale(T::lit(4.0)).try_sub(&coarse)?.scale(-size / T::lit(3.0))
    };
    let theta_sum = theta(&phi.try_add(chi)?)?;
    let f = theta_phi.try_sub(&t)?.try_sub(&theta_sum)?;
    Ok((t, f))
}

/// Projection onto the line spanned by `phi`: `(<chi, phi>_{g(phi)} / 7) phi`.
pub fn pi1_project<T: Real>(phi: &Form<T>, chi: &Form<T>) -> Result<Form<T>> {
    check_three_form(chi)?;
    let (g, _) = metric_from_g2(phi)?;
    Ok(phi.scale(g.inner(chi, phi)? / T::lit(7.0)))
}

/// `u x v` defined by `phi(u, v, w) = g(u x v, w)`.
pub fn cross_product<T: Real>(phi: &Form<T>, g: &Metric<T>, u: &Vector<T>, v: &Vector<T>) -> Result<Vector<T>> {
    check_three_form(phi)?;
    if g.dim() != 7 {
        return Err(Error::DimensionMismatch { expected: 7, found: g.dim() });
    }
    let covector = phi.interior(u)?.interior(v)?;
    Ok(g.sharp(covector.coeffs()))
}

/// Flat hyperkaehler triple on the last four coordinates of R^7:
/// `w1 = dx45 + dx67`, `w2 = dx46 - dx57`, `w3 = dx47 + dx56`.
pub fn flat_hyperkaehler_triple<T: Real>() -> [Form<T>; 3] {
    let f = |terms: &[(&[usize], f64)]| {
        let t: Vec<(&[usize], T)> = terms.iter().map(|(i, c)| (*i, T::lit(*c))).collect();
        Form::from_terms(7, 2, &t).expect("valid terms")
    };
    [
        f(&[(&[3, 4], 1.0), (&[5, 6], 1.0)]),
        f(&[(&[3, 5], 1.0), (&[4, 6], -1.0)]),
        f(&[(&[3, 6], 1.0), (&[4, 5], 1.0)]),
    ]
}

/// `delta_123 - sum_i delta_i ^ w_i` on `R^3 x H`, with `delta_i = dx_i`.
pub fn product_structure<T: Real>(omega: &[Form<T>; 3]) -> Result<Form<T>> {
    let mut phi = Form::monomial(7, &[0, 1, 2])?;
    for (i, w) in omega.iter().enumerate() {
        phi = phi.try_sub(&Form::monomial(7, &[i])?.wedge(w)?)?;
    }
    Ok(phi)
}

/// `w1^2 / 2 - sum_cyclic w_i ^ delta_jk`, the dual 4-form of [`product_structure`].
pub fn product_dual<T: Real>(omega: &[Form<T>; 3]) -> Result<Form<T>> {
    let mut psi = omega[0].wedge(&omega[0])?.scale(T::lit(0.5));
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        psi = psi.try_sub(&omega[i].wedge(&Form::monomial(7, &[j, k])?)?)?;
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_structure_is_euclidean() {
        let (g, vol) = metric_from_g2(&phi0::<f64>()).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g.entries()[i * 7 + j] - e).abs() < 1e-12);
            }
        }
        assert!((vol - 1.0).abs() < 1e-12);
        let b = bilinear_b(&phi0::<f64>()).unwrap();
        assert!((b[0] - 6.0f64).abs() < 1e-14 && b[1].abs() < 1e-14);
    }

    #[test]
    fn reversed_orientation_rejected() {
        assert!(matches!(metric_from_g2(&-phi0::<f64>()), Err(Error::NotG2(_))));
        let degenerate = Form::<f64>::monomial(7, &[0, 1, 2]).unwrap();
        assert!(matches!(metric_from_g2(&degenerate), Err(Error::NotG2(_))));
    }

    #[test]
    fn zero_perturbation_splits_trivially() {
        let (t, f) = theta_split(&phi0::<f64>(), &Form::zero(7, 3).unwrap()).unwrap();
        assert_eq!(t.max_abs(), 0.0);
        assert!(f.max_abs() < 1e-15);
    }
}
