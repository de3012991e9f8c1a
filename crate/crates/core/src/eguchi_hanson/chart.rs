use super::coframe::{Coframe, RadialForm};
use super::expr::Expr;
use crate::error::{Error, Result};
use crate::exterior_algebra::{Form, Metric};
use crate::scalar::Real;

/// The Eguchi-Hanson metric `g_(k)` on `(0, inf) x SO(3)` in the coframe
/// `(dr, eta^1, eta^2, eta^3)`, with orthonormal coframe
/// `dt = f^-1 dr`, `e^1 = r f^-1 eta^1`, `e^2 = f eta^2`, `e^3 = f eta^3`
/// and `f = (k + r^2)^(1/4)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EhChart<T> {
    k: T,
}

fn check_r<T: Real>(r: T) -> Result<()> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::Domain(format!("radial coordinate must be positive, got {r}")));
    }
    Ok(())
}

impl<T: Real> EhChart<T> {
    pub fn new(k: T) -> Result<Self> {
        if !(k >= T::zero()) || !k.is_finite() {
            return Err(Error::Domain(format!("Eguchi-Hanson parameter must be >= 0, got {k}")));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> T {
        self.k
    }

    /// `f_k(r)`.
    pub fn f(&self, r: T) -> T {
        (self.k + r * r).sqrt().sqrt()
    }

    /// `f_k^2 = (k + r^2)^(1/2)` as an expression.
    pub fn f2(&self) -> Expr<T> {
        Expr::c(self.k).add(Expr::r().pow(T::lit(2.0))).sqrt()
    }

    /// Multipliers `s_a` with `e^a = s_a eta^a`.
    pub fn orthonormal_scales(&self, r: T) -> [T; 4] {
        let f = self.f(r);
        [f.recip(), r / f, f, f]
    }

    /// `g_(k)` at `r` in the coframe `(dr, eta^1, eta^2, eta^3)`.
    pub fn metric(&self, r: T) -> Result<Metric<T>> {
        check_r(r)?;
        let s = self.orthonormal_scales(r);
        Metric::diagonal(&s.map(|x| x * x))
    }

    /// Rewrites coefficients from `(dr, eta)` to the orthonormal coframe `(dt, e)`.
    pub fn to_orthonormal(&self, form: &Form<T>, r: T) -> Form<T> {
        rescale_basis(form, &self.orthonormal_scales(r))
    }

    /// `omega_1 = dt^e1 + e2^e3`, `omega_2 = dt^e2 + e3^e1`, `omega_3 = dt^e3 + e1^e2`.
    pub fn hyperkaehler_triple(&self) -> [RadialForm<'static, T>; 3] {
        let cf = Coframe::eh_left();
        let f2 = self.f2();
        let r = Expr::r();
        [
            RadialForm::from_terms(
                cf,
                2,
                vec![(&[0, 1], r.clone().mul(f2.clone().recip())), (&[2, 3], f2)],
            ),
            RadialForm::from_terms(cf, 2, vec![(&[0, 2], Expr::one()), (&[3, 1], r.clone())]),
            RadialForm::from_terms(cf, 2, vec![(&[0, 3], Expr::one()), (&[1, 2], r)]),
        ]
    }

    /// `nu = r f^-6 dr^eta1 - f^-2 eta2^eta3`, `lambda = -f^-2 eta1` and
    /// `tau_1 = (f_k^2 - f_0^2) eta1 = k / (f_k^2 + r) eta1`.
    pub fn harmonic_forms(&self) -> (RadialForm<'static, T>, RadialForm<'static, T>, RadialForm<'static, T>) {
        let cf = Coframe::eh_left();
        let f2 = self.f2();
        let nu = RadialForm::from_terms(
            cf,
            2,
            vec![
                (&[0, 1], Expr::r().mul(f2.clone().pow(T::lit(-3.0)))),
                (&[2, 3], f2.clone().recip().neg()),
            ],
        );
        let lambda = RadialForm::term(cf, &[1], f2.clone().recip().neg());
        let tau = RadialForm::term(cf, &[1], Expr::c(self.k).mul(f2.add(Expr::r()).recip()));
        (nu, lambda, tau)
    }

    /// Closed anti-self-dual triple in the right-invariant coframe:
    /// `r f^-2 dr^etahat1 - f^2 etahat2^etahat3`, `d(r etahat2)`, `d(r etahat3)`.
    pub fn asd_triple(&self) -> [RadialForm<'static, T>; 3] {
        let cf = Coframe::eh_right();
        let f2 = self.f2();
        let r = Expr::r();
        [
            RadialForm::from_terms(
                cf,
                2,
                vec![(&[0, 1], r.clone().mul(f2.clone().recip())), (&[2, 3], f2.neg())],
            ),
            RadialForm::from_terms(cf, 2, vec![(&[0, 2], Expr::one()), (&[3, 1], r.clone().neg())]),
            RadialForm::from_terms(cf, 2, vec![(&[0, 3], Expr::one()), (&[1, 2], r.neg())]),
        ]
    }
}

/// `sum a_I eta^I = sum a_I / prod_{a in I} s_a e^I` for `e^a = s_a eta^a`.
pub fn rescale_basis<T: Real>(form: &Form<T>, scales: &[T]) -> Form<T> {
    let mut out = form.clone();
    for (mask, c) in form.iter() {
        let p = crate::exterior_algebra::basis::indices(mask)
            .into_iter()
            .fold(T::one(), |acc, a| acc * scales[a]);
        out.set_mask(mask, c / p);
    }
    out
}

fn eval_orthonormal<T: Real>(chart: &EhChart<T>, forms: &[RadialForm<'_, T>], r: T) -> Result<Vec<Form<T>>> {
    check_r(r)?;
    Ok(forms.iter().map(|f| chart.to_orthonormal(&f.eval(r), r)).collect())
}

/// `(omega_1, omega_2, omega_3)` at `r` in the orthonormal coframe `(dt, e^1, e^2, e^3)`.
pub fn hyperkaehler_triple<T: Real>(k: T, r: T) -> Result<[Form<T>; 3]> {
    let chart = EhChart::new(k)?;
    let v = eval_orthonormal(&chart, &chart.hyperkaehler_triple(), r)?;
    Ok([v[0].clone(), v[1].clone(), v[2].clone()])
}

/// `(nu, lambda, tau_1)` for the parameter `k`.
pub fn harmonic_forms<T: Real>(
    k: T,
) -> Result<(RadialForm<'static, T>, RadialForm<'static, T>, RadialForm<'static, T>)> {
    Ok(EhChart::new(k)?.harmonic_forms())
}

/// The right-invariant triple on the fibre over the identity, where
/// `etahat^i = eta^i`, in the orthonormal coframe.
pub fn asd_triple<T: Real>(k: T, r: T) -> Result<[Form<T>; 3]> {
    asd_triple_rotated(k, r, &[T::one(), T::zero(), T::zero(), T::zero(), T::one(), T::zero(), T::zero(), T::zero(), T::one()])
}

/// The right-invariant triple on a fibre where `etahat^i = sum_j rot_ij eta^j`
/// (`rot` row-major 3x3), in the orthonormal coframe of the left-invariant forms.
pub fn asd_triple_rotated<T: Real>(k: T, r: T, rot: &[T; 9]) -> Result<[Form<T>; 3]> {
    let chart = EhChart::new(k)?;
    check_r(r)?;
    let mut a = vec![T::zero(); 16];
    a[0] = T::one();
    for i in 0..3 {
        for j in 0..3 {
            a[(i + 1) * 4 + j + 1] = rot[i * 3 + j];
        }
    }
    let forms = chart.asd_triple();
    let mut out = Vec::with_capacity(3);
    for f in &forms {
        let left = f.eval(r).pullback(&a)?;
        out.push(chart.to_orthonormal(&left, r));
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_matches_orthonormal_coframe() {
        let chart = EhChart::new(2.0).unwrap();
        let g = chart.metric(1.5).unwrap();
        let f2 = (2.0f64 + 2.25).sqrt();
        assert!((g.entries()[0] - 1.0 / f2).abs() < 1e-15);
        assert!((g.entries()[5] - 2.25 / f2).abs() < 1e-15);
        assert!((g.entries()[15] - f2).abs() < 1e-15);
        assert!(chart.metric(0.0).is_err());
        assert!(EhChart::new(-1.0).is_err());
    }

    #[test]
    fn triple_is_standard_in_orthonormal_frame() {
        let [w1, w2, w3] = hyperkaehler_triple(1.0, 2.0).unwrap();
        let m = |i: &[usize]| Form::<f64>::monomial(4, i).unwrap();
        assert!(w1.try_sub(&(m(&[0, 1]) + m(&[2, 3]))).unwrap().max_abs() < 1e-15);
        assert!(w2.try_sub(&(m(&[0, 2]) - m(&[1, 3]))).unwrap().max_abs() < 1e-15);
        assert!(w3.try_sub(&(m(&[0, 3]) + m(&[1, 2]))).unwrap().max_abs() < 1e-15);
    }
}
