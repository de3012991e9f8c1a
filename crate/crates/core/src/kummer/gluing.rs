use crate::eguchi_hanson::{Coframe, EhChart, Expr, RadialForm};
use crate::error::{Error, Result};
use crate::exterior_algebra::{metric_from_g2, Form, Metric};
use crate::scalar::Real;

/// Radius of the tubular neighbourhood of the singular set.
pub const ZETA: f64 = 1.0 / 9.0;

/// Number of connected components of the singular set.
pub const COMPONENTS: usize = 12;

/// One component `T^3 x X` of the resolved neighbourhood, in the coframe
/// `(delta^1, delta^2, delta^3, dr, eta^1, eta^2, eta^3)` of
/// [`Coframe::kummer`], with the Eguchi-Hanson parameter `k = t^4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GluingChart<T> {
    component: usize,
    t: T,
    zeta: T,
}

/// Moves a form of the `eh_left` coframe to the `X` factor of the Kummer coframe.
pub fn lift_to_kummer<T: Real>(form: &RadialForm<'_, T>) -> Result<RadialForm<'static, T>> {
    if form.coframe() != Coframe::eh_left() {
        return Err(Error::Inconsistent("only left-invariant Eguchi-Hanson forms lift to the Kummer chart".into()));
    }
    let cf = Coframe::kummer();
    let mut out = RadialForm::zero(cf, form.degree());
    for (mask, e) in form.terms() {
        let idx: Vec<usize> = (0..4).filter(|a| mask & (1 << a) != 0).map(|a| a + 3).collect();
        out = out.add(&RadialForm::term(cf, &idx, e.clone()))?;
    }
    Ok(out)
}

/// The forms of the glued structure on one chart.
#[derive(Clone, Debug)]
pub struct GluedForms<T: Real> {
    pub omega_tilde: [RadialForm<'static, T>; 3],
    pub phi: RadialForm<'static, T>,
    pub vartheta: RadialForm<'static, T>,
}

/// `psi^t` at one radius, in the orthonormal frame of `g_L + g_(t^4)`.
#[derive(Clone, Debug)]
pub struct TorsionPoint<T: Real> {
    pub r: T,
    pub s: T,
    pub psi: Form<T>,
    /// `|psi^t|` in the metric of `phi^t`.
    pub norm: T,
}

impl<T: Real> GluingChart<T> {
    pub fn new(component: usize, t: T) -> Result<Self> {
        if !(1..=COMPONENTS).contains(&component) {
            return Err(Error::Domain(format!("component id must lie in 1..=12, got {component}")));
        }
        if !(t > T::zero() && t < T::one()) {
            return Err(Error::Domain(format!("gluing parameter must lie in (0, 1), got {t}")));
        }
        Ok(Self { component, t, zeta: T::lit(ZETA) })
    }

    pub fn component(&self) -> usize {
        self.component
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    pub fn k(&self) -> T {
        self.t.powi(4)
    }

    pub fn eh(&self) -> EhChart<T> {
        EhChart::new(self.k()).expect("t^4 > 0")
    }

    /// Distance to the singular set in the flat orbifold, `s = 2 sqrt(r)`.
    pub fn distance(&self, r: T) -> T {
        T::lit(2.0) * r.sqrt()
    }

    /// Inverse of [`GluingChart::distance`].
    pub fn radius_at(&self, s: T) -> T {
        let h = s / T::lit(2.0);
        h * h
    }

    /// `chi(s(r))`, the quintic smoothstep from `zeta/4` to `zeta/2`.
    pub fn cutoff(&self) -> Expr<T> {
        let quarter = self.zeta / T::lit(4.0);
        Expr::r().sqrt().scale(T::lit(2.0)).smoothstep(quarter, quarter)
    }

    /// `omega~_i = omega_i^(k) - d(chi tau_i)` with `tau_2 = tau_3 = 0`, and
    /// `phi^t`, `vartheta^t` assembled in product form.
    pub fn forms(&self) -> Result<GluedForms<T>> {
        let eh = self.eh();
        let [w1, w2, w3] = eh.hyperkaehler_triple();
        let (_, _, tau) = eh.harmonic_forms();
        let correction = lift_to_kummer(&tau)?.mul_expr(&self.cutoff()).d()?;
        let omega_tilde = [lift_to_kummer(&w1)?.sub(&correction)?, lift_to_kummer(&w2)?, lift_to_kummer(&w3)?];
        let cf = Coframe::kummer();
        let delta = |i: usize| RadialForm::term(cf, &[i], Expr::one());
        let mut phi = RadialForm::term(cf, &[0, 1, 2], Expr::one());
        for (i, w) in omega_tilde.iter().enumerate() {
            phi = phi.sub(&w.wedge(&delta(i))?)?;
        }
        let mut vartheta = omega_tilde[0].wedge(&omega_tilde[0])?.scale(T::lit(0.5));
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            vartheta = vartheta.sub(&omega_tilde[i].wedge(&delta(j))?.wedge(&delta(k))?)?;
        }
        Ok(GluedForms { omega_tilde, phi, vartheta })
    }

    /// Multipliers from the coframe to the orthonormal frame of `g_L + g_(k)`.
    pub fn orthonormal_scales(&self, r: T) -> [T; 7] {
        let s = self.eh().orthonormal_scales(r);
        [T::one(), T::one(), T::one(), s[0], s[1], s[2], s[3]]
    }

    fn check_r(&self, r: T) -> Result<()> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::Domain(format!("chart point needs r > 0, got {r}")));
        }
        Ok(())
    }

    /// `(phi^t, vartheta^t)` at `r` in the orthonormal frame of `g_L + g_(k)`;
    /// fails when `phi^t` is not a positive 3-form there.
    pub fn glued_structure(&self, forms: &GluedForms<T>, r: T) -> Result<(Form<T>, Form<T>)> {
        self.check_r(r)?;
        let scales = self.orthonormal_scales(r);
        let phi = crate::eguchi_hanson::rescale_basis(&forms.phi.eval(r), &scales);
        let vartheta = crate::eguchi_hanson::rescale_basis(&forms.vartheta.eval(r), &scales);
        metric_from_g2(&phi).map_err(|e| {
            Error::NotG2(format!("phi^t at t = {}, s = {}: {e}", self.t, self.distance(r)))
        })?;
        Ok((phi, vartheta))
    }

    /// `psi^t = *(Theta(phi^t) - vartheta^t)` with `*` of `g(phi^t)`.
    pub fn torsion_form(&self, forms: &GluedForms<T>, r: T) -> Result<TorsionPoint<T>> {
        let (phi, vartheta) = self.glued_structure(forms, r)?;
        let (g, _) = metric_from_g2(&phi)?;
        let star_psi = g.star(&phi)?.try_sub(&vartheta)?;
        let psi = g.star(&star_psi)?;
        let norm = g.norm(&psi)?;
        Ok(TorsionPoint { r, s: self.distance(r), psi, norm })
    }

    /// `g(phi^t)` in the orthonormal frame of `g_L + g_(k)`.
    pub fn metric(&self, forms: &GluedForms<T>, r: T) -> Result<Metric<T>> {
        let (phi, _) = self.glued_structure(forms, r)?;
        Ok(metric_from_g2(&phi)?.0)
    }

    /// Relative residuals of `d phi^t` and `d vartheta^t` at `r`.
    pub fn closedness(&self, forms: &GluedForms<T>, r: T) -> Result<(T, T)> {
        self.check_r(r)?;
        Ok((forms.phi.d()?.relative_residual(r), forms.vartheta.d()?.relative_residual(r)))
    }
}
