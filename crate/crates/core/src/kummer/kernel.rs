use serde::Serialize;

use super::gluing::{GluingChart, COMPONENTS};
use super::group::{gamma_elements, invariant_form_count};
use crate::eguchi_hanson::{Coframe, RadialForm};
use crate::error::{Error, Result};
use crate::exterior_algebra::Form;
use crate::quadrature;
use crate::scalar::Real;

/// The cut-off harmonic forms `chi(s) nu_(t^4)` on each of the 12 charts,
/// together with `b^2(T^7 / Gamma)` pulled back forms counted as data.
#[derive(Clone, Debug)]
pub struct ApproximateKernel<T: Real> {
    t: T,
    chart: GluingChart<T>,
    /// `chi nu` on `s < zeta`, zero beyond.
    form: RadialForm<'static, T>,
    b2_orbifold: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelDescriptor<T> {
    pub component: usize,
    /// `|chi nu|` at `s = zeta/4`, approached from either side.
    pub jump_at_inner_cutoff: T,
    /// `|chi nu|` just inside `s = zeta`, where `nu_(t^4, i)` is cut to zero.
    pub jump_at_chart_edge: T,
    /// `int |chi nu|^2 r dr`, the squared `L^2` norm up to the angular volume.
    pub l2_squared: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelSummary<T> {
    pub t: T,
    pub descriptors: Vec<KernelDescriptor<T>>,
    /// `b^2(T^7 / Gamma)`, taken from configuration.
    pub b2_orbifold: usize,
    /// Rank of the Gram matrix of the twelve chart forms.
    pub chart_rank: usize,
    pub dimension: usize,
}

/// `b^2(T^7 / Gamma)` computed as the dimension of `Gamma`-invariant constant 2-forms.
pub fn orbifold_b2() -> usize {
    invariant_form_count(&gamma_elements(), 2)
}

impl<T: Real> ApproximateKernel<T> {
    pub fn new(t: T, b2_orbifold: usize) -> Result<Self> {
        let chart = GluingChart::new(1, t)?;
        let (nu, _, _) = chart.eh().harmonic_forms();
        let mut form = RadialForm::zero(Coframe::eh_left(), 2);
        for (mask, e) in nu.terms() {
            let idx: Vec<usize> = (0..4).filter(|a| mask & (1 << a) != 0).collect();
            form = form.add(&RadialForm::term(Coframe::eh_left(), &idx, e.clone().mul(chart.cutoff())))?;
        }
        Ok(Self { t, chart, form, b2_orbifold })
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// `chi nu_(t^4, i)` at `r` on chart `component`, orthonormal frame of
    /// `g_(t^4)`; other charts see zero.
    pub fn eval(&self, i: usize, component: usize, r: T) -> Result<Form<T>> {
        if !(1..=COMPONENTS).contains(&i) || !(1..=COMPONENTS).contains(&component) {
            return Err(Error::Domain(format!("component ids lie in 1..=12, got {i} and {component}")));
        }
        if !(r > T::zero()) {
            return Err(Error::Domain(format!("chart point needs r > 0, got {r}")));
        }
        let eh = self.chart.eh();
        if i != component || self.chart.distance(r) >= self.chart.zeta() {
            return Ok(Form::zero(4, 2)?);
        }
        Ok(eh.to_orthonormal(&self.form.eval(r), r))
    }

    fn magnitude(&self, r: T) -> Result<T> {
        Ok(self.eval(1, 1, r)?.coeff_norm())
    }

    fn one_sided(&self, s: T) -> Result<(T, T)> {
        let h = s * T::lit(1e-9);
        let lo = self.magnitude(self.chart.radius_at(s - h))?;
        let hi = self.magnitude(self.chart.radius_at(s + h))?;
        Ok((lo, hi))
    }

    pub fn describe(&self, component: usize) -> Result<KernelDescriptor<T>> {
        let z = self.chart.zeta();
        let (a, b) = self.one_sided(z / T::lit(4.0))?;
        let (c, d) = self.one_sided(z)?;
        let r_edge = self.chart.radius_at(z);
        let eh = self.chart.eh();
        let integrand = |r: T| -> T {
            eh.metric(r).and_then(|g| g.norm(&self.form.eval(r))).map(|n| n * n * r).unwrap_or(T::nan())
        };
        let inner = self.chart.radius_at(z / T::lit(4.0));
        let plateau = self.chart.radius_at(z / T::lit(2.0));
        let tol = T::lit(1e-10) * integrand(plateau).abs() * (r_edge - inner);
        let l2_squared = quadrature::integrate(&integrand, inner, plateau, tol)?
            + quadrature::integrate(&integrand, plateau, r_edge, tol)?;
        Ok(KernelDescriptor {
            component,
            jump_at_inner_cutoff: (a - b).abs(),
            jump_at_chart_edge: (c - d).abs(),
            l2_squared,
        })
    }

    /// The twelve chart forms have disjoint supports, so their Gram matrix
    /// is diagonal; the dimension adds the orbifold harmonic forms.
    pub fn summary(&self) -> Result<KernelSummary<T>> {
        let descriptors: Vec<KernelDescriptor<T>> = (1..=COMPONENTS).map(|c| self.describe(c)).collect::<Result<_>>()?;
        let mut gram = vec![T::zero(); COMPONENTS * COMPONENTS];
        for (i, d) in descriptors.iter().enumerate() {
            gram[i * COMPONENTS + i] = d.l2_squared;
        }
        let chart_rank = crate::linalg::rank(&gram, COMPONENTS, COMPONENTS, T::lit(1e-12));
        Ok(KernelSummary {
            t: self.t,
            descriptors,
            b2_orbifold: self.b2_orbifold,
            chart_rank,
            dimension: chart_rank + self.b2_orbifold,
        })
    }

    /// `<chi nu_i, chi nu_j>` pointwise at `r` on chart `component`.
    pub fn pointwise_inner(&self, i: usize, j: usize, component: usize, r: T) -> Result<T> {
        let a = self.eval(i, component, r)?;
        let b = self.eval(j, component, r)?;
        Ok(a.coeffs().iter().zip(b.coeffs()).map(|(&x, &y)| x * y).sum())
    }
}
