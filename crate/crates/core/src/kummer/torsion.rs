use rayon::prelude::*;
use serde::Serialize;

use super::gluing::{GluedForms, GluingChart};
use crate::eguchi_hanson::{radial_distance, rescale_basis};
use crate::error::{Error, Result};
use crate::exterior_algebra::Form;
use crate::fit;
use crate::scalar::Real;

/// Sample distances `s` strictly inside the annulus `zeta/4 < s < zeta/2`
/// (midpoints of `n` equal cells).
pub fn annulus_samples<T: Real>(zeta: T, n: usize) -> Vec<T> {
    let quarter = zeta / T::lit(4.0);
    let nn = T::from_usize_lossy(n);
    (0..n).map(|i| quarter + quarter * (T::from_usize_lossy(i) + T::lit(0.5)) / nn).collect()
}

/// Sup norms of the torsion over the annulus for one value of `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionRow<T> {
    pub t: T,
    /// `phi^t` is a positive 3-form at every sample.
    pub positive: bool,
    /// First sample where positivity fails, with the error.
    pub failure: Option<String>,
    pub sup_psi: Option<T>,
    /// Radial derivative of the orthonormal components, `|f d/dr psi|`.
    pub sup_grad_psi: Option<T>,
    /// `sup w_t^(2 - beta) |psi^t|` with `w_t = t + dist`: the `C^0_{beta-2;t}` norm.
    pub weighted_c0: Option<T>,
    /// `sup |d tau_1^(t^4)|` on the annulus, the ALE difference alone.
    pub sup_ale_difference: T,
}

fn psi_at<T: Real>(chart: &GluingChart<T>, forms: &GluedForms<T>, r: T) -> Result<(Form<T>, T)> {
    let p = chart.torsion_form(forms, r)?;
    Ok((p.psi, p.norm))
}

/// Evaluates one row; positivity failures are recorded, not raised.
pub fn torsion_row<T: Real>(t: T, samples: usize, beta: T) -> Result<TorsionRow<T>> {
    let chart = GluingChart::new(1, t)?;
    let forms = chart.forms()?;
    let radii: Vec<T> = annulus_samples(chart.zeta(), samples).into_iter().map(|s| chart.radius_at(s)).collect();
    let k = chart.k();
    let eh = chart.eh();
    let (_, _, tau) = eh.harmonic_forms();
    let dtau = tau.d()?;
    let per_point: Vec<Result<(T, T, T, T)>> = radii
        .par_iter()
        .map(|&r| {
            let ale = eh.metric(r)?.norm(&dtau.eval(r))?;
            let (_, norm) = psi_at(&chart, &forms, r)?;
            let h = r * T::lit(1e-6);
            let (plus, _) = psi_at(&chart, &forms, r + h)?;
            let (minus, _) = psi_at(&chart, &forms, r - h)?;
            let f = eh.f(r);
            let grad = plus.try_sub(&minus)?.scale(f / (h + h)).coeff_norm();
            let w = t + radial_distance(k, r)?;
            Ok((norm, grad, w.powf(T::lit(2.0) - beta) * norm, ale))
        })
        .collect();
    let mut row = TorsionRow {
        t,
        positive: true,
        failure: None,
        sup_psi: Some(T::zero()),
        sup_grad_psi: Some(T::zero()),
        weighted_c0: Some(T::zero()),
        sup_ale_difference: T::zero(),
    };
    for (i, res) in per_point.into_iter().enumerate() {
        match res {
            Ok((n, g, w, a)) => {
                let max = |x: &mut Option<T>, v: T| {
                    if let Some(m) = x {
                        *m = m.max(v);
                    }
                };
                max(&mut row.sup_psi, n);
                max(&mut row.sup_grad_psi, g);
                max(&mut row.weighted_c0, w);
                row.sup_ale_difference = row.sup_ale_difference.max(a);
            }
            Err(Error::NotG2(msg)) => {
                if row.positive {
                    row.failure = Some(msg);
                }
                row.positive = false;
                row.sup_psi = None;
                row.sup_grad_psi = None;
                row.weighted_c0 = None;
                let r = radii[i];
                row.sup_ale_difference = row.sup_ale_difference.max(eh.metric(r)?.norm(&dtau.eval(r))?);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(row)
}

/// Log-log fits of the torsion against `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionDecay<T> {
    pub rows: Vec<TorsionRow<T>>,
    pub beta: T,
    pub samples: usize,
    /// Slope of `log sup |psi^t|` against `log t` over the positive rows.
    pub slope: T,
    pub grad_slope: T,
    pub weighted_slope: T,
    pub ale_difference_slope: T,
    /// `sup|psi^t(t)| / sup|psi^t(t/2)|` for consecutive positive rows.
    pub halving_ratios: Vec<T>,
    /// Largest sampled `t` at which `phi^t` is positive on the whole annulus.
    pub t0: Option<T>,
}

fn validate_t_list<T: Real>(t_list: &[T]) -> Result<()> {
    if t_list.len() < 4 {
        return Err(Error::Domain(format!("torsion fit needs at least 4 values of t, got {}", t_list.len())));
    }
    if let Some(t) = t_list.iter().find(|&&t| !(t > T::zero() && t <= T::lit(0.3))) {
        return Err(Error::Domain(format!("t must lie in (0, 0.3], got {t}")));
    }
    let q = t_list[1] / t_list[0];
    let geometric = t_list.windows(2).all(|w| ((w[1] / w[0]) / q - T::one()).abs() <= T::lit(1e-9));
    if !geometric || q == T::one() {
        return Err(Error::Domain("t values must form a geometric progression".into()));
    }
    Ok(())
}

/// Rows for every `t`, including those where `phi^t` is not positive.
pub fn torsion_table<T: Real>(t_list: &[T], samples: usize, beta: T) -> Result<Vec<TorsionRow<T>>> {
    validate_t_list(t_list)?;
    if samples == 0 {
        return Err(Error::Domain("torsion fit needs at least one sample".into()));
    }
    t_list.iter().map(|&t| torsion_row(t, samples, beta)).collect()
}

/// Least-squares decay exponents over the rows where `phi^t` is positive.
pub fn torsion_decay_fit<T: Real>(t_list: &[T], samples: usize, beta: T) -> Result<TorsionDecay<T>> {
    let rows = torsion_table(t_list, samples, beta)?;
    decay_from_rows(rows, samples, beta)
}

/// Fits a precomputed table.
pub fn decay_from_rows<T: Real>(rows: Vec<TorsionRow<T>>, samples: usize, beta: T) -> Result<TorsionDecay<T>> {
    let good: Vec<&TorsionRow<T>> = rows.iter().filter(|r| r.positive).collect();
    let ts: Vec<T> = good.iter().map(|r| r.t).collect();
    let col = |f: &dyn Fn(&TorsionRow<T>) -> Option<T>| -> Vec<T> { good.iter().map(|r| f(r).unwrap_or(T::nan())).collect() };
    let sup = col(&|r| r.sup_psi);
    let (slope, _) = fit::loglog_slope(&ts, &sup)?;
    let (grad_slope, _) = fit::loglog_slope(&ts, &col(&|r| r.sup_grad_psi))?;
    let (weighted_slope, _) = fit::loglog_slope(&ts, &col(&|r| r.weighted_c0))?;
    let all_t: Vec<T> = rows.iter().map(|r| r.t).collect();
    let ale: Vec<T> = rows.iter().map(|r| r.sup_ale_difference).collect();
    let (ale_difference_slope, _) = fit::loglog_slope(&all_t, &ale)?;
    let halving_ratios = sup.windows(2).map(|w| w[0] / w[1]).collect();
    let t0 = rows.iter().filter(|r| r.positive).map(|r| r.t).fold(None, |m: Option<T>, t| Some(m.map_or(t, |m| m.max(t))));
    Ok(TorsionDecay { rows, beta, samples, slope, grad_slope, weighted_slope, ale_difference_slope, halving_ratios, t0 })
}

/// Largest `t` in `candidates` for which `phi^t` is positive on the annulus.
pub fn positivity_threshold<T: Real>(candidates: &[T], samples: usize) -> Result<Option<T>> {
    let mut best: Option<T> = None;
    for &t in candidates {
        let chart = GluingChart::new(1, t)?;
        let forms = chart.forms()?;
        let ok = annulus_samples(chart.zeta(), samples)
            .into_iter()
            .all(|s| chart.glued_structure(&forms, chart.radius_at(s)).is_ok());
        if ok && best.is_none_or(|b| t > b) {
            best = Some(t);
        }
    }
    Ok(best)
}

/// Largest deviation of `g(phi^t)` from the product metric `g_L + g_(t^4)`
/// at the given radii (zero on the plateaux of `chi`).
pub fn product_metric_defect<T: Real>(t: T, radii: &[T]) -> Result<T> {
    let chart = GluingChart::new(1, t)?;
    let forms = chart.forms()?;
    let mut worst = T::zero();
    for &r in radii {
        let g = chart.metric(&forms, r)?;
        for (i, &x) in g.entries().iter().enumerate() {
            let target = if i % 8 == 0 { T::one() } else { T::zero() };
            worst = worst.max((x - target).abs());
        }
    }
    Ok(worst)
}

/// `d tau_1^(t^4)` at `r` in the orthonormal frame of `g_(t^4)`.
pub fn ale_difference<T: Real>(t: T, r: T) -> Result<Form<T>> {
    let chart = GluingChart::new(1, t)?;
    let (_, _, tau) = chart.eh().harmonic_forms();
    Ok(rescale_basis(&tau.d()?.eval(r), &chart.eh().orthonormal_scales(r)))
}
