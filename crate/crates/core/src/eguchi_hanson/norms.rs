use rayon::prelude::*;
use serde::Serialize;

use super::chart::EhChart;
use super::coframe::{Coframe, RadialForm};
use super::geometry::radial_distance;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parameters of the weighted Hoelder norm `C^{k,alpha}_{beta;t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightedNormSpec<T> {
    pub k_derivs: usize,
    pub alpha: T,
    pub beta: T,
    pub t: T,
}

/// A point of a sampled tensor field: its distance to the exceptional set,
/// the radial ray it lies on, and the orthonormal frame components of
/// `f, grad f, .., grad^k f`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSample<T> {
    pub ray: usize,
    pub dist: T,
    pub jets: Vec<Vec<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedNorm<T> {
    /// `sup w^{j - beta} |grad^j f|` for `j = 0..=k`.
    pub linf: Vec<T>,
    /// Hoelder quotient of `grad^k f` over admissible pairs.
    pub holder: T,
    pub total: T,
}

fn euclid<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt()
}

/// Discretised `C^{k,alpha}_{beta;t}` norm. Pairs are compared along radial
/// rays, where the distance is `|dist_x - dist_y|`; a pair is admissible when
/// this distance is at most `min(w_t(x), w_t(y))` with `w_t = t + dist`.
pub fn weighted_norm<T: Real>(samples: &[WeightedSample<T>], spec: &WeightedNormSpec<T>) -> Result<WeightedNorm<T>> {
    if samples.is_empty() {
        return Err(Error::Domain("weighted norm of an empty sample set".into()));
    }
    if !(spec.alpha > T::zero() && spec.alpha < T::one()) || !(spec.t > T::zero()) {
        return Err(Error::Domain("weighted norm needs alpha in (0, 1) and t > 0".into()));
    }
    if let Some(s) = samples.iter().find(|s| s.jets.len() <= spec.k_derivs) {
        return Err(Error::DimensionMismatch { expected: spec.k_derivs + 1, found: s.jets.len() });
    }
    let k = spec.k_derivs;
    let w = |s: &WeightedSample<T>| spec.t + s.dist;
    let linf: Vec<T> = (0..=k)
        .map(|j| {
            let jt = T::from_usize_lossy(j);
            samples.iter().fold(T::zero(), |m, s| {
                let v = s.jets[j].iter().map(|&x| x * x).sum::<T>().sqrt();
                m.max(w(s).powf(jt - spec.beta) * v)
            })
        })
        .collect();
    let exponent = spec.alpha - spec.beta + T::from_usize_lossy(k);
    let holder = (0..samples.len())
        .into_par_iter()
        .map(|i| {
            let x = &samples[i];
            samples[i + 1..]
                .iter()
                .filter(|y| y.ray == x.ray)
                .fold(T::zero(), |m, y| {
                    let d = (x.dist - y.dist).abs();
                    let wmin = w(x).min(w(y));
                    if d == T::zero() || d > wmin {
                        return m;
                    }
                    m.max(wmin.powf(exponent) * euclid(&x.jets[k], &y.jets[k]) / d.powf(spec.alpha))
                })
        })
        .reduce(T::zero, |a, b| a.max(b));
    let total = linf.iter().copied().sum::<T>() + holder;
    Ok(WeightedNorm { linf, holder, total })
}

/// Orthonormal-frame samples of a radial form of the `eh_left` coframe on
/// `g_(k)` along one ray, zeroth jet only.
pub fn sample_radial_form<T: Real>(chart: &EhChart<T>, form: &RadialForm<'_, T>, radii: &[T]) -> Result<Vec<WeightedSample<T>>> {
    if form.coframe() != Coframe::eh_left() {
        return Err(Error::Inconsistent("sampling expects the left-invariant Eguchi-Hanson coframe".into()));
    }
    radii
        .iter()
        .map(|&r| {
            let on = chart.to_orthonormal(&form.eval(r), r);
            Ok(WeightedSample { ray: 0, dist: radial_distance(chart.k(), r)?, jets: vec![on.into_coeffs()] })
        })
        .collect()
}

/// Compares `sup w_1^-beta |sigma a|_{g_(1)}` with `sup w_t^-beta |a|_{g_(t^4)}`
/// where `sigma a = t^(-beta - p) s_t^* a` and `s_t(r) = t^2 r`; returns the
/// relative discrepancy of the two weighted sup norms over `radii`.
pub fn rescaling_invariance_check<T: Real>(a: &RadialForm<'_, T>, beta: T, t: T, radii: &[T]) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::Domain(format!("rescaling needs t > 0, got {t}")));
    }
    if radii.is_empty() {
        return Err(Error::Domain("rescaling check needs sample radii".into()));
    }
    let k = t.powi(4);
    let chart_t = EhChart::new(k)?;
    let chart_1 = EhChart::new(T::one())?;
    let p = T::from_usize_lossy(a.degree());
    let sigma = a.rescale(t * t).scale(t.powf(-beta - p));
    let mut lhs = T::zero();
    let mut rhs = T::zero();
    for &r in radii {
        let w1 = T::one() + radial_distance(T::one(), r)?;
        lhs = lhs.max(w1.powf(-beta) * chart_1.metric(r)?.norm(&sigma.eval(r))?);
        let rr = t * t * r;
        let wt = t + radial_distance(k, rr)?;
        rhs = rhs.max(wt.powf(-beta) * chart_t.metric(rr)?.norm(&a.eval(rr))?);
    }
    if rhs == T::zero() {
        return Ok(lhs);
    }
    Ok((lhs - rhs).abs() / rhs)
}
