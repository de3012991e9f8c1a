//! Least-squares fits of power laws.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Slope and intercept of the least-squares line through `(ln x, ln y)`,
/// skipping points where either value is not positive and finite.
pub fn loglog_slope<T: Real>(xs: &[T], ys: &[T]) -> Result<(T, T)> {
    let pts: Vec<(T, T)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > T::zero() && **y > T::zero() && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_fit(&pts)
}

/// Slope and intercept of the least-squares line through `pts`.
pub fn linear_fit<T: Real>(pts: &[(T, T)]) -> Result<(T, T)> {
    if pts.len() < 3 {
        return Err(Error::DegenerateFit(pts.len()));
    }
    let n = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == T::zero() {
        return Err(Error::DegenerateFit(pts.len()));
    }
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slopes between consecutive points on a log-log scale.
pub fn consecutive_slopes<T: Real>(xs: &[T], ys: &[T]) -> Vec<T> {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1].ln() - y[0].ln()) / (x[1].ln() - x[0].ln()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-4.0)).collect();
        let (s, c) = loglog_slope(&xs, &ys).unwrap();
        assert!((s + 4.0).abs() < 1e-13 && (c - 3f64.ln()).abs() < 1e-13);
        assert!(matches!(loglog_slope(&xs[..2], &ys[..2]), Err(Error::DegenerateFit(2))));
    }
}
