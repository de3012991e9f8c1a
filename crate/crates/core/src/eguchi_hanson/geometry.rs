use serde::Serialize;

use super::chart::EhChart;
use crate::error::{Error, Result};
use crate::fit;
use crate::quadrature;
use crate::scalar::Real;

/// Absolute tolerance of the radial distance quadrature.
pub const DISTANCE_TOL: f64 = 1e-10;

/// Length of the radial geodesic from the exceptional sphere to radius `r`,
/// `int_0^r f_k(s)^-1 ds`, integrated in `u = sqrt(s)` to remove the
/// endpoint singularity at `k = 0`.
pub fn radial_distance<T: Real>(k: T, r: T) -> Result<T> {
    if !(k >= T::zero()) || !(r >= T::zero()) || !r.is_finite() {
        return Err(Error::Domain(format!("radial distance needs k, r >= 0, got k = {k}, r = {r}")));
    }
    let two = T::lit(2.0);
    let integrand = move |u: T| {
        let u2 = u * u;
        if k == T::zero() {
            two
        } else {
            two * u * (k + u2 * u2).powf(T::lit(-0.25))
        }
    };
    quadrature::integrate(integrand, T::zero(), r.sqrt(), T::lit(DISTANCE_TOL))
}

/// Weight `w_t = t + dist` with `t = k^(1/4)`.
pub fn weight<T: Real>(k: T, r: T) -> Result<T> {
    Ok(k.sqrt().sqrt() + radial_distance(k, r)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereGeometry<T> {
    pub k: T,
    pub diameter: T,
    pub area: T,
    /// `diameter / k^(1/4)`.
    pub diameter_constant: T,
    /// `area / k^(1/2)`.
    pub area_constant: T,
    pub claimed_diameter_constant: T,
    pub claimed_area_constant: T,
}

/// `so(3)` components of `u^-1 du` for the antisymmetric matrix `x`, with
/// basis `(E_i)_jk = -eps_ijk`.
fn so3_components<T: Real>(x: &[[T; 3]; 3]) -> [T; 3] {
    [-x[1][2], -x[2][0], -x[0][1]]
}

fn rot_x<T: Real>(a: T) -> [[T; 3]; 3] {
    let (s, c) = a.sin_cos();
    let (o, z) = (T::one(), T::zero());
    [[o, z, z], [z, c, -s], [z, s, c]]
}

fn rot_z<T: Real>(a: T) -> [[T; 3]; 3] {
    let (s, c) = a.sin_cos();
    let (o, z) = (T::one(), T::zero());
    [[c, -s, z], [s, c, z], [z, z, o]]
}

fn d_rot_x<T: Real>(a: T) -> [[T; 3]; 3] {
    let (s, c) = a.sin_cos();
    let z = T::zero();
    [[z, z, z], [z, -s, -c], [z, c, -s]]
}

fn d_rot_z<T: Real>(a: T) -> [[T; 3]; 3] {
    let (s, c) = a.sin_cos();
    let z = T::zero();
    [[-s, -c, z], [c, -s, z], [z, z, z]]
}

fn mul3<T: Real>(a: &[[T; 3]; 3], b: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut c = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn transpose3<T: Real>(a: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut t = a.to_owned();
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// Induced metric `f_k(0)^2 (eta^2 (x) eta^2 + eta^3 (x) eta^3)` on the
/// exceptional sphere, pulled back along the section `u = R_x(phi) R_z(theta)`
/// of `SO(3) -> S^2`, as `(g_theta_theta, g_theta_phi, g_phi_phi)`.
fn sphere_metric<T: Real>(k: T, theta: T, phi: T) -> (T, T, T) {
    let u = mul3(&rot_x(phi), &rot_z(theta));
    let ut = transpose3(&u);
    let du_theta = mul3(&rot_x(phi), &d_rot_z(theta));
    let du_phi = mul3(&d_rot_x(phi), &rot_z(theta));
    // eta = -(u^-1 du)
    let a = so3_components(&mul3(&ut, &du_theta)).map(|x| -x);
    let b = so3_components(&mul3(&ut, &du_phi)).map(|x| -x);
    let f0sq = k.sqrt();
    (
        f0sq * (a[1] * a[1] + a[2] * a[2]),
        f0sq * (a[1] * b[1] + a[2] * b[2]),
        f0sq * (b[1] * b[1] + b[2] * b[2]),
    )
}

/// Diameter (length of a meridian between antipodal points) and area of the
/// exceptional sphere, by quadrature of the induced metric.
pub fn sphere_geometry<T: Real>(k: T) -> Result<SphereGeometry<T>> {
    if !(k > T::zero()) || !k.is_finite() {
        return Err(Error::Domain(format!("sphere geometry needs k > 0, got {k}")));
    }
    let pi = T::PI();
    let tol = T::lit(1e-11) * k.sqrt().max(T::one());
    let diameter = quadrature::integrate(|th: T| sphere_metric(k, th, T::zero()).0.sqrt(), T::zero(), pi, tol)?;
    let area = quadrature::integrate(
        |th: T| {
            quadrature::integrate(
                |ph: T| {
                    let (a, b, c) = sphere_metric(k, th, ph);
                    (a * c - b * b).max(T::zero()).sqrt()
                },
                T::zero(),
                pi + pi,
                tol,
            )
            .unwrap_or(T::nan())
        },
        T::zero(),
        pi,
        tol * T::lit(10.0),
    )?;
    Ok(SphereGeometry {
        k,
        diameter,
        area,
        diameter_constant: diameter / k.sqrt().sqrt(),
        area_constant: area / k.sqrt(),
        claimed_diameter_constant: pi / T::lit(2.0),
        claimed_area_constant: pi,
    })
}

/// `|tau_1|_{g_(0)} / (k (k^(1/4) + r^(1/2))^-3)`.
pub fn ale_decay_ratio<T: Real>(k: T, r: T) -> Result<T> {
    if !(k > T::zero() && k <= T::one()) {
        return Err(Error::Domain(format!("ALE decay ratio needs k in (0, 1], got {k}")));
    }
    if !(r > T::one()) || !r.is_finite() {
        return Err(Error::Domain(format!("ALE decay ratio needs r > 1, got {r}")));
    }
    let chart = EhChart::new(k)?;
    let flat = EhChart::new(T::zero())?;
    let tau = chart.harmonic_forms().2.eval(r);
    let norm = flat.metric(r)?.norm(&tau)?;
    let bound = k * (k.sqrt().sqrt() + r.sqrt()).powi(-3);
    Ok(norm / bound)
}

/// Compares `phi^* g_(k)` at `r` with `lambda^2 g_(k')` at `r`, where
/// `phi(r) = lambda^2 r` and `lambda^4 = k / k'`; returns the largest
/// relative difference of the metric components.
pub fn scaling_pullback_check<T: Real>(k: T, k_prime: T, r: T) -> Result<T> {
    if !(k > T::zero() && k_prime > T::zero()) {
        return Err(Error::Domain("scaling check needs k, k' > 0".into()));
    }
    let lambda2 = (k / k_prime).sqrt();
    let big = EhChart::new(k)?.metric(scaling_map(k, k_prime, r))?;
    let small = EhChart::new(k_prime)?.metric(r)?;
    let mut err = T::zero();
    for i in 0..4 {
        // dr pulls back to lambda^2 dr
        let jac = if i == 0 { lambda2 * lambda2 } else { T::one() };
        let lhs = big.entries()[i * 5] * jac;
        let rhs = lambda2 * small.entries()[i * 5];
        err = err.max((lhs - rhs).abs() / rhs.abs());
    }
    Ok(err)
}

/// `r -> lambda^2 r` with `lambda^4 = k / k'`; fixes the exceptional set `r = 0`.
pub fn scaling_map<T: Real>(k: T, k_prime: T, r: T) -> T {
    (k / k_prime).sqrt() * r
}

/// Log-log slope of `|nu_k|` against the weight `w_t` over `n` geometric samples of `[r_lo, r_hi]`.
pub fn nu_decay_slope<T: Real>(k: T, r_lo: T, r_hi: T, n: usize) -> Result<T> {
    let chart = EhChart::new(k)?;
    let (nu, _, _) = chart.harmonic_forms();
    let mut ws = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let x = T::from_usize_lossy(i) / T::from_usize_lossy(n.max(2) - 1);
        let r = (r_lo.ln() + x * (r_hi.ln() - r_lo.ln())).exp();
        ws.push(weight(k, r)?);
        ys.push(chart.metric(r)?.norm(&nu.eval(r))?);
    }
    Ok(fit::loglog_slope(&ws, &ys)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_distance() {
        for r in [0.25, 1.0, 9.0] {
            assert!((radial_distance(0.0, r).unwrap() - 2.0 * f64::sqrt(r)).abs() < 1e-12);
        }
        assert!(radial_distance(1.0, -1.0).is_err());
    }

    #[test]
    fn round_sphere_metric() {
        let (a, b, c) = sphere_metric(1.0f64, 0.7, 0.3);
        assert!((a - 1.0).abs() < 1e-14 && b.abs() < 1e-14 && (c - 0.7f64.sin().powi(2)).abs() < 1e-14);
    }
}
