//! Operators of a variable metric `g(phi)` on the grid.

use rayon::prelude::*;

use super::grid::{Grid, GridField, SpectralReal, DIM};
use super::model::PointGeometry;
use super::ops;
use crate::error::{Error, Result};
use crate::exterior_algebra::{basis, compound};

/// Pointwise Hodge star matrices of `g(phi)` for degrees 2 to 6.
pub struct HodgeCache<T> {
    points: usize,
    /// `stars[p - 2]` holds the matrices of `*: Lambda^p -> Lambda^(7-p)`
    /// point after point, row-major.
    stars: Vec<Vec<T>>,
}

const CG_MAX_ITER: usize = 500;

impl<T: SpectralReal> HodgeCache<T> {
    pub fn new(geometry: &[PointGeometry<T>]) -> Result<Self> {
        let points = geometry.len();
        let full = basis::full_mask(DIM);
        let stars = (2..=6)
            .map(|p| {
                let k = basis::binomial(DIM, p);
                let masks = basis::masks(DIM, p);
                let per_point: Vec<Vec<T>> = geometry
                    .par_iter()
                    .map(|geo| {
                        let g = &geo.metric;
                        let c = compound(g.inverse_entries(), DIM, p);
                        let vol = g.volume();
                        let mut s = vec![T::zero(); k * k];
                        for (row, &mask) in masks.iter().enumerate() {
                            let target = basis::position(DIM, full & !mask);
                            let sign = T::lit(basis::complement_sign(DIM, mask) as f64) * vol;
                            for col in 0..k {
                                s[target * k + col] = sign * c[row * k + col];
                            }
                        }
                        s
                    })
                    .collect();
                per_point.concat()
            })
            .collect();
        Ok(Self { points, stars })
    }

    /// Hodge star of `g(phi)`.
    pub fn star(&self, grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
        let p = a.degree();
        if !(2..=6).contains(&p) {
            return Err(Error::InvalidDegree { degree: p, op: "cached Hodge star" });
        }
        let k = basis::binomial(DIM, p);
        let m = self.points;
        let mats = &self.stars[p - 2];
        let values = a.values();
        let rows: Vec<Vec<T>> = (0..m)
            .into_par_iter()
            .map(|i| {
                let s = &mats[i * k * k..(i + 1) * k * k];
                (0..k).map(|r| (0..k).map(|c| s[r * k + c] * values[c * m + i]).sum()).collect()
            })
            .collect();
        let mut out = vec![T::zero(); k * m];
        for (i, row) in rows.iter().enumerate() {
            for (r, &x) in row.iter().enumerate() {
                out[r * m + i] = x;
            }
        }
        GridField::from_values(grid, DIM - p, out)
    }

    /// `d* = (-1)^p * d *` on `p`-forms.
    pub fn codifferential(&self, grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
        let p = a.degree();
        let out = self.star(grid, &ops::exterior_derivative(grid, &self.star(grid, a)?)?)?;
        Ok(if p % 2 == 0 { out } else { out.scale(-T::one()) })
    }

    /// `d d* + d* d` on 2-forms.
    pub fn laplacian(&self, grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
        let down = ops::exterior_derivative(grid, &self.codifferential(grid, a)?)?;
        let up = self.codifferential(grid, &ops::exterior_derivative(grid, a)?)?;
        down.add(&up)
    }

    /// Pointwise `<a, .>_g vol_g` as a coefficient vector: `(-1)^|I| (*a)_{I^c}`.
    pub fn lower(&self, grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
        let starred = self.star(grid, a)?;
        let p = a.degree();
        let m = self.points;
        let full = basis::full_mask(DIM);
        let mut out = vec![T::zero(); a.values().len()];
        for (c, &mask) in basis::masks(DIM, p).iter().enumerate() {
            let src = basis::position(DIM, full & !mask);
            let negative = basis::complement_sign(DIM, mask) < 0;
            for (o, &x) in out[c * m..(c + 1) * m].iter_mut().zip(starred.component(src)) {
                *o = if negative { -x } else { x };
            }
        }
        GridField::from_values(grid, p, out)
    }

    /// Solves `Delta_g eta = sigma` for `eta` orthogonal to the flat kernel,
    /// by conjugate gradients on the symmetric form `G Delta_g` with the flat
    /// inverse Laplacian as preconditioner.
    pub fn solve_laplace(&self, grid: &Grid<T>, sigma: &GridField<T>, tol: f64) -> Result<GridField<T>> {
        let b = self.lower(grid, sigma)?;
        let b_norm = b.inner(&b)?.sqrt();
        let mut x = GridField::zeros(grid, sigma.degree())?;
        if b_norm == T::zero() {
            return Ok(x);
        }
        let target = T::lit(tol.min(1e-10)).max(T::lit(1e2) * T::epsilon()) * b_norm;
        let mut r = b;
        let mut z = ops::pseudo_inverse_laplacian(grid, &r)?;
        let mut p = z.clone();
        let mut rz = r.inner(&z)?;
        for _ in 0..CG_MAX_ITER {
            let ap = self.lower(grid, &self.laplacian(grid, &p)?)?;
            let alpha = rz / p.inner(&ap)?;
            x = x.add(&p.scale(alpha))?;
            r = r.sub(&ap.scale(alpha))?;
            if r.inner(&r)?.sqrt() <= target {
                return Ok(x);
            }
            z = ops::pseudo_inverse_laplacian(grid, &r)?;
            let rz_next = r.inner(&z)?;
            p = z.add(&p.scale(rz_next / rz))?;
            rz = rz_next;
        }
        Err(Error::MaxIterations(CG_MAX_ITER))
    }
}
