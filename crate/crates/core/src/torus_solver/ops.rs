//! Spectral exterior calculus on the flat torus.

use num_complex::Complex;
use rayon::prelude::*;

use super::grid::{Grid, GridField, SpectralReal, Spectrum, DIM};
use crate::error::{Error, Result};
use crate::exterior_algebra::basis;

/// `(source component, axis, sign)` contributions to one output component.
type Stencil = Vec<(usize, usize, bool)>;

/// Output component `I` of `d` collects `(-1)^rank(j in I) d_j a_{I - j}`.
fn d_stencils(p: usize) -> Vec<Stencil> {
    basis::masks(DIM, p + 1)
        .iter()
        .map(|&out| {
            basis::indices(out)
                .into_iter()
                .map(|j| (basis::position(DIM, out & !(1 << j)), j, basis::rank_in(out, j) % 2 == 1))
                .collect()
        })
        .collect()
}

/// Output component `K` of the adjoint collects `-(-1)^rank(j in K + j) d_j a_{K + j}`.
fn codiff_stencils(p: usize) -> Vec<Stencil> {
    basis::masks(DIM, p - 1)
        .iter()
        .map(|&out| {
            (0..DIM)
                .filter(|&j| out & (1 << j) == 0)
                .map(|j| {
                    let src = out | (1 << j);
                    (basis::position(DIM, src), j, basis::rank_in(src, j) % 2 == 0)
                })
                .collect()
        })
        .collect()
}

fn apply_stencils<T: SpectralReal>(grid: &Grid<T>, spectrum: &[Complex<T>], stencils: &[Stencil]) -> Spectrum<T> {
    let m = grid.points();
    let waves = grid.wavevectors();
    let mut out = vec![Complex::new(T::zero(), T::zero()); stencils.len() * m];
    out.par_chunks_mut(m).zip(stencils.par_iter()).for_each(|(target, stencil)| {
        for &(src, axis, negative) in stencil {
            let source = &spectrum[src * m..(src + 1) * m];
            for ((t, s), k) in target.iter_mut().zip(source).zip(waves) {
                // i k s
                let v = Complex::new(-s.im * k[axis], s.re * k[axis]);
                if negative {
                    *t -= v;
                } else {
                    *t += v;
                }
            }
        }
    });
    out
}

/// Exterior derivative with spectral partial derivatives.
pub fn exterior_derivative<T: SpectralReal>(grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
    let p = a.degree();
    if p >= DIM {
        return Err(Error::InvalidDegree { degree: p, op: "exterior derivative" });
    }
    let spectrum = apply_stencils(grid, a.spectrum(grid)?, &d_stencils(p));
    GridField::from_spectrum(grid, p + 1, spectrum)
}

/// Formal `L^2` adjoint of [`exterior_derivative`] for the flat metric.
pub fn codifferential<T: SpectralReal>(grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
    let p = a.degree();
    if p == 0 {
        return Err(Error::InvalidDegree { degree: p, op: "codifferential" });
    }
    let spectrum = apply_stencils(grid, a.spectrum(grid)?, &codiff_stencils(p));
    GridField::from_spectrum(grid, p - 1, spectrum)
}

fn multiply_symbol<T: SpectralReal>(grid: &Grid<T>, a: &GridField<T>, symbol: impl Fn(T) -> T + Sync) -> Result<GridField<T>> {
    let m = grid.points();
    let waves = grid.wavevectors();
    let mut spectrum = a.spectrum(grid)?.to_vec();
    spectrum.par_chunks_mut(m).for_each(|c| {
        for (x, k) in c.iter_mut().zip(waves) {
            *x = *x * symbol(k.iter().map(|&w| w * w).sum());
        }
    });
    GridField::from_spectrum(grid, a.degree(), spectrum)
}

/// Hodge Laplacian `d d* + d* d`, with symbol `|2 pi m|^2`.
pub fn laplacian<T: SpectralReal>(grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
    multiply_symbol(grid, a, |k2| k2)
}

/// Drops the modes annihilated by the spectral derivative.
pub fn project_out_kernel<T: SpectralReal>(grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
    multiply_symbol(grid, a, |k2| if k2 == T::zero() { T::zero() } else { T::one() })
}

/// Relative tolerance for the kernel component of a right hand side.
pub fn kernel_tolerance<T: SpectralReal>() -> T {
    T::lit(1e-10).max(T::lit(1e3) * T::epsilon())
}

/// Inverse of [`laplacian`] on the complement of its kernel. Fails with
/// [`Error::ZeroMode`] when `a` has a kernel component above
/// [`kernel_tolerance`] relative to its `L^2` norm.
pub fn inverse_laplacian<T: SpectralReal>(grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
    let norm = a.inner(a)?.sqrt();
    if a.kernel_norm(grid)? > kernel_tolerance::<T>() * norm {
        return Err(Error::ZeroMode);
    }
    multiply_symbol(grid, a, |k2| if k2 == T::zero() { T::zero() } else { k2.recip() })
}

/// [`inverse_laplacian`] after dropping the kernel component.
pub fn pseudo_inverse_laplacian<T: SpectralReal>(grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
    multiply_symbol(grid, a, |k2| if k2 == T::zero() { T::zero() } else { k2.recip() })
}

/// Hodge star of the flat metric, pointwise.
pub fn flat_star<T: SpectralReal>(grid: &Grid<T>, a: &GridField<T>) -> Result<GridField<T>> {
    let p = a.degree();
    let m = grid.points();
    let full = basis::full_mask(DIM);
    let mut values = vec![T::zero(); basis::binomial(DIM, DIM - p) * m];
    for (c, &mask) in basis::masks(DIM, p).iter().enumerate() {
        let target = basis::position(DIM, full & !mask);
        let negative = basis::complement_sign(DIM, mask) < 0;
        for (t, &x) in values[target * m..(target + 1) * m].iter_mut().zip(a.component(c)) {
            *t = if negative { -x } else { x };
        }
    }
    GridField::from_values(grid, DIM - p, values)
}
