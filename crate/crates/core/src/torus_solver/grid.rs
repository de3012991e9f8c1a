use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftNum, FftPlanner};

use crate::error::{Error, Result};
use crate::exterior_algebra::{basis, Form};
use crate::scalar::Real;

/// Scalars accepted by the spectral solver.
pub trait SpectralReal: Real + FftNum {}

impl<T: Real + FftNum> SpectralReal for T {}

pub const DIM: usize = 7;

/// Uniform grid on the unit torus `R^7 / Z^7` with `n` points per axis,
/// together with the FFT plans for its axes.
pub struct Grid<T: SpectralReal> {
    n: usize,
    points: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    /// `2 pi m` per axis index, zero at the Nyquist index.
    wavenumbers: Vec<T>,
    /// Wavevector of every flat frequency index.
    waves: Vec<[T; DIM]>,
}

impl<T: SpectralReal> Grid<T> {
    pub fn new(n: usize) -> Result<Self> {
        if !matches!(n, 4 | 6 | 8) {
            return Err(Error::Domain(format!("grid resolution must be 4, 6 or 8, got {n}")));
        }
        let mut planner = FftPlanner::new();
        let two_pi = T::lit(2.0) * T::PI();
        let wavenumbers = (0..n)
            .map(|k| match signed_frequency(k, n) {
                Some(m) => two_pi * T::lit(m as f64),
                None => T::zero(),
            })
            .collect();
        let mut grid = Self {
            n,
            points: n.pow(DIM as u32),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
            waves: Vec::new(),
        };
        grid.waves = (0..grid.points).map(|i| grid.multi_index(i).map(|k| grid.wavenumbers[k])).collect();
        Ok(grid)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Axis indices of a flat point index; axis 0 varies fastest.
    pub fn multi_index(&self, mut i: usize) -> [usize; DIM] {
        let mut k = [0; DIM];
        for slot in &mut k {
            *slot = i % self.n;
            i /= self.n;
        }
        k
    }

    /// Coordinates in `[0, 1)^7` of a flat point index.
    pub fn coordinates(&self, i: usize) -> [T; DIM] {
        let n = T::from_usize_lossy(self.n);
        self.multi_index(i).map(|k| T::from_usize_lossy(k) / n)
    }

    /// Wavenumbers `2 pi m_a` of a flat frequency index, Nyquist entries zeroed.
    pub fn wavevector(&self, i: usize) -> [T; DIM] {
        self.waves[i]
    }

    pub fn wavevectors(&self) -> &[[T; DIM]] {
        &self.waves
    }

    /// Signed integer frequency of a flat frequency index; Nyquist entries
    /// are reported as `-n/2`.
    pub fn frequency(&self, i: usize) -> [i64; DIM] {
        self.multi_index(i).map(|k| signed_frequency(k, self.n).unwrap_or(-(self.n as i64) / 2))
    }

    /// Flat index of a signed frequency.
    pub fn frequency_index(&self, m: &[i64; DIM]) -> usize {
        let n = self.n as i64;
        m.iter().rev().fold(0, |acc, &x| acc * self.n + x.rem_euclid(n) as usize)
    }

    /// Flat index of the frequency `-m`.
    pub fn negated(&self, i: usize) -> usize {
        let k = self.multi_index(i);
        k.iter().rev().fold(0, |acc, &x| acc * self.n + (self.n - x) % self.n)
    }

    /// Modes annihilated by the spectral derivative: every axis index is 0 or `n/2`.
    pub fn is_kernel_mode(&self, i: usize) -> bool {
        self.multi_index(i).iter().all(|&k| k == 0 || 2 * k == self.n)
    }

    /// In place 7-dimensional DFT of one component. The forward transform is
    /// normalised by `1 / n^7`, so its output holds Fourier coefficients.
    pub fn transform(&self, data: &mut [Complex<T>], inverse: bool) {
        debug_assert_eq!(data.len(), self.points);
        let fft = if inverse { &self.inverse } else { &self.forward };
        let n = self.n;
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
        let mut line = Vec::new();
        let mut stride = 1;
        for _ in 0..DIM {
            if stride == 1 {
                fft.process_with_scratch(data, &mut scratch);
            } else {
                let block = stride * n;
                line.resize(block, Complex::new(T::zero(), T::zero()));
                for chunk in data.chunks_mut(block) {
                    for o in 0..stride {
                        for k in 0..n {
                            line[o * n + k] = chunk[o + k * stride];
                        }
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for o in 0..stride {
                        for k in 0..n {
                            chunk[o + k * stride] = line[o * n + k];
                        }
                    }
                }
            }
            stride *= n;
        }
        if !inverse {
            let scale = T::from_usize_lossy(self.points).recip();
            data.iter_mut().for_each(|c| *c = *c * scale);
        }
    }
}

fn signed_frequency(k: usize, n: usize) -> Option<i64> {
    if 2 * k == n {
        None
    } else if 2 * k < n {
        Some(k as i64)
    } else {
        Some(k as i64 - n as i64)
    }
}

/// Fourier coefficients of every component of a field, component-major.
pub type Spectrum<T> = Vec<Complex<T>>;

/// Real `p`-form on the grid, stored component-major: component `c` occupies
/// `values[c * points .. (c + 1) * points]`, components ordered as in
/// [`basis::masks`]. The spectrum is computed on first use and cached.
#[derive(Debug)]
pub struct GridField<T: SpectralReal> {
    n: usize,
    degree: usize,
    values: Vec<T>,
    spectrum: OnceLock<Spectrum<T>>,
}

impl<T: SpectralReal> Clone for GridField<T> {
    fn clone(&self) -> Self {
        Self { n: self.n, degree: self.degree, values: self.values.clone(), spectrum: self.spectrum.clone() }
    }
}

impl<T: SpectralReal> GridField<T> {
    pub fn zeros(grid: &Grid<T>, degree: usize) -> Result<Self> {
        Self::from_values(grid, degree, vec![T::zero(); basis::binomial(DIM, degree) * grid.points])
    }

    pub fn from_values(grid: &Grid<T>, degree: usize, values: Vec<T>) -> Result<Self> {
        if degree > DIM {
            return Err(Error::InvalidDegree { degree, op: "grid field" });
        }
        let expected = basis::binomial(DIM, degree) * grid.points;
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: values.len() });
        }
        Ok(Self { n: grid.n, degree, values, spectrum: OnceLock::new() })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(grid: &Grid<T>, degree: usize, f: F) -> Result<Self>
    where
        F: Fn([T; DIM]) -> Form<T> + Sync,
    {
        let forms: Vec<Form<T>> = (0..grid.points).into_par_iter().map(|i| f(grid.coordinates(i))).collect();
        Self::from_points(grid, degree, &forms)
    }

    /// Assembles per-point forms.
    pub fn from_points(grid: &Grid<T>, degree: usize, forms: &[Form<T>]) -> Result<Self> {
        let m = grid.points;
        if forms.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: forms.len() });
        }
        let comps = basis::binomial(DIM, degree);
        let mut values = vec![T::zero(); comps * m];
        for (i, form) in forms.iter().enumerate() {
            if form.dim() != DIM || form.degree() != degree {
                return Err(Error::InvalidDegree { degree: form.degree(), op: "grid field point" });
            }
            for (c, &x) in form.coeffs().iter().enumerate() {
                values[c * m + i] = x;
            }
        }
        Self::from_values(grid, degree, values)
    }

    /// Real part of the inverse transform of a component-major spectrum.
    pub fn from_spectrum(grid: &Grid<T>, degree: usize, mut spectrum: Spectrum<T>) -> Result<Self> {
        let m = grid.points;
        let expected = basis::binomial(DIM, degree) * m;
        if spectrum.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: spectrum.len() });
        }
        // spectrum of the real part: (S(m) + conj S(-m)) / 2
        let half = T::lit(0.5);
        let negated: Vec<usize> = (0..m).map(|i| grid.negated(i)).collect();
        let coefficients: Spectrum<T> = spectrum
            .par_chunks(m)
            .flat_map_iter(|c| negated.iter().enumerate().map(move |(i, &j)| (c[i] + c[j].conj()) * half))
            .collect();
        spectrum.par_chunks_mut(m).for_each(|c| grid.transform(c, true));
        let values = spectrum.into_iter().map(|c| c.re).collect();
        let field = Self::from_values(grid, degree, values)?;
        let _ = field.spectrum.set(coefficients);
        Ok(field)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> usize {
        self.n.pow(DIM as u32)
    }

    pub fn components(&self) -> usize {
        basis::binomial(DIM, self.degree)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[T] {
        let m = self.points();
        &self.values[c * m..(c + 1) * m]
    }

    /// Mutable access; invalidates the cached spectrum.
    pub fn values_mut(&mut self) -> &mut [T] {
        self.spectrum = OnceLock::new();
        &mut self.values
    }

    /// The form at one grid point.
    pub fn point(&self, i: usize) -> Form<T> {
        let m = self.points();
        let coeffs = (0..self.components()).map(|c| self.values[c * m + i]).collect();
        Form::from_coeffs(DIM, self.degree, coeffs).expect("consistent degree")
    }

    fn check(&self, grid: &Grid<T>) -> Result<()> {
        if grid.n != self.n {
            return Err(Error::DimensionMismatch { expected: grid.n, found: self.n });
        }
        Ok(())
    }

    /// Fourier coefficients, component-major.
    pub fn spectrum(&self, grid: &Grid<T>) -> Result<&[Complex<T>]> {
        self.check(grid)?;
        Ok(self.spectrum.get_or_init(|| {
            let mut data: Spectrum<T> = self.values.iter().map(|&x| Complex::new(x, T::zero())).collect();
            data.par_chunks_mut(grid.points).for_each(|c| grid.transform(c, false));
            data
        }))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.n != other.n || self.degree != other.degree {
            return Err(Error::DimensionMismatch { expected: self.values.len(), found: other.values.len() });
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { n: self.n, degree: self.degree, values, spectrum: OnceLock::new() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            n: self.n,
            degree: self.degree,
            values: self.values.iter().map(|&x| x * c).collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// Adds a constant form at every point.
    pub fn add_constant(&self, form: &Form<T>) -> Result<Self> {
        if form.degree() != self.degree || form.dim() != DIM {
            return Err(Error::InvalidDegree { degree: form.degree(), op: "constant shift" });
        }
        let m = self.points();
        let mut values = self.values.clone();
        for (c, &x) in form.coeffs().iter().enumerate() {
            values[c * m..(c + 1) * m].iter_mut().for_each(|v| *v += x);
        }
        Ok(Self { n: self.n, degree: self.degree, values, spectrum: OnceLock::new() })
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// `sup_x |a(x)|_{g_0}`.
    pub fn sup_norm(&self) -> T {
        let m = self.points();
        let k = self.components();
        (0..m)
            .map(|i| (0..k).map(|c| self.values[c * m + i].powi(2)).sum::<T>().sqrt())
            .fold(T::zero(), T::max)
    }

    /// `L^2` inner product for the unit volume torus and the flat metric.
    pub fn inner(&self, other: &Self) -> Result<T> {
        if self.n != other.n || self.degree != other.degree {
            return Err(Error::DimensionMismatch { expected: self.values.len(), found: other.values.len() });
        }
        let sum: T = self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).sum();
        Ok(sum / T::from_usize_lossy(self.points()))
    }

    /// Zero-frequency coefficient of each component.
    pub fn zero_mode(&self, grid: &Grid<T>) -> Result<Form<T>> {
        let spectrum = self.spectrum(grid)?;
        let m = grid.points;
        let coeffs = (0..self.components()).map(|c| spectrum[c * m].re).collect();
        Form::from_coeffs(DIM, self.degree, coeffs)
    }

    /// `L^2` norm of the projection onto the modes killed by the spectral
    /// derivative.
    pub fn kernel_norm(&self, grid: &Grid<T>) -> Result<T> {
        let spectrum = self.spectrum(grid)?;
        let m = grid.points;
        let kernel: Vec<usize> = (0..m).filter(|&i| grid.is_kernel_mode(i)).collect();
        let sum: T = (0..self.components())
            .flat_map(|c| kernel.iter().map(move |&i| spectrum[c * m + i].norm_sqr()))
            .sum();
        Ok(sum.sqrt())
    }

    /// Little-endian dump: `u32` resolution, `u32` degree, then the
    /// coefficients point-major (all components of point 0, then point 1, ...)
    /// as `f64`.
    pub fn write_le<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(&(self.n as u32).to_le_bytes())?;
        out.write_all(&(self.degree as u32).to_le_bytes())?;
        let m = self.points();
        let k = self.components();
        let mut buf = Vec::with_capacity(8 * k);
        for i in 0..m {
            buf.clear();
            for c in 0..k {
                buf.extend_from_slice(&self.values[c * m + i].to_f64().unwrap_or(f64::NAN).to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        Ok(())
    }
}
