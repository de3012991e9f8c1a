use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::curved::HodgeCache;
use super::grid::{Grid, GridField, SpectralReal, DIM};
use super::ops;
use crate::error::{Error, Result};
use crate::exterior_algebra::{basis, metric_from_g2, phi0, psi0, Form, Metric};

/// Background metric for `d*`, `*` and the Laplacian inside the iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorMode {
    /// The flat metric `g_0`; the Laplacian is diagonal in frequency.
    Flat,
    /// The metric `g(phi)`, inverted by preconditioned conjugate gradients.
    CurvedCg,
}

impl fmt::Display for OperatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorMode::Flat => "flat",
            OperatorMode::CurvedCg => "cg",
        })
    }
}

impl FromStr for OperatorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" | "flat-background" => Ok(OperatorMode::Flat),
            "cg" | "curved-cg" => Ok(OperatorMode::CurvedCg),
            _ => Err(Error::Domain(format!("unknown operator mode `{s}`, expected flat or cg"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub n: usize,
    /// Amplitude of the exact perturbation, `sup |phi - phi_0| = eps`.
    pub eps: f64,
    pub seed: u64,
    /// Stopping threshold on `sup |eta_{j+1} - eta_j|`.
    pub tol: f64,
    pub max_iter: usize,
    pub mode: OperatorMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { n: 6, eps: 1e-2, seed: 7, tol: 1e-8, max_iter: 50, mode: OperatorMode::Flat }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.n, 4 | 6 | 8) {
            return Err(Error::Domain(format!("n must be 4, 6 or 8, got {}", self.n)));
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::Domain(format!("eps must be finite and non-negative, got {}", self.eps)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Domain(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        if self.mode == OperatorMode::CurvedCg && self.n != 4 {
            return Err(Error::Domain(format!(
                "cg mode caches pointwise Hodge matrices and supports n = 4 only, got {}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Metric data of `phi` at one grid point.
#[derive(Clone, Debug)]
pub struct PointGeometry<T> {
    pub metric: Metric<T>,
    /// `phi` with all indices raised by `g(phi)`.
    pub phi_sharp: Vec<T>,
}

/// `phi = phi_0 + eps d(sigma)` on the grid together with the data of the
/// iteration: `psi = *(Theta(phi) - psi_0)` and the pointwise geometry of `phi`.
pub struct ModelProblem<T: SpectralReal> {
    pub grid: Grid<T>,
    pub config: SolverConfig,
    /// Potential with `sup |d sigma| = 1`.
    pub sigma: GridField<T>,
    pub phi: GridField<T>,
    /// `Theta(phi)`.
    pub theta: GridField<T>,
    pub psi: GridField<T>,
    pub geometry: Vec<PointGeometry<T>>,
    /// `sup |d *psi - d Theta(phi)| / sup |d Theta(phi)|`, zero when both vanish.
    pub compatibility_defect: T,
    pub(crate) hodge: Option<HodgeCache<T>>,
}

/// Random real 2-form whose Fourier coefficients vanish outside `|m_a| <= n / 4`
/// and at `m = 0`.
pub fn random_potential<T: SpectralReal>(grid: &Grid<T>, seed: u64) -> Result<GridField<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = grid.points();
    let comps = basis::binomial(DIM, 2);
    let band = (grid.n() / 4) as i64;
    let mut spectrum = vec![Complex::new(T::zero(), T::zero()); comps * m];
    let width = (2 * band + 1) as usize;
    for c in 0..comps {
        for flat in 0..width.pow(DIM as u32) {
            let mut rest = flat;
            let mut freq = [0i64; DIM];
            for slot in &mut freq {
                *slot = (rest % width) as i64 - band;
                rest /= width;
            }
            // one representative of each pair {m, -m}
            match freq.iter().find(|&&x| x != 0) {
                Some(&x) if x > 0 => {}
                _ => continue,
            }
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let z = Complex::new(T::lit(re), T::lit(im));
            let i = grid.frequency_index(&freq);
            let j = grid.frequency_index(&freq.map(|x| -x));
            spectrum[c * m + i] = z;
            spectrum[c * m + j] = z.conj();
        }
    }
    GridField::from_spectrum(grid, 2, spectrum)
}

fn not_g2(i: usize, what: &str) -> Error {
    Error::NotG2(format!("{what} is not positive at grid point {i}"))
}

/// Pointwise `(g(phi), phi sharp, Theta(phi))`.
fn geometry_at<T: SpectralReal>(phi: &Form<T>) -> Result<(PointGeometry<T>, Form<T>)> {
    let (metric, _) = metric_from_g2(phi)?;
    let theta = metric.star(phi)?;
    let phi_sharp = metric.raise(phi)?;
    Ok((PointGeometry { metric, phi_sharp }, theta))
}

pub fn make_model_problem<T: SpectralReal>(config: &SolverConfig) -> Result<ModelProblem<T>> {
    config.validate()?;
    let grid = Grid::<T>::new(config.n)?;
    let raw = random_potential(&grid, config.seed)?;
    let raw_d = ops::exterior_derivative(&grid, &raw)?;
    let sigma = raw.scale(raw_d.sup_norm().recip());
    let perturbation = raw_d.scale(T::lit(config.eps) / raw_d.sup_norm());
    let phi = perturbation.add_constant(&phi0())?;
    let psi_0 = psi0::<T>();
    let pointwise: Vec<Result<(PointGeometry<T>, Form<T>, Form<T>)>> = (0..grid.points())
        .into_par_iter()
        .map(|i| {
            let (geometry, theta) = geometry_at(&phi.point(i)).map_err(|_| not_g2(i, "phi_0 + eps d(sigma)"))?;
            let psi = geometry.metric.star(&theta.try_sub(&psi_0)?)?;
            Ok((geometry, theta, psi))
        })
        .collect();
    let mut geometry = Vec::with_capacity(grid.points());
    let mut thetas = Vec::with_capacity(grid.points());
    let mut psis = Vec::with_capacity(grid.points());
    for r in pointwise {
        let (g, t, p) = r?;
        geometry.push(g);
        thetas.push(t);
        psis.push(p);
    }
    let theta = GridField::from_points(&grid, 4, &thetas)?;
    let psi = GridField::from_points(&grid, 3, &psis)?;

    let star_psi: Vec<Form<T>> =
        (0..grid.points()).into_par_iter().map(|i| geometry[i].metric.star(&psi.point(i))).collect::<Result<_>>()?;
    let d_star_psi = ops::exterior_derivative(&grid, &GridField::from_points(&grid, 4, &star_psi)?)?;
    let d_theta = ops::exterior_derivative(&grid, &theta)?;
    let scale = d_theta.sup_norm();
    let defect = d_star_psi.sub(&d_theta)?.sup_norm();
    let compatibility_defect = if scale == T::zero() { defect } else { defect / scale };
    if compatibility_defect > T::lit(1e-8).max(T::lit(1e4) * T::epsilon()) {
        return Err(Error::Inconsistent(format!(
            "d*psi and d*phi differ by {compatibility_defect} relative"
        )));
    }
    let hodge = match config.mode {
        OperatorMode::Flat => None,
        OperatorMode::CurvedCg => Some(HodgeCache::new(&geometry)?),
    };
    Ok(ModelProblem { grid, config: config.clone(), sigma, phi, theta, psi, geometry, compatibility_defect, hodge })
}

/// The linear part `T(chi)` of `Theta(phi + chi) = *phi - T(chi) - F(chi)`:
/// `T(chi) = *chi - <chi, phi> psi / 3 - (w ^ phi) / 2` with `w` the 1-form
/// dual to the vector `v` with `v ⌟ vol = phi ^ chi`, all for `g(phi)`.
pub fn theta_linear_part<T: SpectralReal>(
    phi: &Form<T>,
    theta: &Form<T>,
    geometry: &PointGeometry<T>,
    chi: &Form<T>,
) -> Result<Form<T>> {
    let g = &geometry.metric;
    let inner: T = chi.coeffs().iter().zip(&geometry.phi_sharp).map(|(&a, &b)| a * b).sum();
    let six = phi.wedge(chi)?;
    let full = basis::full_mask(DIM);
    let vol = g.volume();
    let v: Vec<T> = (0..DIM)
        .map(|i| {
            let c = six.get_mask(full & !(1 << i)) / vol;
            if i % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    let w: Vec<T> = (0..DIM).map(|i| (0..DIM).map(|j| g.entries()[i * DIM + j] * v[j]).sum()).collect();
    let w_phi = Form::from_coeffs(DIM, 1, w)?.wedge(phi)?;
    g.star(chi)?
        .try_sub(&theta.scale(inner / T::lit(3.0)))?
        .try_sub(&w_phi.scale(T::lit(0.5)))
}

impl<T: SpectralReal> ModelProblem<T> {
    /// Operators of `g(phi)`, present in cg mode.
    pub fn hodge(&self) -> Option<&HodgeCache<T>> {
        self.hodge.as_ref()
    }

    /// `f` with `f phi = (7/3) pi_1(chi)` at point `i`.
    pub fn pi1_coefficient(&self, i: usize, chi: &Form<T>) -> T {
        let inner: T = chi.coeffs().iter().zip(&self.geometry[i].phi_sharp).map(|(&a, &b)| a * b).sum();
        inner / T::lit(3.0)
    }

    /// `T(chi)` at point `i`.
    pub fn linear_part(&self, i: usize, chi: &Form<T>) -> Result<Form<T>> {
        theta_linear_part(&self.phi.point(i), &self.theta.point(i), &self.geometry[i], chi)
    }

    /// `F(chi) = *phi - T(chi) - Theta(phi + chi)` at point `i`.
    pub fn theta_remainder(&self, i: usize, chi: &Form<T>) -> Result<Form<T>> {
        let phi = self.phi.point(i);
        let shifted = phi.try_add(chi)?;
        let (g, _) = metric_from_g2(&shifted).map_err(|_| not_g2(i, "phi + d(eta)"))?;
        let theta_shifted = g.star(&shifted)?;
        let theta = self.theta.point(i);
        theta.try_sub(&theta_linear_part(&phi, &theta, &self.geometry[i], chi)?)?.try_sub(&theta_shifted)
    }

    /// Pointwise `f_j` and `F(d eta_j)` for `chi = d eta_j`.
    pub(crate) fn nonlinear_terms(&self, chi: &GridField<T>) -> Result<(Vec<T>, GridField<T>)> {
        let terms: Vec<(T, Form<T>)> = (0..self.grid.points())
            .into_par_iter()
            .map(|i| {
                let c = chi.point(i);
                Ok((self.pi1_coefficient(i, &c), self.theta_remainder(i, &c)?))
            })
            .collect::<Result<_>>()?;
        let (f, remainder): (Vec<T>, Vec<Form<T>>) = terms.into_iter().unzip();
        Ok((f, GridField::from_points(&self.grid, 4, &remainder)?))
    }

    /// `psi + f psi`.
    pub(crate) fn scaled_psi(&self, f: &[T]) -> Result<GridField<T>> {
        let m = self.grid.points();
        let mut out = self.psi.clone();
        for chunk in out.values_mut().chunks_mut(m) {
            for (x, &fi) in chunk.iter_mut().zip(f) {
                *x += *x * fi;
            }
        }
        Ok(out)
    }

    /// One step `eta_j -> eta_{j+1}` of the iteration
    /// `Delta eta_{j+1} = d*(psi + f_j psi + *F(d eta_j))`.
    pub fn picard_step(&self, eta: &GridField<T>) -> Result<GridField<T>> {
        if eta.degree() != 2 {
            return Err(Error::InvalidDegree { degree: eta.degree(), op: "picard step" });
        }
        let chi = ops::exterior_derivative(&self.grid, eta)?;
        let (f, remainder) = self.nonlinear_terms(&chi)?;
        let base = self.scaled_psi(&f)?;
        match &self.hodge {
            None => {
                let rho = base.add(&ops::flat_star(&self.grid, &remainder)?)?;
                let sigma = ops::codifferential(&self.grid, &rho)?;
                ops::inverse_laplacian(&self.grid, &sigma)
            }
            Some(hodge) => {
                let rho = base.add(&hodge.star(&self.grid, &remainder)?)?;
                hodge.solve_laplace(&self.grid, &hodge.codifferential(&self.grid, &rho)?, self.config.tol)
            }
        }
    }

    /// `phi + d eta`.
    pub fn corrected(&self, eta: &GridField<T>) -> Result<GridField<T>> {
        self.phi.add(&ops::exterior_derivative(&self.grid, eta)?)
    }
}

/// `max(sup |d phi|, sup |d Theta(phi)|)`, the torsion of a closed structure
/// measured spectrally.
pub fn residual<T: SpectralReal>(grid: &Grid<T>, phi: &GridField<T>) -> Result<T> {
    if phi.degree() != 3 {
        return Err(Error::InvalidDegree { degree: phi.degree(), op: "residual" });
    }
    let thetas: Vec<Form<T>> = (0..grid.points())
        .into_par_iter()
        .map(|i| {
            let p = phi.point(i);
            let (g, _) = metric_from_g2(&p).map_err(|_| not_g2(i, "phi"))?;
            g.star(&p)
        })
        .collect::<Result<_>>()?;
    let theta = GridField::from_points(grid, 4, &thetas)?;
    let closed = ops::exterior_derivative(grid, phi)?.sup_norm();
    let coclosed = ops::exterior_derivative(grid, &theta)?.sup_norm();
    Ok(closed.max(coclosed))
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub n: usize,
    pub eps: f64,
    pub seed: u64,
    pub mode: OperatorMode,
    pub tol: f64,
    pub converged: bool,
    /// Index `k` of the returned iterate `eta_k`, the first with
    /// `sup |eta_{k+1} - eta_k| <= tol`.
    pub iterations: usize,
    /// `sup |eta_{j+1} - eta_j|` for every step taken.
    pub updates: Vec<f64>,
    /// Ratios of consecutive updates.
    pub contraction_factors: Vec<f64>,
    /// Torsion residual of `phi` before the iteration.
    pub initial_residual: f64,
    /// Torsion residual of `phi + d eta`.
    pub residual: f64,
    /// `sup |phi + d eta - phi_0|`.
    pub distance_to_flat: f64,
    /// Largest zero-frequency coefficient of `phi + d eta - phi_0`.
    pub zero_mode_shift: f64,
    /// Largest zero-frequency coefficient of `eta`.
    pub eta_zero_mode: f64,
    pub compatibility_defect: f64,
}

#[derive(Debug)]
pub struct Solution<T: SpectralReal> {
    pub eta: GridField<T>,
    pub phi_tilde: GridField<T>,
    pub report: SolveReport,
}

fn f64_of<T: SpectralReal>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Runs the iteration from `eta_0 = 0` and reports whether it met the
/// tolerance; exhausting `max_iter` is not an error here.
pub fn iterate<T: SpectralReal>(problem: &ModelProblem<T>) -> Result<Solution<T>> {
    let grid = &problem.grid;
    let cfg = &problem.config;
    let mut eta = GridField::zeros(grid, 2)?;
    let mut updates = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for j in 0..cfg.max_iter {
        let next = problem.picard_step(&eta)?;
        let update = next.sub(&eta)?.sup_norm();
        updates.push(f64_of(update));
        if update <= T::lit(cfg.tol) {
            converged = true;
            iterations = j;
            break;
        }
        eta = next;
        iterations = j + 1;
    }
    let contraction_factors = updates.windows(2).map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / w[0] }).collect();
    let phi_tilde = problem.corrected(&eta)?;
    let shift = phi_tilde.add_constant(&phi0::<T>().scale(-T::one()))?;
    let report = SolveReport {
        n: cfg.n,
        eps: cfg.eps,
        seed: cfg.seed,
        mode: cfg.mode,
        tol: cfg.tol,
        converged,
        iterations,
        updates,
        contraction_factors,
        initial_residual: f64_of(residual(grid, &problem.phi)?),
        residual: f64_of(residual(grid, &phi_tilde)?),
        distance_to_flat: f64_of(shift.sup_norm()),
        zero_mode_shift: f64_of(shift.zero_mode(grid)?.max_abs()),
        eta_zero_mode: f64_of(eta.zero_mode(grid)?.max_abs()),
        compatibility_defect: f64_of(problem.compatibility_defect),
    };
    Ok(Solution { eta, phi_tilde, report })
}

/// Builds the model problem and iterates to the tolerance.
pub fn solve<T: SpectralReal>(config: &SolverConfig) -> Result<Solution<T>> {
    let problem = make_model_problem::<T>(config)?;
    let solution = iterate(&problem)?;
    if !solution.report.converged {
        return Err(Error::MaxIterations(config.max_iter));
    }
    Ok(solution)
}
