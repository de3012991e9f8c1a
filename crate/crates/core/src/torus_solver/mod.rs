//! Spectral solver for the torsion-free fixed-point iteration on the flat
//! torus `T^7 = R^7 / Z^7`.
//!
//! The model problem perturbs the flat structure by an exact form,
//! `phi = phi_0 + eps d(sigma)`, and iterates
//! `Delta eta_{j+1} = d*(psi + f_j psi + *F(d eta_j))` with
//! `f_j phi = (7/3) pi_1(d eta_j)` from `eta_0 = 0`.

mod curved;
mod grid;
mod model;
pub mod ops;

pub use curved::HodgeCache;
pub use grid::{Grid, GridField, SpectralReal, Spectrum, DIM};
pub use model::{
    iterate, make_model_problem, random_potential, residual, solve, theta_linear_part, ModelProblem, OperatorMode,
    PointGeometry, Solution, SolveReport, SolverConfig,
};
