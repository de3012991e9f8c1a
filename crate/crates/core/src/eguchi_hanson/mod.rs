//! The Eguchi-Hanson family `g_(k)` on `(0, inf) x SO(3)`: radial forms over
//! invariant coframes, the hyperkaehler triple, harmonic forms, ALE decay,
//! the scaling maps and weighted Hoelder norms.

mod chart;
mod coframe;
mod expr;
mod geometry;
mod norms;

pub use chart::{asd_triple, asd_triple_rotated, harmonic_forms, hyperkaehler_triple, rescale_basis, EhChart};
pub use coframe::{Coframe, RadialForm};
pub use expr::Expr;
pub use geometry::{
    ale_decay_ratio, nu_decay_slope, radial_distance, scaling_map, scaling_pullback_check, sphere_geometry, weight,
    SphereGeometry, DISTANCE_TOL,
};
pub use norms::{
    rescaling_invariance_check, sample_radial_form, weighted_norm, WeightedNorm, WeightedNormSpec, WeightedSample,
};
