//! Numerical certification of a gluing construction for torsion-free G2
//! structures: exterior algebra, Eguchi-Hanson geometry, cone spectra,
//! the Kummer-type resolution of `T^7 / Gamma` and a spectral solver on `T^7`.

pub mod cone_spectral;
pub mod eguchi_hanson;
pub mod error;
pub mod exterior_algebra;
pub mod fit;
pub mod kummer;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod torus_solver;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Form64 = exterior_algebra::Form<f64>;
pub type Metric64 = exterior_algebra::Metric<f64>;
pub type Vector64 = exterior_algebra::Vector<f64>;
