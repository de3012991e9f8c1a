//! Exterior algebra on frames of dimension at most 7, metric operators, and
//! the nonlinear maps of G2 geometry.

pub mod basis;
mod form;
mod g2;
mod metric;

pub use form::{index_key, Form};
pub use g2::{
    bilinear_b, flat_hyperkaehler_triple, metric_from_g2, phi0, pi1_project, product_dual, product_structure,
    psi0, theta, theta_split, PHI0_TERMS,
};
pub use metric::{compound, Metric, Vector};

use crate::error::Result;
use crate::scalar::Real;

pub fn wedge<T: Real>(a: &Form<T>, b: &Form<T>) -> Result<Form<T>> {
    a.wedge(b)
}

pub fn hodge_star<T: Real>(g: &Metric<T>, a: &Form<T>) -> Result<Form<T>> {
    g.star(a)
}

pub fn interior_product<T: Real>(v: &Vector<T>, a: &Form<T>) -> Result<Form<T>> {
    a.interior(v)
}

pub use g2::cross_product;
