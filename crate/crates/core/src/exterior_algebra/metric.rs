use std::sync::OnceLock;

use super::basis;
use super::form::Form;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

/// Tangent vector in a fixed frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<T> {
    components: Vec<T>,
}

impl<T: Real> Vector<T> {
    pub fn new(components: Vec<T>) -> Result<Self> {
        if components.is_empty() || components.len() > basis::MAX_DIM {
            return Err(Error::Domain(format!("vector length {} not in 1..=7", components.len())));
        }
        Ok(Self { components })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(vec![T::zero(); dim])
    }

    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: i + 1 });
        }
        let mut v = Self::zero(dim)?;
        v.components[i] = T::one();
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[T] {
        &self.components
    }

    pub fn into_components(self) -> Vec<T> {
        self.components
    }
}

/// Symmetric positive definite bilinear form on a frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric<T> {
    dim: usize,
    entries: Vec<T>,
    inverse: Vec<T>,
    det: T,
}

impl<T: Real> Metric<T> {
    /// Validates symmetry (relative tolerance `1e3 * eps`) and positivity.
    pub fn new(dim: usize, entries: Vec<T>) -> Result<Self> {
        if dim == 0 || dim > basis::MAX_DIM {
            return Err(Error::Domain(format!("dimension {dim} not in 1..=7")));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        let scale = entries.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
        let tol = T::lit(1e3) * T::tiny() * scale;
        for i in 0..dim {
            for j in 0..i {
                if (entries[i * dim + j] - entries[j * dim + i]).abs() > tol {
                    return Err(Error::NotPositiveDefinite);
                }
            }
        }
        let l = linalg::cholesky(&entries, dim).ok_or(Error::NotPositiveDefinite)?;
        let det = (0..dim).map(|i| l[i * dim + i]).fold(T::one(), |a, d| a * d * d);
        let inverse = linalg::inverse(&entries, dim).ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { dim, entries, inverse, det })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(dim, linalg::identity(dim))
    }

    pub fn diagonal(diag: &[T]) -> Result<Self> {
        let n = diag.len();
        let mut e = vec![T::zero(); n * n];
        for (i, &d) in diag.iter().enumerate() {
            e[i * n + i] = d;
        }
        Self::new(n, e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn inverse_entries(&self) -> &[T] {
        &self.inverse
    }

    pub fn det(&self) -> T {
        self.det
    }

    /// Volume density `sqrt(det g)`.
    pub fn volume(&self) -> T {
        self.det.sqrt()
    }

    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(self.dim, self.entries.iter().map(|&x| x * c).collect())
    }

    pub fn apply(&self, u: &Vector<T>, v: &Vector<T>) -> T {
        let n = self.dim;
        let (u, v) = (u.components(), v.components());
        (0..n).map(|i| u[i] * (0..n).map(|j| self.entries[i * n + j] * v[j]).sum::<T>()).sum()
    }

    /// Raises a covector to a vector with `g^{-1}`.
    pub fn sharp(&self, covector: &[T]) -> Vector<T> {
        Vector { components: linalg::mat_vec(&self.inverse, covector, self.dim, self.dim) }
    }

    fn check(&self, a: &Form<T>) -> Result<()> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: a.dim() });
        }
        Ok(())
    }

    /// Coefficients of `a` with all indices raised.
    pub fn raise(&self, a: &Form<T>) -> Result<Vec<T>> {
        self.check(a)?;
        let m = a.coeffs().len();
        let c = compound(&self.inverse, self.dim, a.degree());
        Ok((0..m).map(|i| (0..m).map(|j| c[i * m + j] * a.coeffs()[j]).sum()).collect())
    }

    /// Pointwise inner product of forms, characterised by `<a, b> vol = a ^ *b`.
    pub fn inner(&self, a: &Form<T>, b: &Form<T>) -> Result<T> {
        a.is_compatible(b)?;
        let raised = self.raise(b)?;
        Ok(a.coeffs().iter().zip(&raised).map(|(&x, &y)| x * y).sum())
    }

    pub fn norm(&self, a: &Form<T>) -> Result<T> {
        Ok(self.inner(a, a)?.max(T::zero()).sqrt())
    }

    /// Hodge star for the coordinate orientation.
    pub fn star(&self, a: &Form<T>) -> Result<Form<T>> {
        let raised = self.raise(a)?;
        let n = self.dim;
        let vol = self.volume();
        let mut out = Form::zero(n, n - a.degree())?;
        for (&mask, &c) in a.masks().iter().zip(&raised) {
            let s = T::lit(basis::complement_sign(n, mask) as f64);
            out.set_mask(basis::full_mask(n) & !mask, s * vol * c);
        }
        Ok(out)
    }

    /// Riemannian volume form `sqrt(det g) dx_1 ^ ... ^ dx_n`.
    pub fn volume_form(&self) -> Form<T> {
        let mut f = Form::zero(self.dim, self.dim).expect("valid dimension");
        f.coeffs_mut()[0] = self.volume();
        f
    }
}

/// Expansion of a degree `k` minor along its first row: the row index and
/// lower minor position per row mask, and `(column, sign, lower position)`
/// per column mask.
struct CompoundPlan {
    rows: Vec<(usize, usize)>,
    cols: Vec<Vec<(usize, bool, usize)>>,
}

fn compound_plan(n: usize, k: usize) -> &'static CompoundPlan {
    static PLANS: OnceLock<Vec<Vec<CompoundPlan>>> = OnceLock::new();
    let plans = PLANS.get_or_init(|| {
        (0..=basis::MAX_DIM)
            .map(|n| {
                (0..=n)
                    .map(|k| {
                        let masks = basis::masks(n, k);
                        let rows = masks
                            .iter()
                            .map(|&m| {
                                let i0 = m.trailing_zeros() as usize;
                                (i0, if k == 0 { 0 } else { basis::position(n, m & !(1 << i0)) })
                            })
                            .collect();
                        let cols = masks
                            .iter()
                            .map(|&m| {
                                basis::indices(m)
                                    .into_iter()
                                    .map(|j| (j, basis::rank_in(m, j) % 2 == 1, basis::position(n, m & !(1 << j))))
                                    .collect()
                            })
                            .collect();
                        CompoundPlan { rows, cols }
                    })
                    .collect()
            })
            .collect()
    });
    &plans[n][k]
}

/// `p`-th compound matrix: entry `(I, J)` is the minor `det a[I, J]` over the
/// sorted index sets of size `p`, ordered as in [`basis::masks`].
pub fn compound<T: Real>(a: &[T], n: usize, p: usize) -> Vec<T> {
    let mut prev = vec![T::one()];
    for k in 1..=p {
        let plan = compound_plan(n, k);
        let m = plan.rows.len();
        let mprev = basis::binomial(n, k - 1);
        let mut cur = vec![T::zero(); m * m];
        for (ri, &(i0, rpos)) in plan.rows.iter().enumerate() {
            let arow = &a[i0 * n..(i0 + 1) * n];
            let prow = &prev[rpos * mprev..(rpos + 1) * mprev];
            for (ci, col) in plan.cols.iter().enumerate() {
                let mut s = T::zero();
                for &(j, odd, pos) in col {
                    let term = arow[j] * prow[pos];
                    if odd {
                        s -= term;
                    } else {
                        s += term;
                    }
                }
                cur[ri * m + ci] = s;
            }
        }
        prev = cur;
    }
    prev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compound_top_is_det() {
        let a = [2.0f64, 1.0, 0.5, 0.0, 3.0, 1.0, 1.0, 0.0, 4.0];
        let c3 = compound(&a, 3, 3);
        assert!((c3[0] - linalg::det(&a, 3)).abs() < 1e-13);
        let c1 = compound(&a, 3, 1);
        assert_eq!(c1, a.to_vec());
        let c2 = compound(&a, 3, 2);
        // rows {0,1}, cols {0,2}
        assert!((c2[1] - (2.0 * 1.0 - 0.5 * 0.0)).abs() < 1e-14);
    }

    #[test]
    fn rejects_indefinite() {
        assert!(matches!(Metric::diagonal(&[1.0, -1.0]), Err(Error::NotPositiveDefinite)));
        assert!(matches!(Metric::new(2, vec![1.0, 0.5, 0.0, 1.0]), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn coordinate_star() {
        let g = Metric::<f64>::identity(7).unwrap();
        let a = Form::monomial(7, &[0, 1, 2]).unwrap();
        assert_eq!(g.star(&a).unwrap(), Form::monomial(7, &[3, 4, 5, 6]).unwrap());
        let b = Form::monomial(4, &[1]).unwrap();
        let g4 = Metric::<f64>::identity(4).unwrap();
        // dx2 -> -dx1 ^ dx3 ^ dx4
        assert_eq!(g4.star(&b).unwrap(), -Form::monomial(4, &[0, 2, 3]).unwrap());
    }
}
