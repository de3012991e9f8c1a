//! Differential forms with radial coefficients over a coframe with constant
//! structure equations.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::expr::Expr;
use crate::error::{Error, Result};
use crate::exterior_algebra::{basis, Form};
use crate::scalar::Real;

/// Coframe `e^0, .., e^{n-1}` in which `e^radial = dr` and
/// `d e^a = sum sign * e^b ^ e^c` over `structure[a]`.
#[derive(Debug, PartialEq, Eq)]
pub struct Coframe {
    pub name: &'static str,
    pub labels: Vec<&'static str>,
    pub radial: usize,
    pub structure: Vec<Vec<(i8, usize, usize)>>,
}

/// `d eta^i = sign * eta^j ^ eta^k` for cyclic `(i, j, k)` on generators `first..first + 3`.
fn so3(first: usize, sign: i8) -> Vec<Vec<(i8, usize, usize)>> {
    (0..3).map(|i| vec![(sign, first + (i + 1) % 3, first + (i + 2) % 3)]).collect()
}

impl Coframe {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// `(dr, eta^1, eta^2, eta^3)` with left-invariant `d eta^1 = eta^2 ^ eta^3` (cyclic).
    pub fn eh_left() -> &'static Coframe {
        static C: OnceLock<Coframe> = OnceLock::new();
        C.get_or_init(|| Self::eh("eh_left", ["dr", "eta1", "eta2", "eta3"], 1))
    }

    /// `(dr, etahat^1, etahat^2, etahat^3)` with right-invariant `d etahat^1 = -etahat^2 ^ etahat^3` (cyclic).
    pub fn eh_right() -> &'static Coframe {
        static C: OnceLock<Coframe> = OnceLock::new();
        C.get_or_init(|| Self::eh("eh_right", ["dr", "etahat1", "etahat2", "etahat3"], -1))
    }

    /// Coframe with the given sign in the `so(3)` structure equations; used to
    /// exhibit the failure of closedness for the opposite convention.
    pub fn eh_with_sign(sign: i8) -> Coframe {
        Self::eh("eh_custom", ["dr", "eta1", "eta2", "eta3"], sign)
    }

    fn eh(name: &'static str, labels: [&'static str; 4], sign: i8) -> Coframe {
        let mut structure = vec![Vec::new()];
        structure.extend(so3(1, sign));
        Coframe { name, labels: labels.to_vec(), radial: 0, structure }
    }

    /// `(delta^1, delta^2, delta^3, dr, eta^1, eta^2, eta^3)` on `T^3 x X`.
    pub fn kummer() -> &'static Coframe {
        static C: OnceLock<Coframe> = OnceLock::new();
        C.get_or_init(|| {
            let mut structure = vec![Vec::new(); 4];
            structure.extend(so3(4, 1));
            Coframe {
                name: "kummer",
                labels: vec!["delta1", "delta2", "delta3", "dr", "eta1", "eta2", "eta3"],
                radial: 3,
                structure,
            }
        })
    }
}

/// `sum_I f_I(r) e^I` over a fixed coframe.
#[derive(Clone, PartialEq)]
pub struct RadialForm<'a, T> {
    coframe: &'a Coframe,
    degree: usize,
    terms: BTreeMap<u8, Expr<T>>,
}

impl<'a, T: Real> RadialForm<'a, T> {
    pub fn zero(coframe: &'a Coframe, degree: usize) -> Self {
        Self { coframe, degree, terms: BTreeMap::new() }
    }

    /// `f e^{idx}`; indices may be unsorted.
    pub fn term(coframe: &'a Coframe, idx: &[usize], f: Expr<T>) -> Self {
        let mut out = Self::zero(coframe, idx.len());
        out.add_term(idx, f);
        out
    }

    /// Sum of terms of a common degree.
    pub fn from_terms(coframe: &'a Coframe, degree: usize, terms: Vec<(&[usize], Expr<T>)>) -> Self {
        let mut out = Self::zero(coframe, degree);
        for (idx, f) in terms {
            assert_eq!(idx.len(), degree, "term degree");
            out.add_term(idx, f);
        }
        out
    }

    fn add_term(&mut self, idx: &[usize], f: Expr<T>) {
        assert!(idx.iter().all(|&i| i < self.coframe.dim()), "index outside coframe");
        if let Some((mask, sign)) = basis::sort_indices(idx) {
            let f = if sign < 0 { f.neg() } else { f };
            self.add_mask(mask, f);
        }
    }

    fn add_mask(&mut self, mask: u8, f: Expr<T>) {
        if f.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&mask) {
            Some(old) => old.add(f),
            None => f,
        };
        if !merged.is_zero() {
            self.terms.insert(mask, merged);
        }
    }

    pub fn coframe(&self) -> &'a Coframe {
        self.coframe
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, &Expr<T>)> {
        self.terms.iter().map(|(m, e)| (*m, e))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if !std::ptr::eq(self.coframe, other.coframe) && self.coframe != other.coframe {
            return Err(Error::Inconsistent(format!(
                "forms over coframes `{}` and `{}`",
                self.coframe.name, other.coframe.name
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::InvalidDegree { degree: other.degree, op: "sum of radial forms" });
        }
        let mut out = self.clone();
        out.degree = if self.is_zero() { other.degree } else { self.degree };
        for (&m, e) in &other.terms {
            out.add_mask(m, e.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-T::one()))
    }

    pub fn scale(&self, c: T) -> Self {
        self.mul_expr(&Expr::c(c))
    }

    pub fn mul_expr(&self, f: &Expr<T>) -> Self {
        let mut out = Self::zero(self.coframe, self.degree);
        for (&m, e) in &self.terms {
            out.add_mask(m, e.clone().mul(f.clone()));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let degree = self.degree + other.degree;
        if degree > self.coframe.dim() {
            return Err(Error::DegreeOverflow { p: self.degree, q: other.degree, dim: self.coframe.dim() });
        }
        let mut out = Self::zero(self.coframe, degree);
        for (&ma, a) in &self.terms {
            for (&mb, b) in &other.terms {
                let s = basis::wedge_sign(ma, mb);
                if s != 0 {
                    let prod = a.clone().mul(b.clone());
                    out.add_mask(ma | mb, if s < 0 { prod.neg() } else { prod });
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative `d(f e^I) = f' dr ^ e^I + f d(e^I)`.
    pub fn d(&self) -> Result<Self> {
        let n = self.coframe.dim();
        if self.degree >= n {
            return Err(Error::DegreeOverflow { p: self.degree, q: 1, dim: n });
        }
        let rad = self.coframe.radial;
        let mut out = Self::zero(self.coframe, self.degree + 1);
        for (&mask, f) in &self.terms {
            if mask & (1 << rad) == 0 {
                let s = basis::wedge_sign(1 << rad, mask);
                let df = f.deriv();
                out.add_mask(mask | (1 << rad), if s < 0 { df.neg() } else { df });
            }
            // Leibniz over the generators of e^I
            for (pos, a) in basis::indices(mask).into_iter().enumerate() {
                let before = mask & ((1u16 << a) - 1) as u8;
                let after = mask & !before & !(1 << a);
                let outer = if pos % 2 == 0 { 1 } else { -1 };
                for &(sign, b, c) in &self.coframe.structure[a] {
                    let de = match basis::sort_indices(&[b, c]) {
                        Some(x) => x,
                        None => continue,
                    };
                    let s1 = basis::wedge_sign(before, de.0);
                    let s2 = basis::wedge_sign(before | de.0, after);
                    let s = outer * sign * de.1 * s1 * s2;
                    if s != 0 {
                        let e = f.clone();
                        out.add_mask(before | de.0 | after, if s < 0 { e.neg() } else { e });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Substitutes `r -> c r`, including `dr -> c dr`.
    pub fn rescale(&self, c: T) -> Self {
        let rad = 1u8 << self.coframe.radial;
        let mut out = Self::zero(self.coframe, self.degree);
        for (&m, e) in &self.terms {
            let e = e.rescale(c);
            out.add_mask(m, if m & rad != 0 { e.scale(c) } else { e });
        }
        out
    }

    /// Coefficients at `r` in the coframe basis.
    pub fn eval(&self, r: T) -> Form<T> {
        let n = self.coframe.dim();
        let mut out = Form::zero(n, self.degree).expect("degree within coframe");
        for (&m, e) in &self.terms {
            out.set_mask(m, e.eval(r));
        }
        out
    }

    /// Largest coefficient relative to the magnitude of its unsimplified
    /// contributions; measures how far the form is from vanishing identically.
    pub fn relative_residual(&self, r: T) -> T {
        self.terms.values().fold(T::zero(), |acc, e| {
            let (v, s) = e.eval_with_scale(r);
            let rel = if s > T::zero() { v.abs() / s } else { v.abs() };
            acc.max(rel)
        })
    }
}

impl<T: Real> std::fmt::Debug for RadialForm<'_, T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RadialForm[{}](", self.coframe.name)?;
        for (i, (&m, e)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let labels: Vec<&str> = basis::indices(m).iter().map(|&a| self.coframe.labels[a]).collect();
            write!(f, "{e:?} {}", labels.join("^"))?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = Expr<f64>;

    #[test]
    fn structure_equation_signs() {
        let cf = Coframe::eh_left();
        let eta1 = RadialForm::term(cf, &[1], E::one());
        let d = eta1.d().unwrap();
        assert_eq!(d, RadialForm::term(cf, &[2, 3], E::one()));
        let eta2 = RadialForm::term(cf, &[2], E::one());
        assert_eq!(eta2.d().unwrap(), RadialForm::term(cf, &[3, 1], E::one()));
        let hat = RadialForm::term(Coframe::eh_right(), &[1], E::one());
        assert_eq!(hat.d().unwrap(), RadialForm::term(Coframe::eh_right(), &[2, 3], E::lit(-1.0)));
    }

    #[test]
    fn leibniz_on_products() {
        let cf = Coframe::kummer();
        // d(r eta2 ^ delta1) = dr ^ eta2 ^ delta1 + r eta3 ^ eta1 ^ delta1
        let a = RadialForm::term(cf, &[5, 0], E::r());
        let expected = RadialForm::term(cf, &[3, 5, 0], E::one())
            .add(&RadialForm::term(cf, &[6, 4, 0], E::r()))
            .unwrap();
        assert_eq!(a.d().unwrap().sub(&expected).unwrap().relative_residual(2.0), 0.0);
    }

    #[test]
    fn d_squared_vanishes() {
        let cf = Coframe::eh_left();
        let a = RadialForm::from_terms(
            cf,
            1,
            vec![(&[1][..], E::r().pow(3.0)), (&[2][..], E::r().add(E::one()).sqrt()), (&[3][..], E::r())],
        );
        let dd = a.d().unwrap().d().unwrap();
        for r in [0.3, 1.0, 7.0] {
            assert!(dd.relative_residual(r) < 1e-15);
        }
    }
}
