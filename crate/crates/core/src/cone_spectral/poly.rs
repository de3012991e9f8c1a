use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::spectrum::Parity;
use super::surd::{qi, Rational};
use crate::error::{Error, Result};

pub type Exponents = [u32; 4];

/// A polynomial in `x_0, .., x_3` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly4 {
    terms: BTreeMap<Exponents, Rational>,
}

impl Poly4 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, [0; 4])
    }

    pub fn monomial(c: Rational, e: Exponents) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::monomial(qi(1), e)
    }

    /// `rho^2 = x_0^2 + .. + x_3^2`.
    pub fn rho2() -> Self {
        (0..4).fold(Self::zero(), |acc, i| {
            let mut e = [0; 4];
            e[i] = 2;
            acc.add(&Self::monomial(qi(1), e))
        })
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&qi(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(qi(1)), |acc, _| acc.mul(self))
    }

    pub fn deriv(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = *e;
            f[i] -= 1;
            out.add_term(f, c * qi(e[i] as i64));
        }
        out
    }

    /// Euclidean Laplacian `sum_i d^2/dx_i^2`.
    pub fn laplacian(&self) -> Self {
        (0..4).fold(Self::zero(), |acc, i| acc.add(&self.deriv(i).deriv(i)))
    }

    /// Euler operator `sum x_i d/dx_i`.
    pub fn euler(&self) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * qi(e.iter().sum::<u32>() as i64));
        }
        out
    }

    /// Rotation generator `L_ij = x_i d/dx_j - x_j d/dx_i`.
    pub fn rotate(&self, i: usize, j: usize) -> Self {
        Self::var(i).mul(&self.deriv(j)).sub(&Self::var(j).mul(&self.deriv(i)))
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let deg: u32 = e.iter().sum();
            out.add_term(*e, if deg % 2 == 0 { c.clone() } else { -c.clone() });
        }
        out
    }

    /// Degree if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * (0..4).map(|i| x[i].powi(e[i] as i32)).product::<f64>())
            .sum()
    }
}

/// `Re z_1^m` and `Im z_1^m` for `z_1 = x_0 + i x_1`.
pub fn z1_power(m: u32) -> (Poly4, Poly4) {
    let z_re = Poly4::var(0);
    let z_im = Poly4::var(1);
    let mut re = Poly4::constant(qi(1));
    let mut im = Poly4::zero();
    for _ in 0..m {
        let nre = re.mul(&z_re).sub(&im.mul(&z_im));
        let nim = re.mul(&z_im).add(&im.mul(&z_re));
        re = nre;
        im = nim;
    }
    (re, im)
}

/// Incremental row echelon basis over `Q` for polynomials of one degree.
struct Span {
    rows: Vec<BTreeMap<Exponents, Rational>>,
}

impl Span {
    /// Adds `p` if it is independent of the span; returns whether it was.
    fn insert(&mut self, p: &Poly4) -> bool {
        let mut v = p.terms.clone();
        for row in &self.rows {
            let (lead, lc) = row.iter().next().expect("rows are nonzero");
            if let Some(c) = v.get(lead).cloned() {
                let f = c / lc;
                for (e, x) in row {
                    let entry = v.entry(*e).or_insert_with(Rational::zero);
                    *entry -= &f * x;
                    if entry.is_zero() {
                        v.remove(e);
                    }
                }
            }
        }
        if v.is_empty() {
            return false;
        }
        // keep rows sorted by leading exponent so reduction stays triangular
        let lead = *v.keys().next().expect("nonempty");
        let (lc_e, lc) = (lead, v[&lead].clone());
        for row in &mut self.rows {
            if let Some(c) = row.get(&lc_e).cloned() {
                let f = c / &lc;
                for (e, x) in &v {
                    let entry = row.entry(*e).or_insert_with(Rational::zero);
                    *entry -= &f * x;
                    if entry.is_zero() {
                        row.remove(e);
                    }
                }
            }
        }
        self.rows.push(v);
        true
    }
}

/// The smallest `SO(4)`-invariant real space containing `Re z_1^m` and
/// `Im z_1^m`, spanned by iterated rotation generators.
pub fn so4_orbit_span(m: u32) -> Vec<Poly4> {
    let (re, im) = z1_power(m);
    let mut span = Span { rows: Vec::new() };
    let mut basis = Vec::new();
    let mut queue = vec![re, im];
    while let Some(p) = queue.pop() {
        if !span.insert(&p) {
            continue;
        }
        for i in 0..4 {
            for j in i + 1..4 {
                queue.push(p.rotate(i, j));
            }
        }
        basis.push(p);
    }
    basis
}

/// Outcome of checking one restriction `p|_{S^3}` against `m(m+2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereEigenCheck {
    pub degree: u32,
    pub eigenvalue: u64,
    pub parity: Parity,
    /// Largest coefficient of `-rho^2 Delta p + E(E+2) p - m(m+2) p`.
    pub residual: f64,
    /// Largest coefficient of `-sum_{i<j} L_ij^2 p - m(m+2) p`.
    pub casimir_residual: f64,
}

/// Checks that a harmonic homogeneous polynomial of degree `m` restricts to
/// an eigenfunction of the positive Laplacian of the round `S^3` with
/// eigenvalue `m(m+2)`, and reports its antipodal parity.
pub fn s3_eigen_check(p: &Poly4) -> Result<SphereEigenCheck> {
    let m = p
        .homogeneous_degree()
        .ok_or_else(|| Error::Inconsistent("polynomial is zero or not homogeneous".into()))?;
    if !p.laplacian().is_zero() {
        return Err(Error::Inconsistent("polynomial is not harmonic".into()));
    }
    let mm = qi((m * (m + 2)) as i64);
    let euler = p.euler();
    let e_e2 = euler.euler().add(&euler.scale(&qi(2)));
    let restricted = Poly4::rho2().mul(&p.laplacian()).scale(&qi(-1)).add(&e_e2);
    let residual = restricted.sub(&p.scale(&mm)).max_abs();
    let mut casimir = Poly4::zero();
    for i in 0..4 {
        for j in i + 1..4 {
            casimir = casimir.sub(&p.rotate(i, j).rotate(i, j));
        }
    }
    let casimir_residual = casimir.sub(&p.scale(&mm)).max_abs();
    let parity = if p.reflect() == *p {
        Parity::Even
    } else if p.reflect() == p.scale(&qi(-1)) {
        Parity::Odd
    } else {
        return Err(Error::Inconsistent("polynomial has no antipodal parity".into()));
    };
    Ok(SphereEigenCheck { degree: m, eigenvalue: (m * (m + 2)) as u64, parity, residual, casimir_residual })
}

/// Summary of [`s3_function_spectrum_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionSpectrumCheck {
    pub m: u32,
    pub eigenvalue: u64,
    pub multiplicity: usize,
    pub parity: Parity,
    pub descends_to_so3: bool,
    pub residual: f64,
}

/// Generates the degree-`m` harmonic polynomials from the seeds
/// `Re z_1^m`, `Im z_1^m` and checks each against the eigenvalue `m(m+2)`.
pub fn s3_function_spectrum_check(m: u32) -> Result<FunctionSpectrumCheck> {
    if m > 8 {
        return Err(Error::Domain(format!("spectrum check supports m <= 8, got {m}")));
    }
    let basis = so4_orbit_span(m);
    let mut residual: f64 = 0.0;
    let mut parity = Parity::of(m as u64);
    for p in &basis {
        let c = s3_eigen_check(p)?;
        residual = residual.max(c.residual).max(c.casimir_residual);
        parity = c.parity;
    }
    Ok(FunctionSpectrumCheck {
        m,
        eigenvalue: (m * (m + 2)) as u64,
        multiplicity: basis.len(),
        parity,
        descends_to_so3: parity == Parity::Even,
        residual,
    })
}

/// `P rho^(2s)` with `P` a polynomial and `s` an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoTerm {
    pub num: Poly4,
    pub s: i32,
}

impl RhoTerm {
    pub fn new(num: Poly4, s: i32) -> Self {
        Self { num, s }
    }

    /// `d/dx_i (P rho^(2s)) = (rho^2 dP/dx_i + 2 s x_i P) rho^(2s - 2)`.
    pub fn deriv(&self, i: usize) -> Self {
        let a = Poly4::rho2().mul(&self.num.deriv(i));
        let b = Poly4::var(i).mul(&self.num).scale(&qi(2 * self.s as i64));
        Self { num: a.add(&b), s: self.s - 1 }
    }

    pub fn laplacian(&self) -> Self {
        let terms: Vec<_> = (0..4).map(|i| self.deriv(i).deriv(i)).collect();
        // all second derivatives share the exponent s - 2
        let num = terms.iter().fold(Poly4::zero(), |acc, t| acc.add(&t.num));
        Self { num, s: self.s - 2 }
    }

    /// Equality as functions on `R^4 \\ {0}`.
    pub fn same_function(&self, other: &Self) -> bool {
        let lift = |t: &Self, s: i32| t.num.mul(&Poly4::rho2().pow((t.s - s) as u32));
        let s = self.s.min(other.s);
        lift(self, s) == lift(other, s)
    }

    /// Homogeneity order `deg P + 2s`, if `P` is homogeneous and nonzero.
    pub fn order(&self) -> Option<i64> {
        self.num.homogeneous_degree().map(|d| d as i64 + 2 * self.s as i64)
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        self.num.eval(x) * r2.powi(self.s)
    }
}

/// A 2-form `sum_{i<j} c_ij dx_i ^ dx_j` on `R^4 \ {0}` with coefficients
/// of the form `P rho^(2s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R4TwoForm {
    pub name: String,
    pub comps: BTreeMap<(usize, usize), RhoTerm>,
}

/// Index pairs `i < j` of `R^4`.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl R4TwoForm {
    /// Homogeneity order shared by all nonzero components.
    pub fn order(&self) -> Result<i64> {
        let mut order = None;
        for t in self.comps.values().filter(|t| !t.num.is_zero()) {
            let o = t.order().ok_or_else(|| Error::Inconsistent(format!("{}: component not homogeneous", self.name)))?;
            if order.is_some_and(|x| x != o) {
                return Err(Error::Inconsistent(format!("{}: components of different orders", self.name)));
            }
            order = Some(o);
        }
        order.ok_or_else(|| Error::Inconsistent(format!("{}: zero form", self.name)))
    }

    /// Largest coefficient of the componentwise Euclidean Laplacian.
    pub fn laplacian_residual(&self) -> f64 {
        self.comps.values().map(|t| t.laplacian().num.max_abs()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: &[f64; 4]) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (k, p) in PAIRS.iter().enumerate() {
            if let Some(t) = self.comps.get(p) {
                out[k] = t.eval(x);
            }
        }
        out
    }
}

/// A 1-form `sum c_i dx_i` with coefficients `P rho^(2s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R4OneForm {
    pub comps: [RhoTerm; 4],
}

impl R4OneForm {
    /// `theta = iota_x omega = sum_{i,j} x_i omega_ij dx_j` times `rho^(2s)`.
    pub fn contraction(omega: &[(usize, usize, i64)], s: i32) -> Self {
        let mut c: [Poly4; 4] = Default::default();
        for &(i, j, w) in omega {
            c[j] = c[j].add(&Poly4::var(i).scale(&qi(w)));
            c[i] = c[i].add(&Poly4::var(j).scale(&qi(-w)));
        }
        Self { comps: c.map(|p| RhoTerm::new(p, s)) }
    }

    /// `d theta` with `(d theta)_ij = d_i theta_j - d_j theta_i`.
    pub fn d(&self, name: &str) -> R4TwoForm {
        let mut comps = BTreeMap::new();
        for &(i, j) in &PAIRS {
            let a = self.comps[j].deriv(i);
            let b = self.comps[i].deriv(j);
            debug_assert_eq!(a.s, b.s);
            comps.insert((i, j), RhoTerm::new(a.num.sub(&b.num), a.s));
        }
        R4TwoForm { name: name.to_string(), comps }
    }
}

/// Constant self-dual and anti-self-dual 2-forms on `R^4` as
/// `(i, j, coefficient)` lists: `dx01 +- dx23`, `dx02 -+ dx13`, `dx03 +- dx12`.
pub fn constant_two_forms() -> Vec<(String, Vec<(usize, usize, i64)>)> {
    let mut out = Vec::new();
    for (tag, sg) in [("+", 1), ("-", -1)] {
        out.push((format!("w1{tag}"), vec![(0, 1, 1), (2, 3, sg)]));
        out.push((format!("w2{tag}"), vec![(0, 2, 1), (1, 3, -sg)]));
        out.push((format!("w3{tag}"), vec![(0, 3, 1), (1, 2, sg)]));
    }
    out
}

/// `omega / rho^2` for the six constant forms: homogeneous harmonic 2-forms
/// of order `-2`, invariant under `x -> -x`. In cone form
/// `rho^-2 omega = dr/r ^ alpha + beta` with `alpha = iota_x omega` coexact
/// on the link and `d alpha = 2 beta`.
pub fn order_minus_two_forms() -> Vec<R4TwoForm> {
    constant_two_forms()
        .into_iter()
        .map(|(name, terms)| {
            let comps = terms
                .iter()
                .map(|&(i, j, w)| ((i, j), RhoTerm::new(Poly4::constant(qi(w)), -1)))
                .collect();
            R4TwoForm { name: format!("{name}/rho^2"), comps }
        })
        .collect()
}

/// `d(rho^-4 iota_x omega)`: the flat limits of `nu` (self-dual family under
/// the left-multiplication orientation) and of its right-invariant analogue.
/// These are homogeneous of order `-4`.
pub fn order_minus_four_forms() -> Vec<R4TwoForm> {
    constant_two_forms()
        .into_iter()
        .map(|(name, terms)| R4OneForm::contraction(&terms, -2).d(&format!("d(rho^-4 iota_x {name})")))
        .collect()
}

/// Residual of the componentwise Laplacian of a candidate order `-2` form.
pub fn harmonic_oracle_r4(candidate: &R4TwoForm) -> Result<f64> {
    let order = candidate.order()?;
    if order != -2 {
        return Err(Error::Inconsistent(format!("{} is homogeneous of order {order}, not -2", candidate.name)));
    }
    Ok(candidate.laplacian_residual())
}

/// Homogeneity order and Laplacian residual for any homogeneous candidate.
pub fn harmonic_residual_r4(candidate: &R4TwoForm) -> Result<(i64, f64)> {
    Ok((candidate.order()?, candidate.laplacian_residual()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_power_laplacian() {
        // Delta rho^-2 = 0 on R^4, Delta rho^2 = 8
        let t = RhoTerm::new(Poly4::constant(qi(1)), -1);
        assert!(t.laplacian().num.is_zero());
        let t = RhoTerm::new(Poly4::constant(qi(1)), 1);
        let l = t.laplacian();
        assert_eq!(l.s, -1);
        assert_eq!(l.num, Poly4::rho2().scale(&qi(8)));
    }

    #[test]
    fn low_degree_spans() {
        assert_eq!(so4_orbit_span(0).len(), 1);
        assert_eq!(so4_orbit_span(1).len(), 4);
        assert_eq!(so4_orbit_span(2).len(), 9);
    }

    #[test]
    fn non_harmonic_rejected() {
        assert!(s3_eigen_check(&Poly4::rho2()).is_err());
    }
}
