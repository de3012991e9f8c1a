use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::basis::{self, MAX_DIM};
use super::metric::{compound, Vector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Alternating `degree`-form on a `dim`-dimensional vector space with dense
/// coefficients over the sorted basis monomials.
#[derive(Clone, PartialEq)]
pub struct Form<T> {
    dim: usize,
    degree: usize,
    coeffs: Vec<T>,
}

impl<T: Real> Form<T> {
    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Domain(format!("dimension {dim} not in 1..=7")));
        }
        if degree > dim {
            return Err(Error::InvalidDegree { degree, op: "form" });
        }
        Ok(Self { dim, degree, coeffs: vec![T::zero(); basis::binomial(dim, degree)] })
    }

    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<T>) -> Result<Self> {
        let mut f = Self::zero(dim, degree)?;
        if coeffs.len() != f.coeffs.len() {
            return Err(Error::DimensionMismatch { expected: f.coeffs.len(), found: coeffs.len() });
        }
        f.coeffs = coeffs;
        Ok(f)
    }

    /// `sum c * dx_I` over `(I, c)`; indices are 0-based and may be unsorted.
    pub fn from_terms(dim: usize, degree: usize, terms: &[(&[usize], T)]) -> Result<Self> {
        let mut f = Self::zero(dim, degree)?;
        for (idx, c) in terms {
            f.add_term(idx, *c)?;
        }
        Ok(f)
    }

    /// The monomial `dx_{i1} ^ ... ^ dx_{ip}`.
    pub fn monomial(dim: usize, idx: &[usize]) -> Result<Self> {
        Self::from_terms(dim, idx.len(), &[(idx, T::one())])
    }

    pub fn constant(dim: usize, c: T) -> Result<Self> {
        Self::from_coeffs(dim, 0, vec![c])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn masks(&self) -> &'static [u8] {
        basis::masks(self.dim, self.degree)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u8, T)> + '_ {
        self.masks().iter().copied().zip(self.coeffs.iter().copied())
    }

    fn check_indices(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.degree {
            return Err(Error::InvalidDegree { degree: idx.len(), op: "index" });
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: bad + 1 });
        }
        Ok(())
    }

    /// Coefficient for an arbitrary index tuple: the sorted value times the
    /// permutation sign, zero for repeated indices.
    pub fn get(&self, idx: &[usize]) -> Result<T> {
        self.check_indices(idx)?;
        Ok(match basis::sort_indices(idx) {
            None => T::zero(),
            Some((mask, sign)) => self.get_mask(mask) * T::lit(sign as f64),
        })
    }

    #[inline]
    pub fn get_mask(&self, mask: u8) -> T {
        self.coeffs[basis::position(self.dim, mask)]
    }

    #[inline]
    pub fn set_mask(&mut self, mask: u8, value: T) {
        let p = basis::position(self.dim, mask);
        self.coeffs[p] = value;
    }

    pub fn add_term(&mut self, idx: &[usize], c: T) -> Result<()> {
        self.check_indices(idx)?;
        if let Some((mask, sign)) = basis::sort_indices(idx) {
            let p = basis::position(self.dim, mask);
            self.coeffs[p] += c * T::lit(sign as f64);
        }
        Ok(())
    }

    pub fn scale(&self, c: T) -> Self {
        Self { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|&x| x * c).collect() }
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> T {
        self.coeffs.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn is_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.degree != other.degree {
            return Err(Error::InvalidDegree { degree: other.degree, op: "sum of forms" });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.is_compatible(other)?;
        let mut out = self.clone();
        for (a, &b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other.clone())
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(Error::DegreeOverflow { p: self.degree, q: other.degree, dim: self.dim });
        }
        let mut out = Self::zero(self.dim, degree)?;
        for (ma, a) in self.iter() {
            if a == T::zero() {
                continue;
            }
            for (mb, b) in other.iter() {
                let s = basis::wedge_sign(ma, mb);
                if s != 0 && b != T::zero() {
                    let p = basis::position(self.dim, ma | mb);
                    out.coeffs[p] += T::lit(s as f64) * a * b;
                }
            }
        }
        Ok(out)
    }

    /// Contraction `v ⌟ self` in the first slot.
    pub fn interior(&self, v: &Vector<T>) -> Result<Self> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        if self.degree == 0 {
            return Err(Error::InvalidDegree { degree: 0, op: "interior product" });
        }
        let mut out = Self::zero(self.dim, self.degree - 1)?;
        for (mask, c) in self.iter() {
            if c == T::zero() {
                continue;
            }
            for i in basis::indices(mask) {
                let vi = v.components()[i];
                if vi == T::zero() {
                    continue;
                }
                let sign = if basis::rank_in(mask, i) % 2 == 0 { T::one() } else { -T::one() };
                let p = basis::position(self.dim, mask & !(1 << i));
                out.coeffs[p] += sign * vi * c;
            }
        }
        Ok(out)
    }

    /// Pullback under the linear map `x -> a x` (`a` row-major, dim x dim):
    /// `(a* w)(v1, ..) = w(a v1, ..)`.
    pub fn pullback(&self, a: &[T]) -> Result<Self> {
        let n = self.dim;
        if a.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: a.len() });
        }
        let c = compound(a, n, self.degree);
        let m = self.coeffs.len();
        let coeffs = (0..m)
            .map(|i| (0..m).map(|j| c[j * m + i] * self.coeffs[j]).sum())
            .collect();
        Self::from_coeffs(n, self.degree, coeffs)
    }

    /// Evaluates the form on `degree` vectors.
    pub fn evaluate(&self, vectors: &[Vector<T>]) -> Result<T> {
        if vectors.len() != self.degree {
            return Err(Error::InvalidDegree { degree: vectors.len(), op: "evaluate" });
        }
        let mut f = self.clone();
        for v in vectors {
            f = f.interior(v)?;
        }
        Ok(f.coeffs[0])
    }

    pub fn cast<U: Real>(&self) -> Form<U> {
        Form {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|x| U::lit(x.to_f64().unwrap())).collect(),
        }
    }
}

impl<T: Real> Neg for Form<T> {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.coeffs.iter_mut().for_each(|x| *x = -*x);
        self
    }
}

impl<T: Real> Add for Form<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("adding incompatible forms")
    }
}

impl<T: Real> Sub for Form<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("subtracting incompatible forms")
    }
}

impl<T: Real> AddAssign<&Form<T>> for Form<T> {
    fn add_assign(&mut self, rhs: &Form<T>) {
        self.is_compatible(rhs).expect("adding incompatible forms");
        for (a, &b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl<T: Real> Mul<T> for Form<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        self.scale(rhs)
    }
}

impl<T: Real> fmt::Debug for Form<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form(dim={}, deg={}", self.dim, self.degree)?;
        for (mask, c) in self.iter() {
            if c != T::zero() {
                write!(f, ", {}: {}", index_key(mask), c)?;
            }
        }
        write!(f, ")")
    }
}

/// Ascending 1-based digit string for a basis mask, e.g. `dx_1 ^ dx_2 ^ dx_3 -> "123"`.
pub fn index_key(mask: u8) -> String {
    basis::indices(mask).iter().map(|i| char::from(b'1' + *i as u8)).collect()
}

fn parse_key(key: &str, dim: usize) -> Option<u8> {
    let mut mask = 0u8;
    let mut last = 0usize;
    for ch in key.chars() {
        let d = ch.to_digit(10)? as usize;
        if d == 0 || d > dim || d <= last {
            return None;
        }
        mask |= 1 << (d - 1);
        last = d;
    }
    Some(mask)
}

impl<T: Real + Serialize> Serialize for Form<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: BTreeMap<String, T> = self
            .iter()
            .filter(|(_, c)| *c != T::zero())
            .map(|(m, c)| (index_key(m), c))
            .collect();
        let mut st = s.serialize_struct("Form", 3)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawForm<T> {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<String, T>,
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for Form<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawForm::<T>::deserialize(d)?;
        let mut form = Form::zero(raw.dim, raw.degree).map_err(D::Error::custom)?;
        for (key, c) in raw.coeffs {
            let mask = parse_key(&key, raw.dim)
                .filter(|m| m.count_ones() as usize == raw.degree)
                .ok_or_else(|| D::Error::custom(format!("bad index key `{key}`")))?;
            form.set_mask(mask, c);
        }
        Ok(form)
    }
}
