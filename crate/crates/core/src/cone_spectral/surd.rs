use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// An element `a + b sqrt(d)` of a real quadratic field, with `d > 1`
/// squarefree whenever `b != 0` and `d = 1` for rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    a: Rational,
    b: Rational,
    d: BigInt,
}

/// Splits `n > 0` into `s^2 * f` with `f` squarefree.
fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let p2 = &p * &p;
        while rest.is_multiple_of(&p2) {
            rest /= &p2;
            s *= &p;
        }
        p += 1;
    }
    (s, rest)
}

/// Sign of `r + sgn * sqrt(sq)` with `sq >= 0`.
fn sign_two(r: &Rational, sgn: i8, sq: &Rational) -> i8 {
    let rs = sign_of(r);
    if sgn == 0 || sq.is_zero() {
        return rs;
    }
    if rs == 0 || rs == sgn {
        return sgn;
    }
    match (r * r).cmp(sq) {
        Ordering::Greater => rs,
        Ordering::Less => sgn,
        Ordering::Equal => 0,
    }
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `r + s1 sqrt(q1) + s2 sqrt(q2)`.
fn sign_three(r: &Rational, s1: i8, q1: &Rational, s2: i8, q2: &Rational) -> i8 {
    // sign of S = s1 sqrt(q1) + s2 sqrt(q2)
    let s_sign = if s1 == 0 || q1.is_zero() {
        if q2.is_zero() { 0 } else { s2 }
    } else if s2 == 0 || q2.is_zero() || s1 == s2 {
        s1
    } else {
        match q1.cmp(q2) {
            Ordering::Greater => s1,
            Ordering::Less => s2,
            Ordering::Equal => 0,
        }
    };
    let rs = sign_of(r);
    if s_sign == 0 {
        return rs;
    }
    if rs == 0 || rs == s_sign {
        return s_sign;
    }
    // r^2 - S^2 = r^2 - q1 - q2 - 2 s1 s2 sqrt(q1 q2)
    let base = r * r - q1 - q2;
    let cross = s1 * s2;
    let k = sign_two(&base, -cross, &(qi(4) * q1 * q2));
    if k > 0 {
        rs
    } else if k < 0 {
        s_sign
    } else {
        0
    }
}

impl Surd {
    pub fn rational(a: Rational) -> Self {
        Self { a, b: Rational::zero(), d: BigInt::one() }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(qi(n))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// `a + b sqrt(radicand)` for a rational radicand `>= 0`.
    pub fn new(a: Rational, b: Rational, radicand: &Rational) -> Result<Self> {
        let s = Self::sqrt(radicand)?;
        Ok(Self::rational(a).add(&s.scale(&b))?)
    }

    /// `sqrt(x)` for rational `x >= 0`.
    pub fn sqrt(x: &Rational) -> Result<Self> {
        if x.is_negative() {
            return Err(Error::Domain(format!("square root of negative {x}")));
        }
        if x.is_zero() {
            return Ok(Self::zero());
        }
        // sqrt(p/q) = sqrt(p q) / q
        let n = x.numer() * x.denom();
        let (s, f) = square_split(&n);
        let coeff = Rational::new(s, x.denom().clone());
        if f.is_one() {
            Ok(Self::rational(coeff))
        } else {
            Ok(Self { a: Rational::zero(), b: coeff, d: f })
        }
    }

    fn normalized(a: Rational, b: Rational, d: BigInt) -> Self {
        if b.is_zero() {
            Self::rational(a)
        } else {
            Self { a, b, d }
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn surd_part(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn field(&self, other: &Self) -> Result<BigInt> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(BigInt::one()),
            (false, true) => Ok(self.d.clone()),
            (true, false) => Ok(other.d.clone()),
            (false, false) if self.d == other.d => Ok(self.d.clone()),
            _ => Err(Error::Inconsistent(format!(
                "sqrt({}) and sqrt({}) lie in different quadratic fields",
                self.d, other.d
            ))),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let d = self.field(other)?;
        Ok(Self::normalized(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let d = self.field(other)?;
        let dq = Rational::from_integer(d.clone());
        let a = &self.a * &other.a + &self.b * &other.b * dq;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::normalized(a, b, d))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.recip()?)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        let norm = &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.d.clone());
        Ok(Self::normalized(&self.a / &norm, -&self.b / &norm, self.d.clone()))
    }

    pub fn neg(&self) -> Self {
        Self::normalized(-&self.a, -&self.b, self.d.clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::normalized(&self.a * c, &self.b * c, self.d.clone())
    }

    pub fn add_rational(&self, c: &Rational) -> Self {
        Self::normalized(&self.a + c, self.b.clone(), self.d.clone())
    }

    pub fn signum(&self) -> i8 {
        sign_two(&self.a, sign_of(&self.b), &self.surd_square())
    }

    /// `b^2 d`, the square of the irrational part.
    fn surd_square(&self) -> Rational {
        &self.b * &self.b * Rational::from_integer(self.d.clone())
    }

    /// Exact comparison, valid across different quadratic fields.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        let s = sign_three(
            &(&self.a - &other.a),
            sign_of(&self.b),
            &self.surd_square(),
            -sign_of(&other.b),
            &other.surd_square(),
        );
        s.cmp(&0)
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return a;
        }
        a + self.b.to_f64().unwrap_or(f64::NAN) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl From<Rational> for Surd {
    fn from(a: Rational) -> Self {
        Self::rational(a)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let b_abs = self.b.abs();
        let coeff = if b_abs.is_one() { String::new() } else { format!("{b_abs}*") };
        let root = format!("{coeff}sqrt({})", self.d);
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{root}")
            } else {
                write!(f, "{root}")
            }
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {op} {root}", self.a)
        }
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Real roots of `x^2 + p x + c`, ascending; repeated roots appear once.
pub fn quadratic_roots(p: &Rational, c: &Rational) -> Result<Vec<Surd>> {
    let half = -p / qi(2);
    let disc = &half * &half - c;
    if disc.is_negative() {
        return Ok(Vec::new());
    }
    if disc.is_zero() {
        return Ok(vec![Surd::rational(half)]);
    }
    let r = Surd::sqrt(&disc)?;
    let lo = r.neg().add_rational(&half);
    let hi = r.add_rational(&half);
    Ok(vec![lo, hi])
}
