//! Scalar functions of the radial coordinate `r` with symbolic derivatives.

use std::fmt;

use crate::scalar::Real;

/// Expression tree in one variable `r`.
#[derive(Clone, PartialEq)]
pub enum Expr<T> {
    Const(T),
    R,
    Sum(Vec<Expr<T>>),
    Prod(Vec<Expr<T>>),
    Pow(Box<Expr<T>>, T),
    /// `order`-th derivative of the quintic smoothstep `6u^5 - 15u^4 + 10u^3`
    /// (clamped to `[0, 1]`) at `u = (arg - lo) / width`, taken in `u`.
    Step { order: u8, lo: T, width: T, arg: Box<Expr<T>> },
}

const QUINTIC: [f64; 6] = [0.0, 0.0, 0.0, 10.0, -15.0, 6.0];

fn step_value<T: Real>(order: u8, u: T) -> T {
    if order == 0 {
        if u <= T::zero() {
            return T::zero();
        }
        if u >= T::one() {
            return T::one();
        }
    } else if u <= T::zero() || u >= T::one() {
        return T::zero();
    }
    let mut c: Vec<f64> = QUINTIC.to_vec();
    for _ in 0..order {
        c = c.iter().enumerate().skip(1).map(|(i, &x)| i as f64 * x).collect();
    }
    c.iter().rev().fold(T::zero(), |acc, &x| acc * u + T::lit(x))
}

impl<T: Real> Expr<T> {
    pub fn c(x: T) -> Self {
        Expr::Const(x)
    }

    pub fn lit(x: f64) -> Self {
        Expr::Const(T::lit(x))
    }

    pub fn r() -> Self {
        Expr::R
    }

    pub fn zero() -> Self {
        Expr::Const(T::zero())
    }

    pub fn one() -> Self {
        Expr::Const(T::one())
    }

    pub fn as_const(&self) -> Option<T> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(T::zero())
    }

    pub fn add(self, other: Self) -> Self {
        Self::sum(vec![self, other])
    }

    pub fn sub(self, other: Self) -> Self {
        Self::sum(vec![self, other.neg()])
    }

    pub fn neg(self) -> Self {
        self.mul(Expr::Const(-T::one()))
    }

    pub fn mul(self, other: Self) -> Self {
        Self::prod(vec![self, other])
    }

    pub fn scale(self, c: T) -> Self {
        self.mul(Expr::Const(c))
    }

    pub fn pow(self, p: T) -> Self {
        if p == T::zero() {
            return Self::one();
        }
        if p == T::one() {
            return self;
        }
        match self {
            Expr::Const(c) => Expr::Const(c.powf(p)),
            Expr::Pow(base, q) => Expr::Pow(base, p * q),
            e => Expr::Pow(Box::new(e), p),
        }
    }

    pub fn sqrt(self) -> Self {
        self.pow(T::lit(0.5))
    }

    pub fn recip(self) -> Self {
        self.pow(-T::one())
    }

    /// Quintic smoothstep of `(self - lo) / width`.
    pub fn smoothstep(self, lo: T, width: T) -> Self {
        Expr::Step { order: 0, lo, width, arg: Box::new(self) }
    }

    pub fn sum(terms: Vec<Self>) -> Self {
        let mut out = Vec::with_capacity(terms.len());
        let mut constant = T::zero();
        for t in terms {
            match t {
                Expr::Const(c) => constant += c,
                Expr::Sum(inner) => {
                    for u in inner {
                        match u {
                            Expr::Const(c) => constant += c,
                            u => out.push(u),
                        }
                    }
                }
                t => out.push(t),
            }
        }
        if constant != T::zero() {
            out.push(Expr::Const(constant));
        }
        match out.len() {
            0 => Self::zero(),
            1 => out.pop().expect("one term"),
            _ => Expr::Sum(out),
        }
    }

    pub fn prod(factors: Vec<Self>) -> Self {
        let mut out = Vec::with_capacity(factors.len());
        let mut constant = T::one();
        for f in factors {
            match f {
                Expr::Const(c) => constant *= c,
                Expr::Prod(inner) => {
                    for u in inner {
                        match u {
                            Expr::Const(c) => constant *= c,
                            u => out.push(u),
                        }
                    }
                }
                f => out.push(f),
            }
        }
        if constant == T::zero() {
            return Self::zero();
        }
        if constant != T::one() {
            out.insert(0, Expr::Const(constant));
        }
        match out.len() {
            0 => Self::one(),
            1 => out.pop().expect("one factor"),
            _ => Expr::Prod(out),
        }
    }

    pub fn eval(&self, r: T) -> T {
        match self {
            Expr::Const(c) => *c,
            Expr::R => r,
            Expr::Sum(ts) => ts.iter().map(|t| t.eval(r)).sum(),
            Expr::Prod(fs) => fs.iter().fold(T::one(), |acc, f| acc * f.eval(r)),
            Expr::Pow(b, p) => b.eval(r).powf(*p),
            Expr::Step { order, lo, width, arg } => step_value(*order, (arg.eval(r) - *lo) / *width),
        }
    }

    /// Value together with the magnitude of the unsimplified terms, so that
    /// `|value| / scale` measures cancellation.
    pub fn eval_with_scale(&self, r: T) -> (T, T) {
        match self {
            Expr::Const(c) => (*c, c.abs()),
            Expr::R => (r, r.abs()),
            Expr::Sum(ts) => ts.iter().fold((T::zero(), T::zero()), |(v, s), t| {
                let (tv, ts) = t.eval_with_scale(r);
                (v + tv, s + ts)
            }),
            Expr::Prod(fs) => fs.iter().fold((T::one(), T::one()), |(v, s), f| {
                let (fv, fs) = f.eval_with_scale(r);
                (v * fv, s * fs)
            }),
            Expr::Pow(b, p) => {
                let v = b.eval(r).powf(*p);
                (v, v.abs())
            }
            Expr::Step { .. } => {
                let v = self.eval(r);
                (v, v.abs())
            }
        }
    }

    pub fn deriv(&self) -> Self {
        match self {
            Expr::Const(_) => Self::zero(),
            Expr::R => Self::one(),
            Expr::Sum(ts) => Self::sum(ts.iter().map(|t| t.deriv()).collect()),
            Expr::Prod(fs) => Self::sum(
                (0..fs.len())
                    .map(|i| {
                        let d = fs[i].deriv();
                        if d.is_zero() {
                            return Self::zero();
                        }
                        let mut factors: Vec<Self> = fs.clone();
                        factors[i] = d;
                        Self::prod(factors)
                    })
                    .collect(),
            ),
            Expr::Pow(b, p) => {
                let db = b.deriv();
                if db.is_zero() {
                    return Self::zero();
                }
                Self::prod(vec![Expr::Const(*p), (**b).clone().pow(*p - T::one()), db])
            }
            Expr::Step { order, lo, width, arg } => {
                let da = arg.deriv();
                if da.is_zero() || *order >= 5 {
                    return Self::zero();
                }
                let next = Expr::Step { order: order + 1, lo: *lo, width: *width, arg: arg.clone() };
                Self::prod(vec![next, da, Expr::Const(width.recip())])
            }
        }
    }

    /// Substitutes `r -> c * r`.
    pub fn rescale(&self, c: T) -> Self {
        match self {
            Expr::Const(x) => Expr::Const(*x),
            Expr::R => Self::prod(vec![Expr::Const(c), Expr::R]),
            Expr::Sum(ts) => Self::sum(ts.iter().map(|t| t.rescale(c)).collect()),
            Expr::Prod(fs) => Self::prod(fs.iter().map(|f| f.rescale(c)).collect()),
            Expr::Pow(b, p) => Expr::Pow(Box::new(b.rescale(c)), *p),
            Expr::Step { order, lo, width, arg } => {
                Expr::Step { order: *order, lo: *lo, width: *width, arg: Box::new(arg.rescale(c)) }
            }
        }
    }
}

impl<T: Real> fmt::Debug for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::R => write!(f, "r"),
            Expr::Sum(ts) => {
                write!(f, "(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t:?}")?;
                }
                write!(f, ")")
            }
            Expr::Prod(fs) => {
                for (i, t) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{t:?}")?;
                }
                Ok(())
            }
            Expr::Pow(b, p) => write!(f, "({b:?})^{p}"),
            Expr::Step { order, lo, width, arg } => write!(f, "S{order}(({arg:?} - {lo}) / {width})"),
        }
    }
}
