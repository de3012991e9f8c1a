use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::surd::{q, qi, Rational};
use crate::error::{Error, Result};

/// `c + b B`, affine in the transition exponent `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub c: Rational,
    pub b: Rational,
}

impl Affine {
    pub fn constant(c: Rational) -> Self {
        Self { c, b: Rational::zero() }
    }

    pub fn new(c: Rational, b: Rational) -> Self {
        Self { c, b }
    }

    pub fn at(&self, big_b: &Rational) -> Rational {
        &self.c + &self.b * big_b
    }
}

/// A radial endpoint `r = t^e` (constants dropped), or the exceptional set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RadialBound {
    Origin,
    Power(Affine),
}

/// Pointwise bound `sum_i O(t^a_i r^b_i)` on a radial region `lo <= r <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatePiece {
    pub region: String,
    pub lo: RadialBound,
    pub hi: RadialBound,
    pub terms: Vec<(Affine, Rational)>,
}

/// A power of `t`, or no constraint at all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TExponent {
    Finite(Rational),
    Unconstrained,
}

impl TExponent {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            TExponent::Finite(x) => Some(x),
            TExponent::Unconstrained => None,
        }
    }
}

impl fmt::Display for TExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TExponent::Finite(x) => write!(f, "{x}"),
            TExponent::Unconstrained => write!(f, "inf"),
        }
    }
}

impl Serialize for TExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RateBound {
    /// Exponent `e` with `sup w_t^weight |piece| = O(t^e)`.
    pub exponent: TExponent,
    /// Region attaining the minimum.
    pub dominant_region: Option<String>,
}

fn exponent_of(bound: &RadialBound, big_b: &Rational) -> Option<Rational> {
    match bound {
        RadialBound::Origin => None,
        RadialBound::Power(a) => Some(a.at(big_b)),
    }
}

/// Sup over all regions of `w_t^weight |piece|` with `w_t = t (1 + r)`, as
/// the smallest exponent of `t`. On a region `r = t^c` the exponent is
/// `a + b c + weight (1 + min(0, c))`, piecewise linear in `c`, so the
/// extremes sit at the region ends and at `c = 0`.
pub fn jk_rate_bound(pieces: &[RatePiece], big_b: &Rational, weight: &Rational) -> Result<RateBound> {
    if big_b.is_positive() || big_b < &qi(-1) {
        return Err(Error::Domain(format!("transition exponent B must lie in [-1, 0], got {big_b}")));
    }
    let Some(first) = pieces.first() else {
        return Err(Error::UncoveredRegion("r <= 1".into()));
    };
    if first.lo != RadialBound::Origin {
        return Err(Error::UncoveredRegion(format!("below {}", first.region)));
    }
    for w in pieces.windows(2) {
        let end = exponent_of(&w[0].hi, big_b);
        let start = exponent_of(&w[1].lo, big_b);
        if end.is_none() || end != start {
            return Err(Error::UncoveredRegion(format!("between {} and {}", w[0].region, w[1].region)));
        }
    }
    let mut best: Option<(Rational, String)> = None;
    for piece in pieces {
        let c_hi = exponent_of(&piece.hi, big_b)
            .ok_or_else(|| Error::UncoveredRegion(format!("{} has no outer end", piece.region)))?;
        let c_lo = exponent_of(&piece.lo, big_b);
        if c_lo.as_ref().is_some_and(|c| c < &c_hi) {
            return Err(Error::Domain(format!("region {} is reversed", piece.region)));
        }
        let mut cs = vec![c_hi.clone()];
        if let Some(c) = &c_lo {
            cs.push(c.clone());
        }
        if c_lo.as_ref().is_none_or(|c| c.is_positive()) && c_hi.is_negative() {
            cs.push(Rational::zero());
        }
        for (a, b) in &piece.terms {
            let a = a.at(big_b);
            if c_lo.is_none() && b.is_negative() {
                return Err(Error::Domain(format!("region {} blows up at the exceptional set", piece.region)));
            }
            for c in &cs {
                let e = &a + b * c + weight * (qi(1) + c.clone().min(Rational::zero()));
                if best.as_ref().is_none_or(|(x, _)| &e < x) {
                    best = Some((e, piece.region.clone()));
                }
            }
        }
    }
    Ok(match best {
        Some((e, region)) => RateBound { exponent: TExponent::Finite(e), dominant_region: Some(region) },
        None => RateBound { exponent: TExponent::Unconstrained, dominant_region: None },
    })
}

/// `B` on `grid` maximising the exponent; ties keep the first.
pub fn best_transition(pieces: &[RatePiece], weight: &Rational, grid: &[Rational]) -> Result<(Rational, TExponent)> {
    let mut best: Option<(Rational, TExponent)> = None;
    for b in grid {
        let e = jk_rate_bound(pieces, b, weight)?.exponent;
        let better = match (&best, &e) {
            (None, _) => true,
            (Some((_, TExponent::Unconstrained)), _) => false,
            (Some(_), TExponent::Unconstrained) => true,
            (Some((_, TExponent::Finite(x))), TExponent::Finite(y)) => y > x,
        };
        if better {
            best = Some((b.clone(), e));
        }
    }
    best.ok_or_else(|| Error::Domain("empty search grid".into()))
}

fn pw(c: Rational, b: Rational) -> RadialBound {
    RadialBound::Power(Affine::new(c, b))
}

fn term(a: Affine, b: Rational) -> (Affine, Rational) {
    (a, b)
}

/// Pointwise bounds on `grad(Theta(phi) - psi)` for the glued structure
/// without correction, with transition at `r = t^B`.
pub fn naive_torsion_table() -> Vec<RatePiece> {
    let zero = || Affine::constant(qi(0));
    vec![
        RatePiece { region: "r <= 1".into(), lo: RadialBound::Origin, hi: pw(qi(0), qi(0)), terms: vec![term(zero(), qi(0))] },
        RatePiece {
            region: "1 <= r <= t^B".into(),
            lo: pw(qi(0), qi(0)),
            hi: pw(qi(0), qi(1)),
            terms: vec![term(zero(), qi(0))],
        },
        RatePiece {
            region: "t^B <= r <= 2t^B".into(),
            lo: pw(qi(0), qi(1)),
            hi: pw(qi(0), qi(1)),
            terms: vec![term(Affine::new(qi(-1), qi(-5)), qi(0)), term(zero(), qi(0))],
        },
    ]
}

/// Pointwise bounds on `grad theta` for the corrected structure, with the
/// fixed transitions `t^(-1/9)` and `t^(-4/5)` and a small `gamma > 0`.
pub fn refined_torsion_table(gamma: &Rational) -> Vec<RatePiece> {
    let k = |x: Rational| Affine::constant(x);
    let p = |x: Rational| pw(x, qi(0));
    vec![
        RatePiece { region: "r <= 1".into(), lo: RadialBound::Origin, hi: p(qi(0)), terms: vec![term(k(qi(1)), qi(0))] },
        RatePiece {
            region: "1 <= r <= t^(-1/9)".into(),
            lo: p(qi(0)),
            hi: p(q(-1, 9)),
            terms: vec![term(k(qi(1)), qi(1))],
        },
        RatePiece {
            region: "t^(-1/9) <= r <= 2t^(-1/9)".into(),
            lo: p(q(-1, 9)),
            hi: p(q(-1, 9)),
            terms: vec![term(k(q(8, 9)), qi(0))],
        },
        RatePiece {
            region: "2t^(-1/9) <= r <= t^(-4/5)".into(),
            lo: p(q(-1, 9)),
            hi: p(q(-4, 5)),
            terms: vec![term(k(qi(1)), qi(-3) + gamma)],
        },
        RatePiece {
            region: "t^(-4/5) <= r <= 2t^(-4/5)".into(),
            lo: p(q(-4, 5)),
            hi: p(q(-4, 5)),
            terms: vec![term(k(qi(3)), qi(0))],
        },
    ]
}

/// Weighted torsion exponent in `C^0_{beta-2;t}`: weight `2 - beta`.
pub fn torsion_exponent(pieces: &[RatePiece], beta: &Rational, big_b: &Rational) -> Result<RateBound> {
    jk_rate_bound(pieces, big_b, &(qi(2) - beta))
}

/// Check of `kappa > 1 - beta + alpha` against an available torsion exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Feasibility {
    #[serde(serialize_with = "super::spectrum::ser_rational")]
    pub kappa: Rational,
    #[serde(serialize_with = "super::spectrum::ser_rational")]
    pub threshold: Rational,
    pub exceeds_threshold: bool,
    pub within_available: bool,
    pub parameters_admissible: bool,
    /// `kappa - 1 + beta`: the `L^inf` exponent of the correction.
    #[serde(serialize_with = "super::spectrum::ser_rational")]
    pub linf_exponent: Rational,
}

impl Feasibility {
    pub fn feasible(&self) -> bool {
        self.exceeds_threshold && self.within_available && self.parameters_admissible
    }
}

/// `beta in (-4, 0)`, `alpha in (0, 1)`, `kappa > 1 - beta + alpha` and
/// `kappa <= available`. The correction is bounded in `C^{1,alpha/2}_{beta-1;t}`
/// by `t^kappa`, and `w_t >= t` turns this into `L^inf` order `t^(kappa-1+beta)`.
pub fn kappa_feasibility(kappa: &Rational, beta: &Rational, alpha: &Rational, available: &TExponent) -> Feasibility {
    let threshold = qi(1) - beta + alpha;
    let within_available = match available {
        TExponent::Finite(e) => kappa <= e,
        TExponent::Unconstrained => true,
    };
    Feasibility {
        kappa: kappa.clone(),
        exceeds_threshold: kappa > &threshold,
        threshold,
        within_available,
        parameters_admissible: beta > &qi(-4) && beta < &qi(0) && alpha > &qi(0) && alpha < &qi(1),
        linf_exponent: kappa - qi(1) + beta,
    }
}

/// Supremum of `eps` with `beta = -eps`, `alpha = eps` admissible for `kappa`.
pub fn max_epsilon(kappa: &Rational) -> Rational {
    (kappa - qi(1)) / qi(2)
}
