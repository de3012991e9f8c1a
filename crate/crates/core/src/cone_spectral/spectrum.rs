use num_traits::{Signed, Zero};
use serde::Serialize;

use super::surd::{qi, Rational, Surd};
use crate::error::{Error, Result};

/// Hodge type of an eigenform on the link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    Harmonic,
    Exact,
    Coexact,
}

impl FormKind {
    pub fn is_closed(self) -> bool {
        matches!(self, FormKind::Harmonic | FormKind::Exact)
    }

    pub fn is_coclosed(self) -> bool {
        matches!(self, FormKind::Harmonic | FormKind::Coexact)
    }

    /// Image under the Hodge star of the link.
    pub fn dual(self) -> Self {
        match self {
            FormKind::Harmonic => FormKind::Harmonic,
            FormKind::Exact => FormKind::Coexact,
            FormKind::Coexact => FormKind::Exact,
        }
    }
}

/// Behaviour under the antipodal map of `S^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(m: u64) -> Self {
        if m % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkEigen {
    #[serde(serialize_with = "ser_rational")]
    pub eigenvalue: Rational,
    pub multiplicity: u64,
    pub kind: FormKind,
    pub parity: Parity,
}

pub(crate) fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Spectrum of the Hodge Laplacian on functions and 1-forms of a closed
/// oriented 3-manifold, complete for eigenvalues below `ceiling`. Degrees
/// 2 and 3 follow by Hodge duality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkSpectrum {
    pub name: String,
    #[serde(serialize_with = "ser_rational")]
    ceiling: Rational,
    functions: Vec<LinkEigen>,
    one_forms: Vec<LinkEigen>,
}

fn sort_entries(v: &mut [LinkEigen]) {
    v.sort_by(|a, b| a.eigenvalue.cmp(&b.eigenvalue).then((a.kind as u8).cmp(&(b.kind as u8))));
}

impl LinkSpectrum {
    /// Builds a spectrum table, checking that eigenvalues are nonnegative,
    /// harmonic entries have eigenvalue zero, exact and coexact ones do not,
    /// and functions are never exact.
    pub fn from_entries(
        name: &str,
        ceiling: Rational,
        mut functions: Vec<LinkEigen>,
        mut one_forms: Vec<LinkEigen>,
    ) -> Result<Self> {
        for (deg, list) in [(0, &functions), (1, &one_forms)] {
            for e in list.iter() {
                if e.eigenvalue.is_negative() {
                    return Err(Error::Inconsistent(format!("negative eigenvalue {} in degree {deg}", e.eigenvalue)));
                }
                if (e.kind == FormKind::Harmonic) != e.eigenvalue.is_zero() {
                    return Err(Error::Inconsistent(format!(
                        "degree {deg} entry {} of kind {:?} contradicts harmonicity",
                        e.eigenvalue, e.kind
                    )));
                }
                if e.multiplicity == 0 {
                    return Err(Error::Inconsistent("zero multiplicity".into()));
                }
                if deg == 0 && e.kind == FormKind::Exact {
                    return Err(Error::Inconsistent("functions cannot be exact".into()));
                }
            }
        }
        sort_entries(&mut functions);
        sort_entries(&mut one_forms);
        Ok(Self { name: name.to_string(), ceiling, functions, one_forms })
    }

    /// Round `S^3` with all modes `m <= max_m`: functions `m(m+2)` with
    /// multiplicity `(m+1)^2` and parity `(-1)^m`; exact 1-forms `d` of
    /// those; coexact 1-forms `(m+1)^2` with multiplicity `2m(m+2)` and
    /// parity `(-1)^(m+1)`.
    pub fn s3(max_m: u64) -> Self {
        let mut functions = Vec::new();
        let mut one_forms = Vec::new();
        for m in 0..=max_m {
            let mi = m as i64;
            let fun = LinkEigen {
                eigenvalue: qi(mi * (mi + 2)),
                multiplicity: (m + 1) * (m + 1),
                kind: if m == 0 { FormKind::Harmonic } else { FormKind::Coexact },
                parity: Parity::of(m),
            };
            if m >= 1 {
                one_forms.push(LinkEigen { kind: FormKind::Exact, ..fun.clone() });
                one_forms.push(LinkEigen {
                    eigenvalue: qi((mi + 1) * (mi + 1)),
                    multiplicity: 2 * m * (m + 2),
                    kind: FormKind::Coexact,
                    parity: Parity::of(m + 1),
                });
            }
            functions.push(fun);
        }
        let mi = max_m as i64;
        // first eigenvalues not tabulated
        let ceiling = qi(((mi + 1) * (mi + 3)).min((mi + 2) * (mi + 2)));
        Self::from_entries("S3", ceiling, functions, one_forms).expect("S3 table is consistent")
    }

    /// `SO(3) = S^3 / {+-1}`: the antipodally even part of [`LinkSpectrum::s3`].
    pub fn so3(max_m: u64) -> Self {
        let s3 = Self::s3(max_m);
        let even = |v: &[LinkEigen]| v.iter().filter(|e| e.parity == Parity::Even).cloned().collect();
        Self {
            name: "SO3".into(),
            ceiling: s3.ceiling.clone(),
            functions: even(&s3.functions),
            one_forms: even(&s3.one_forms),
        }
    }

    /// Smallest `SO(3)` table complete strictly above `needed`.
    pub fn so3_covering(needed: &Surd) -> Self {
        let mut m = 2;
        loop {
            let s = Self::so3(m);
            if s.covers(needed) {
                return s;
            }
            m += 1;
        }
    }

    /// All eigenvalues strictly below the ceiling are tabulated.
    pub fn ceiling(&self) -> &Rational {
        &self.ceiling
    }

    pub fn covers(&self, eigenvalue: &Surd) -> bool {
        eigenvalue < &Surd::rational(self.ceiling.clone())
    }

    pub fn link_dim(&self) -> usize {
        3
    }

    /// Eigenforms of degree `q` on the link, ascending.
    pub fn entries(&self, q: usize) -> Result<Vec<LinkEigen>> {
        let dual = |v: &[LinkEigen]| {
            let mut out: Vec<LinkEigen> = v.iter().map(|e| LinkEigen { kind: e.kind.dual(), ..e.clone() }).collect();
            sort_entries(&mut out);
            out
        };
        match q {
            0 => Ok(self.functions.clone()),
            1 => Ok(self.one_forms.clone()),
            2 => Ok(dual(&self.one_forms)),
            3 => Ok(dual(&self.functions)),
            _ => Err(Error::InvalidDegree { degree: q, op: "link spectrum" }),
        }
    }
}
