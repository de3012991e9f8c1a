use std::collections::BTreeMap;

use serde::Serialize;

use super::spectrum::{ser_rational, FormKind, LinkSpectrum};
use super::surd::{qi, quadratic_roots, Rational, Surd};
use crate::error::{Error, Result};

/// An invariant subspace of link eigenforms on which the cone Laplacian of
/// `r^(lambda+k) (dr/r ^ alpha + beta)` acts by a constant matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum LinkBlock {
    /// `alpha` closed with `Delta alpha = mu alpha`, `beta = 0`.
    Closed {
        #[serde(serialize_with = "ser_rational")]
        mu: Rational,
    },
    /// `beta` coclosed with `Delta beta = mu beta`, `alpha = 0`.
    Coclosed {
        #[serde(serialize_with = "ser_rational")]
        mu: Rational,
    },
    /// `alpha = a alpha_0`, `beta = b d alpha_0` with `alpha_0` coexact and
    /// `d* d alpha_0 = mu alpha_0`.
    Pair {
        #[serde(serialize_with = "ser_rational")]
        mu: Rational,
    },
}

impl LinkBlock {
    pub fn mu(&self) -> &Rational {
        match self {
            LinkBlock::Closed { mu } | LinkBlock::Coclosed { mu } | LinkBlock::Pair { mu } => mu,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            LinkBlock::Pair { .. } => 2,
            _ => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let mu = self.mu();
        if mu < &qi(0) {
            return Err(Error::Inconsistent(format!("negative link eigenvalue {mu}")));
        }
        if matches!(self, LinkBlock::Pair { .. }) && mu == &qi(0) {
            return Err(Error::Inconsistent("a coexact eigenform cannot have eigenvalue 0".into()));
        }
        Ok(())
    }
}

/// The four families of homogeneous harmonic forms on a cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RateCase {
    I,
    Ii,
    Iii,
    Iv,
}

impl RateCase {
    pub fn label(self) -> &'static str {
        match self {
            RateCase::I => "i",
            RateCase::Ii => "ii",
            RateCase::Iii => "iii",
            RateCase::Iv => "iv",
        }
    }
}

/// A homogeneous harmonic `degree`-form of order `lambda` on the cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomogeneousRate {
    pub lambda: Surd,
    pub degree: usize,
    pub case: RateCase,
    pub dimension: u64,
    pub block: LinkBlock,
}

fn s(x: i64) -> Surd {
    Surd::int(x)
}

fn lin(lambda: &Surd, c: i64) -> Surd {
    lambda.add_rational(&qi(c))
}

/// `(lambda + x)(lambda + y)`.
fn prod(lambda: &Surd, x: i64, y: i64) -> Result<Surd> {
    lin(lambda, x).mul(&lin(lambda, y))
}

/// `P = (lambda+k-2)(lambda+n-k)` and `Q = (lambda+n-k-2)(lambda+k)`.
fn pq(lambda: &Surd, k: i64, n: i64) -> Result<(Surd, Surd)> {
    Ok((prod(lambda, k - 2, n - k)?, prod(lambda, n - k - 2, k)?))
}

/// Matrix of the cone Laplacian on a block at order `lambda`, acting on
/// the coefficients `(a)`, `(b)` or `(a, b)`.
pub fn block_matrix(block: &LinkBlock, lambda: &Surd, k: usize, n: usize) -> Result<Vec<Vec<Surd>>> {
    block.validate()?;
    let (p, qq) = pq(lambda, k as i64, n as i64)?;
    let mu = Surd::rational(block.mu().clone());
    Ok(match block {
        LinkBlock::Closed { .. } => vec![vec![mu.sub(&p)?]],
        LinkBlock::Coclosed { .. } => vec![vec![mu.sub(&qq)?]],
        LinkBlock::Pair { .. } => vec![
            vec![mu.sub(&p)?, mu.scale(&qi(-2))],
            vec![s(-2), mu.sub(&qq)?],
        ],
    })
}

/// `Delta((log r)^j gamma)` for `gamma = r^(lambda+k)(dr/r ^ alpha + beta)`
/// with `alpha = a alpha_0`, `beta = b beta_0` in the block basis.
/// Returns `(A, B)` as coefficient lists in powers of `log r`, where
/// `Delta(u gamma) = r^(lambda+k-2)(dr/r ^ A + B)`.
pub fn cone_laplacian_apply(
    lambda: &Surd,
    k: usize,
    n: usize,
    j: usize,
    block: &LinkBlock,
    a: &Surd,
    b: &Surd,
) -> Result<(Vec<Surd>, Vec<Surd>)> {
    if n < 2 {
        return Err(Error::Domain(format!("cone dimension must be >= 2, got {n}")));
    }
    if k > n {
        return Err(Error::InvalidDegree { degree: k, op: "cone Laplacian" });
    }
    match block {
        LinkBlock::Closed { .. } if !b.is_zero() => {
            return Err(Error::Inconsistent("a closed block carries no beta part".into()))
        }
        LinkBlock::Coclosed { .. } if !a.is_zero() => {
            return Err(Error::Inconsistent("a coclosed block carries no alpha part".into()))
        }
        _ => {}
    }
    let m = block_matrix(block, lambda, k, n)?;
    let (ma, mb) = match block {
        LinkBlock::Closed { .. } => (m[0][0].mul(a)?, Surd::zero()),
        LinkBlock::Coclosed { .. } => (Surd::zero(), m[0][0].mul(b)?),
        LinkBlock::Pair { .. } => (
            m[0][0].mul(a)?.add(&m[0][1].mul(b)?)?,
            m[1][0].mul(a)?.add(&m[1][1].mul(b)?)?,
        ),
    };
    // u = (log r)^j: r u' = j L^(j-1), r^2 u'' = j(j-1) L^(j-2) - j L^(j-1)
    let mut ru = vec![qi(0); j + 1];
    let mut r2u = vec![qi(0); j + 1];
    if j >= 1 {
        ru[j - 1] = qi(j as i64);
        r2u[j - 1] = qi(-(j as i64));
    }
    if j >= 2 {
        r2u[j - 2] = qi((j * (j - 1)) as i64);
    }
    let c1 = lin(lambda, 0).scale(&qi(2)).add_rational(&qi(n as i64 - 1));
    let mut out_a = vec![Surd::zero(); j + 1];
    let mut out_b = vec![Surd::zero(); j + 1];
    out_a[j] = ma;
    out_b[j] = mb;
    for i in 0..=j {
        // -r u' (2 lambda + n - 1) - r^2 u''
        let coeff = c1.scale(&ru[i]).neg().add_rational(&-r2u[i].clone());
        if coeff.is_zero() {
            continue;
        }
        out_a[i] = out_a[i].add(&coeff.mul(a)?)?;
        out_b[i] = out_b[i].add(&coeff.mul(b)?)?;
    }
    Ok((out_a, out_b))
}

/// Rank of a matrix over the quadratic field containing its entries.
pub(crate) fn surd_rank(mut m: Vec<Vec<Surd>>) -> Result<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, piv);
        let inv = m[rank][col].recip()?;
        for r in 0..rows {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].mul(&inv)?;
            for c in col..cols {
                let v = m[r][c].sub(&f.mul(&m[rank][c])?)?;
                m[r][c] = v;
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// Dimension of the homogeneous solutions `dim ker M(lambda)` on one copy
/// of the block.
pub fn block_kernel_dim(block: &LinkBlock, lambda: &Surd, k: usize, n: usize) -> Result<usize> {
    Ok(block.size() - surd_rank(block_matrix(block, lambda, k, n)?)?)
}

/// A nonzero element of `ker M(lambda)`, as `(a, b)`.
pub fn block_kernel_vector(block: &LinkBlock, lambda: &Surd, k: usize, n: usize) -> Result<Option<(Surd, Surd)>> {
    if block_kernel_dim(block, lambda, k, n)? == 0 {
        return Ok(None);
    }
    let m = block_matrix(block, lambda, k, n)?;
    Ok(Some(match block {
        LinkBlock::Closed { .. } => (Surd::one(), Surd::zero()),
        LinkBlock::Coclosed { .. } => (Surd::zero(), Surd::one()),
        LinkBlock::Pair { .. } => {
            if !m[0][0].is_zero() || !m[0][1].is_zero() {
                (m[0][1].neg(), m[0][0].clone())
            } else {
                (m[1][1].neg(), m[1][0].clone())
            }
        }
    }))
}

/// Dimension of `{ sum_{j <= jmax} (log r)^j gamma_j : Delta = 0 }` on one
/// copy of the block, by solving the coefficient equations of
/// [`cone_laplacian_apply`] exactly.
pub fn block_log_kernel_dim(block: &LinkBlock, lambda: &Surd, k: usize, n: usize, jmax: usize) -> Result<usize> {
    let size = block.size();
    let slots: Vec<(Surd, Surd)> = match block {
        LinkBlock::Closed { .. } => vec![(Surd::one(), Surd::zero())],
        LinkBlock::Coclosed { .. } => vec![(Surd::zero(), Surd::one())],
        LinkBlock::Pair { .. } => vec![(Surd::one(), Surd::zero()), (Surd::zero(), Surd::one())],
    };
    let unknowns = (jmax + 1) * size;
    // rows: (power of log r, component)
    let mut mat = vec![vec![Surd::zero(); unknowns]; (jmax + 1) * 2];
    for j in 0..=jmax {
        for (si, (a, b)) in slots.iter().enumerate() {
            let (ca, cb) = cone_laplacian_apply(lambda, k, n, j, block, a, b)?;
            for i in 0..=j {
                mat[2 * i][j * size + si] = ca[i].clone();
                mat[2 * i + 1][j * size + si] = cb[i].clone();
            }
        }
    }
    Ok(unknowns - surd_rank(mat)?)
}

/// Bounds of a set of orders; endpoints may be irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateInterval {
    pub lo: Surd,
    pub lo_closed: bool,
    pub hi: Surd,
    pub hi_closed: bool,
}

impl RateInterval {
    /// `[lo, hi)`.
    pub fn half_open(lo: Rational, hi: Rational) -> Self {
        Self { lo: lo.into(), lo_closed: true, hi: hi.into(), hi_closed: false }
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self { lo: lo.into(), lo_closed: false, hi: hi.into(), hi_closed: false }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self { lo: lo.into(), lo_closed: true, hi: hi.into(), hi_closed: true }
    }

    pub fn point(x: Surd) -> Self {
        Self { lo: x.clone(), lo_closed: true, hi: x, hi_closed: true }
    }

    pub fn contains(&self, x: &Surd) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }
}

fn eigen_blocks(link: &LinkSpectrum, k: usize) -> Result<Vec<(LinkBlock, u64)>> {
    let n = link.link_dim() + 1;
    let mut out = Vec::new();
    if k >= 1 {
        for e in link.entries(k - 1)? {
            if e.kind.is_closed() {
                out.push((LinkBlock::Closed { mu: e.eigenvalue.clone() }, e.multiplicity));
            }
            if e.kind == FormKind::Coexact && k < n {
                out.push((LinkBlock::Pair { mu: e.eigenvalue.clone() }, e.multiplicity));
            }
        }
    }
    if k < n {
        for e in link.entries(k)? {
            if e.kind.is_coclosed() {
                out.push((LinkBlock::Coclosed { mu: e.eigenvalue }, e.multiplicity));
            }
        }
    }
    Ok(out)
}

/// Largest link eigenvalue that can produce an order in `interval`.
pub fn required_ceiling(k: usize, n: usize, interval: &RateInterval) -> Result<Surd> {
    let (k, n) = (k as i64, n as i64);
    let mut best = Surd::zero();
    for x in [&interval.lo, &interval.hi] {
        for (u, v) in [(k - 2, n - k), (n - k - 2, k), (k, n - k), (k - 2, n - k - 2)] {
            let val = prod(x, u, v)?;
            if val > best {
                best = val;
            }
        }
    }
    Ok(best)
}

/// Roots of `(lambda + x)(lambda + y) = mu`.
fn roots_of(x: i64, y: i64, mu: &Rational) -> Result<Vec<Surd>> {
    quadratic_roots(&qi(x + y), &(qi(x * y) - mu))
}

/// All homogeneous harmonic `p`-forms on the cone over the link with order
/// in `interval`, one entry per (order, case, link eigenspace), sorted by order.
pub fn critical_rates(link: &LinkSpectrum, p: usize, interval: &RateInterval) -> Result<Vec<HomogeneousRate>> {
    let n = link.link_dim() + 1;
    if p > n {
        return Err(Error::InvalidDegree { degree: p, op: "critical rates" });
    }
    if interval.lo > interval.hi {
        return Err(Error::Domain(format!("empty interval [{}, {}]", interval.lo, interval.hi)));
    }
    let needed = required_ceiling(p, n, interval)?;
    if !link.covers(&needed) {
        return Err(Error::InsufficientSpectrum { ceiling: link.ceiling().to_string(), needed: needed.to_string() });
    }
    let (k, ni) = (p as i64, n as i64);
    let mut out = Vec::new();
    for (block, mult) in eigen_blocks(link, p)? {
        let mu = block.mu().clone();
        let candidates = match block {
            LinkBlock::Closed { .. } => vec![(RateCase::I, roots_of(k - 2, ni - k, &mu)?)],
            LinkBlock::Coclosed { .. } => vec![(RateCase::Iv, roots_of(ni - k - 2, k, &mu)?)],
            LinkBlock::Pair { .. } => vec![
                (RateCase::Ii, roots_of(k, ni - k, &mu)?),
                (RateCase::Iii, roots_of(k - 2, ni - k - 2, &mu)?),
            ],
        };
        let mut seen: Vec<Surd> = Vec::new();
        for (case, roots) in candidates {
            for lambda in roots {
                if !interval.contains(&lambda) || seen.contains(&lambda) {
                    continue;
                }
                let dim = block_kernel_dim(&block, &lambda, p, n)? as u64;
                if dim == 0 {
                    continue;
                }
                seen.push(lambda.clone());
                out.push(HomogeneousRate { lambda, degree: p, case, dimension: dim * mult, block: block.clone() });
            }
        }
    }
    out.sort_by(|a, b| a.lambda.cmp(&b.lambda).then(a.case.cmp(&b.case)));
    Ok(out)
}

/// Distinct orders with their total homogeneous dimension.
pub fn rate_dimensions(rates: &[HomogeneousRate]) -> Vec<(Surd, u64)> {
    let mut map: BTreeMap<Surd, u64> = BTreeMap::new();
    for r in rates {
        *map.entry(r.lambda.clone()).or_default() += r.dimension;
    }
    map.into_iter().collect()
}

/// Dimensions at the order `lambda`: homogeneous solutions and solutions
/// polynomial in `log r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelDimension {
    pub lambda: Surd,
    pub homogeneous: u64,
    pub with_logs: u64,
}

pub fn kernel_dimension(link: &LinkSpectrum, p: usize, lambda: &Surd) -> Result<KernelDimension> {
    let n = link.link_dim() + 1;
    let rates = critical_rates(link, p, &RateInterval::point(lambda.clone()))?;
    let mut homogeneous = 0;
    let mut with_logs = 0;
    for r in &rates {
        let mult = r.dimension / block_kernel_dim(&r.block, lambda, p, n)? as u64;
        homogeneous += r.dimension;
        // a log chain on a block of size s has length at most 2s
        let jmax = 2 * r.block.size();
        with_logs += mult * block_log_kernel_dim(&r.block, lambda, p, n, jmax)? as u64;
    }
    Ok(KernelDimension { lambda: lambda.clone(), homogeneous, with_logs })
}

/// True when every harmonic form `sum (log r)^j gamma_j` of order `lambda`
/// is homogeneous, i.e. all `gamma_j` with `j > 0` vanish.
pub fn log_kernel_check(link: &LinkSpectrum, p: usize, lambda: &Surd) -> Result<bool> {
    let kd = kernel_dimension(link, p, lambda)?;
    Ok(kd.homogeneous == kd.with_logs)
}

/// Sum of `dim K(lambda)` over the critical rates in `(lambda1, lambda2)`.
pub fn index_change(link: &LinkSpectrum, p: usize, lambda1: &Rational, lambda2: &Rational) -> Result<u64> {
    if lambda1 >= lambda2 {
        return Err(Error::Domain(format!("index change needs lambda1 < lambda2, got {lambda1}, {lambda2}")));
    }
    for end in [lambda1, lambda2] {
        let x = Surd::rational(end.clone());
        if !critical_rates(link, p, &RateInterval::point(x))?.is_empty() {
            return Err(Error::CriticalEndpoint(end.to_string()));
        }
    }
    let rates = critical_rates(link, p, &RateInterval::open(lambda1.clone(), lambda2.clone()))?;
    let mut total = 0;
    for (lambda, _) in rate_dimensions(&rates) {
        total += kernel_dimension(link, p, &lambda)?.with_logs;
    }
    Ok(total)
}
