use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::exterior_algebra::{Form, PHI0_TERMS};
use crate::scalar::Real;

/// An isometry `x -> sign * x + shift` of `T^7 = R^7 / Z^7` with
/// `shift in {0, 1/2}^7`, stored in half units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusIsometry {
    pub signs: [i8; 7],
    pub half_shifts: [bool; 7],
}

impl TorusIsometry {
    pub fn new(signs: [i8; 7], half_shifts: [bool; 7]) -> Self {
        assert!(signs.iter().all(|s| s.abs() == 1), "signs must be +-1");
        Self { signs, half_shifts }
    }

    pub fn identity() -> Self {
        Self::new([1; 7], [false; 7])
    }

    /// `(-x1, -x2, -x3, -x4, x5, x6, x7)`.
    pub fn alpha() -> Self {
        Self::new([-1, -1, -1, -1, 1, 1, 1], [false; 7])
    }

    /// `(-x1, 1/2 - x2, x3, x4, -x5, -x6, x7)`.
    pub fn beta() -> Self {
        Self::new([-1, -1, 1, 1, -1, -1, 1], [false, true, false, false, false, false, false])
    }

    /// `(-x1, 1/2 - x2, x3, x4, -x5, -x6, -x7)`: the variant with `x7 -> -x7`,
    /// which preserves no relabelling of `phi_0`.
    pub fn beta_literal() -> Self {
        Self::new([-1, -1, 1, 1, -1, -1, -1], [false, true, false, false, false, false, false])
    }

    /// `(1/2 - x1, x2, 1/2 - x3, x4, -x5, x6, -x7)`.
    pub fn gamma() -> Self {
        Self::new([-1, 1, -1, 1, -1, 1, -1], [true, false, true, false, false, false, false])
    }

    /// `self o other`: `s_a (s_b x + c_b) + c_a`, and `-1/2 = 1/2` mod 1.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::identity();
        for i in 0..7 {
            out.signs[i] = self.signs[i] * other.signs[i];
            out.half_shifts[i] = self.half_shifts[i] ^ other.half_shifts[i];
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Image of a point given in quarter units (`x = q / 4`).
    pub fn apply_quarters(&self, i: usize, q: u8) -> u8 {
        let v = if self.signs[i] < 0 { (4 - q % 4) % 4 } else { q % 4 };
        (v + if self.half_shifts[i] { 2 } else { 0 }) % 4
    }

    /// Whether the linear part fixes `phi` (translations act trivially on
    /// constant forms).
    pub fn preserves<T: Real>(&self, phi: &Form<T>) -> bool {
        phi.iter().all(|(mask, c)| {
            let s: i8 = (0..7).filter(|i| mask & (1 << i) != 0).map(|i| self.signs[i]).product();
            s > 0 || c == T::zero()
        })
    }
}

impl Serialize for TorusIsometry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for TorusIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..7)
            .map(|i| {
                let x = format!("x{}", i + 1);
                match (self.half_shifts[i], self.signs[i] < 0) {
                    (false, false) => x,
                    (false, true) => format!("-{x}"),
                    (true, false) => format!("1/2+{x}"),
                    (true, true) => format!("1/2-{x}"),
                }
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Coordinate playing the role of each `phi_0` index in the flat structure
/// on `T^7`: `delta = (dx7, dx6, dx5)` and the four-plane `(x1, .., x4)`.
pub const KUMMER_LABELLING: [usize; 7] = [6, 5, 4, 0, 1, 2, 3];

/// `phi_0` relabelled by [`KUMMER_LABELLING`] and pulled back by
/// `x7 -> -x7`, the flat `Gamma`-invariant structure on `T^7`. Every
/// invariant relabelling is an odd permutation, so the reflection restores
/// the orientation of `dx1...7`.
pub fn torus_phi0<T: Real>() -> Form<T> {
    let mut phi = relabelled_phi0::<T>(&KUMMER_LABELLING);
    for (mask, c) in phi.clone().iter() {
        if mask & (1 << 6) != 0 {
            phi.set_mask(mask, -c);
        }
    }
    phi
}

/// `sum_{abc} s_abc dx_{p(a)} ^ dx_{p(b)} ^ dx_{p(c)}` for a permutation `p`.
pub fn relabelled_phi0<T: Real>(perm: &[usize; 7]) -> Form<T> {
    let mut f = Form::zero(7, 3).expect("valid degree");
    for (idx, s) in PHI0_TERMS {
        f.add_term(&idx.map(|a| perm[a]), T::lit(s as f64)).expect("valid index");
    }
    f
}

/// A named element of `Gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupElement {
    pub name: String,
    pub map: TorusIsometry,
}

/// The group generated by `generators`, as words in their names, in order of
/// first appearance under breadth-first multiplication.
pub fn generate(generators: &[(&str, TorusIsometry)]) -> Vec<GroupElement> {
    let mut out = vec![GroupElement { name: "1".into(), map: TorusIsometry::identity() }];
    let mut seen: BTreeSet<TorusIsometry> = BTreeSet::from([TorusIsometry::identity()]);
    let mut frontier = 0;
    while frontier < out.len() {
        let current = out[frontier].clone();
        for (name, g) in generators {
            let next = current.map.compose(g);
            if seen.insert(next) {
                let word = if current.name == "1" { (*name).to_string() } else { format!("{}{name}", current.name) };
                out.push(GroupElement { name: word, map: next });
            }
        }
        frontier += 1;
    }
    out
}

/// `Gamma = <alpha, beta, gamma>`, eight elements.
pub fn gamma_elements() -> Vec<GroupElement> {
    generate(&[
        ("alpha", TorusIsometry::alpha()),
        ("beta", TorusIsometry::beta()),
        ("gamma", TorusIsometry::gamma()),
    ])
}

/// `{x : g x = x}`: `Empty`, the whole torus for the identity, or a finite
/// union of subtori.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "tori", rename_all = "snake_case")]
pub enum FixedLocus {
    Everything,
    Empty,
    Tori(Vec<FixedTorus>),
}

impl FixedLocus {
    /// Number of tori; the identity counts as zero.
    pub fn count(&self) -> usize {
        match self {
            FixedLocus::Tori(t) => t.len(),
            _ => 0,
        }
    }
}

/// `{x : x_i = pinned_i}` for the pinned coordinates, the rest free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FixedTorus {
    /// 0-based free coordinates.
    pub free: Vec<usize>,
    /// `(coordinate, value in quarter units)`.
    pub pinned: Vec<(usize, u8)>,
}

impl FixedTorus {
    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    /// Image under `g`; the free directions are preserved as a set.
    pub fn image(&self, g: &TorusIsometry) -> FixedTorus {
        let pinned = self.pinned.iter().map(|&(i, q)| (i, g.apply_quarters(i, q))).collect();
        FixedTorus { free: self.free.clone(), pinned }
    }

    /// Whether the two subtori meet.
    pub fn meets(&self, other: &FixedTorus) -> bool {
        self.pinned
            .iter()
            .all(|&(i, q)| other.pinned.iter().all(|&(j, p)| i != j || p == q))
    }
}

impl fmt::Display for FixedTorus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for i in 0..7 {
            match self.pinned.iter().find(|(j, _)| *j == i) {
                Some((_, q)) => parts.push(match q {
                    0 => "0".to_string(),
                    2 => "1/2".to_string(),
                    q => format!("{q}/4"),
                }),
                None => parts.push(format!("x{}", i + 1)),
            }
        }
        write!(f, "({})", parts.join(", "))
    }
}

/// Solves `sign_i x_i + shift_i = x_i` over `R / Z` coordinatewise:
/// `sign = 1` needs `shift = 0` (free), `sign = -1` gives `2x = shift`.
pub fn fixed_point_tori(g: &TorusIsometry) -> FixedLocus {
    if g.is_identity() {
        return FixedLocus::Everything;
    }
    let mut free = Vec::new();
    let mut choices: Vec<(usize, [u8; 2])> = Vec::new();
    for i in 0..7 {
        match (g.signs[i], g.half_shifts[i]) {
            (1, false) => free.push(i),
            (1, true) => return FixedLocus::Empty,
            (_, false) => choices.push((i, [0, 2])),
            (_, true) => choices.push((i, [1, 3])),
        }
    }
    let mut tori = Vec::with_capacity(1 << choices.len());
    for bits in 0..(1u32 << choices.len()) {
        let pinned = choices.iter().enumerate().map(|(b, (i, v))| (*i, v[((bits >> b) & 1) as usize])).collect();
        tori.push(FixedTorus { free: free.clone(), pinned });
    }
    tori.sort();
    FixedLocus::Tori(tori)
}

/// One connected component of the singular set of `T^7 / Gamma`: a
/// `Gamma`-orbit of fixed tori.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularComponent {
    /// 1-based.
    pub id: usize,
    pub fixed_by: String,
    pub tori: Vec<FixedTorus>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPointCount {
    pub element: String,
    pub map: TorusIsometry,
    pub tori: usize,
    pub torus_dimension: Option<usize>,
    pub identity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularSet {
    pub counts: Vec<FixedPointCount>,
    pub components: Vec<SingularComponent>,
    pub orbit_sizes: Vec<usize>,
    /// Every orbit has the size of the acting group.
    pub free_action: bool,
    /// No two tori from different orbits meet in `T^7`.
    pub disjoint: bool,
}

/// Orbits of the fixed tori of each generator under the other two generators.
pub fn singular_components() -> SingularSet {
    let elements = gamma_elements();
    let counts = elements
        .iter()
        .map(|e| {
            let locus = fixed_point_tori(&e.map);
            let torus_dimension = match &locus {
                FixedLocus::Tori(t) => t.first().map(FixedTorus::dimension),
                _ => None,
            };
            FixedPointCount {
                element: e.name.clone(),
                map: e.map,
                tori: locus.count(),
                torus_dimension,
                identity: matches!(locus, FixedLocus::Everything),
            }
        })
        .collect();
    let generators = [
        ("alpha", TorusIsometry::alpha()),
        ("beta", TorusIsometry::beta()),
        ("gamma", TorusIsometry::gamma()),
    ];
    let mut components = Vec::new();
    let mut orbit_sizes = Vec::new();
    let mut free_action = true;
    for (gi, (name, g)) in generators.iter().enumerate() {
        let others: Vec<(&str, TorusIsometry)> =
            generators.iter().enumerate().filter(|(j, _)| *j != gi).map(|(_, x)| *x).collect();
        let subgroup = generate(&others);
        let FixedLocus::Tori(tori) = fixed_point_tori(g) else { continue };
        let mut assigned: BTreeSet<FixedTorus> = BTreeSet::new();
        for t in &tori {
            if assigned.contains(t) {
                continue;
            }
            let orbit: BTreeSet<FixedTorus> = subgroup.iter().map(|h| t.image(&h.map)).collect();
            free_action &= orbit.len() == subgroup.len();
            orbit_sizes.push(orbit.len());
            assigned.extend(orbit.iter().cloned());
            components.push(SingularComponent {
                id: components.len() + 1,
                fixed_by: (*name).to_string(),
                tori: orbit.into_iter().collect(),
            });
        }
    }
    let mut disjoint = true;
    for (a, ca) in components.iter().enumerate() {
        for cb in &components[a + 1..] {
            disjoint &= !ca.tori.iter().any(|x| cb.tori.iter().any(|y| x.meets(y)));
        }
    }
    SingularSet { counts, components, orbit_sizes, free_action, disjoint }
}

/// Dimension of the `Gamma`-invariant constant `p`-forms on `T^7`, i.e. of
/// the harmonic `p`-forms on the flat orbifold `T^7 / Gamma`.
pub fn invariant_form_count(elements: &[GroupElement], p: usize) -> usize {
    crate::exterior_algebra::basis::masks(7, p)
        .iter()
        .filter(|&&mask| {
            elements.iter().all(|e| {
                (0..7).filter(|i| mask & (1 << i) != 0).map(|i| e.map.signs[i]).product::<i8>() > 0
            })
        })
        .count()
}
