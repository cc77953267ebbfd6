//! Finitely generated Z⊕Z-filtered chain complexes over F₂[U, U⁻¹].
//!
//! A generator `x` sits at lattice point `(0, A(x))`; its translate `U^m x`
//! sits at `(-m, A(x) - m)` with Maslov grading `M(x) - 2m`. An arrow
//! `x -> y` means `U^k y` appears in `∂x`, where `k` is forced by the Maslov
//! gradings: `k = (M(y) - M(x) + 1) / 2`.

pub mod f2;
pub mod homology;
pub mod region;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use homology::{homology, induced_map_nontrivial, Homology, MapKind};
pub use region::{restrict, BasisElement, Region, SubquotientComplex};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub name: String,
    pub alexander: i64,
    pub maslov: i64,
}

/// Displacement of one arrow in the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArrowShape {
    /// Power of `U` carried by the target.
    pub u_power: i64,
    /// Drop in the `j` coordinate.
    pub vertical_drop: i64,
}

impl ArrowShape {
    /// Horizontal displacement equals the `U` power.
    pub fn horizontal_drop(&self) -> i64 {
        self.u_power
    }
    pub fn is_vertical(&self) -> bool {
        self.u_power == 0
    }
    pub fn is_horizontal(&self) -> bool {
        self.vertical_drop == 0
    }
}

/// Arrows are stored in compressed rows: the targets of generator `s` are
/// `targets[offsets[s]..offsets[s + 1]]`, sorted.
#[derive(Clone, PartialEq, Eq)]
pub struct FilteredComplex {
    generators: Vec<Generator>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl FilteredComplex {
    /// Validates indices, arrow shapes and `∂² = 0`.
    pub fn new(generators: Vec<Generator>, mut arrows: Vec<(usize, usize)>) -> Result<Self> {
        let n = generators.len();
        if n == 0 {
            return Err(Error::InvalidComplex("no generators".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidComplex("too many generators".into()));
        }
        for &(s, t) in &arrows {
            if s >= n || t >= n {
                return Err(Error::InvalidComplex(format!("arrow ({s}, {t}) out of range")));
            }
        }
        arrows.sort_unstable();
        if arrows.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidComplex("repeated arrow".into()));
        }
        let c = Self::from_sorted_arrows(generators, &arrows);
        c.check_shapes()?;
        c.check_square_zero()?;
        Ok(c)
    }

    fn from_sorted_arrows(generators: Vec<Generator>, arrows: &[(usize, usize)]) -> Self {
        let n = generators.len();
        let mut offsets = vec![0usize; n + 1];
        for &(s, _) in arrows {
            offsets[s + 1] += 1;
        }
        for k in 0..n {
            offsets[k + 1] += offsets[k];
        }
        let targets = arrows.iter().map(|&(_, t)| t as u32).collect();
        Self {
            generators,
            offsets,
            targets,
        }
    }

    /// The one-generator complex of the unknot.
    pub fn unknot() -> Self {
        Self::from_sorted_arrows(
            vec![Generator {
                name: "x0".into(),
                alexander: 0,
                maslov: 0,
            }],
            &[],
        )
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn num_arrows(&self) -> usize {
        self.targets.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, k: usize) -> &Generator {
        &self.generators[k]
    }

    pub fn targets(&self, s: usize) -> &[u32] {
        &self.targets[self.offsets[s]..self.offsets[s + 1]]
    }

    pub fn arrows(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |s| self.targets(s).iter().map(move |&t| (s, t as usize)))
    }

    pub fn has_arrow(&self, s: usize, t: usize) -> bool {
        self.targets(s).binary_search(&(t as u32)).is_ok()
    }

    /// Lattice displacement of the arrow `s -> t`, or `None` if the Maslov
    /// gradings do not fit an arrow.
    pub fn shape(&self, s: usize, t: usize) -> Option<ArrowShape> {
        shape_of(&self.generators[s], &self.generators[t])
    }

    pub fn alexander_range(&self) -> (i64, i64) {
        let lo = self.generators.iter().map(|g| g.alexander).min().unwrap_or(0);
        let hi = self.generators.iter().map(|g| g.alexander).max().unwrap_or(0);
        (lo, hi)
    }

    fn check_shapes(&self) -> Result<()> {
        for (s, t) in self.arrows() {
            if s == t {
                return Err(Error::InvalidComplex(format!(
                    "self-loop at {}",
                    self.generators[s].name
                )));
            }
            let (a, b) = (&self.generators[s], &self.generators[t]);
            let sh = shape_of(a, b).ok_or_else(|| {
                Error::InvalidComplex(format!("arrow {} -> {} has odd Maslov difference", a.name, b.name))
            })?;
            if sh.u_power < 0 || sh.vertical_drop < 0 || (sh.u_power == 0 && sh.vertical_drop == 0) {
                return Err(Error::InvalidComplex(format!(
                    "arrow {} -> {} does not lower the filtration (U power {}, vertical drop {})",
                    a.name, b.name, sh.u_power, sh.vertical_drop
                )));
            }
        }
        Ok(())
    }

    fn check_square_zero(&self) -> Result<()> {
        let mut count: HashMap<u32, u32> = HashMap::new();
        for s in 0..self.len() {
            count.clear();
            for &m in self.targets(s) {
                for &t in self.targets(m as usize) {
                    *count.entry(t).or_insert(0) += 1;
                }
            }
            if let Some((&t, _)) = count.iter().find(|(_, c)| **c % 2 == 1) {
                return Err(Error::InvalidComplex(format!(
                    "∂² ≠ 0: odd number of paths {} -> {}",
                    self.generators[s].name, self.generators[t as usize].name
                )));
            }
        }
        Ok(())
    }

    /// Tensor product; the generator `(a, b)` gets index `a * |other| + b`.
    pub fn tensor(&self, other: &FilteredComplex) -> FilteredComplex {
        let nb = other.len();
        let generators = self
            .generators
            .iter()
            .flat_map(|x| {
                other.generators.iter().map(move |y| Generator {
                    name: format!("{}.{}", x.name, y.name),
                    alexander: x.alexander + y.alexander,
                    maslov: x.maslov + y.maslov,
                })
            })
            .collect();
        let mut arrows = Vec::with_capacity(self.num_arrows() * nb + self.len() * other.num_arrows());
        for ia in 0..self.len() {
            for ib in 0..nb {
                let src = ia * nb + ib;
                let mut row: Vec<usize> = self
                    .targets(ia)
                    .iter()
                    .map(|&t| t as usize * nb + ib)
                    .chain(other.targets(ib).iter().map(|&t| ia * nb + t as usize))
                    .collect();
                row.sort_unstable();
                arrows.extend(row.into_iter().map(|t| (src, t)));
            }
        }
        let c = Self::from_sorted_arrows(generators, &arrows);
        debug_assert!(c.check_shapes().is_ok());
        c
    }

    /// Tensor product followed by the full structural checks.
    pub fn tensor_checked(&self, other: &FilteredComplex) -> Result<FilteredComplex> {
        let c = self.tensor(other);
        c.check_shapes()?;
        c.check_square_zero()?;
        Ok(c)
    }

    /// Dual complex: gradings negated, arrows reversed.
    pub fn dual(&self) -> FilteredComplex {
        let generators = self
            .generators
            .iter()
            .map(|g| Generator {
                name: dual_name(&g.name),
                alexander: -g.alexander,
                maslov: -g.maslov,
            })
            .collect();
        let mut arrows: Vec<(usize, usize)> = self.arrows().map(|(s, t)| (t, s)).collect();
        arrows.sort_unstable();
        Self::from_sorted_arrows(generators, &arrows)
    }

    /// Re-runs every structural check.
    pub fn validate(&self) -> Result<()> {
        self.check_shapes()?;
        self.check_square_zero()
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("complex serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn dual_name(name: &str) -> String {
    match name.strip_suffix('*') {
        Some(base) => base.to_string(),
        None => format!("{name}*"),
    }
}

fn shape_of(a: &Generator, b: &Generator) -> Option<ArrowShape> {
    let twice = b.maslov - a.maslov + 1;
    if twice % 2 != 0 {
        return None;
    }
    let k = twice / 2;
    Some(ArrowShape {
        u_power: k,
        vertical_drop: a.alexander - (b.alexander - k),
    })
}

impl fmt::Debug for FilteredComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FilteredComplex")
            .field("generators", &self.len())
            .field("arrows", &self.num_arrows())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexWire {
    generators: Vec<Generator>,
    arrows: Vec<(usize, usize)>,
}

impl Serialize for FilteredComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexWire {
            generators: self.generators.clone(),
            arrows: self.arrows().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FilteredComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = ComplexWire::deserialize(d)?;
        FilteredComplex::new(w.generators, w.arrows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(name: &str, a: i64, m: i64) -> Generator {
        Generator {
            name: name.into(),
            alexander: a,
            maslov: m,
        }
    }

    /// The trefoil staircase written out by hand.
    pub(crate) fn trefoil() -> FilteredComplex {
        FilteredComplex::new(
            vec![gen("x0", 1, 0), gen("x1", 0, -1), gen("x2", -1, -2)],
            vec![(1, 0), (1, 2)],
        )
        .unwrap()
    }

    #[test]
    fn shapes_of_trefoil_arrows() {
        let c = trefoil();
        let h = c.shape(1, 0).unwrap();
        assert_eq!(
            h,
            ArrowShape {
                u_power: 1,
                vertical_drop: 0
            }
        );
        assert!(h.is_horizontal());
        let v = c.shape(1, 2).unwrap();
        assert_eq!(
            v,
            ArrowShape {
                u_power: 0,
                vertical_drop: 1
            }
        );
        assert!(v.is_vertical());
    }

    #[test]
    fn rejects_bad_complexes() {
        // arrow that raises the filtration
        let up = FilteredComplex::new(vec![gen("a", 0, 0), gen("b", 1, -1)], vec![(0, 1)]);
        assert!(matches!(up, Err(Error::InvalidComplex(_))));
        // odd Maslov gap
        let odd = FilteredComplex::new(vec![gen("a", 0, 0), gen("b", -1, 0)], vec![(0, 1)]);
        assert!(matches!(odd, Err(Error::InvalidComplex(_))));
        // ∂² ≠ 0
        let sq = FilteredComplex::new(
            vec![gen("a", 0, 0), gen("b", -1, -1), gen("c", -2, -2)],
            vec![(0, 1), (1, 2)],
        );
        assert!(matches!(sq, Err(Error::InvalidComplex(_))));
    }

    #[test]
    fn tensor_counts() {
        let t = trefoil();
        let tt = t.tensor_checked(&t).unwrap();
        assert_eq!(tt.len(), 9);
        assert_eq!(tt.num_arrows(), 12);
        let tu = t.tensor_checked(&FilteredComplex::unknot()).unwrap();
        assert_eq!(tu.len(), 3);
        let grades = |c: &FilteredComplex| {
            c.generators()
                .iter()
                .map(|g| (g.alexander, g.maslov))
                .collect::<Vec<_>>()
        };
        assert_eq!(grades(&tu), grades(&t));
        assert_eq!(tu.arrows().collect::<Vec<_>>(), t.arrows().collect::<Vec<_>>());
    }

    #[test]
    fn dual_is_an_involution() {
        let t = trefoil();
        let d = t.dual();
        d.validate().unwrap();
        assert_eq!(d.dual(), t);
        assert_eq!(FilteredComplex::unknot().dual().generators()[0].alexander, 0);
        assert_eq!(d.generator(0).alexander, -1);
        assert!(d.has_arrow(0, 1) && d.has_arrow(2, 1));
    }

    #[test]
    fn json_round_trip_and_digest() {
        let t = trefoil();
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.starts_with(r#"{"generators":[{"name":"x0","alexander":1,"maslov":0}"#));
        let back: FilteredComplex = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.digest(), t.digest());
        assert_ne!(t.digest(), t.dual().digest());
        assert_eq!(t.digest().len(), 64);
    }
}
