//! F₂ homology of subquotient complexes and maps between them.

use serde::{Deserialize, Serialize};

use super::f2::F2Reduction;
use super::region::{restrict, BasisElement, Region, SubquotientComplex};
use super::FilteredComplex;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology {
    pub dimension: usize,
    /// Cycles spanning homology, as basis elements of the subquotient.
    pub representatives: Vec<Vec<BasisElement>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// Inclusion of a subcomplex.
    Inclusion,
    /// Projection onto a quotient followed by an inclusion.
    QuotientComposite,
}

impl std::fmt::Display for MapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MapKind::Inclusion => "inclusion",
            MapKind::QuotientComposite => "quotient-composite",
        })
    }
}

/// A subquotient together with its column reduction.
#[derive(Clone, Debug)]
pub struct ReducedRegion {
    pub complex: SubquotientComplex,
    reduction: F2Reduction,
}

impl ReducedRegion {
    pub fn new(c: &FilteredComplex, region: Region) -> Self {
        Self::build(c, region, true)
    }

    /// Reduction usable only as the target of a map (no homology
    /// representatives).
    pub fn new_target(c: &FilteredComplex, region: Region) -> Self {
        Self::build(c, region, false)
    }

    fn build(c: &FilteredComplex, region: Region, track_v: bool) -> Self {
        let complex = restrict(c, region);
        let reduction = F2Reduction::new(&complex.boundary, track_v);
        Self { complex, reduction }
    }

    pub fn dimension(&self) -> usize {
        self.reduction.betti()
    }

    pub fn representatives(&self) -> Vec<Vec<u32>> {
        self.reduction.homology_representatives()
    }

    pub fn is_boundary(&self, rows: &[u32]) -> bool {
        self.reduction.is_boundary(rows)
    }

    /// Image of a chain under the map that is the identity on translates
    /// present in both regions and zero otherwise.
    fn push_forward(&self, chain: &[u32], target: &SubquotientComplex) -> Vec<u32> {
        let mut out: Vec<u32> = chain
            .iter()
            .filter_map(|&r| {
                let b = &self.complex.basis[r as usize];
                let t = target.slot[b.generator as usize]?;
                (target.basis[t as usize].u_power == b.u_power).then_some(t)
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// True iff the identity-on-shared-translates map to `target` is nonzero
    /// on homology.
    pub fn maps_nontrivially(&self, target: &ReducedRegion) -> bool {
        self.representatives().iter().any(|rep| {
            let image = self.push_forward(rep, &target.complex);
            !image.is_empty() && !target.is_boundary(&image)
        })
    }
}

pub fn homology(s: &SubquotientComplex) -> Homology {
    let red = F2Reduction::new(&s.boundary, true);
    let representatives = red
        .homology_representatives()
        .into_iter()
        .map(|rep| rep.into_iter().map(|r| s.basis[r as usize].clone()).collect())
        .collect();
    Homology {
        dimension: red.betti(),
        representatives,
    }
}

/// Checks that `(from, to, kind)` is one of the supported pairings.
pub fn check_pairing(from: Region, to: Region, kind: MapKind) -> Result<()> {
    let ok = matches!(
        (from, to, kind),
        (Region::ColumnAtMost(_), Region::Column, MapKind::Inclusion)
            | (Region::Hook(_), Region::Column, MapKind::QuotientComposite)
            | (Region::Column, Region::CoHook(_), MapKind::QuotientComposite)
    );
    if ok {
        Ok(())
    } else {
        Err(Error::IncompatibleRegions {
            from: from.to_string(),
            to: to.to_string(),
            kind: kind.to_string(),
        })
    }
}

/// Whether the natural map between two regions of `c` is nonzero on
/// homology.
pub fn induced_map_nontrivial(c: &FilteredComplex, from: Region, to: Region, kind: MapKind) -> Result<bool> {
    check_pairing(from, to, kind)?;
    let source = ReducedRegion::new(c, from);
    let target = ReducedRegion::new_target(c, to);
    Ok(source.maps_nontrivially(&target))
}
