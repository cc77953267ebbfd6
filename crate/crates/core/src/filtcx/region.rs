//! Lattice regions and the finite F₂ complexes they cut out.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::FilteredComplex;

/// The closed catalog of lattice regions. `i` is the horizontal coordinate,
/// `j` the vertical one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "s", rename_all = "snake_case")]
pub enum Region {
    /// `{i = 0}`
    Column,
    /// `{i = 0, j <= s}`
    ColumnAtMost(i64),
    /// `{i = 0, j >= s}`
    ColumnAtLeast(i64),
    /// `{max(i, j - s) = 0}`: the column below `s` and the row to its left.
    Hook(i64),
    /// `{min(i, j - s) = 0}`: the column above `s` and the row to its right.
    CoHook(i64),
}

impl Region {
    pub fn contains(&self, i: i64, j: i64) -> bool {
        match *self {
            Region::Column => i == 0,
            Region::ColumnAtMost(s) => i == 0 && j <= s,
            Region::ColumnAtLeast(s) => i == 0 && j >= s,
            Region::Hook(s) => i.max(j - s) == 0,
            Region::CoHook(s) => i.min(j - s) == 0,
        }
    }

    /// The `U` powers `m` with `U^m x` in the region, for a generator of
    /// Alexander grading `a`. Every catalog region meets each generator's
    /// orbit at most once.
    pub fn translate(&self, a: i64) -> Option<i64> {
        match *self {
            Region::Column => Some(0),
            Region::ColumnAtMost(s) => (a <= s).then_some(0),
            Region::ColumnAtLeast(s) => (a >= s).then_some(0),
            Region::Hook(s) => Some(if a <= s { 0 } else { a - s }),
            Region::CoHook(s) => Some(if a >= s { 0 } else { a - s }),
        }
    }

    /// Bound on `|m|` for translates inside the region.
    pub fn window(&self, a: i64) -> i64 {
        let s = match *self {
            Region::Column => 0,
            Region::ColumnAtMost(s) | Region::ColumnAtLeast(s) | Region::Hook(s) | Region::CoHook(s) => s,
        };
        a.abs() + s.abs() + 1
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Column => write!(f, "C{{i=0}}"),
            Region::ColumnAtMost(s) => write!(f, "C{{i=0, j<={s}}}"),
            Region::ColumnAtLeast(s) => write!(f, "C{{i=0, j>={s}}}"),
            Region::Hook(s) => write!(f, "C{{max(i, j-{s})=0}}"),
            Region::CoHook(s) => write!(f, "C{{min(i, j-{s})=0}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisElement {
    pub generator: u32,
    pub u_power: i64,
    pub i: i64,
    pub j: i64,
    pub maslov: i64,
}

/// Finite F₂ complex cut out of a filtered complex by a region.
///
/// The basis is sorted by `(i + j, i, generator)`, so every boundary column
/// only has rows with smaller index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubquotientComplex {
    pub region: Region,
    pub basis: Vec<BasisElement>,
    /// `boundary[c]` lists the rows of column `c`, sorted.
    pub boundary: Vec<Vec<u32>>,
    /// Position in `basis` of each generator's translate, if it has one.
    pub slot: Vec<Option<u32>>,
}

impl SubquotientComplex {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn boundary_rank(&self) -> usize {
        super::f2::F2Reduction::new(&self.boundary, false).rank()
    }

    /// Checks `∂² = 0` directly on the matrix.
    pub fn square_is_zero(&self) -> bool {
        let mut parity = vec![false; self.len()];
        self.boundary.iter().all(|col| {
            for &m in col {
                for &r in &self.boundary[m as usize] {
                    parity[r as usize] ^= true;
                }
            }
            let ok = parity.iter().all(|p| !p);
            parity.iter_mut().for_each(|p| *p = false);
            ok
        })
    }
}

/// Restricts `c` to the region: one basis element per generator translate in
/// the region, arrows kept when both ends lie in it.
pub fn restrict(c: &FilteredComplex, region: Region) -> SubquotientComplex {
    let mut basis: Vec<BasisElement> = c
        .generators()
        .iter()
        .enumerate()
        .filter_map(|(g, x)| {
            let m = region.translate(x.alexander)?;
            assert!(m.abs() <= region.window(x.alexander));
            let (i, j) = (-m, x.alexander - m);
            debug_assert!(region.contains(i, j));
            Some(BasisElement {
                generator: g as u32,
                u_power: m,
                i,
                j,
                maslov: x.maslov - 2 * m,
            })
        })
        .collect();
    basis.sort_unstable_by_key(|b| (b.i + b.j, b.i, b.generator));

    let mut slot = vec![None; c.len()];
    for (k, b) in basis.iter().enumerate() {
        slot[b.generator as usize] = Some(k as u32);
    }
    let boundary = basis
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let mut col: Vec<u32> = c
                .targets(b.generator as usize)
                .iter()
                .filter_map(|&t| {
                    let r = slot[t as usize]?;
                    let shape = c.shape(b.generator as usize, t as usize)?;
                    (basis[r as usize].u_power == b.u_power + shape.u_power).then_some(r)
                })
                .collect();
            col.sort_unstable();
            debug_assert!(col.iter().all(|&r| (r as usize) < k));
            col
        })
        .collect();
    SubquotientComplex {
        region,
        basis,
        boundary,
        slot,
    }
}
