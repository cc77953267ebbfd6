//! τ, ν, ν′ and ε of knot-like complexes, and the order they induce.

mod basis;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtcx::homology::ReducedRegion;
use crate::filtcx::{FilteredComplex, Region};
use crate::staircase::StairSum;

pub use basis::epsilon_by_basis;

/// Default generator cap for materialized tensor products.
pub const DEFAULT_MAX_GENERATORS: usize = 50_000;
/// Default depth for bounded domination checks.
pub const DEFAULT_DEPTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_generators: usize,
    pub depth: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            max_generators: DEFAULT_MAX_GENERATORS,
            depth: DEFAULT_DEPTH,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub tau: i64,
    pub nu: i64,
    pub nu_prime: i64,
    pub epsilon: i64,
}

impl InvariantRecord {
    /// Checks `ν ∈ {τ, τ+1}`, `ν′ ∈ {τ, τ-1}` and `ε = 2τ - ν - ν′ ∈ {-1, 0, 1}`.
    pub fn check(&self) -> Result<()> {
        let ok = (self.nu == self.tau || self.nu == self.tau + 1)
            && (self.nu_prime == self.tau || self.nu_prime == self.tau - 1)
            && self.epsilon == 2 * self.tau - self.nu - self.nu_prime
            && (-1..=1).contains(&self.epsilon);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidComplex(format!("inconsistent invariants {self:?}")))
        }
    }
}

/// Cached column reduction plus the search window for one complex.
struct Searcher<'a> {
    c: &'a FilteredComplex,
    column: ReducedRegion,
    lo: i64,
    hi: i64,
}

impl<'a> Searcher<'a> {
    fn new(c: &'a FilteredComplex) -> Result<Self> {
        let column = ReducedRegion::new(c, Region::Column);
        let dim = column.dimension();
        if dim != 1 {
            return Err(Error::NotKnotLike(format!("H(C{{i=0}}) has dimension {dim}")));
        }
        let (lo, hi) = c.alexander_range();
        Ok(Self {
            c,
            column,
            lo: lo - 1,
            hi: hi + 1,
        })
    }

    fn inclusion(&self, s: i64) -> bool {
        ReducedRegion::new(self.c, Region::ColumnAtMost(s)).maps_nontrivially(&self.column)
    }

    fn hook(&self, s: i64) -> bool {
        ReducedRegion::new(self.c, Region::Hook(s)).maps_nontrivially(&self.column)
    }

    fn cohook(&self, s: i64) -> bool {
        self.column
            .maps_nontrivially(&ReducedRegion::new_target(self.c, Region::CoHook(s)))
    }

    /// Smallest `s` in the window where a monotone predicate turns true.
    fn first_true(&self, pred: impl Fn(i64) -> bool, what: &str) -> Result<i64> {
        let (mut lo, mut hi) = (self.lo, self.hi);
        if pred(lo) || !pred(hi) {
            return Err(Error::InvalidComplex(format!(
                "{what} search window endpoints violated"
            )));
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if pred(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Largest `s` in the window where a monotone predicate is still true.
    fn last_true(&self, pred: impl Fn(i64) -> bool, what: &str) -> Result<i64> {
        let (mut lo, mut hi) = (self.lo, self.hi);
        if !pred(lo) || pred(hi) {
            return Err(Error::InvalidComplex(format!(
                "{what} search window endpoints violated"
            )));
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if pred(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    fn tau(&self) -> Result<i64> {
        self.first_true(|s| self.inclusion(s), "tau")
    }

    fn nu(&self) -> Result<i64> {
        self.first_true(|s| self.hook(s), "nu")
    }

    fn nu_prime(&self) -> Result<i64> {
        self.last_true(|s| self.cohook(s), "nu'")
    }
}

/// Smallest `s` with `C{i=0, j<=s} -> C{i=0}` nonzero on homology.
pub fn tau(c: &FilteredComplex) -> Result<i64> {
    Searcher::new(c)?.tau()
}

/// Smallest `s` with `A_s -> C{i=0}` nonzero on homology.
pub fn nu(c: &FilteredComplex) -> Result<i64> {
    Searcher::new(c)?.nu()
}

/// Largest `s` with `C{i=0} -> A′_s` nonzero on homology.
pub fn nu_prime(c: &FilteredComplex) -> Result<i64> {
    Searcher::new(c)?.nu_prime()
}

/// All four invariants, sharing one reduction of the column.
pub fn invariants(c: &FilteredComplex) -> Result<InvariantRecord> {
    let s = Searcher::new(c)?;
    let (tau, nu, nu_prime) = (s.tau()?, s.nu()?, s.nu_prime()?);
    let rec = InvariantRecord {
        tau,
        nu,
        nu_prime,
        epsilon: 2 * tau - nu - nu_prime,
    };
    rec.check()?;
    Ok(rec)
}

pub fn epsilon(c: &FilteredComplex) -> Result<i64> {
    Ok(invariants(c)?.epsilon)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Less,
    Equal,
    Greater,
}

impl Relation {
    pub fn from_epsilon(e: i64) -> Relation {
        match e.signum() {
            1 => Relation::Greater,
            -1 => Relation::Less,
            _ => Relation::Equal,
        }
    }

    pub fn reverse(self) -> Relation {
        match self {
            Relation::Less => Relation::Greater,
            Relation::Equal => Relation::Equal,
            Relation::Greater => Relation::Less,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Less => "less",
            Relation::Equal => "equal",
            Relation::Greater => "greater",
        })
    }
}

/// Verdicts of `a` against `n |b|` for `n = 1..=depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominationEvidence {
    pub depth: usize,
    pub verdicts: Vec<Relation>,
    /// First `n` (1-based) where `a > n |b|` failed.
    pub first_failure: Option<usize>,
}

impl DominationEvidence {
    pub fn all_greater(&self) -> bool {
        self.first_failure.is_none() && self.verdicts.len() == self.depth
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub relation: Relation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominates_evidence: Option<DominationEvidence>,
}

/// Sign of `ε(a ⊗ b*)`.
pub fn compare(a: &FilteredComplex, b: &FilteredComplex) -> Result<ComparisonResult> {
    let e = epsilon(&a.tensor(&b.dual()))?;
    Ok(ComparisonResult {
        relation: Relation::from_epsilon(e),
        dominates_evidence: None,
    })
}

pub fn epsilon_equivalent(a: &FilteredComplex, b: &FilteredComplex) -> Result<bool> {
    Ok(epsilon(&a.tensor(&b.dual()))? == 0)
}

/// Sign of `ε` of the sum `a - b`. Equal staircases cancel before the tensor
/// product is built, which does not change the ε class.
pub fn compare_sums(a: &StairSum, b: &StairSum, cap: usize) -> Result<Relation> {
    let diff = a - b;
    Ok(Relation::from_epsilon(epsilon(&diff.to_complex(cap)?)?))
}

/// `|b|`: `b` or `-b`, whichever is not below the unknot.
pub fn absolute(b: &StairSum, cap: usize) -> Result<StairSum> {
    Ok(match compare_sums(b, &StairSum::zero(), cap)? {
        Relation::Less => -b,
        _ => b.clone(),
    })
}

/// Bounded evidence that `a` dominates `b`: compares `a` with `n |b|` for
/// `n = 1..=depth` and stops at the first `n` where `a` is not greater.
pub fn dominates_bounded(a: &StairSum, b: &StairSum, depth: usize, cap: usize) -> Result<DominationEvidence> {
    if depth == 0 {
        return Err(Error::InvalidParameter("domination depth must be at least 1".into()));
    }
    let abs_b = absolute(b, cap)?;
    let mut verdicts = Vec::with_capacity(depth);
    let mut first_failure = None;
    for n in 1..=depth {
        let rel = compare_sums(a, &abs_b.scale(n as i64), cap)?;
        verdicts.push(rel);
        if rel != Relation::Greater {
            first_failure = Some(n);
            break;
        }
    }
    Ok(DominationEvidence {
        depth,
        verdicts,
        first_failure,
    })
}
