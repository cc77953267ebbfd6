//! Staircase complexes of L-space knots and formal sums of them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtcx::{FilteredComplex, Generator};
use crate::laurent::LaurentPoly;

/// Step lengths `(a0, a1, ..., an)` up to the point of symmetry.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "StaircaseWire", into = "StaircaseWire")]
pub struct Staircase {
    half: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StaircaseWire {
    half: Vec<i64>,
}

impl TryFrom<StaircaseWire> for Staircase {
    type Error = Error;
    fn try_from(w: StaircaseWire) -> Result<Self> {
        Staircase::new(w.half)
    }
}

impl From<Staircase> for StaircaseWire {
    fn from(s: Staircase) -> Self {
        StaircaseWire { half: s.half }
    }
}

impl Staircase {
    pub fn new(half: Vec<i64>) -> Result<Self> {
        if half.is_empty() {
            return Err(Error::InvalidParameter(
                "a staircase needs at least one step; the unknot is the empty sum".into(),
            ));
        }
        if let Some(bad) = half.iter().find(|&&a| a < 1) {
            return Err(Error::InvalidParameter(format!(
                "step lengths must be positive, got {bad}"
            )));
        }
        Ok(Self { half })
    }

    pub fn half(&self) -> &[i64] {
        &self.half
    }

    /// `half ++ reverse(half)`
    pub fn symmetric_gaps(&self) -> Vec<i64> {
        self.half.iter().chain(self.half.iter().rev()).copied().collect()
    }

    /// Exponents `n_0 = 0 < n_1 < ... < n_M`.
    pub fn exponents(&self) -> Vec<i64> {
        std::iter::once(0)
            .chain(self.symmetric_gaps().into_iter().scan(0, |acc, g| {
                *acc += g;
                Some(*acc)
            }))
            .collect()
    }

    pub fn genus(&self) -> i64 {
        self.half.iter().sum()
    }

    /// Number of generators of the staircase complex.
    pub fn num_generators(&self) -> usize {
        2 * self.half.len() + 1
    }

    /// `Σ (-1)^i t^{n_i}`
    pub fn to_alexander(&self) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.exponents()
                .into_iter()
                .enumerate()
                .map(|(i, e)| (e, if i % 2 == 0 { 1 } else { -1 })),
        )
    }

    /// Reads the staircase off an L-space-form Alexander polynomial.
    pub fn from_alexander(p: &LaurentPoly) -> Result<Staircase> {
        let fail = |why: &str| Err(Error::NotLSpaceForm(format!("{why}: {p}")));
        if p.min_exp() != Some(0) {
            return fail("lowest exponent is not 0");
        }
        let terms: Vec<(i64, &BigInt)> = p.terms().collect();
        if terms.len() < 3 || terms.len().is_multiple_of(2) {
            return fail("need an odd number (at least 3) of terms");
        }
        let one = BigInt::one();
        let minus_one = -BigInt::one();
        for (k, (_, c)) in terms.iter().enumerate() {
            let want = if k % 2 == 0 { &one } else { &minus_one };
            if *c != want {
                return fail("coefficients do not alternate +1, -1");
            }
        }
        if !p.is_symmetric() {
            return fail("not symmetric");
        }
        let gaps: Vec<i64> = terms.windows(2).map(|w| w[1].0 - w[0].0).collect();
        let s = Staircase::new(gaps[..gaps.len() / 2].to_vec())?;
        debug_assert_eq!(s.symmetric_gaps(), gaps);
        Ok(s)
    }

    /// The staircase complex: generators `x0..xM` with `A(x_i) = g - n_i`,
    /// and for odd `i` a horizontal arrow `x_i -> x_{i-1}` and a vertical
    /// arrow `x_i -> x_{i+1}`.
    pub fn to_complex(&self) -> FilteredComplex {
        let n = self.exponents();
        let g = self.genus();
        let mut maslov = vec![0i64; n.len()];
        for i in (1..n.len()).step_by(2) {
            maslov[i] = maslov[i - 1] - 2 * (n[i] - n[i - 1]) + 1;
            maslov[i + 1] = maslov[i] - 1;
        }
        let generators = n
            .iter()
            .zip(&maslov)
            .enumerate()
            .map(|(i, (&ni, &m))| Generator {
                name: format!("x{i}"),
                alexander: g - ni,
                maslov: m,
            })
            .collect();
        let arrows = (1..n.len()).step_by(2).flat_map(|i| [(i, i - 1), (i, i + 1)]).collect();
        FilteredComplex::new(generators, arrows).expect("staircase complexes are valid")
    }

    /// Concatenates halves and reports whether the concatenation hypothesis
    /// holds.
    ///
    /// Convention: positions of `self.half` are numbered from 1. When the
    /// half has odd length it is padded with its last step (the step across
    /// the symmetry point) so that an even number of steps precede `other`.
    /// The hypothesis is `max(odd positions) <= b <= min(even positions)` for
    /// every step `b` of `other`.
    pub fn concat(&self, other: &Staircase) -> (Staircase, bool) {
        let mut padded = self.half.clone();
        if padded.len() % 2 == 1 {
            padded.push(*padded.last().expect("nonempty"));
        }
        let odd_max = padded.iter().step_by(2).max().copied().expect("nonempty");
        let even_min = padded.iter().skip(1).step_by(2).min().copied().expect("nonempty");
        let holds = other.half.iter().all(|&b| odd_max <= b && b <= even_min);
        let joined = self.half.iter().chain(&other.half).copied().collect();
        (Staircase { half: joined }, holds)
    }

    /// Splits the half at the given boundaries, e.g. `[2, 4]` turns
    /// `(a0, ..., a9)` into `(a0, a1)`, `(a2, a3)`, `(a4, ..., a9)`.
    pub fn split_at(&self, cuts: &[usize]) -> Result<Vec<Staircase>> {
        let mut pieces = Vec::with_capacity(cuts.len() + 1);
        let mut start = 0;
        for &c in cuts.iter().chain(std::iter::once(&self.half.len())) {
            if c <= start || c > self.half.len() {
                return Err(Error::InvalidParameter(format!("cannot split {self} at {cuts:?}")));
            }
            pieces.push(Staircase {
                half: self.half[start..c].to_vec(),
            });
            start = c;
        }
        Ok(pieces)
    }
}

impl fmt::Display for Staircase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, a) in self.half.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Staircase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Staircase{self}")
    }
}

impl FromStr for Staircase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(s.trim());
        let half = inner
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Staircase::new(half)
    }
}

/// Formal integer combination of staircases; a negative coefficient stands
/// for copies of the dual complex. The empty sum is the unknot.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct StairSum {
    terms: BTreeMap<Staircase, i64>,
}

impl StairSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(s: Staircase, coeff: i64) -> Self {
        let mut out = Self::zero();
        out.add_term(s, coeff);
        out
    }

    pub fn add_term(&mut self, s: Staircase, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let slot = self.terms.entry(s.clone()).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.terms.remove(&s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, s: &Staircase) -> i64 {
        self.terms.get(s).copied().unwrap_or(0)
    }

    /// Terms in canonical (lexicographic) order.
    pub fn iter(&self) -> impl Iterator<Item = (&Staircase, i64)> + '_ {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn scale(&self, k: i64) -> Self {
        stairsum_simplify(self.iter().map(|(s, c)| (s.clone(), c * k)))
    }

    /// Generator count of the tensor product this sum stands for.
    pub fn num_generators(&self) -> u128 {
        self.iter()
            .map(|(s, c)| (s.num_generators() as u128).saturating_pow(c.unsigned_abs() as u32))
            .fold(1u128, |a, b| a.saturating_mul(b))
    }

    /// Tensor product of every summand (duals for negative coefficients).
    pub fn to_complex(&self, cap: usize) -> Result<FilteredComplex> {
        let needed = self.num_generators();
        if needed > cap as u128 {
            return Err(Error::ResourceLimit {
                needed,
                cap: cap as u128,
            });
        }
        let mut acc = FilteredComplex::unknot();
        for (s, c) in self.iter() {
            let base = s.to_complex();
            let piece = if c < 0 { base.dual() } else { base };
            for _ in 0..c.unsigned_abs() {
                acc = acc.tensor(&piece);
            }
        }
        acc.validate()?;
        Ok(acc)
    }
}

/// Merges repeated staircases and drops zero coefficients.
pub fn stairsum_simplify(terms: impl IntoIterator<Item = (Staircase, i64)>) -> StairSum {
    let mut out = StairSum::zero();
    for (s, c) in terms {
        out.add_term(s, c);
    }
    out
}

impl From<Staircase> for StairSum {
    fn from(s: Staircase) -> Self {
        StairSum::single(s, 1)
    }
}

impl Add for &StairSum {
    type Output = StairSum;
    fn add(self, rhs: &StairSum) -> StairSum {
        stairsum_simplify(self.iter().chain(rhs.iter()).map(|(s, c)| (s.clone(), c)))
    }
}

impl Add for StairSum {
    type Output = StairSum;
    fn add(self, rhs: StairSum) -> StairSum {
        &self + &rhs
    }
}

impl Neg for &StairSum {
    type Output = StairSum;
    fn neg(self) -> StairSum {
        self.scale(-1)
    }
}

impl Neg for StairSum {
    type Output = StairSum;
    fn neg(self) -> StairSum {
        self.scale(-1)
    }
}

impl Sub for &StairSum {
    type Output = StairSum;
    fn sub(self, rhs: &StairSum) -> StairSum {
        self + &(-rhs)
    }
}

impl Sub for StairSum {
    type Output = StairSum;
    fn sub(self, rhs: StairSum) -> StairSum {
        &self - &rhs
    }
}

impl fmt::Display for StairSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (s, c)) in self.iter().enumerate() {
            let mag = c.unsigned_abs();
            match (k, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mag != 1 {
                write!(f, "{mag}")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for StairSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StairSum[{self}]")
    }
}

impl FromStr for StairSum {
    type Err = Error;
    /// Accepts the display form, e.g. `(1, 23) - 2(1, 19) + (2, 3)`, or `0`.
    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text == "0" {
            return Ok(StairSum::zero());
        }
        let mut out = StairSum::zero();
        let mut rest = text.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let (sign, body) = if let Some(r) = rest.strip_prefix('-') {
                (-1, r)
            } else if let Some(r) = rest.strip_prefix('+').filter(|_| !first) {
                (1, r)
            } else if first {
                (1, rest)
            } else {
                return Err(Error::Parse(format!("expected + or - at {rest:?}")));
            };
            let open = body
                .find('(')
                .ok_or_else(|| Error::Parse(format!("expected a staircase at {body:?}")))?;
            let mult: i64 = if open == 0 {
                1
            } else {
                body[..open]
                    .parse()
                    .map_err(|e| Error::Parse(format!("coefficient {:?}: {e}", &body[..open])))?
            };
            let close = body
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed staircase at {body:?}")))?;
            let stair: Staircase = body[open..=close].parse()?;
            out.add_term(stair, sign * mult);
            rest = &body[close + 1..];
            first = false;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermWire {
    half: Vec<i64>,
    coeff: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StairSumWire {
    terms: Vec<TermWire>,
}

impl Serialize for StairSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StairSumWire {
            terms: self
                .iter()
                .map(|(st, c)| TermWire {
                    half: st.half.clone(),
                    coeff: c,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StairSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = StairSumWire::deserialize(d)?;
        let mut out = StairSum::zero();
        for t in w.terms {
            if t.coeff == 0 {
                return Err(serde::de::Error::custom("zero coefficients are not allowed"));
            }
            let s = Staircase::new(t.half).map_err(serde::de::Error::custom)?;
            if out.coeff(&s) != 0 {
                return Err(serde::de::Error::custom(format!("repeated staircase {s}")));
            }
            out.add_term(s, t.coeff);
        }
        Ok(out)
    }
}
