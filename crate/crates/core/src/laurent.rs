//! Exact integer Laurent polynomials in one variable `t`.
//!
//! Coefficients are arbitrary precision. The zero coefficient is never stored,
//! so structural equality is coefficient-wise equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `coeff * t^exp`
    pub fn monomial(coeff: impl Into<BigInt>, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff.into());
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    /// Adds `coeff * t^exp` in place.
    pub fn add_term(&mut self, exp: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Span `max_exp - min_exp`; zero for the zero polynomial.
    pub fn degree_span(&self) -> i64 {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0,
        }
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Multiplies by `t^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
        }
    }

    /// Replaces `t` by `t^n`.
    pub fn substitute_power(&self, n: i64) -> Self {
        assert!(n >= 1, "substitute_power requires n >= 1");
        Self {
            terms: self.terms.iter().map(|(e, c)| (e * n, c.clone())).collect(),
        }
    }

    /// Exact quotient `self / den` by long division from the top exponent.
    pub fn exact_div(&self, den: &LaurentPoly) -> Result<LaurentPoly> {
        let (den_lo, den_hi) = match (den.min_exp(), den.max_exp()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(Error::DivisionByZero),
        };
        let num_lo = match self.min_exp() {
            Some(lo) => lo,
            None => return Ok(LaurentPoly::zero()),
        };
        let lead = &den.terms[&den_hi];
        let lowest_quotient_exp = num_lo - den_lo;

        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero();
        while let Some(top) = rem.max_exp() {
            let qe = top - den_hi;
            if qe < lowest_quotient_exp {
                break;
            }
            let (qc, r) = rem.terms[&top].div_rem(lead);
            if !r.is_zero() {
                break;
            }
            for (e, c) in den.terms() {
                rem.add_term(e + qe, -(c * &qc));
            }
            quot.add_term(qe, qc);
        }
        if rem.is_zero() {
            Ok(quot)
        } else {
            Err(Error::NotDivisible {
                remainder: rem.to_string(),
            })
        }
    }

    /// True iff the coefficient sequence is palindromic about the midpoint of
    /// the exponent range.
    pub fn is_symmetric(&self) -> bool {
        let (lo, hi) = match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return true,
        };
        let d = lo + hi;
        self.terms.iter().all(|(e, c)| self.terms.get(&(d - e)) == Some(c))
    }

    /// Shifts so the lowest exponent is 0 and flips the sign so the constant
    /// term is positive.
    pub fn normalized(&self) -> Self {
        let lo = match self.min_exp() {
            Some(lo) => lo,
            None => return Self::zero(),
        };
        let shifted = self.shift(-lo);
        if shifted.coeff(0).is_negative() {
            -shifted
        } else {
            shifted
        }
    }

    /// Coefficients as `i64`, if they all fit.
    pub fn to_i64_terms(&self) -> Option<Vec<(i64, i64)>> {
        self.terms.iter().map(|(e, c)| c.to_i64().map(|c| (*e, c))).collect()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let unit = mag.is_one();
            match *e {
                0 => write!(f, "{mag}")?,
                1 if unit => f.write_str("t")?,
                1 => write!(f, "{mag}t")?,
                _ if unit => write!(f, "t^{e}")?,
                _ => write!(f, "{mag}t^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -self.clone()
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (ea, ca) in self.terms() {
            for (eb, cb) in rhs.terms() {
                *acc.entry(ea + eb).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        LaurentPoly { terms: acc }
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

// JSON form: {"terms": [[exponent, coefficient], ...]}. Coefficients that do
// not fit in an i64 are written as decimal strings.

struct Coeff<'a>(&'a BigInt);

impl Serialize for Coeff<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

struct Terms<'a>(&'a BTreeMap<i64, BigInt>);

impl Serialize for Terms<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (e, c) in self.0 {
            seq.serialize_element(&(e, Coeff(c)))?;
        }
        seq.end()
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            terms: Terms<'a>,
        }
        Wire {
            terms: Terms(&self.terms),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum WireCoeff {
            Int(i64),
            Text(String),
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wire {
            terms: Vec<(i64, WireCoeff)>,
        }
        let wire = Wire::deserialize(d)?;
        let mut out = LaurentPoly::zero();
        let mut last: Option<i64> = None;
        for (e, c) in wire.terms {
            if last.is_some_and(|l| l >= e) {
                return Err(de::Error::custom(
                    "terms must be sorted by strictly increasing exponent",
                ));
            }
            last = Some(e);
            let c = match c {
                WireCoeff::Int(v) => BigInt::from(v),
                WireCoeff::Text(s) => s.parse::<BigInt>().map_err(de::Error::custom)?,
            };
            if c.is_zero() {
                return Err(de::Error::custom("zero coefficients are not allowed"));
            }
            out.add_term(e, c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn add_cancels() {
        assert_eq!(p(&[(0, 1), (1, -1)]) + p(&[(1, 1)]), LaurentPoly::one());
        let q = p(&[(0, 1), (1, -1), (2, 1)]);
        assert_eq!(&q + &LaurentPoly::zero(), q);
        assert_eq!(q + p(&[(1, 1), (2, -1)]), LaurentPoly::one());
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p(&[(0, 1), (1, -1)]) * p(&[(0, 1), (1, 1)]), p(&[(0, 1), (2, -1)]));
        let q = p(&[(0, 3), (-2, 1)]);
        assert_eq!(&q * &LaurentPoly::one(), q);
        // (1 - t + t^2)(1 + t) = 1 + t^3
        assert_eq!(
            p(&[(0, 1), (1, -1), (2, 1)]) * p(&[(0, 1), (1, 1)]),
            p(&[(0, 1), (3, 1)])
        );
    }

    #[test]
    fn substitute_power_scales_exponents() {
        let q = p(&[(0, 1), (1, -1), (2, 1)]);
        assert_eq!(q.substitute_power(1), q);
        assert_eq!(q.substitute_power(2), p(&[(0, 1), (2, -1), (4, 1)]));
        assert_eq!(q.substitute_power(4), p(&[(0, 1), (4, -1), (8, 1)]));
    }

    #[test]
    fn exact_div_examples() {
        let t2m1 = p(&[(2, 1), (0, -1)]);
        let tm1 = p(&[(1, 1), (0, -1)]);
        assert_eq!(t2m1.exact_div(&tm1).unwrap(), p(&[(0, 1), (1, 1)]));

        let num = &tm1 * &p(&[(6, 1), (0, -1)]);
        let den = &t2m1 * &p(&[(3, 1), (0, -1)]);
        assert_eq!(num.exact_div(&den).unwrap(), p(&[(0, 1), (1, -1), (2, 1)]));

        let err = p(&[(2, 1), (0, 1)]).exact_div(&tm1).unwrap_err();
        assert_eq!(err, Error::NotDivisible { remainder: "2".into() });
        assert_eq!(tm1.exact_div(&LaurentPoly::zero()).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn exact_div_negative_exponents() {
        let a = p(&[(-3, 2), (1, -5), (4, 1)]);
        let b = p(&[(-1, 1), (2, 3)]);
        assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
    }

    #[test]
    fn symmetry() {
        assert!(p(&[(0, 1), (1, -1), (2, 1)]).is_symmetric());
        assert!(p(&[(0, 1), (1, -1), (2, 1), (3, -1), (4, 1)]).is_symmetric());
        assert!(!p(&[(0, 1), (1, 1), (2, -1)]).is_symmetric());
        assert!(p(&[(-1, 1), (0, -1), (1, 1)]).is_symmetric());
    }

    #[test]
    fn display_is_increasing_with_explicit_signs() {
        let q = p(&[(0, 1), (1, -1), (2, 1), (3, -1), (4, 1)]);
        assert_eq!(q.to_string(), "1 - t + t^2 - t^3 + t^4");
        assert_eq!(p(&[(-2, -3), (1, 2)]).to_string(), "-3t^-2 + 2t");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
    }

    #[test]
    fn big_coefficients_do_not_overflow() {
        let x = p(&[(0, 1), (1, 1)]);
        let mut acc = LaurentPoly::one();
        for _ in 0..80 {
            acc = &acc * &x;
        }
        // central binomial coefficient C(80, 40) exceeds i64
        assert!(acc.coeff(40).to_i64().is_none());
        let json = serde_json::to_string(&acc).unwrap();
        let back: LaurentPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, acc);
    }

    #[test]
    fn json_form() {
        let q = p(&[(0, 1), (1, -1), (2, 1)]);
        assert_eq!(serde_json::to_string(&q).unwrap(), r#"{"terms":[[0,1],[1,-1],[2,1]]}"#);
        assert!(serde_json::from_str::<LaurentPoly>(r#"{"terms":[[1,1],[0,1]]}"#).is_err());
        assert!(serde_json::from_str::<LaurentPoly>(r#"{"terms":[[0,0]]}"#).is_err());
    }
}
