//! Alexander polynomials of positive torus knots and their iterated cables.
//!
//! Every polynomial returned here is normalized: lowest exponent 0 and
//! constant coefficient +1.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

/// A torus knot followed by a sequence of cabling operations.
///
/// `stages[0] = (p, q)` names `T(p,q)`; each later `(p, q)` takes the
/// `(p, q)`-cable of the knot built so far, `p` being the longitudinal winding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(i64, i64)>", into = "Vec<(i64, i64)>")]
pub struct CableWord {
    stages: Vec<(i64, i64)>,
}

impl CableWord {
    pub fn new(stages: Vec<(i64, i64)>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidParameter("a cable word needs at least one stage".into()));
        }
        for &(p, q) in &stages {
            check_pair(p, q)?;
        }
        Ok(Self { stages })
    }

    pub fn torus(p: i64, q: i64) -> Result<Self> {
        Self::new(vec![(p, q)])
    }

    pub fn stages(&self) -> &[(i64, i64)] {
        &self.stages
    }

    /// Genus after each stage, assuming every stage is a positive L-space cable.
    pub fn genera(&self) -> Vec<i64> {
        let mut g = 0;
        self.stages
            .iter()
            .map(|&(p, q)| {
                g = p * g + (p - 1) * (q - 1) / 2;
                g
            })
            .collect()
    }

    pub fn genus(&self) -> i64 {
        *self.genera().last().expect("nonempty")
    }

    /// Checks that every cabling stage keeps the knot an L-space knot:
    /// `q >= p (2 g - 1)` where `g` is the genus of the companion.
    pub fn check_lspace_cabling(&self) -> Result<()> {
        let genera = self.genera();
        for (k, &(p, q)) in self.stages.iter().enumerate().skip(1) {
            let g = genera[k - 1];
            if g > 0 && q < p * (2 * g - 1) {
                return Err(Error::NotLSpaceForm(format!(
                    "stage {} cable ({p}, {q}) of a genus {g} companion fails q >= p(2g - 1)",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<(i64, i64)>> for CableWord {
    type Error = Error;
    fn try_from(v: Vec<(i64, i64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CableWord> for Vec<(i64, i64)> {
    fn from(w: CableWord) -> Self {
        w.stages
    }
}

impl fmt::Display for CableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("T(")?;
        for (k, (p, q)) in self.stages.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{p},{q}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for CableWord {
    type Err = Error;
    /// Accepts `2,3;5,11` or the display form `T(2,3; 5,11)`.
    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = text
            .strip_prefix("T(")
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(&text);
        let stages = body
            .split(';')
            .map(|stage| {
                let (p, q) = stage
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("stage {stage:?} is not p,q")))?;
                let num = |x: &str| x.parse::<i64>().map_err(|e| Error::Parse(format!("{x:?}: {e}")));
                Ok((num(p)?, num(q)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(stages)
    }
}

fn check_pair(p: i64, q: i64) -> Result<()> {
    if p < 1 || q < 1 {
        return Err(Error::InvalidParameter(format!(
            "torus and cable parameters must be positive, got ({p}, {q})"
        )));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    Ok(())
}

/// `t^e - 1`
fn t_pow_minus_one(e: i64) -> LaurentPoly {
    LaurentPoly::from_terms([(e, 1), (0, -1)])
}

/// Alexander polynomial of the positive torus knot `T(p,q)` by exact division.
pub fn torus_alexander(p: i64, q: i64) -> Result<LaurentPoly> {
    check_pair(p, q)?;
    if p == 1 || q == 1 {
        return Ok(LaurentPoly::one());
    }
    let num = &t_pow_minus_one(1) * &t_pow_minus_one(p * q);
    let den = &t_pow_minus_one(p) * &t_pow_minus_one(q);
    Ok(num.exact_div(&den)?.normalized())
}

/// Alexander polynomial of the `(p, q)`-cable of a companion with polynomial
/// `companion`.
pub fn cable_alexander(companion: &LaurentPoly, p: i64, q: i64) -> Result<LaurentPoly> {
    let pattern = torus_alexander(p, q)?;
    Ok((&companion.substitute_power(p) * &pattern).normalized())
}

pub fn iterated_cable_alexander(word: &CableWord) -> Result<LaurentPoly> {
    word.stages
        .iter()
        .try_fold(LaurentPoly::one(), |acc, &(p, q)| cable_alexander(&acc, p, q))
}

fn accumulate(poly: &mut LaurentPoly, exps: impl IntoIterator<Item = i64>, sign: i64) {
    for e in exps {
        poly.add_term(e, sign.into());
    }
}

/// Explicit two-sum expression for `T(p, np+1)`.
pub fn closed_form_np1(p: i64, n: i64) -> Result<LaurentPoly> {
    if p < 2 || n < 1 {
        return Err(Error::InvalidParameter(format!(
            "need p >= 2, n >= 1, got p={p}, n={n}"
        )));
    }
    let mut out = LaurentPoly::zero();
    accumulate(&mut out, (0..=n * (p - 1)).map(|i| i * p), 1);
    accumulate(
        &mut out,
        (0..=p - 2).flat_map(|j| (0..n).map(move |k| k * p + j * (p * n + 1) + 1)),
        -1,
    );
    Ok(out)
}

/// Explicit four-sum expression for the `(p, p+1)`-cable of `T(2,3)`.
pub fn closed_form_pcable(p: i64) -> Result<LaurentPoly> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("need p >= 2, got p={p}")));
    }
    let mut out = LaurentPoly::zero();
    accumulate(&mut out, (0..=p).map(|i| i * (p + 1)), 1);
    accumulate(&mut out, (2..p).map(|i| i * p), 1);
    accumulate(&mut out, (0..=p - 2).map(|i| i * (p + 1) + 1), -1);
    accumulate(&mut out, (2..=p).map(|i| i * (p + 1) - 1), -1);
    Ok(out)
}

/// Explicit expression for `T(p, 2p-1)`.
pub fn closed_form_2pm1(p: i64) -> Result<LaurentPoly> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("need p >= 2, got p={p}")));
    }
    let mut out = LaurentPoly::zero();
    accumulate(
        &mut out,
        (0..=p - 2).flat_map(|i| [(2 * p - 1) * i, (2 * p - 1) * i + p]),
        1,
    );
    accumulate(&mut out, (0..=2 * (p - 2)).map(|i| i * p + 1), -1);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    /// Independent oracle: the product of cyclotomic-style geometric sums,
    /// `(1 + t^q + ... + t^{(p-1)q}) (1 - t) / (1 - t^p)` expanded as a power
    /// series and truncated at the known degree.
    fn torus_by_series(a: i64, b: i64) -> LaurentPoly {
        let deg = (a - 1) * (b - 1);
        let len = (deg + 1) as usize;
        // numerator (1 - t)(1 + t^b + ... + t^{(a-1)b}), truncated
        let mut num = vec![0i64; len + b as usize * a as usize + 2];
        for j in 0..a {
            let e = (j * b) as usize;
            num[e] += 1;
            num[e + 1] -= 1;
        }
        // divide by (1 - t^a) as a power series: c_k = num_k + c_{k-a}
        let mut c = vec![0i64; len];
        for k in 0..len {
            c[k] = num[k] + if k >= a as usize { c[k - a as usize] } else { 0 };
        }
        LaurentPoly::from_terms(c.into_iter().enumerate().map(|(e, v)| (e as i64, v)))
    }

    #[test]
    fn torus_examples() {
        assert_eq!(torus_alexander(2, 3).unwrap(), p(&[(0, 1), (1, -1), (2, 1)]));
        assert_eq!(
            torus_alexander(2, 5).unwrap(),
            p(&[(0, 1), (1, -1), (2, 1), (3, -1), (4, 1)])
        );
        assert_eq!(torus_alexander(1, 7).unwrap(), LaurentPoly::one());
        assert_eq!(
            torus_alexander(3, 4).unwrap(),
            p(&[(0, 1), (1, -1), (3, 1), (5, -1), (6, 1)])
        );
        assert_eq!(torus_alexander(2, 4).unwrap_err(), Error::NotCoprime { p: 2, q: 4 });
        assert!(torus_alexander(2, -3).is_err());
    }

    #[test]
    fn torus_matches_series_oracle() {
        for a in 2..7 {
            for b in 2..12 {
                if a.gcd(&b) == 1 {
                    assert_eq!(torus_alexander(a, b).unwrap(), torus_by_series(a, b), "T({a},{b})");
                }
            }
        }
    }

    #[test]
    fn torus_degree_and_value_at_one() {
        for a in 1..8i64 {
            for b in 1..10i64 {
                if a.gcd(&b) != 1 {
                    continue;
                }
                let d = torus_alexander(a, b).unwrap();
                assert_eq!(d.max_exp(), Some((a - 1) * (b - 1)));
                assert_eq!(d.eval_at_one(), BigInt::from(1));
                assert!(d.is_symmetric());
            }
        }
    }

    #[test]
    fn cable_examples() {
        let trefoil = torus_alexander(2, 3).unwrap();
        assert_eq!(cable_alexander(&trefoil, 1, 1).unwrap(), trefoil);
        assert_eq!(
            cable_alexander(&LaurentPoly::one(), 3, 5).unwrap(),
            torus_alexander(3, 5).unwrap()
        );
        let expect = &trefoil.substitute_power(2) * &torus_alexander(2, 7).unwrap();
        assert_eq!(cable_alexander(&trefoil, 2, 7).unwrap(), expect);
    }

    #[test]
    fn iterated_examples() {
        let w = CableWord::new(vec![(2, 3), (1, 1)]).unwrap();
        assert_eq!(iterated_cable_alexander(&w).unwrap(), torus_alexander(2, 3).unwrap());

        let w = CableWord::new(vec![(2, 3), (5, 6), (4, 121)]).unwrap();
        let d = iterated_cable_alexander(&w).unwrap();
        assert_eq!(d.max_exp(), Some(480));
        assert_eq!(w.genus(), 240);
        assert!(d.is_symmetric());
        w.check_lspace_cabling().unwrap();
    }

    #[test]
    fn lspace_guard_rejects_small_slopes() {
        let bad = CableWord::new(vec![(2, 5), (2, 3)]).unwrap();
        assert!(matches!(bad.check_lspace_cabling(), Err(Error::NotLSpaceForm(_))));
        let ok = CableWord::new(vec![(2, 5), (2, 7)]).unwrap();
        ok.check_lspace_cabling().unwrap();
    }

    #[test]
    fn closed_form_np1_matches_division() {
        assert_eq!(closed_form_np1(2, 1).unwrap(), torus_alexander(2, 3).unwrap());
        assert_eq!(closed_form_np1(2, 2).unwrap(), torus_alexander(2, 5).unwrap());
        for a in 2..=8 {
            for n in 1..=5 {
                assert_eq!(closed_form_np1(a, n).unwrap(), torus_alexander(a, n * a + 1).unwrap());
            }
        }
    }

    #[test]
    fn closed_form_pcable_matches_product() {
        let trefoil = torus_alexander(2, 3).unwrap();
        for a in 2..=10 {
            let lhs = closed_form_pcable(a).unwrap();
            assert_eq!(lhs, cable_alexander(&trefoil, a, a + 1).unwrap());
            assert!(lhs.is_symmetric());
        }
    }

    #[test]
    fn closed_form_2pm1_matches_division() {
        for a in 2..=8 {
            assert_eq!(closed_form_2pm1(a).unwrap(), torus_alexander(a, 2 * a - 1).unwrap());
        }
    }

    #[test]
    fn cable_word_parses_both_forms() {
        let w: CableWord = "2,3;5,11".parse().unwrap();
        assert_eq!(w.stages(), &[(2, 3), (5, 11)]);
        assert_eq!(w.to_string().parse::<CableWord>().unwrap(), w);
        assert!("2;3".parse::<CableWord>().is_err());
        assert!("4,6".parse::<CableWord>().is_err());
    }
}
