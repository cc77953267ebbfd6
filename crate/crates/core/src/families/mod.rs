//! Knot families as staircase models, their claimed decompositions, and the
//! checks that confirm or refute each claim.

mod construction;

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::alexander::{
    cable_alexander, closed_form_2pm1, closed_form_np1, closed_form_pcable, iterated_cable_alexander, torus_alexander,
    CableWord,
};
use crate::error::{Error, Result};
use crate::invariants::{compare_sums, dominates_bounded, Caps, Relation};
use crate::laurent::LaurentPoly;
use crate::staircase::{StairSum, Staircase};

pub use construction::{build_t, witness_theorem, Absorption, AbsorptionReason, Construction, Step};

/// A knot, or the ε-model of one: the Whitehead double of the trefoil is
/// replaced by the trefoil itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KnotSpec {
    TorusKnot {
        p: i64,
        q: i64,
    },
    IteratedCable {
        word: CableWord,
    },
    /// `(p, p+1; n, n(p²+p)+1)` cable of the double.
    KFamily {
        n: i64,
        p: i64,
    },
    SFamily {
        q: i64,
    },
    /// `(n, n(p²+p)+1)` cable of `T(p, p+1)`.
    BigCable {
        n: i64,
        p: i64,
    },
}

impl KnotSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            KnotSpec::TorusKnot { p, q } if p < 2 || q < 2 => bad(format!("T({p},{q}) is trivial or invalid")),
            KnotSpec::KFamily { n, p } if n < 4 || n % 2 != 0 || p < 5 => {
                bad(format!("K family needs even n >= 4 and p >= 5, got n={n}, p={p}"))
            }
            KnotSpec::SFamily { q } if q < 4 => bad(format!("S family needs q >= 4, got {q}")),
            KnotSpec::BigCable { n, p } if n < 2 || p < 2 => {
                bad(format!("big cable needs n >= 2 and p >= 2, got n={n}, p={p}"))
            }
            _ => Ok(()),
        }
    }

    /// The cable word whose Alexander polynomial models this knot.
    pub fn model_word(&self) -> Result<CableWord> {
        self.validate()?;
        match self {
            KnotSpec::TorusKnot { p, q } => CableWord::torus(*p, *q),
            KnotSpec::IteratedCable { word } => Ok(word.clone()),
            KnotSpec::KFamily { n, p } => CableWord::new(vec![(2, 3), (*p, p + 1), (*n, n * (p * p + p) + 1)]),
            KnotSpec::SFamily { q } if q % 2 == 0 => CableWord::new(vec![(2, 3), (q / 2 + 1, q + 1)]),
            KnotSpec::SFamily { q } => CableWord::new(vec![(2, 3), ((q + 1) / 2, q + 2)]),
            KnotSpec::BigCable { n, p } => CableWord::new(vec![(*p, p + 1), (*n, n * (p * p + p) + 1)]),
        }
    }
}

impl fmt::Display for KnotSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotSpec::TorusKnot { p, q } => write!(f, "T({p},{q})"),
            KnotSpec::IteratedCable { word } => write!(f, "{word}"),
            KnotSpec::KFamily { n, p } => write!(f, "K({n},{p})"),
            KnotSpec::SFamily { q } => write!(f, "S({q})"),
            KnotSpec::BigCable { n, p } => write!(f, "T({p},{}; {n},{})", p + 1, n * (p * p + p) + 1),
        }
    }
}

/// Staircase of the model, guarded by the L-space cabling criterion.
pub fn model_staircase(k: &KnotSpec) -> Result<Staircase> {
    let word = k.model_word()?;
    word.check_lspace_cabling()?;
    Staircase::from_alexander(&iterated_cable_alexander(&word)?)
}

/// Splits at the cuts that fall inside the half; later cuts are dropped.
fn split_prefix(s: &Staircase, cuts: &[usize]) -> Vec<Staircase> {
    let inside: Vec<usize> = cuts.iter().copied().filter(|&c| c < s.half().len()).collect();
    s.split_at(&inside).expect("cuts inside the half")
}

/// How a family's decomposition claim is laid out.
struct ClaimShape {
    /// Staircase that gets split.
    source: Staircase,
    cuts: &'static [usize],
    copies: i64,
    /// Leading steps as stated, compared up to the length of `source`.
    stated_prefix: Vec<i64>,
}

fn claim_shape(k: &KnotSpec) -> Result<ClaimShape> {
    let shape = |source, cuts, copies, stated_prefix| ClaimShape {
        source,
        cuts,
        copies,
        stated_prefix,
    };
    match *k {
        KnotSpec::KFamily { n, p } => Ok(shape(
            model_staircase(k)?,
            &[2, 4],
            1,
            vec![
                1,
                n * (p + 1) - 1,
                1,
                n * (p - 1) - 1,
                1,
                2 * n - 1,
                1,
                n * (p - 2) - 1,
                1,
                n - 1,
            ],
        )),
        KnotSpec::SFamily { q } => Ok(shape(model_staircase(k)?, &[2], 1, vec![1, q, 2])),
        KnotSpec::BigCable { n, p } => Ok(shape(model_staircase(k)?, &[2], 1, vec![1, n * p - 1, 1, n - 1])),
        KnotSpec::TorusKnot { p, q } if (q - 1) % p == 0 => {
            let base = model_staircase(&KnotSpec::TorusKnot { p, q: p + 1 })?;
            Ok(shape(base, &[2], (q - 1) / p, vec![1, p - 1, 2, p - 2]))
        }
        KnotSpec::TorusKnot { p, q } if q == 2 * p - 1 && p >= 3 => {
            Ok(shape(model_staircase(k)?, &[2, 4], 1, vec![1, p - 1, 1, p - 2, 2]))
        }
        _ => Err(Error::NoClaim(k.to_string())),
    }
}

/// The claimed right-hand side for `k`, with unstated tails taken from the
/// computed staircase.
pub fn claimed_decomposition(k: &KnotSpec) -> Result<StairSum> {
    let shape = claim_shape(k)?;
    let mut sum = StairSum::zero();
    for piece in split_prefix(&shape.source, shape.cuts) {
        sum.add_term(piece, shape.copies);
    }
    Ok(sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Confirmed,
    Refuted,
    ResourceLimited,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Refuted => "refuted",
            Verdict::ResourceLimited => "resource-limited",
        })
    }
}

/// One recorded observation. Only `required` ones decide the verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub check: String,
    pub holds: bool,
    pub required: bool,
    pub detail: String,
}

impl Evidence {
    fn required(check: &str, holds: bool, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            holds,
            required: true,
            detail: detail.into(),
        }
    }

    fn note(check: &str, holds: bool, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            holds,
            required: false,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub params: Value,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    pub digests: BTreeMap<String, String>,
    /// Wall time; kept out of certificates so they stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    fn new(check: &Check) -> Self {
        Self {
            claim: check.claim_id().into(),
            params: check.params(),
            verdict: Verdict::Confirmed,
            evidence: Vec::new(),
            digests: BTreeMap::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn push(&mut self, e: Evidence) {
        self.evidence.push(e);
    }

    /// Records a resource error as evidence; other errors propagate.
    fn absorb_limit<T>(&mut self, check: &str, r: Result<T>) -> Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e) if e.is_resource_limit() => {
                self.push(Evidence::required(check, false, e.to_string()));
                self.verdict = Verdict::ResourceLimited;
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    fn finish(mut self, started: Instant) -> Self {
        if self.verdict != Verdict::ResourceLimited && self.evidence.iter().any(|e| e.required && !e.holds) {
            self.verdict = Verdict::Refuted;
        }
        self.elapsed = started.elapsed();
        self
    }

    /// Report for a check that stopped with an error.
    pub fn from_error(check: &Check, e: &Error) -> Self {
        let mut report = Self::new(check);
        report.push(Evidence::required("completed", false, e.to_string()));
        report.verdict = if e.is_resource_limit() {
            Verdict::ResourceLimited
        } else {
            Verdict::Refuted
        };
        report
    }

    /// Marks a run that took longer than `budget` as resource-limited.
    pub fn within_budget(mut self, budget: Duration) -> Self {
        if self.elapsed > budget {
            let e = Error::BudgetExceeded {
                budget_secs: budget.as_secs(),
            };
            self.push(Evidence::required("budget", false, e.to_string()));
            self.verdict = Verdict::ResourceLimited;
        }
        self
    }

    /// Stable JSON certificate.
    pub fn certificate(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn json_digest<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("value serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Every check the harness knows how to run.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "claim", content = "params", rename_all = "kebab-case")]
pub enum Check {
    KFamily { n: i64, p: i64 },
    SFamily { q: i64 },
    TorusNp1 { p: i64, n: i64 },
    Torus2pm1 { p: i64 },
    BigCable { n: i64, p: i64 },
    Concatenation { a: Staircase, b: Staircase },
    FirstStepDomination { a: Staircase, b: Staircase },
    FourthStepDomination { a: i64, c: i64, d: i64 },
    TruncationEquivalence { u: i64, v: i64, w: i64 },
    ClosedFormNp1 { p: i64, n: i64 },
    ClosedFormPcable { p: i64 },
    ClosedForm2pm1 { p: i64 },
    Construction { n: i64, p: i64 },
    Witness { pairs: Vec<(i64, i64)> },
}

impl Check {
    pub fn claim_id(&self) -> &'static str {
        match self {
            Check::KFamily { .. } => "k-family",
            Check::SFamily { .. } => "s-family",
            Check::TorusNp1 { .. } => "torus-np1",
            Check::Torus2pm1 { .. } => "torus-2pm1",
            Check::BigCable { .. } => "big-cable",
            Check::Concatenation { .. } => "concatenation",
            Check::FirstStepDomination { .. } => "first-step-domination",
            Check::FourthStepDomination { .. } => "fourth-step-domination",
            Check::TruncationEquivalence { .. } => "truncation-equivalence",
            Check::ClosedFormNp1 { .. } => "closed-form-np1",
            Check::ClosedFormPcable { .. } => "closed-form-pcable",
            Check::ClosedForm2pm1 { .. } => "closed-form-2pm1",
            Check::Construction { .. } => "construction",
            Check::Witness { .. } => "witness",
        }
    }

    pub fn params(&self) -> Value {
        serde_json::to_value(self).expect("check serializes")["params"].clone()
    }

    /// File-name friendly label, e.g. `torus-np1_n2_p2`.
    pub fn label(&self) -> String {
        let mut out = self.claim_id().to_string();
        if let Value::Object(map) = self.params() {
            for (k, v) in map {
                let v = v.to_string();
                let parts: Vec<&str> = v
                    .split(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                    .filter(|s| !s.is_empty())
                    .collect();
                out += &format!("_{k}{}", parts.join("."));
            }
        }
        out
    }

    /// The knot a decomposition claim is about.
    pub fn knot(&self) -> Option<KnotSpec> {
        Some(match *self {
            Check::KFamily { n, p } => KnotSpec::KFamily { n, p },
            Check::SFamily { q } => KnotSpec::SFamily { q },
            Check::TorusNp1 { p, n } => KnotSpec::TorusKnot { p, q: n * p + 1 },
            Check::Torus2pm1 { p } => KnotSpec::TorusKnot { p, q: 2 * p - 1 },
            Check::BigCable { n, p } => KnotSpec::BigCable { n, p },
            _ => return None,
        })
    }

    fn for_knot(k: &KnotSpec) -> Result<Check> {
        Ok(match *k {
            KnotSpec::KFamily { n, p } => Check::KFamily { n, p },
            KnotSpec::SFamily { q } => Check::SFamily { q },
            KnotSpec::BigCable { n, p } => Check::BigCable { n, p },
            KnotSpec::TorusKnot { p, q } if (q - 1) % p == 0 => Check::TorusNp1 { p, n: (q - 1) / p },
            KnotSpec::TorusKnot { p, q } if q == 2 * p - 1 && p >= 3 => Check::Torus2pm1 { p },
            _ => return Err(Error::NoClaim(k.to_string())),
        })
    }
}

/// Runs any check. Inputs outside a claim's range are errors; running out
/// of room yields a resource-limited report.
pub fn run_check(check: &Check, caps: &Caps) -> Result<VerificationReport> {
    match check {
        _ if check.knot().is_some() => verify_proposition(&check.knot().expect("checked"), caps),
        Check::Concatenation { .. }
        | Check::FirstStepDomination { .. }
        | Check::FourthStepDomination { .. }
        | Check::TruncationEquivalence { .. } => verify_lemma(check, caps),
        Check::ClosedFormNp1 { p, n } => closed_form_report(check, &closed_form_np1(*p, *n)?),
        Check::ClosedFormPcable { p } => closed_form_report(check, &closed_form_pcable(*p)?),
        Check::ClosedForm2pm1 { p } => closed_form_report(check, &closed_form_2pm1(*p)?),
        Check::Construction { n, p } => construction::construction_report(*n, *p, caps),
        Check::Witness { pairs } => witness_theorem(pairs, caps),
        _ => unreachable!("every check kind is dispatched"),
    }
}

/// Compares `candidate` with the division formula for the polynomial the
/// check names.
pub fn closed_form_report(check: &Check, candidate: &LaurentPoly) -> Result<VerificationReport> {
    let started = Instant::now();
    let reference = match *check {
        Check::ClosedFormNp1 { p, n } => torus_alexander(p, n * p + 1)?,
        Check::ClosedFormPcable { p } => cable_alexander(&torus_alexander(2, 3)?, p, p + 1)?,
        Check::ClosedForm2pm1 { p } => torus_alexander(p, 2 * p - 1)?,
        _ => return Err(Error::NoClaim(format!("{} is not a closed form", check.claim_id()))),
    };
    let mut report = VerificationReport::new(check);
    let same = candidate.normalized() == reference;
    report.push(Evidence::required(
        "matches-division-formula",
        same,
        if same {
            format!("{} terms", reference.num_terms())
        } else {
            format!("expected {reference}, got {candidate}")
        },
    ));
    report.digests.insert("polynomial".into(), json_digest(&reference));
    Ok(report.finish(started))
}

/// Checks a decomposition claim by ε-equivalence of the model against the
/// claimed sum, plus the stated leading steps.
pub fn verify_proposition(k: &KnotSpec, caps: &Caps) -> Result<VerificationReport> {
    let started = Instant::now();
    let check = Check::for_knot(k)?;
    let shape = claim_shape(k)?;
    let model = model_staircase(k)?;
    let claimed = claimed_decomposition(k)?;
    let mut report = VerificationReport::new(&check);
    report.digests.insert("model".into(), json_digest(&model));
    report.digests.insert("claimed".into(), json_digest(&claimed));

    let n = shape.stated_prefix.len().min(shape.source.half().len());
    let prefix_ok = shape.source.half()[..n] == shape.stated_prefix[..n];
    report.push(Evidence::required(
        "stated-prefix",
        prefix_ok,
        format!(
            "computed {:?}, stated {:?}",
            &shape.source.half()[..n],
            &shape.stated_prefix[..n]
        ),
    ));

    let pieces = split_prefix(&shape.source, shape.cuts);
    let legal = pieces.windows(2).all(|w| w[0].concat(&w[1]).1);
    report.push(Evidence::note(
        "concatenation-hypothesis",
        legal,
        format!(
            "pieces {}",
            pieces.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" + ")
        ),
    ));

    let model_sum = StairSum::single(model, 1);
    if let Some(rel) = report.absorb_limit(
        "epsilon-equivalent",
        compare_sums(&model_sum, &claimed, caps.max_generators),
    )? {
        report.push(Evidence::required(
            "epsilon-equivalent",
            rel == Relation::Equal,
            format!("model {rel} claimed"),
        ));
    }
    Ok(report.finish(started))
}

fn stair(half: &[i64]) -> Result<Staircase> {
    Staircase::new(half.to_vec())
}

/// Checks one instance of a staircase lemma directly.
pub fn verify_lemma(check: &Check, caps: &Caps) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut report = VerificationReport::new(check);
    let cap = caps.max_generators;
    match check {
        Check::Concatenation { a, b } => {
            let (joined, hypothesis) = a.concat(b);
            if a.half().len() % 2 != 0 || !hypothesis {
                return Err(Error::InvalidParameter(format!(
                    "{a} + {b} does not meet the concatenation hypothesis"
                )));
            }
            let sum = StairSum::single(a.clone(), 1) + StairSum::single(b.clone(), 1);
            if let Some(rel) =
                report.absorb_limit("epsilon-equivalent", compare_sums(&sum, &joined.clone().into(), cap))?
            {
                report.push(Evidence::required(
                    "epsilon-equivalent",
                    rel == Relation::Equal,
                    format!("{a} + {b} {rel} {joined}"),
                ));
            }
        }
        Check::FirstStepDomination { a, b } => {
            let (ah, bh) = (a.half(), b.half());
            let hypothesis = bh[0] > ah[0] || (bh[0] == ah[0] && bh.len() > 1 && ah.len() > 1 && bh[1] < ah[1]);
            if !hypothesis {
                return Err(Error::InvalidParameter(format!(
                    "{a} and {b} do not meet the first-step hypothesis"
                )));
            }
            domination_evidence(&mut report, a, b, caps)?;
        }
        Check::FourthStepDomination { a, c, d } => {
            if *a < 1 || *c < 1 || *d < 0 || d >= c {
                return Err(Error::InvalidParameter(format!(
                    "need a, c > 0, 0 <= d < c; got a={a}, c={c}, d={d}"
                )));
            }
            let big = stair(&[1, *a, 1, a + c])?;
            let small = stair(&[1, *a, 1, a + d])?;
            domination_evidence(&mut report, &big, &small, caps)?;
        }
        Check::TruncationEquivalence { u, v, w } => {
            if !(v >= u && u > w && *w >= 1) {
                return Err(Error::InvalidParameter(format!(
                    "need v >= u > w >= 1; got u={u}, v={v}, w={w}"
                )));
            }
            let long = stair(&[1, *u, 1, *v, 1, *w])?;
            let short = stair(&[1, *u, 1, *v])?;
            truncation_evidence(&mut report, &long, &short, cap)?;
        }
        _ => return Err(Error::NoClaim(format!("{} is not a lemma", check.claim_id()))),
    }
    Ok(report.finish(started))
}

/// `long > short` and `2 short > long`: the two inequalities behind
/// Archimedean equivalence of a staircase and its truncation.
fn truncation_evidence(report: &mut VerificationReport, long: &Staircase, short: &Staircase, cap: usize) -> Result<()> {
    let (l, s) = (StairSum::single(long.clone(), 1), StairSum::single(short.clone(), 1));
    if let Some(rel) = report.absorb_limit("long-above-short", compare_sums(&l, &s, cap))? {
        report.push(Evidence::required(
            "long-above-short",
            rel == Relation::Greater,
            format!("ε(A ⊗ B*) sign: {rel}"),
        ));
    }
    if let Some(rel) = report.absorb_limit("twice-short-above-long", compare_sums(&s.scale(2), &l, cap))? {
        report.push(Evidence::required(
            "twice-short-above-long",
            rel == Relation::Greater,
            format!("ε(2B ⊗ A*) sign: {rel}"),
        ));
    }
    Ok(())
}

fn domination_evidence(report: &mut VerificationReport, a: &Staircase, b: &Staircase, caps: &Caps) -> Result<()> {
    let (sa, sb) = (StairSum::single(a.clone(), 1), StairSum::single(b.clone(), 1));
    if let Some(ev) = report.absorb_limit(
        "bounded-domination",
        dominates_bounded(&sa, &sb, caps.depth, caps.max_generators),
    )? {
        let detail = format!(
            "{a} vs n·{b}, n = 1..{}: {}",
            ev.depth,
            ev.verdicts.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
        );
        report.push(Evidence::required("bounded-domination", ev.all_greater(), detail));
    }
    Ok(())
}

/// Parameter grid the harness runs by default.
pub fn default_grid() -> Vec<Check> {
    let st = |h: &[i64]| Staircase::new(h.to_vec()).expect("valid literal");
    let mut grid = Vec::new();
    grid.extend((2..=8).flat_map(|p| (1..=5).map(move |n| Check::ClosedFormNp1 { p, n })));
    grid.extend((2..=10).map(|p| Check::ClosedFormPcable { p }));
    grid.extend((2..=8).map(|p| Check::ClosedForm2pm1 { p }));
    grid.extend([(2, 2), (2, 3), (3, 2), (4, 2), (5, 2)].map(|(p, n)| Check::TorusNp1 { p, n }));
    grid.extend((3..=6).map(|p| Check::Torus2pm1 { p }));
    grid.extend((4..=9).map(|q| Check::SFamily { q }));
    grid.extend([(2, 2), (3, 2), (2, 3)].map(|(n, p)| Check::BigCable { n, p }));
    grid.push(Check::KFamily { n: 4, p: 5 });
    grid.push(Check::Concatenation {
        a: st(&[1, 4]),
        b: st(&[2, 3]),
    });
    grid.extend(
        first_step_triples()
            .into_iter()
            .map(|(a, b)| Check::FirstStepDomination { a, b }),
    );
    grid.extend(
        fourth_step_triples()
            .into_iter()
            .map(|(a, c, d)| Check::FourthStepDomination { a, c, d }),
    );
    grid.extend([(2, 2, 1), (3, 5, 2), (4, 4, 3)].map(|(u, v, w)| Check::TruncationEquivalence { u, v, w }));
    grid.push(Check::Construction { n: 0, p: 0 });
    grid.push(Check::Witness {
        pairs: vec![(0, 0), (0, 1), (1, 0)],
    });
    grid.sort();
    grid
}

/// Instances of the first-step domination lemma run by default.
pub fn first_step_triples() -> Vec<(Staircase, Staircase)> {
    let st = |h: &[i64]| Staircase::new(h.to_vec()).expect("valid literal");
    vec![
        (st(&[1, 3]), st(&[2, 1])),
        (st(&[1, 4]), st(&[1, 2])),
        (st(&[1, 2, 1, 2]), st(&[2])),
    ]
}

/// `(a, c, d)` instances of the fourth-step domination lemma run by default.
pub fn fourth_step_triples() -> Vec<(i64, i64, i64)> {
    vec![(1, 2, 0), (2, 2, 1), (2, 3, 2), (3, 3, 1)]
}
