//! Command-line front end and the batch verification harness.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::alexander::{closed_form_2pm1, closed_form_np1, closed_form_pcable, iterated_cable_alexander};
use crate::error::{Error, Result};
use crate::families::{
    default_grid, model_staircase, run_check, witness_theorem, Check, KnotSpec, Verdict, VerificationReport,
};
use crate::filtcx::FilteredComplex;
use crate::invariants::{self, compare_sums, dominates_bounded, epsilon_by_basis, Caps};
use crate::staircase::{StairSum, Staircase};

pub const ENV_MAX_GENERATORS: &str = "STAIRFLOER_MAX_GENERATORS";
pub const ENV_MAX_DEPTH: &str = "STAIRFLOER_MAX_DEPTH";
pub const DEFAULT_BUDGET_SECS: u64 = 600;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Refuted = 1,
    Usage = 2,
    ResourceLimit = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn of_verdict(v: Verdict) -> Status {
        match v {
            Verdict::Confirmed => Status::Ok,
            Verdict::Refuted => Status::Refuted,
            Verdict::ResourceLimited => Status::ResourceLimit,
        }
    }

    fn of_error(e: &Error) -> Status {
        if e.is_resource_limit() {
            Status::ResourceLimit
        } else {
            Status::Usage
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "stairfloer",
    version,
    about = "Staircase complexes, tau/nu/epsilon and decomposition checks"
)]
pub struct Cli {
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Generator cap for tensor products [env: STAIRFLOER_MAX_GENERATORS].
    #[arg(long, global = true)]
    max_generators: Option<usize>,
    /// Largest multiple tried in domination checks [env: STAIRFLOER_MAX_DEPTH].
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Alexander polynomial of a knot or of a closed form.
    Alexander {
        #[command(subcommand)]
        source: PolySource,
    },
    /// Staircase read off the Alexander polynomial.
    Staircase {
        #[command(subcommand)]
        knot: KnotArg,
    },
    /// Filtered complex of a staircase sum such as "(1, 2) - (1)".
    Complex { sum: String },
    /// τ, ν, ν′ and ε of a staircase sum or a complex file.
    Invariants {
        #[arg(required_unless_present = "complex")]
        sum: Option<String>,
        /// Read the complex from a JSON file instead.
        #[arg(long, conflicts_with = "sum")]
        complex: Option<PathBuf>,
        /// Also compute ε from a simultaneously simplified basis.
        #[arg(long)]
        basis: bool,
    },
    /// Order relation between two staircase sums.
    Compare {
        a: String,
        b: String,
        /// Also test whether `a` dominates `b` up to the depth cap.
        #[arg(long)]
        dominate: bool,
    },
    /// Check a claim, or the whole grid.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Domination chain between the `A` staircases at the given `n,p` pairs.
    Witness {
        #[arg(required = true)]
        pairs: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum KnotArg {
    Torus {
        #[arg(short)]
        p: i64,
        #[arg(short)]
        q: i64,
    },
    /// Iterated cable, e.g. "2,3;5,11".
    Cable { word: String },
    KFamily {
        #[arg(short)]
        n: i64,
        #[arg(short)]
        p: i64,
    },
    SFamily {
        #[arg(short)]
        q: i64,
    },
    BigCable {
        #[arg(short)]
        n: i64,
        #[arg(short)]
        p: i64,
    },
}

impl KnotArg {
    fn spec(&self) -> Result<KnotSpec> {
        Ok(match *self {
            KnotArg::Torus { p, q } => KnotSpec::TorusKnot { p, q },
            KnotArg::Cable { ref word } => KnotSpec::IteratedCable { word: word.parse()? },
            KnotArg::KFamily { n, p } => KnotSpec::KFamily { n, p },
            KnotArg::SFamily { q } => KnotSpec::SFamily { q },
            KnotArg::BigCable { n, p } => KnotSpec::BigCable { n, p },
        })
    }
}

#[derive(Subcommand, Debug)]
enum PolySource {
    #[command(flatten)]
    Knot(KnotArg),
    /// One of the closed forms.
    Closed {
        form: ClosedForm,
        #[arg(short)]
        p: i64,
        #[arg(short)]
        n: Option<i64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClosedForm {
    Np1,
    Pcable,
    #[value(name = "2pm1")]
    TwoPm1,
}

impl ClosedForm {
    fn check(self, p: i64, n: Option<i64>) -> Result<Check> {
        Ok(match self {
            ClosedForm::Np1 => Check::ClosedFormNp1 { p, n: need(n, "n")? },
            ClosedForm::Pcable => Check::ClosedFormPcable { p },
            ClosedForm::TwoPm1 => Check::ClosedForm2pm1 { p },
        })
    }
}

#[derive(Subcommand, Debug)]
enum VerifyTarget {
    /// A decomposition claim: k-family, s-family, torus-np1, torus-2pm1, big-cable.
    Prop {
        id: String,
        #[arg(short)]
        p: Option<i64>,
        #[arg(short)]
        n: Option<i64>,
        #[arg(short)]
        q: Option<i64>,
    },
    /// A comparison lemma: first-step-domination, fourth-step-domination,
    /// concatenation, truncation-equivalence.
    Lemma {
        id: String,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        c: Option<i64>,
        #[arg(long)]
        d: Option<i64>,
        #[arg(long)]
        u: Option<i64>,
        #[arg(long)]
        v: Option<i64>,
        #[arg(long)]
        w: Option<i64>,
    },
    /// A closed-form Alexander polynomial against the division formula.
    Closed {
        form: ClosedForm,
        #[arg(short)]
        p: i64,
        #[arg(short)]
        n: Option<i64>,
    },
    /// The cancellation procedure at `(n, p)`.
    Construction {
        #[arg(short)]
        n: i64,
        #[arg(short)]
        p: i64,
    },
    /// Every claim in the default grid; one certificate per claim.
    All {
        #[arg(long, default_value = "certs")]
        certs: PathBuf,
        /// Wall-clock budget per claim, in seconds.
        #[arg(long, default_value_t = DEFAULT_BUDGET_SECS)]
        budget_secs: u64,
    },
}

fn need(v: Option<i64>, name: &str) -> Result<i64> {
    v.ok_or_else(|| Error::InvalidParameter(format!("missing -{name}")))
}

fn prop_check(id: &str, p: Option<i64>, n: Option<i64>, q: Option<i64>) -> Result<Check> {
    Ok(match id {
        "3.2" | "k-family" => Check::KFamily {
            n: need(n, "n")?,
            p: need(p, "p")?,
        },
        "3.3" | "s-family" => Check::SFamily { q: need(q, "q")? },
        "3.4" | "torus-np1" => Check::TorusNp1 {
            p: need(p, "p")?,
            n: need(n, "n")?,
        },
        "3.5" | "torus-2pm1" => Check::Torus2pm1 { p: need(p, "p")? },
        "3.6" | "big-cable" => Check::BigCable {
            n: need(n, "n")?,
            p: need(p, "p")?,
        },
        _ => return Err(Error::NoClaim(format!("proposition {id}"))),
    })
}

fn lemma_check(target: &VerifyTarget) -> Result<Check> {
    let VerifyTarget::Lemma {
        id,
        a,
        b,
        c,
        d,
        u,
        v,
        w,
    } = target
    else {
        unreachable!("called on lemma targets only")
    };
    let text = |x: &Option<String>, name: &str| {
        x.clone()
            .ok_or_else(|| Error::InvalidParameter(format!("missing --{name}")))
    };
    let stair = |x: &Option<String>, name: &str| text(x, name)?.parse::<Staircase>();
    let int = |x: &Option<i64>, name: &str| x.ok_or_else(|| Error::InvalidParameter(format!("missing --{name}")));
    Ok(match id.as_str() {
        "2.4" | "first-step-domination" => Check::FirstStepDomination {
            a: stair(a, "a")?,
            b: stair(b, "b")?,
        },
        "2.5" | "fourth-step-domination" => {
            let a = text(a, "a")?
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("--a: {e}")))?;
            Check::FourthStepDomination {
                a,
                c: int(c, "c")?,
                d: int(d, "d")?,
            }
        }
        "2.6" | "concatenation" => Check::Concatenation {
            a: stair(a, "a")?,
            b: stair(b, "b")?,
        },
        "2.8" | "truncation-equivalence" => Check::TruncationEquivalence {
            u: int(u, "u")?,
            v: int(v, "v")?,
            w: int(w, "w")?,
        },
        _ => return Err(Error::NoClaim(format!("lemma {id}"))),
    })
}

fn parse_pair(s: &str) -> Result<(i64, i64)> {
    let (n, p) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("pair {s:?} is not n,p")))?;
    let num = |x: &str| x.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{x:?}: {e}")));
    Ok((num(n)?, num(p)?))
}

/// Caps from flags, then the environment, then defaults.
fn caps(cli: &Cli) -> Result<Caps> {
    let from_env = |name: &str| -> Result<Option<usize>> {
        match std::env::var(name) {
            Ok(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|e| Error::InvalidParameter(format!("{name}={v:?}: {e}"))),
            Err(_) => Ok(None),
        }
    };
    let d = Caps::default();
    let max_generators = cli
        .max_generators
        .or(from_env(ENV_MAX_GENERATORS)?)
        .unwrap_or(d.max_generators);
    let depth = cli.depth.or(from_env(ENV_MAX_DEPTH)?).unwrap_or(d.depth);
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    Ok(Caps { max_generators, depth })
}

/// What a command produced: a JSON value, its text rendering, and a status.
struct Output {
    json: serde_json::Value,
    text: String,
    status: Status,
}

impl Output {
    fn ok(json: serde_json::Value, text: impl Into<String>) -> Self {
        Output {
            json,
            text: text.into(),
            status: Status::Ok,
        }
    }
}

fn report_output(r: &VerificationReport) -> Output {
    Output {
        json: serde_json::to_value(r).expect("report serializes"),
        text: report_text(r),
        status: Status::of_verdict(r.verdict),
    }
}

fn report_text(r: &VerificationReport) -> String {
    let mut out = format!("{} {}\n", r.claim, r.params);
    for e in &r.evidence {
        let mark = match (e.required, e.holds) {
            (true, true) => "ok  ",
            (true, false) => "FAIL",
            (false, _) => "note",
        };
        out += &format!("  {mark} {}: {}\n", e.check, e.detail);
    }
    out += &r.verdict.to_string();
    out
}

fn load_sum(s: &str) -> Result<StairSum> {
    s.parse()
}

fn execute(cli: &Cli) -> Result<Output> {
    let caps = caps(cli)?;
    match &cli.command {
        Command::Alexander { source } => {
            let poly = match source {
                PolySource::Knot(k) => iterated_cable_alexander(&k.spec()?.model_word()?)?,
                PolySource::Closed { form, p, n } => match form.check(*p, *n)? {
                    Check::ClosedFormNp1 { p, n } => closed_form_np1(p, n)?,
                    Check::ClosedFormPcable { p } => closed_form_pcable(p)?,
                    Check::ClosedForm2pm1 { p } => closed_form_2pm1(p)?,
                    _ => unreachable!("closed forms only"),
                },
            };
            Ok(Output::ok(
                serde_json::to_value(&poly).expect("poly serializes"),
                poly.to_string(),
            ))
        }
        Command::Staircase { knot } => {
            let s = model_staircase(&knot.spec()?)?;
            Ok(Output::ok(
                serde_json::to_value(&s).expect("staircase serializes"),
                s.to_string(),
            ))
        }
        Command::Complex { sum } => {
            let c = load_sum(sum)?.to_complex(caps.max_generators)?;
            let text = format!(
                "{} generators, {} arrows, digest {}",
                c.len(),
                c.num_arrows(),
                c.digest()
            );
            Ok(Output::ok(serde_json::to_value(&c).expect("complex serializes"), text))
        }
        Command::Invariants { sum, complex, basis } => {
            let c = match (sum, complex) {
                (Some(s), _) => load_sum(s)?.to_complex(caps.max_generators)?,
                (None, Some(path)) => {
                    let raw = std::fs::read_to_string(path)
                        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<FilteredComplex>(&raw).map_err(|e| Error::Parse(e.to_string()))?
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            let r = invariants::invariants(&c)?;
            let mut json = serde_json::to_value(r).expect("record serializes");
            let mut text = format!("tau {}\nnu {}\nnu' {}\nepsilon {}", r.tau, r.nu, r.nu_prime, r.epsilon);
            if *basis {
                let b = epsilon_by_basis(&c).map_err(|e| e.to_string());
                json["epsilon_by_basis"] = match &b {
                    Ok(e) => json!(e),
                    Err(msg) => json!({ "error": msg }),
                };
                text += &match b {
                    Ok(e) => format!("\nepsilon (basis) {e}"),
                    Err(msg) => format!("\nepsilon (basis) unavailable: {msg}"),
                };
            }
            Ok(Output::ok(json, text))
        }
        Command::Compare { a, b, dominate } => {
            let (a, b) = (load_sum(a)?, load_sum(b)?);
            let relation = compare_sums(&a, &b, caps.max_generators)?;
            let mut json = json!({ "relation": relation });
            let mut text = relation.to_string();
            if *dominate {
                let ev = dominates_bounded(&a, &b, caps.depth, caps.max_generators)?;
                let verdicts: Vec<String> = ev.verdicts.iter().map(|v| v.to_string()).collect();
                text += &format!(
                    "\ndominates up to n = {}: {} ({})",
                    ev.depth,
                    ev.all_greater(),
                    verdicts.join(", ")
                );
                json["dominates_evidence"] = serde_json::to_value(&ev).expect("evidence serializes");
            }
            Ok(Output::ok(json, text))
        }
        Command::Verify { target } => match target {
            VerifyTarget::Prop { id, p, n, q } => Ok(report_output(&run_check(&prop_check(id, *p, *n, *q)?, &caps)?)),
            VerifyTarget::Lemma { .. } => Ok(report_output(&run_check(&lemma_check(target)?, &caps)?)),
            VerifyTarget::Closed { form, p, n } => Ok(report_output(&run_check(&form.check(*p, *n)?, &caps)?)),
            VerifyTarget::Construction { n, p } => {
                Ok(report_output(&run_check(&Check::Construction { n: *n, p: *p }, &caps)?))
            }
            VerifyTarget::All { certs, budget_secs } => {
                let summary = verify_grid(&default_grid(), certs, Duration::from_secs(*budget_secs), |c| {
                    run_check(c, &caps)
                })?;
                Ok(Output {
                    json: serde_json::to_value(&summary).expect("summary serializes"),
                    text: summary.text(),
                    status: summary.status(),
                })
            }
        },
        Command::Witness { pairs } => {
            let pairs = pairs.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>>>()?;
            Ok(report_output(&witness_theorem(&pairs, &caps)?))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummaryLine {
    pub label: String,
    pub claim: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub claims: Vec<SummaryLine>,
    pub confirmed: usize,
    pub refuted: usize,
    pub resource_limited: usize,
}

impl Summary {
    /// Refutation wins over a resource limit.
    pub fn status(&self) -> Status {
        if self.refuted > 0 {
            Status::Refuted
        } else if self.resource_limited > 0 {
            Status::ResourceLimit
        } else {
            Status::Ok
        }
    }

    fn text(&self) -> String {
        let mut out: String = self
            .claims
            .iter()
            .map(|c| format!("{} {}\n", c.label, c.verdict))
            .collect();
        out += &format!(
            "{} confirmed, {} refuted, {} resource-limited",
            self.confirmed, self.refuted, self.resource_limited
        );
        out
    }
}

/// Runs `grid` in parallel with `runner` and writes `<label>.json` per check
/// into `certs`. Lines come back in grid order.
pub fn verify_grid<F>(grid: &[Check], certs: &Path, budget: Duration, runner: F) -> Result<Summary>
where
    F: Fn(&Check) -> Result<VerificationReport> + Sync,
{
    std::fs::create_dir_all(certs).map_err(|e| Error::InvalidParameter(format!("{}: {e}", certs.display())))?;
    let reports: Vec<VerificationReport> = grid
        .par_iter()
        .map(|c| match runner(c) {
            Ok(r) => r.within_budget(budget),
            Err(e) => VerificationReport::from_error(c, &e),
        })
        .collect();
    let mut claims = Vec::with_capacity(grid.len());
    for (check, report) in grid.iter().zip(&reports) {
        let label = check.label();
        let path = certs.join(format!("{label}.json"));
        std::fs::write(&path, report.certificate() + "\n")
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        claims.push(SummaryLine {
            label,
            claim: report.claim.clone(),
            verdict: report.verdict,
        });
    }
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    Ok(Summary {
        confirmed: count(Verdict::Confirmed),
        refuted: count(Verdict::Refuted),
        resource_limited: count(Verdict::ResourceLimited),
        claims,
    })
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json_mode = args.iter().skip(1).any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return Status::Ok.code();
        }
        Err(e) => {
            if json_mode {
                let doc = json!({ "error": e.kind().to_string(), "status": Status::Usage.code() });
                let _ = writeln!(out, "{doc}");
            }
            let _ = write!(err, "{}", e.render());
            return Status::Usage.code();
        }
    };
    let (doc, text, status) = match execute(&cli) {
        Ok(o) => (o.json, o.text, o.status),
        Err(e) => {
            let status = Status::of_error(&e);
            let _ = writeln!(err, "error: {e}");
            (
                json!({ "error": e.to_string(), "status": status.code() }),
                String::new(),
                status,
            )
        }
    };
    let written = if cli.json {
        writeln!(out, "{}", serde_json::to_string(&doc).expect("value serializes"))
    } else if text.is_empty() {
        Ok(())
    } else {
        writeln!(out, "{text}")
    };
    if written.is_err() {
        return Status::Usage.code();
    }
    status.code()
}
