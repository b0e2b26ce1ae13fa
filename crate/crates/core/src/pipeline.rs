//! End-to-end decision for `5x² + q^(2n) = y⁵` at a given prime `q`, and the
//! scripted reproductions diffed against stored expectations.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::primes::{exact_sqrt, is_prime, Primality};
use crate::bigjson;
use crate::cf_sieve::range::{sieve_range, RangeOptions};
use crate::cf_sieve::{sieve_y, SieveStatus};
use crate::error::{precondition, Error, Result};
use crate::hypergeom::{uniqueness_decision, UniquenessVerdict, REGIME_Q};
use crate::linf::{first_upper_bound, replay_reduction, table1};
use crate::solutions::{family_values, verify_witness, SolutionRecord, N_UPPER};
use crate::split_poly::{default_digits, scan_units, split_f, verify_identities};
use crate::thue::{case_table, CaseStatus, Constraint};

/// Whether a step was checked here or taken from the literature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Cited,
    Computed,
}

/// One stage of the decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditStep {
    pub stage: &'static str,
    pub basis: Basis,
    pub outcome: String,
}

/// Final answer for `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Decision {
    NoSolutions {
        reason: String,
    },
    ExactlyOne {
        #[serde(serialize_with = "bigjson::int")]
        x: BigInt,
        #[serde(serialize_with = "bigjson::int")]
        y: BigInt,
        n: u32,
    },
    /// Any solution has `n < 820`, `gcd(n, 30030) = 1` and
    /// `qⁿ = 2000v⁴ − 200v² + 1`.
    AtMostOne,
    Undecided {
        detail: String,
    },
}

impl Decision {
    pub fn decided(&self) -> bool {
        !matches!(self, Decision::Undecided { .. })
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::NoSolutions { reason } => write!(f, "no solutions ({reason})"),
            Decision::ExactlyOne { x, y, n } => write!(f, "exactly one solution: (x,y,n)=({x},{y},{n})"),
            Decision::AtMostOne => f.write_str("at most one solution"),
            Decision::Undecided { detail } => write!(f, "undecided ({detail})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecideReport {
    #[serde(serialize_with = "bigjson::int")]
    pub q: BigInt,
    #[serde(flatten)]
    pub decision: Decision,
    /// `computed` only when no step of the chain is cited.
    pub basis: Basis,
    pub summary: String,
    pub audit: Vec<AuditStep>,
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    /// Also run the continued-fraction sieve on `y = q` below the regime.
    pub sieve_evidence: bool,
    pub n_max: u64,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            sieve_evidence: false,
            n_max: N_UPPER as u64,
        }
    }
}

fn step(stage: &'static str, basis: Basis, outcome: impl Into<String>) -> AuditStep {
    AuditStep {
        stage,
        basis,
        outcome: outcome.into(),
    }
}

/// `v ≥ 1` with `q = 2000v⁴ − 200v² + 1`, given `x = √((q + 4)/5)`.
fn family_parameter(q: &BigInt, x: &BigInt) -> Option<BigInt> {
    let (t, r) = (x + BigInt::one()).div_rem(&BigInt::from(20));
    if !r.is_zero() {
        return None;
    }
    let v = exact_sqrt(&t)?;
    (family_values(&v).0 == *q && v >= BigInt::one()).then_some(v)
}

/// Decides `5x² + q^(2n) = y⁵`, `x, y, n > 0`, for an odd prime `q ≠ 5`.
///
/// Stages: the congruence gates `q mod 600` and `q mod 10`, the square test
/// on `(q + 4)/5`, family membership, then the regime split at `3·10⁹`.
pub fn decide_q(q: &BigInt, opts: &DecideOptions) -> Result<DecideReport> {
    if q.is_even() || *q < BigInt::from(3) {
        return Err(precondition(format!("q = {q} must be an odd prime")));
    }
    if *q == BigInt::from(5) {
        return Err(precondition("q = 5 is excluded"));
    }
    if is_prime(q) == Primality::Composite {
        return Err(precondition(format!("q = {q} is composite")));
    }
    let mut audit = Vec::new();
    let finish = |decision: Decision, audit: Vec<AuditStep>| {
        let basis = if audit.iter().any(|s: &AuditStep| s.basis == Basis::Cited) {
            Basis::Cited
        } else {
            Basis::Computed
        };
        let summary = decision.to_string();
        DecideReport {
            q: q.clone(),
            decision,
            basis,
            summary,
            audit,
        }
    };

    let r600 = q.mod_floor(&BigInt::from(600)).to_u64().unwrap();
    let r10 = r600 % 10;
    if r600 != 1 {
        audit.push(step(
            "q-mod-600",
            Basis::Cited,
            format!("q ≡ {r600} (mod 600); a solution needs q ≡ 1"),
        ));
        audit.push(step("q-mod-10", Basis::Computed, format!("q ≡ {r10} (mod 10)")));
        return Ok(finish(
            Decision::NoSolutions {
                reason: "q ≢ 1 mod 600".into(),
            },
            audit,
        ));
    }
    audit.push(step("q-mod-600", Basis::Computed, "q ≡ 1 (mod 600)"));
    audit.push(step("q-mod-10", Basis::Computed, "q ≡ 1 (mod 10)"));

    let square = {
        let t: BigInt = q + 4;
        if t.is_multiple_of(&BigInt::from(5)) {
            exact_sqrt(&(t / 5))
        } else {
            None
        }
    };
    let above = *q > BigInt::from(REGIME_Q);
    match &square {
        Some(x) => audit.push(step("square", Basis::Computed, format!("(q + 4)/5 = {x}²"))),
        None => audit.push(step("square", Basis::Computed, "(q + 4)/5 is not a square")),
    }
    let member = square.as_ref().and_then(|x| family_parameter(q, x));
    match &member {
        Some(v) => audit.push(step(
            "family",
            Basis::Computed,
            format!("q = 2000v⁴ − 200v² + 1 with v = {v}"),
        )),
        None => audit.push(step(
            "family",
            Basis::Computed,
            "q is not of the form 2000v⁴ − 200v² + 1",
        )),
    }

    if above {
        let rep = uniqueness_decision(q)?;
        match rep.verdict {
            UniquenessVerdict::Undecided { n } => {
                audit.push(step(
                    "regime",
                    Basis::Computed,
                    format!("q > 3·10⁹; the separating inequality holds at n = {n}"),
                ));
                let detail = format!("uniqueness inequality holds at n = {n}");
                return Ok(finish(Decision::Undecided { detail }, audit));
            }
            _ => audit.push(step(
                "regime",
                Basis::Computed,
                format!(
                    "q > 3·10⁹; the separating inequality fails for all {} odd n < {N_UPPER}",
                    rep.exponents_checked
                ),
            )),
        }
    } else {
        let outcome = if square.is_some() {
            "q ≤ 3·10⁹ and (q + 4)/5 is a square: n = 1 is the only exponent"
        } else {
            "q ≤ 3·10⁹: no exponent n > 2"
        };
        audit.push(step("regime", Basis::Cited, outcome));
        if opts.sieve_evidence {
            let y = q.to_u64().unwrap();
            let v = sieve_y(y, opts.n_max)?;
            let outcome = match &v.status {
                SieveStatus::NonSplit { prime } => format!("y = q has the inert factor {prime}"),
                SieveStatus::Eliminated => format!("sieve eliminates y = q for 17 ≤ n ≤ {}", opts.n_max),
                SieveStatus::Survives { max_n } => format!("sieve leaves n ≤ {max_n} open for y = q"),
                SieveStatus::Undecided { detail } => format!("sieve undecided: {detail}"),
            };
            audit.push(step("sieve", Basis::Computed, outcome));
        }
    }

    let decision = match (square, member) {
        (Some(x), Some(v)) => {
            let rec = SolutionRecord::from_family(v.to_i64().ok_or_else(|| Error::Consistency("v overflow".into()))?);
            if !verify_witness(&rec, false) || rec.q != *q || x != BigInt::from(20) * &v * &v - 1 {
                return Err(Error::Violation(format!("family witness for q = {q} fails")));
            }
            audit.push(step(
                "witness",
                Basis::Computed,
                format!("5·{}² + {q}² = {}⁵", rec.x, rec.y),
            ));
            Decision::ExactlyOne {
                x: rec.x,
                y: rec.y,
                n: 1,
            }
        }
        (Some(_), None) => Decision::NoSolutions {
            reason: "qⁿ = 5(20v² − 1)² − 4 has no admissible v".into(),
        },
        (None, _) if above => Decision::AtMostOne,
        (None, _) => Decision::NoSolutions {
            reason: "q ≤ 3·10⁹ and (q + 4)/5 is not a square".into(),
        },
    };
    Ok(finish(decision, audit))
}

/// Scripted reproductions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Section {
    #[serde(rename = "prop3.1-n13")]
    ThueN13,
    #[serde(rename = "cor2-bound")]
    FirstBound,
    #[serde(rename = "table1-shape")]
    TableShape,
    #[serde(rename = "sieve-sample")]
    SieveSample,
    #[serde(rename = "thm2.3-p11")]
    SplitP11,
}

impl Section {
    pub const ALL: [Section; 5] = [
        Section::ThueN13,
        Section::FirstBound,
        Section::TableShape,
        Section::SieveSample,
        Section::SplitP11,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Section::ThueN13 => "prop3.1-n13",
            Section::FirstBound => "cor2-bound",
            Section::TableShape => "table1-shape",
            Section::SieveSample => "sieve-sample",
            Section::SplitP11 => "thm2.3-p11",
        }
    }

    /// Stored expected output, one `key=value` per line.
    pub fn expected(self) -> &'static str {
        match self {
            Section::ThueN13 => include_str!("../resources/expected/prop3.1-n13.txt"),
            Section::FirstBound => include_str!("../resources/expected/cor2-bound.txt"),
            Section::TableShape => include_str!("../resources/expected/table1-shape.txt"),
            Section::SieveSample => include_str!("../resources/expected/sieve-sample.txt"),
            Section::SplitP11 => include_str!("../resources/expected/thm2.3-p11.txt"),
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Section {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Section::ALL
            .into_iter()
            .find(|sec| sec.id() == s)
            .ok_or_else(|| precondition(format!("unknown section `{s}`")))
    }
}

/// Upper end of the sieve sample.
pub const SIEVE_SAMPLE_HI: u64 = 20_001;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffLine {
    pub line: usize,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReproduceReport {
    pub section: Section,
    pub pass: bool,
    pub lines: Vec<String>,
    pub diff: Vec<DiffLine>,
}

/// Line-by-line comparison; blank lines in `expected` are ignored.
pub fn diff_lines(expected: &str, actual: &[String]) -> Vec<DiffLine> {
    let exp: Vec<&str> = expected.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    (0..exp.len().max(actual.len()))
        .filter_map(|i| {
            let e = exp.get(i).map(|s| s.to_string());
            let a = actual.get(i).cloned();
            (e != a).then_some(DiffLine {
                line: i + 1,
                expected: e,
                actual: a,
            })
        })
        .collect()
}

fn case_status_line(status: &CaseStatus) -> String {
    match status {
        CaseStatus::Content => "content".into(),
        CaseStatus::Reducible => "reducible".into(),
        CaseStatus::Congruence {
            modulus,
            unreduced_modulus,
        } => {
            format!("congruence modulus={modulus} unreduced={unreduced_modulus}")
        }
        CaseStatus::Survives { monic } => {
            let second = monic.form.coeffs().get(1).map(|c| c.to_string()).unwrap_or_default();
            format!(
                "survives multiplier={} second={second} rhs={}",
                monic.multiplier, monic.rhs
            )
        }
    }
}

fn section_lines(section: Section) -> Result<Vec<String>> {
    let mut out = Vec::new();
    match section {
        Section::ThueN13 => {
            for c in case_table(13)? {
                let rhs = match c.constraint {
                    Constraint::None => "4".to_string(),
                    Constraint::UvOdd => "2^15,uv-odd".to_string(),
                };
                out.push(format!(
                    "k1={} rhs={rhs} content={} {}",
                    c.k1,
                    c.content,
                    case_status_line(&c.status)
                ));
            }
        }
        Section::FirstBound => {
            let b = first_upper_bound(&BigInt::from(11))?;
            out.push(format!("y_min={}", b.y_min));
            out.push(format!("n_star={}", b.n_star));
            out.push(format!("n_star_le_22000={}", b.n_star <= 22_000));
            out.push(format!("in_regime={}", b.in_regime));
        }
        Section::TableShape => {
            let rows = table1()?;
            let t = replay_reduction(&rows, None)?;
            out.push(format!("rows={}", t.steps.len()));
            out.push(format!("start={}", t.start));
            out.push(format!("end={}", t.end));
            let monotone = t.steps.iter().all(|s| s.reduced_ub < s.start_ub);
            out.push(format!("monotone={monotone}"));
            for (a, b) in t.duplicates() {
                out.push(format!("duplicate={a},{b}"));
            }
        }
        Section::SieveSample => {
            let mut o = RangeOptions::new(11, SIEVE_SAMPLE_HI, N_UPPER as u64);
            o.block = 5_000;
            let s = sieve_range(&o)?;
            out.push(format!("range={}..{}", s.lo, s.hi));
            out.push(format!("candidates={}", s.tally.candidates));
            out.push(format!("non_split={}", s.tally.non_split));
            out.push(format!("eliminated={}", s.tally.eliminated));
            out.push(format!("survived={}", s.tally.survived));
            out.push(format!("undecided={}", s.tally.undecided));
            out.push(format!("max_a={} at y={}", s.tally.max_a, s.tally.max_a_y));
            out.push(format!("complete={}", s.complete));
        }
        Section::SplitP11 => {
            let res = split_f(11, default_digits(11))?;
            out.push(format!("f1={}", res.f1));
            out.push(format!("f2={}", res.f2));
            out.push(format!("reflection={:?}", res.reflection));
            let rep = verify_identities(&res)?;
            for c in &rep.checks {
                out.push(format!("{}={}", c.name, c.pass));
            }
            out.push(format!("c1={}", rep.c1));
            let units = scan_units(&res, 10_000);
            out.push(format!("a_bound={}", units.a_bound));
            out.push(format!("only_zero={}", units.only_zero));
        }
    }
    Ok(out)
}

/// Runs `section` and diffs it against the stored expectation.
pub fn reproduce(section: Section) -> Result<ReproduceReport> {
    let lines = section_lines(section)?;
    let diff = diff_lines(section.expected(), &lines);
    Ok(ReproduceReport {
        section,
        pass: diff.is_empty(),
        lines,
        diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn decide(q: i64) -> DecideReport {
        decide_q(&b(q), &DecideOptions::default()).unwrap()
    }

    #[test]
    fn family_primes_have_exactly_one() {
        let r = decide(1801);
        assert_eq!(
            r.decision,
            Decision::ExactlyOne {
                x: b(410),
                y: b(21),
                n: 1
            }
        );
        assert_eq!(r.summary, "exactly one solution: (x,y,n)=(410,21,1)");
        assert_eq!(r.basis, Basis::Cited);
        let r = decide(160201);
        assert_eq!(
            r.decision,
            Decision::ExactlyOne {
                x: b(183630),
                y: b(181),
                n: 1
            }
        );
    }

    #[test]
    fn congruence_gate() {
        let r = decide(7);
        assert_eq!(r.summary, "no solutions (q ≢ 1 mod 600)");
        assert_eq!(r.audit[1].outcome, "q ≡ 7 (mod 10)");
        assert_eq!(r.audit[0].basis, Basis::Cited);
        let r = decide(11);
        assert_eq!(r.summary, "no solutions (q ≢ 1 mod 600)");
        assert_eq!(
            decide(3).decision,
            Decision::NoSolutions {
                reason: "q ≢ 1 mod 600".into()
            }
        );
    }

    #[test]
    fn preconditions() {
        for q in [2, 5, 9, 1, 0, -7, 1201 * 601] {
            assert!(
                matches!(decide_q(&b(q), &DecideOptions::default()), Err(Error::Precondition(_))),
                "{q}"
            );
        }
    }

    #[test]
    fn cited_regime_without_square() {
        // 601 and 1201 are ≡ 1 (mod 600) primes that are not family members.
        for q in [601, 1201] {
            let r = decide(q);
            assert!(matches!(r.decision, Decision::NoSolutions { .. }), "{q}");
            assert_eq!(r.basis, Basis::Cited);
            assert_eq!(r.audit.last().unwrap().stage, "regime");
        }
        let r = decide_q(
            &b(601),
            &DecideOptions {
                sieve_evidence: true,
                ..Default::default()
            },
        )
        .unwrap();
        let sieve = r.audit.iter().find(|s| s.stage == "sieve").unwrap();
        assert_eq!(sieve.basis, Basis::Computed);
        assert!(
            sieve.outcome.contains("eliminates") || sieve.outcome.contains("inert"),
            "{}",
            sieve.outcome
        );
    }

    #[test]
    fn above_regime_is_computed() {
        let q = (3_000_000_001u64..)
            .step_by(600)
            .find(|&q| crate::arith::primes::is_prime_u64(q))
            .unwrap();
        let r = decide_q(&BigInt::from(q), &DecideOptions::default()).unwrap();
        assert_eq!(r.decision, Decision::AtMostOne);
        assert_eq!(r.basis, Basis::Computed);
    }

    #[test]
    fn deterministic() {
        assert_eq!(decide(1801), decide(1801));
        let a = serde_json::to_string(&decide(160201)).unwrap();
        let c = serde_json::to_string(&decide(160201)).unwrap();
        assert_eq!(a, c);
        assert!(a.contains("\"verdict\":\"exactly-one\""));
    }

    #[test]
    fn family_parameter_detects_members() {
        assert_eq!(family_parameter(&b(1801), &b(19)), Some(b(1)));
        assert_eq!(family_parameter(&b(160201), &b(179)), Some(b(3)));
        assert_eq!(family_parameter(&b(1801), &b(21)), None);
    }

    #[test]
    fn section_ids_round_trip() {
        for s in Section::ALL {
            assert_eq!(s.id().parse::<Section>().unwrap(), s);
        }
        assert!("nope".parse::<Section>().is_err());
    }

    #[test]
    fn diff_reports_mismatches() {
        let d = diff_lines("a=1\nb=2\n\n", &["a=1".into(), "b=3".into(), "c=4".into()]);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].line, 2);
        assert_eq!(d[1].expected, None);
        assert!(diff_lines("x=1\n", &["x=1".into()]).is_empty());
    }

    #[test]
    fn reproduce_fast_sections() {
        for s in [Section::ThueN13, Section::TableShape, Section::SplitP11] {
            let r = reproduce(s).unwrap();
            assert!(r.pass, "{s}: {:#?}", r.diff);
        }
    }
}
