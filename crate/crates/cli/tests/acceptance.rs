//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use serde_json::Value;

use expdio_core::cf_sieve::range::{sieve_range, RangeOptions};
use expdio_core::hypergeom::{
    build_pair, check_properties, primes_one_mod_ten_above, uniqueness_decision, UniquenessVerdict, ZSamples, REGIME_Q,
};
use expdio_core::linf::{first_upper_bound, replay_reduction, table1};
use expdio_core::pipeline::{reproduce, Section};
use expdio_core::solutions::{family_search, family_values, verify_witness, SolutionRecord, N_UPPER};
use expdio_core::split_poly::{default_digits, no_solution_certificate, split_f, verify_identities};
use expdio_core::thue::{bounded_enumerate, case_table, CaseStatus, Constraint};
use expdio_core::IntPoly;

/// Time budgets.
const BUDGET_WITNESS: Duration = Duration::from_millis(1);
const BUDGET_FAMILY: Duration = Duration::from_secs(1);
const BUDGET_PARAMETRIZATION: Duration = Duration::from_secs(10);
const BUDGET_THUE: Duration = Duration::from_secs(5 * 60);
const BUDGET_BOUND: Duration = Duration::from_secs(60);
const BUDGET_SIEVE: Duration = Duration::from_secs(30 * 60);
const BUDGET_HYPERGEOM: Duration = Duration::from_secs(5 * 60);
const BUDGET_SPLIT: Duration = Duration::from_secs(10 * 60);
const BUDGET_UNIQUE: Duration = Duration::from_secs(60);
const BUDGET_TABLE: Duration = Duration::from_secs(1);

/// Thresholds the computed bounds may not exceed.
const BOUND_Y11: u64 = 22_000;
const BOUND_Y3E9: u64 = 6_404;

const SIEVE_HI: u64 = 1_000_001;
const HYPERGEOM_MAX: u64 = 20;
const HYPERGEOM_SAMPLES: usize = 1000;
const SPLIT_PRIMES: [u64; 3] = [11, 19, 43];
const UNIT_BOUND: u64 = 10_000;
const THUE_ENUM_BOUND: i64 = 100;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn b(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Runs the binary and returns its exit code and JSONL records after the header.
fn cli(args: &[&str]) -> (i32, Vec<Value>) {
    let out = Command::new(env!("CARGO_BIN_EXE_expdio"))
        .args(args)
        .output()
        .expect("spawn expdio");
    let text = String::from_utf8(out.stdout).expect("utf-8 output");
    let records: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).expect("JSONL")).collect();
    assert_eq!(
        records.first().map(|h| h["record"].clone()),
        Some(Value::from("header"))
    );
    (out.status.code().unwrap_or(-1), records[1..].to_vec())
}

fn witnesses() -> Outcome {
    let recs = [
        SolutionRecord {
            p: 5,
            q: b(1801),
            n: 1,
            x: b(410),
            y: b(21),
            v: None,
        },
        SolutionRecord {
            p: 5,
            q: b(160201),
            n: 1,
            x: b(183630),
            y: b(181),
            v: None,
        },
    ];
    let t = Instant::now();
    let ok = recs.iter().all(|r| verify_witness(r, true));
    let el = t.elapsed();
    let (code, recs_out) = cli(&["witness"]);
    let cli_ok = code == 0
        && recs_out
            .last()
            .is_some_and(|r| r["all_valid"] == true && r["checked"] == 2);
    outcome(
        ok && cli_ok && el < BUDGET_WITNESS,
        format!("exact identities {ok}, cli {cli_ok}, {el:?}"),
    )
}

fn family() -> Outcome {
    let t = Instant::now();
    let qs: Vec<BigInt> = family_search(10).into_iter().map(|f| f.q).collect();
    let el = t.elapsed();
    let want = [1801, 160201, 1245001, 4792201, 8179201].map(b).to_vec();
    let (code, recs) = cli(&["family", "--vmax", "10"]);
    let cli_primes: Vec<String> = recs
        .last()
        .and_then(|r| r["primes"].as_array().cloned())
        .unwrap_or_default()
        .iter()
        .map(|v| v.as_str().unwrap_or_default().to_string())
        .collect();
    let cli_ok = code == 0 && cli_primes == want.iter().map(ToString::to_string).collect::<Vec<_>>();
    outcome(
        qs == want && cli_ok && el < BUDGET_FAMILY,
        format!(
            "{:?}, cli {cli_ok}, {el:?}",
            qs.iter().map(ToString::to_string).collect::<Vec<_>>()
        ),
    )
}

fn parametrization() -> Outcome {
    let t = Instant::now();
    let v = IntPoly::x();
    let v2 = &v * &v;
    let v4 = &v2 * &v2;
    let c = |k: i64| IntPoly::constant(b(k));
    let x = &(&c(10) * &v) * &(&(&(&c(80) * &v4) - &(&c(40) * &v2)) + &c(1));
    let q = &(&(&c(2000) * &v4) - &(&c(200) * &v2)) + &c(1);
    let y = &(&c(20) * &v2) + &c(1);
    let y2 = &y * &y;
    let y5 = &(&y2 * &y2) * &y;
    let symbolic = &(&c(5) * &(&x * &x)) + &(&q * &q) == y5;
    let numeric = (-1000i64..=1000).all(|v| {
        let (q, x, y) = family_values(&b(v));
        &x * &x * 5 + &q * &q == y.pow(5)
    });
    let el = t.elapsed();
    outcome(
        symbolic && numeric && el < BUDGET_PARAMETRIZATION,
        format!("symbolic {symbolic}, |v| ≤ 1000 {numeric}, {el:?}"),
    )
}

fn thue_n13() -> Outcome {
    let t = Instant::now();
    let table = match case_table(13) {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string()),
    };
    let status = |k: i64, c: Constraint| {
        table
            .iter()
            .find(|o| o.k1 == k && o.constraint == c)
            .map(|o| o.status.clone())
    };
    let mod169 = [2, 5].iter().all(|&k| {
        [Constraint::None, Constraint::UvOdd]
            .iter()
            .all(|&c| matches!(status(k, c), Some(CaseStatus::Congruence { modulus: 169, .. })))
    });
    let k3 = matches!(status(3, Constraint::UvOdd), Some(CaseStatus::Congruence { unreduced_modulus, .. }) if unreduced_modulus == b(1) << 14);
    let k6 = matches!(status(6, Constraint::UvOdd), Some(CaseStatus::Congruence { modulus, .. }) if modulus == 1 << 13);
    let (second, only_trivial) = match status(3, Constraint::None) {
        Some(CaseStatus::Survives { monic }) => {
            let sols = bounded_enumerate(&monic.form, &monic.rhs, THUE_ENUM_BOUND, false);
            (
                monic.form.coeffs()[1].clone(),
                sols == vec![(b(2), b(0))] && monic.rhs == b(1) << 13,
            )
        }
        _ => (b(0), false),
    };
    let el = t.elapsed();
    let pass = mod169 && k3 && k6 && second == b(65) && only_trivial && el < BUDGET_THUE;
    outcome(
        pass,
        format!("k1∈{{2,5}} mod 169 {mod169}, k1=3 mod 2^14 {k3}, k1=6 mod 2^13 {k6}, monic T3 second coefficient {second}, B ≤ {THUE_ENUM_BOUND} only (2,0) {only_trivial}, {el:?}"),
    )
}

fn first_bound() -> Outcome {
    let t = Instant::now();
    let small = first_upper_bound(&b(11));
    let large = first_upper_bound(&BigInt::from(REGIME_Q));
    let el = t.elapsed();
    match (small, large) {
        (Ok(s), Ok(l)) => {
            let pass = s.n_star <= BOUND_Y11 && l.n_star <= BOUND_Y3E9 && el < BUDGET_BOUND;
            outcome(
                pass,
                format!(
                    "y ≥ 11: n* = {} (≤ {BOUND_Y11}: {}); y ≥ 3·10⁹: n* = {} (≤ {BOUND_Y3E9}: {}); {el:?}",
                    s.n_star,
                    s.n_star <= BOUND_Y11,
                    l.n_star,
                    l.n_star <= BOUND_Y3E9
                ),
            )
        }
        (s, l) => outcome(false, format!("{:?} / {:?}", s.err(), l.err())),
    }
}

fn sieve_sample() -> Outcome {
    let t = Instant::now();
    let s = match sieve_range(&RangeOptions::new(11, SIEVE_HI, N_UPPER as u64)) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let el = t.elapsed();
    let expected = (SIEVE_HI - 11) / 10 + 1;
    let tl = &s.tally;
    let pass = s.complete
        && tl.candidates == expected
        && tl.eliminated + tl.non_split == expected
        && tl.undecided == 0
        && tl.survived == 0
        && el < BUDGET_SIEVE;
    outcome(
        pass,
        format!(
            "[11, {SIEVE_HI}]: {} candidates, {} eliminated, {} non-split, {} survived, {} undecided, max A = {} at y = {}, {el:?}",
            tl.candidates, tl.eliminated, tl.non_split, tl.survived, tl.undecided, tl.max_a, tl.max_a_y
        ),
    )
}

fn hypergeom_suite() -> Outcome {
    let t = Instant::now();
    let samples = ZSamples::grid(HYPERGEOM_SAMPLES);
    let mut pairs = 0;
    let mut failures = Vec::new();
    for n2 in 2..=HYPERGEOM_MAX {
        for n1 in 1..n2 {
            pairs += 1;
            if let Err(e) = build_pair(n1, n2).and_then(|p| check_properties(&p, &samples)) {
                failures.push(format!("({n1},{n2}): {e}"));
            }
        }
    }
    let el = t.elapsed();
    let pass = failures.is_empty() && pairs == 190 && el < BUDGET_HYPERGEOM;
    outcome(
        pass,
        format!("{pairs} pairs × {HYPERGEOM_SAMPLES} samples, violations {failures:?}, {el:?}"),
    )
}

fn split_instances() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    for p in SPLIT_PRIMES {
        let res = split_f(p, default_digits(p)).and_then(|r| verify_identities(&r).map(|rep| (r, rep)));
        let cert = no_solution_certificate(p, UNIT_BOUND);
        match (res, cert) {
            (Ok((_, rep)), Ok(c)) => {
                let ok = rep.all_pass() && c.only_zero && c.unit_values_at == vec![0];
                pass &= ok;
                notes.push(format!(
                    "p={p}: identities {}, c1={}, units only at a=0 {}",
                    rep.all_pass(),
                    rep.c1,
                    c.only_zero
                ));
            }
            (r, c) => {
                pass = false;
                notes.push(format!("p={p}: {:?} {:?}", r.err(), c.err()));
            }
        }
    }
    let el = t.elapsed();
    outcome(pass && el < BUDGET_SPLIT, format!("{}; {el:?}", notes.join("; ")))
}

fn uniqueness() -> Outcome {
    let t = Instant::now();
    let primes = primes_one_mod_ten_above(REGIME_Q, 3);
    let odd_exponents = (1..N_UPPER).step_by(2).count();
    let mut pass = true;
    let mut notes = Vec::new();
    for &q in &primes {
        match uniqueness_decision(&BigInt::from(q)) {
            Ok(r) => {
                let ok =
                    matches!(r.verdict, UniquenessVerdict::AtMostOne) && r.exponents_checked as usize == odd_exponents;
                pass &= ok;
                notes.push(format!("{q}: {:?} over {} exponents", r.verdict, r.exponents_checked));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{q}: {e}"));
            }
        }
    }
    let el = t.elapsed();
    let q0 = primes[0].to_string();
    let (code, recs) = cli(&["unique", "--q", &q0]);
    let cli_ok = code == 0 && recs.last().is_some_and(|r| r["summary"] == "at most one solution");
    outcome(
        pass && cli_ok && el < BUDGET_UNIQUE,
        format!("{}; cli {cli_ok}; {el:?}", notes.join("; ")),
    )
}

fn table_shape() -> Outcome {
    let t = Instant::now();
    let traj = table1().and_then(|rows| replay_reduction(&rows, None).map(|t| (rows.len(), t)));
    let rep = reproduce(Section::TableShape);
    let el = t.elapsed();
    match (traj, rep) {
        (Ok((rows, tr)), Ok(rep)) => {
            let monotone = tr.steps.iter().all(|s| s.reduced_ub < s.start_ub);
            let dups = tr.duplicates();
            let pass = rows == 30
                && tr.start == 6404
                && tr.end == 820
                && monotone
                && dups.len() == 1
                && rep.pass
                && el < BUDGET_TABLE;
            outcome(
                pass,
                format!(
                    "{rows} rows, {} → {}, monotone {monotone}, duplicates {dups:?}, stored diff empty {}, {el:?}",
                    tr.start, tr.end, rep.pass
                ),
            )
        }
        (a, r) => outcome(false, format!("{:?} {:?}", a.err(), r.err())),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("witness identities", witnesses),
        ("family reproduction", family),
        ("parametrization identity", parametrization),
        ("thue n=13 case table", thue_n13),
        ("first exponent bound", first_bound),
        ("cf sieve sample", sieve_sample),
        ("hypergeometric property suite", hypergeom_suite),
        ("split polynomial instances", split_instances),
        ("uniqueness regime", uniqueness),
        ("table shape", table_shape),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        let selected = filter.iter().any(|f| match f.parse::<usize>() {
            Ok(k) => k == i + 1,
            Err(_) => name.contains(f.as_str()),
        });
        if !filter.is_empty() && !selected {
            continue;
        }
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            id,
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
