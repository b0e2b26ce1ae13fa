mod config;
mod output;

use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use expdio_core::cf_sieve::range::{sieve_range, RangeOptions};
use expdio_core::hypergeom::{
    build_pair, check_properties, gap_lower_bound, technical_lower_bound, uniqueness_decision, GapContext,
    UniquenessVerdict, ZSamples,
};
use expdio_core::linf::{first_upper_bound, replay_reduction, scan_corollary2, table1};
use expdio_core::pipeline::{decide_q, reproduce, DecideOptions, Section};
use expdio_core::solutions::{check_q_constraints, family_search, verify_witness, SolutionRecord, N_UPPER};
use expdio_core::split_poly::{default_digits, scan_units, split_f, verify_identities};
use expdio_core::thue::{bounded_enumerate, case_table, export_equations, CaseStatus, Constraint};
use expdio_core::DEFAULT_DIGITS;

use config::FileConfig;
use output::{Emitter, Format};

/// Sieve ceiling of the full run.
const FULL_SIEVE_HI: u64 = 3_000_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "expdio",
    version,
    about = "Exact checks, sieves and bounds for 5x² + q^(2n) = y⁵ and 5x² − 4 = yⁿ"
)]
struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, env = "EXPDIO_DIGITS")]
    digits: Option<u32>,
    /// Worker threads.
    #[arg(long, global = true, env = "EXPDIO_WORKERS")]
    workers: Option<usize>,
    /// Configuration file of `key=value` lines.
    #[arg(long, global = true, env = "EXPDIO_CONFIG")]
    config: Option<PathBuf>,
    /// Output rendering.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Primes q = 2000v⁴ − 200v² + 1 for 1 ≤ v ≤ vmax.
    Family {
        #[arg(long, default_value_t = 10)]
        vmax: u64,
    },
    /// Congruence constraints on a pair (q, n).
    CheckQ {
        #[arg(long)]
        q: BigInt,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Exact check of p·x² + q^(2n) = y^p; without arguments, the two known witnesses.
    Witness(WitnessArgs),
    /// Case table of the Thue equations of degree n.
    Thue {
        #[arg(long, default_value_t = 13)]
        n: u32,
        /// Write the surviving equations to this file.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Enumerate solutions of the surviving equations with |u|, |v| ≤ B.
        #[arg(long, value_name = "B")]
        enumerate: Option<i64>,
    },
    /// Upper bounds for the exponent n.
    Bound {
        #[arg(long, value_enum, default_value_t = BoundMode::Corollary2)]
        mode: BoundMode,
        #[arg(long, default_value = "11")]
        ymin: BigInt,
        /// Evaluate the inequality on LO:HI:STEP instead of bounding.
        #[arg(long, value_name = "LO:HI:STEP")]
        scan: Option<String>,
    },
    /// Continued-fraction sieve over y ≡ 1 (mod 10) in [lo, hi].
    Sieve(SieveArgs),
    /// Gap principle for a solution (q, n) of 5x² = qⁿ + 4.
    Gap {
        #[arg(long)]
        q: BigInt,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, requires = "s")]
        r: Option<u32>,
        #[arg(long, requires = "r")]
        s: Option<u32>,
        /// With --r/--s: evaluate the hypergeometric bound at this n′.
        #[arg(long, requires = "y")]
        nprime: Option<u64>,
        #[arg(long, requires = "nprime")]
        y: Option<BigInt>,
    },
    /// Uniqueness decision for 5x² = qⁿ + 4 with q > 3·10⁹.
    Unique {
        #[arg(long)]
        q: BigInt,
    },
    /// Hypergeometric polynomials G, H for (n1, n2).
    Hypergeom {
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        n2: u64,
        /// Run the property checks.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Splitting f = f1·f2 for a prime p ≡ 3 (mod 8) and its identities.
    SplitPoly {
        #[arg(long)]
        p: u64,
        /// Also scan |a| ≤ ABOUND for f_i(a) = ±1.
        #[arg(long)]
        abound: Option<u64>,
    },
    /// End-to-end verdict for 5x² + q^(2n) = y⁵.
    Decide {
        #[arg(long)]
        q: BigInt,
        /// Add sieve evidence for y = q below 3·10⁹.
        #[arg(long)]
        sieve_evidence: bool,
    },
    /// Run a scripted reproduction and diff it against stored results.
    Reproduce {
        #[arg(long, required_unless_present = "all")]
        section: Option<String>,
        #[arg(long)]
        all: bool,
    },
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long, default_value_t = 5)]
    p: u64,
    #[arg(long, requires_all = ["x", "y"])]
    q: Option<BigInt>,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, requires = "q")]
    x: Option<BigInt>,
    #[arg(long, requires = "q")]
    y: Option<BigInt>,
}

#[derive(Args, Debug)]
struct SieveArgs {
    #[arg(long, default_value_t = 11)]
    lo: u64,
    #[arg(long, required_unless_present = "full")]
    hi: Option<u64>,
    #[arg(long, default_value_t = N_UPPER as u64)]
    nmax: u64,
    #[arg(long, default_value_t = 100_000)]
    block: u64,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Per-y verdicts as JSONL.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stop after this many blocks; rerun with the same checkpoint to resume.
    #[arg(long)]
    stop_after: Option<usize>,
    /// The full range up to 3·10⁹ (long-running; use a checkpoint).
    #[arg(long, conflicts_with = "hi")]
    full: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BoundMode {
    Corollary2,
    Table,
}

/// Process outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Verdict,
    Undecided,
    Failed,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Verdict => 0,
            Status::Failed => 1,
            Status::Undecided => 2,
        }
    }
}

struct Settings {
    digits: u32,
    workers: usize,
    format: Format,
}

fn settings(cli: &Cli) -> Result<Settings> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let digits = match cli.digits {
        Some(d) => d,
        None => file.get("digits")?.unwrap_or(DEFAULT_DIGITS),
    };
    if digits == 0 {
        bail!("digits must be positive");
    }
    let workers = match cli.workers {
        Some(w) => w,
        None => file
            .get("workers")?
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    if workers == 0 {
        bail!("workers must be positive");
    }
    let format = match cli.format {
        Some(f) => f,
        None => file.get::<Format>("format")?.unwrap_or(Format::Jsonl),
    };
    Ok(Settings {
        digits,
        workers,
        format,
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Family { .. } => "family",
        Command::CheckQ { .. } => "check-q",
        Command::Witness(_) => "witness",
        Command::Thue { .. } => "thue",
        Command::Bound { .. } => "bound",
        Command::Sieve(_) => "sieve",
        Command::Gap { .. } => "gap",
        Command::Unique { .. } => "unique",
        Command::Hypergeom { .. } => "hypergeom",
        Command::SplitPoly { .. } => "split-poly",
        Command::Decide { .. } => "decide",
        Command::Reproduce { .. } => "reproduce",
    }
}

fn parse_scan(s: &str) -> Result<(u64, u64, u64)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        bail!("--scan expects LO:HI:STEP");
    };
    Ok((lo.parse()?, hi.parse()?, step.parse()?))
}

fn run<W: io::Write>(cli: &Cli, st: &Settings, e: &mut Emitter<W>) -> Result<Status> {
    match &cli.command {
        Command::Family { vmax } => {
            let primes = family_search(*vmax);
            for p in &primes {
                e.emit("family-prime", p)?;
            }
            let qs: Vec<String> = primes.iter().map(|p| p.q.to_string()).collect();
            e.emit("summary", &json!({ "vmax": vmax, "count": primes.len(), "primes": qs }))?;
            Ok(Status::Verdict)
        }
        Command::CheckQ { q, n } => {
            let v = check_q_constraints(q, *n);
            let reasons: Vec<String> = v.reasons.iter().map(ToString::to_string).collect();
            e.emit(
                "q-constraints",
                &json!({ "q": q.to_string(), "n": n, "verdict": v, "explanation": reasons }),
            )?;
            Ok(Status::Verdict)
        }
        Command::Witness(w) => {
            let recs = match (&w.q, &w.x, &w.y) {
                (Some(q), Some(x), Some(y)) => vec![SolutionRecord {
                    p: w.p,
                    q: q.clone(),
                    n: w.n,
                    x: x.clone(),
                    y: y.clone(),
                    v: None,
                }],
                _ => vec![SolutionRecord::from_family(1), SolutionRecord::from_family(3)],
            };
            let mut all = true;
            for r in &recs {
                let valid = verify_witness(r, true);
                all &= valid;
                e.emit("witness", &json!({ "solution": r, "valid": valid }))?;
            }
            e.emit("summary", &json!({ "checked": recs.len(), "all_valid": all }))?;
            Ok(Status::Verdict)
        }
        Command::Thue { n, export, enumerate } => {
            let table = case_table(*n)?;
            for c in &table {
                e.emit("thue-case", c)?;
            }
            if let Some(b) = enumerate {
                for c in &table {
                    let CaseStatus::Survives { monic } = &c.status else {
                        continue;
                    };
                    let (equation, sols) = match c.constraint {
                        Constraint::None => ("monic", bounded_enumerate(&monic.form, &monic.rhs, *b, false)),
                        Constraint::UvOdd => ("reduced", bounded_enumerate(&c.reduced_form, &c.reduced_rhs, *b, true)),
                    };
                    let sols: Vec<[String; 2]> = sols.iter().map(|(u, v)| [u.to_string(), v.to_string()]).collect();
                    e.emit(
                        "thue-enumeration",
                        &json!({ "k1": c.k1, "constraint": c.constraint, "equation": equation, "bound": b, "solutions": sols }),
                    )?;
                }
            }
            if let Some(path) = export {
                let lines = export_equations(*n, path)?;
                e.emit("thue-export", &json!({ "path": path, "equations": lines.len() }))?;
            }
            let killed = table.iter().filter(|c| c.status.killed()).count();
            e.emit(
                "summary",
                &json!({ "n": n, "cases": table.len(), "killed": killed, "surviving": table.len() - killed }),
            )?;
            Ok(Status::Verdict)
        }
        Command::Bound {
            mode: BoundMode::Corollary2,
            ymin,
            scan,
        } => {
            if let Some(s) = scan {
                let (lo, hi, step) = parse_scan(s)?;
                for (n, holds) in scan_corollary2(ymin, lo, hi, step)? {
                    e.emit("corollary2", &json!({ "n": n, "y": ymin.to_string(), "holds": holds }))?;
                }
                return Ok(Status::Verdict);
            }
            let b = first_upper_bound(ymin)?;
            e.emit("first-bound", &b)?;
            Ok(Status::Verdict)
        }
        Command::Bound {
            mode: BoundMode::Table, ..
        } => {
            let t = replay_reduction(&table1()?, None)?;
            for s in &t.steps {
                e.emit("reduction-step", s)?;
            }
            e.emit(
                "summary",
                &json!({ "mode": t.mode, "rows": t.steps.len(), "start": t.start, "end": t.end, "duplicates": t.duplicates() }),
            )?;
            Ok(Status::Verdict)
        }
        Command::Sieve(a) => {
            let hi = if a.full {
                FULL_SIEVE_HI
            } else {
                a.hi.ok_or_else(|| anyhow!("--hi is required"))?
            };
            let mut o = RangeOptions::new(a.lo, hi, a.nmax);
            o.workers = st.workers;
            o.block = a.block;
            o.checkpoint = a.checkpoint.clone();
            o.out = a.out.clone();
            o.stop_after = a.stop_after;
            let s = sieve_range(&o)?;
            let status = if s.complete && s.tally.undecided == 0 && s.tally.survived == 0 {
                Status::Verdict
            } else {
                Status::Undecided
            };
            e.emit("sieve-summary", &s)?;
            Ok(status)
        }
        Command::Gap { q, n, r, s, nprime, y } => {
            let g = gap_lower_bound(q, *n)?;
            e.emit("gap-bound", &g)?;
            if let (Some(r), Some(s)) = (r, s) {
                let ctx = GapContext::new(q, *n, *r, *s, st.digits)?;
                e.emit("gap-context", &ctx)?;
                if let (Some(np), Some(y)) = (nprime, y) {
                    e.emit("technical-bound", &technical_lower_bound(&ctx, *np, y)?)?;
                }
            }
            Ok(Status::Verdict)
        }
        Command::Unique { q } => {
            let rep = uniqueness_decision(q)?;
            let (status, summary) = match &rep.verdict {
                UniquenessVerdict::AtMostOne => (Status::Verdict, "at most one solution".to_string()),
                UniquenessVerdict::ExactlyOne { x, n } => {
                    (Status::Verdict, format!("exactly one solution: (x,n)=({x},{n})"))
                }
                UniquenessVerdict::OutOfRegime => (Status::Undecided, "out of regime (q ≤ 3·10⁹)".to_string()),
                UniquenessVerdict::Undecided { n } => {
                    (Status::Undecided, format!("undecided: the inequality holds at n = {n}"))
                }
            };
            e.emit("uniqueness", &json!({ "summary": summary, "report": rep }))?;
            Ok(status)
        }
        Command::Hypergeom { n1, n2, check, samples } => {
            let pair = build_pair(*n1, *n2)?;
            e.emit("hypergeom-pair", &pair)?;
            if *check {
                let rep = check_properties(&pair, &ZSamples::grid(*samples))?;
                e.emit("hypergeom-properties", &rep)?;
            }
            Ok(Status::Verdict)
        }
        Command::SplitPoly { p, abound } => {
            let digits = cli.digits.map_or_else(|| default_digits(*p), |d| d.max(1));
            let res = split_f(*p, digits)?;
            e.emit("split", &res)?;
            let rep = verify_identities(&res)?;
            e.emit("identities", &rep)?;
            if let Some(a) = abound {
                e.emit("unit-scan", &scan_units(&res, *a))?;
            }
            Ok(Status::Verdict)
        }
        Command::Decide { q, sieve_evidence } => {
            let opts = DecideOptions {
                sieve_evidence: *sieve_evidence,
                ..DecideOptions::default()
            };
            let rep = decide_q(q, &opts)?;
            e.emit("decision", &rep)?;
            Ok(if rep.decision.decided() {
                Status::Verdict
            } else {
                Status::Undecided
            })
        }
        Command::Reproduce { section, all } => {
            let sections = if *all {
                Section::ALL.to_vec()
            } else {
                let id = section.as_deref().context("--section is required")?;
                vec![id.parse::<Section>()?]
            };
            let mut status = Status::Verdict;
            for s in sections {
                let rep = reproduce(s)?;
                if !rep.pass {
                    status = Status::Failed;
                }
                e.emit("reproduction", &rep)?;
            }
            Ok(status)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let st = match settings(&cli) {
        Ok(s) => s,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(Status::Failed.code());
        }
    };
    if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(st.workers).build_global() {
        eprintln!("error: {err}");
        return ExitCode::from(Status::Failed.code());
    }
    let stdout = io::stdout();
    let mut e = Emitter::new(BufWriter::new(stdout.lock()), st.format);
    let status = e
        .header(command_name(&cli.command), st.digits, st.workers)
        .and_then(|_| run(&cli, &st, &mut e))
        .unwrap_or_else(|err| {
            let _ = e.emit("error", &json!({ "message": format!("{err:#}") }));
            eprintln!("error: {err:#}");
            Status::Failed
        });
    let _ = e.flush();
    ExitCode::from(status.code())
}
