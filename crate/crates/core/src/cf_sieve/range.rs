//! Range driver for [`sieve_y`](super::sieve_y) with resumable checkpoints.
//!
//! The range is cut into fixed blocks processed in order; the `y` values of
//! a block are sieved in parallel. After each block its JSONL verdicts are
//! appended to the output file and one line is appended to the checkpoint,
//! both synced to disk. The checkpoint format is
//!
//! ```text
//! # expdio sieve checkpoint v1 lo=<lo> hi=<hi> block=<size> nmax=<n>
//! <start> <end> done candidates=<c> non_split=<s> eliminated=<e> survived=<v> undecided=<u> max_a=<A> max_a_y=<y> flagged=<y,...|->
//! ```

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::{candidates_in, sieve_y, SieveStatus, SieveVerdict};
use crate::bigjson;
use crate::error::{precondition, Error, Result};

const FORMAT_TAG: &str = "# expdio sieve checkpoint v1";

#[derive(Clone, Debug)]
pub struct RangeOptions {
    pub lo: u64,
    pub hi: u64,
    pub n_max: u64,
    pub workers: usize,
    /// Width of a block in `y`.
    pub block: u64,
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Stop after this many new blocks (the run stays resumable).
    pub stop_after: Option<usize>,
}

impl RangeOptions {
    pub fn new(lo: u64, hi: u64, n_max: u64) -> Self {
        RangeOptions {
            lo,
            hi,
            n_max,
            workers: rayon::current_num_threads(),
            block: 100_000,
            checkpoint: None,
            out: None,
            stop_after: None,
        }
    }
}

/// Counts for a block or a whole run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub candidates: u64,
    pub non_split: u64,
    pub eliminated: u64,
    pub survived: u64,
    pub undecided: u64,
    #[serde(serialize_with = "bigjson::int")]
    pub max_a: BigInt,
    pub max_a_y: u64,
    /// `y` values that survived or stayed undecided.
    pub flagged: Vec<u64>,
}

impl Tally {
    fn add_verdict(&mut self, v: &SieveVerdict) {
        self.candidates += 1;
        match v.status {
            SieveStatus::NonSplit { .. } => self.non_split += 1,
            SieveStatus::Eliminated => self.eliminated += 1,
            SieveStatus::Survives { .. } => {
                self.survived += 1;
                self.flagged.push(v.y);
            }
            SieveStatus::Undecided { .. } => {
                self.undecided += 1;
                self.flagged.push(v.y);
            }
        }
        if let Some(a) = v.max_a() {
            if a > &self.max_a {
                self.max_a = a.clone();
                self.max_a_y = v.y;
            }
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.candidates += other.candidates;
        self.non_split += other.non_split;
        self.eliminated += other.eliminated;
        self.survived += other.survived;
        self.undecided += other.undecided;
        if other.max_a > self.max_a {
            self.max_a = other.max_a.clone();
            self.max_a_y = other.max_a_y;
        }
        self.flagged.extend_from_slice(&other.flagged);
    }

    fn to_line(&self) -> String {
        let flagged = if self.flagged.is_empty() {
            "-".to_string()
        } else {
            self.flagged.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        };
        format!(
            "candidates={} non_split={} eliminated={} survived={} undecided={} max_a={} max_a_y={} flagged={}",
            self.candidates,
            self.non_split,
            self.eliminated,
            self.survived,
            self.undecided,
            self.max_a,
            self.max_a_y,
            flagged
        )
    }

    fn parse(fields: &[&str]) -> Option<Tally> {
        let mut t = Tally::default();
        let mut seen = 0;
        for f in fields {
            let (k, v) = f.split_once('=')?;
            seen += 1;
            match k {
                "candidates" => t.candidates = v.parse().ok()?,
                "non_split" => t.non_split = v.parse().ok()?,
                "eliminated" => t.eliminated = v.parse().ok()?,
                "survived" => t.survived = v.parse().ok()?,
                "undecided" => t.undecided = v.parse().ok()?,
                "max_a" => t.max_a = v.parse().ok()?,
                "max_a_y" => t.max_a_y = v.parse().ok()?,
                "flagged" if v == "-" => {}
                "flagged" => {
                    t.flagged = v
                        .split(',')
                        .map(str::parse)
                        .collect::<std::result::Result<_, _>>()
                        .ok()?
                }
                _ => return None,
            }
        }
        let consistent = t.non_split + t.eliminated + t.survived + t.undecided == t.candidates
            && t.flagged.len() as u64 == t.survived + t.undecided;
        (seen == 8 && consistent).then_some(t)
    }
}

/// Result of a (possibly partial) range run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RangeSummary {
    pub lo: u64,
    pub hi: u64,
    pub n_max: u64,
    #[serde(flatten)]
    pub tally: Tally,
    pub blocks_done: usize,
    pub blocks_total: usize,
    pub resumed_blocks: usize,
    pub complete: bool,
}

fn blocks(lo: u64, hi: u64, size: u64) -> Vec<(u64, u64)> {
    if lo > hi {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut s = lo;
    loop {
        let e = s.saturating_add(size - 1).min(hi);
        out.push((s, e));
        if e == hi {
            return out;
        }
        s = e + 1;
    }
}

fn header(o: &RangeOptions) -> String {
    format!(
        "{FORMAT_TAG} lo={} hi={} block={} nmax={}",
        o.lo, o.hi, o.block, o.n_max
    )
}

fn corrupt(path: &Path, msg: impl std::fmt::Display) -> Error {
    Error::Checkpoint(format!("{}: {msg}", path.display()))
}

/// Reads the completed prefix of blocks recorded in `path`.
fn read_checkpoint(path: &Path, o: &RangeOptions, grid: &[(u64, u64)]) -> Result<Vec<Tally>> {
    let text = std::fs::read_to_string(path)?;
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if !text.ends_with('\n') {
        return Err(corrupt(path, "truncated final line"));
    }
    let mut lines = text.lines();
    let head = lines.next().unwrap_or_default();
    if head != header(o) {
        return Err(corrupt(path, format!("header `{head}` does not match `{}`", header(o))));
    }
    let mut done = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some(&(s, e)) = grid.get(i) else {
            return Err(corrupt(path, format!("line {} lies beyond the range", i + 2)));
        };
        let parsed = match fields.as_slice() {
            [a, b, "done", rest @ ..] => {
                let ok = a.parse::<u64>().ok() == Some(s) && b.parse::<u64>().ok() == Some(e);
                if ok {
                    Tally::parse(rest)
                } else {
                    None
                }
            }
            _ => None,
        };
        match parsed {
            Some(t) => done.push(t),
            None => return Err(corrupt(path, format!("malformed line {}: `{line}`", i + 2))),
        }
    }
    Ok(done)
}

/// Keeps only the JSONL records with `y ≤ upto`.
fn trim_output(path: &Path, upto: u64) -> Result<()> {
    if !path.exists() {
        return Ok(());
    }
    let mut kept = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        let Ok(v) = serde_json::from_str::<serde_json::Value>(&line) else {
            continue;
        };
        if v.get("y").and_then(|y| y.as_u64()).is_some_and(|y| y <= upto) {
            kept.push(line);
        }
    }
    let mut f = File::create(path)?;
    for l in kept {
        writeln!(f, "{l}")?;
    }
    f.sync_all()?;
    Ok(())
}

fn sieve_block(s: u64, e: u64, n_max: u64) -> Result<(Tally, Vec<SieveVerdict>)> {
    let ys: Vec<u64> = candidates_in(s, e).collect();
    let verdicts: Vec<SieveVerdict> = ys.into_par_iter().map(|y| sieve_y(y, n_max)).collect::<Result<_>>()?;
    let mut t = Tally::default();
    for v in &verdicts {
        t.add_verdict(v);
    }
    Ok((t, verdicts))
}

/// Sieves every `y ≡ 1 (mod 10)` in `[lo, hi]`, resuming from the checkpoint
/// when one is given and present.
pub fn sieve_range(o: &RangeOptions) -> Result<RangeSummary> {
    if o.lo > o.hi {
        return Err(precondition(format!("empty interval: lo = {} > hi = {}", o.lo, o.hi)));
    }
    if o.block == 0 || o.workers == 0 {
        return Err(precondition("block size and worker count must be positive"));
    }
    let grid = blocks(o.lo, o.hi, o.block);
    let mut tally = Tally::default();
    let mut done = 0usize;
    if let Some(cp) = &o.checkpoint {
        if cp.exists() {
            for t in read_checkpoint(cp, o, &grid)? {
                tally.merge(&t);
                done += 1;
            }
        }
        if done == 0 {
            let mut f = File::create(cp)?;
            writeln!(f, "{}", header(o))?;
            f.sync_all()?;
        }
    }
    let resumed = done;
    if let Some(out) = &o.out {
        if resumed > 0 {
            trim_output(out, grid[resumed - 1].1)?;
        } else {
            File::create(out)?.sync_all()?;
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(o.workers)
        .build()
        .map_err(|e| Error::Consistency(e.to_string()))?;
    for (fresh, &(s, e)) in grid[resumed..].iter().enumerate() {
        if o.stop_after.is_some_and(|k| fresh >= k) {
            break;
        }
        let (t, verdicts) = pool.install(|| sieve_block(s, e, o.n_max))?;
        if let Some(out) = &o.out {
            let mut f = OpenOptions::new().create(true).append(true).open(out)?;
            for v in &verdicts {
                let line = serde_json::to_string(v).map_err(|e| Error::Consistency(e.to_string()))?;
                writeln!(f, "{line}")?;
            }
            f.sync_data()?;
        }
        if let Some(cp) = &o.checkpoint {
            let mut f = OpenOptions::new().append(true).open(cp)?;
            writeln!(f, "{s} {e} done {}", t.to_line())?;
            f.sync_data()?;
        }
        tally.merge(&t);
        done += 1;
    }
    Ok(RangeSummary {
        lo: o.lo,
        hi: o.hi,
        n_max: o.n_max,
        tally,
        blocks_done: done,
        blocks_total: grid.len(),
        resumed_blocks: resumed,
        complete: done == grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(lo: u64, hi: u64) -> RangeOptions {
        let mut o = RangeOptions::new(lo, hi, 22000);
        o.block = 2000;
        o
    }

    #[test]
    fn block_grid() {
        assert_eq!(blocks(11, 30, 10), vec![(11, 20), (21, 30)]);
        assert_eq!(blocks(11, 31, 10), vec![(11, 20), (21, 30), (31, 31)]);
        assert!(blocks(5, 4, 10).is_empty());
    }

    #[test]
    fn small_range_all_eliminated() {
        let s = sieve_range(&opts(11, 20_001)).unwrap();
        assert!(s.complete);
        assert_eq!(s.tally.candidates, 2000);
        assert_eq!(s.tally.undecided + s.tally.survived, 0);
        assert_eq!(s.tally.eliminated + s.tally.non_split, 2000);
    }

    #[test]
    fn empty_range_has_zero_counts() {
        let s = sieve_range(&opts(12, 20)).unwrap();
        assert_eq!(s.tally, Tally::default());
        assert!(sieve_range(&opts(30, 20)).is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut a = opts(11, 6_001);
        a.workers = 1;
        let mut b = opts(11, 6_001);
        b.workers = 4;
        assert_eq!(sieve_range(&a).unwrap(), sieve_range(&b).unwrap());
    }

    #[test]
    fn resume_matches_uninterrupted_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut full = opts(11, 10_001);
        full.out = Some(dir.path().join("full.jsonl"));
        let whole = sieve_range(&full).unwrap();

        let mut part = opts(11, 10_001);
        part.checkpoint = Some(dir.path().join("cp.txt"));
        part.out = Some(dir.path().join("part.jsonl"));
        part.stop_after = Some(2);
        let first = sieve_range(&part).unwrap();
        assert!(!first.complete);
        assert_eq!(first.blocks_done, 2);
        // A block that was written to the output but not checkpointed.
        let mut f = OpenOptions::new()
            .append(true)
            .open(part.out.as_ref().unwrap())
            .unwrap();
        writeln!(f, "{{\"y\":4011,\"status\":\"eliminated\"}}").unwrap();
        part.stop_after = None;
        let second = sieve_range(&part).unwrap();
        assert_eq!(second.resumed_blocks, 2);
        assert!(second.complete);
        assert_eq!(second.tally, whole.tally);
        let a = std::fs::read_to_string(full.out.unwrap()).unwrap();
        let b = std::fs::read_to_string(part.out.unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corrupt_checkpoints_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let cp = dir.path().join("cp.txt");
        let mut o = opts(11, 6_001);
        o.checkpoint = Some(cp.clone());
        o.stop_after = Some(1);
        sieve_range(&o).unwrap();
        let good = std::fs::read_to_string(&cp).unwrap();

        std::fs::write(&cp, good.replace("nmax=22000", "nmax=21000")).unwrap();
        assert!(matches!(sieve_range(&o), Err(Error::Checkpoint(_))));
        std::fs::write(&cp, good.replace("eliminated=", "eliminated=9")).unwrap();
        assert!(matches!(sieve_range(&o), Err(Error::Checkpoint(_))));
        std::fs::write(&cp, good.trim_end()).unwrap();
        assert!(matches!(sieve_range(&o), Err(Error::Checkpoint(_))));
        std::fs::write(&cp, good.replace(" done ", " todo ")).unwrap();
        assert!(matches!(sieve_range(&o), Err(Error::Checkpoint(_))));
        std::fs::write(&cp, &good).unwrap();
        assert!(sieve_range(&o).is_ok());
    }
}
