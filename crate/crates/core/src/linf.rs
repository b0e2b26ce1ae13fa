//! The linear form `Λ = 2k·log ε − n·log(|π′|/π)` and the bounds built on it.
//!
//! [`corollary2_test`] evaluates the explicit two-logarithm inequality whose
//! failure bounds `n`; [`first_upper_bound`] turns it into a certified bound
//! valid for every `y ≥ y_min`. [`replay_reduction`] walks the parameter
//! schedule of the refined two-logarithm estimate, either checking its shape
//! only or delegating each row to a [`BoundFunctional`].

use std::cmp::Ordering;
use std::io::Read;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::quad::{ln_epsilon, quad_pow_unit, real_log, QuadInt};
use crate::arith::real::{certify, parse_decimal, RealApprox};
use crate::bigjson;
use crate::error::{domain, precondition, Error, Result};

/// Numerator of the bound `|Λ| < 4.0402 / y^(n/2)`.
pub const LAMBDA_NUMERATOR: &str = "4.0402";
/// Additive constant of `log|Λ| < −(n/2)·log y + 1.3963`.
pub const LOG_LAMBDA_CONSTANT: &str = "1.3963";
/// Leading constant of the two-logarithm lower bound.
pub const COR2_FACTOR: &str = "78.8";
/// Shift inside the squared logarithm.
pub const COR2_SHIFT: &str = "0.38";
/// Smallest `n` for which the two-logarithm lower bound is stated.
pub const COR2_REGIME_N: u64 = 15100;

const START_DIGITS: u32 = 30;
const MAX_DIGITS: u32 = 1600;
const SCAN_CHUNK: u64 = 1024;

fn dec(lit: &str, digits: u32) -> RealApprox {
    RealApprox::from_decimal(lit, digits)
}

fn ordering_to_option(o: Option<Ordering>) -> Option<bool> {
    match o {
        Some(Ordering::Greater) => Some(true),
        Some(Ordering::Less) => Some(false),
        _ => None,
    }
}

/// Quantities of the two-logarithm inequality that depend on `y` only.
struct YTerms {
    digits: u32,
    ln_y: RealApprox,
    big_l: RealApprox,
    /// `log((L+1)/L) + 0.38`.
    shift: RealApprox,
    factor: RealApprox,
    constant: RealApprox,
}

impl YTerms {
    fn new(y: &BigInt, digits: u32) -> Result<Self> {
        let ln_y = RealApprox::from_int(y, digits).ln()?;
        let big_l = &ln_y + &ln_epsilon(digits)?;
        let one = RealApprox::from_i64(1, digits);
        let ratio = (&big_l + &one).checked_div(&big_l)?;
        let shift = &ratio.ln()? + &dec(COR2_SHIFT, digits);
        Ok(YTerms {
            digits,
            ln_y,
            big_l,
            shift,
            factor: dec(COR2_FACTOR, digits),
            constant: dec(LOG_LAMBDA_CONSTANT, digits),
        })
    }

    /// `S(n) = log n + log((L+1)/L) + 0.38`.
    fn s(&self, n: u64) -> Result<RealApprox> {
        let ln_n = RealApprox::from_int(&BigInt::from(n), self.digits).ln()?;
        Ok(&ln_n + &self.shift)
    }

    /// `78.8·S²·L − (n/2)·log y + 1.3963`.
    fn value(&self, n: u64) -> Result<RealApprox> {
        let s = self.s(n)?;
        let lead = &(&self.factor * &s.square()) * &self.big_l;
        let half_n = self.ln_y.mul_int(&BigInt::from(n)).mul_pow2(-1);
        Ok(&(&lead - &half_n) + &self.constant)
    }

    /// `78.8·S² − n/2`, the slope in `log y` of the majorant with `S` frozen.
    fn slope(&self, n: u64) -> Result<RealApprox> {
        let s = self.s(n)?;
        let half_n = RealApprox::from_int(&BigInt::from(n), self.digits).mul_pow2(-1);
        Ok(&(&self.factor * &s.square()) - &half_n)
    }
}

/// The left-hand side of the two-logarithm inequality at `(n, y)`.
pub fn corollary2_value(n: u64, y: &BigInt, digits: u32) -> Result<RealApprox> {
    check_cor2_args(n, y)?;
    YTerms::new(y, digits)?.value(n)
}

fn check_cor2_args(n: u64, y: &BigInt) -> Result<()> {
    if n < 2 {
        return Err(precondition(format!("n = {n} must be at least 2")));
    }
    if y < &BigInt::from(11) {
        return Err(precondition(format!("y = {y} must be at least 11")));
    }
    Ok(())
}

/// Whether the two-logarithm inequality holds at `(n, y)`.
///
/// The inequality is only a consequence of a genuine solution for
/// `n ≥ COR2_REGIME_N`; below that it is still evaluated.
pub fn corollary2_test(n: u64, y: &BigInt) -> Result<bool> {
    check_cor2_args(n, y)?;
    let (holds, _) = certify("two-logarithm inequality", START_DIGITS, MAX_DIGITS, |d| {
        Ok(ordering_to_option(YTerms::new(y, d)?.value(n)?.sign()))
    })?;
    Ok(holds)
}

/// Sign of the inequality along `n = lo, lo+step, … ≤ hi` for a fixed `y`.
pub fn scan_corollary2(y: &BigInt, lo: u64, hi: u64, step: u64) -> Result<Vec<(u64, bool)>> {
    if step == 0 {
        return Err(precondition("scan step must be positive"));
    }
    let ns: Vec<u64> = (lo..=hi).step_by(step as usize).collect();
    ns.into_par_iter()
        .map(|n| corollary2_test(n, y).map(|h| (n, h)))
        .collect()
}

/// Per-`n` verdict of the dominance check at `y_min`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dominance {
    /// The inequality fails for every `y ≥ y_min`.
    Fails,
    /// The inequality holds at `y = y_min`.
    Holds,
    /// Fails at `y_min`, but the majorant is not decreasing in `y`.
    Inconclusive,
}

fn dominance_at(terms: &YTerms, n: u64) -> Result<Option<Dominance>> {
    let value = terms.value(n)?;
    match value.sign() {
        Some(Ordering::Greater) => return Ok(Some(Dominance::Holds)),
        Some(Ordering::Less) => {}
        _ => return Ok(None),
    }
    Ok(match terms.slope(n)?.sign() {
        Some(Ordering::Less) => Some(Dominance::Fails),
        Some(_) => Some(Dominance::Inconclusive),
        None => None,
    })
}

/// Decides the dominance check at `(n, y_min)`.
///
/// For `y ≥ y_min` the inequality's left side is at most
/// `78.8·S(n, y_min)²·L − (n/2)·log y + 1.3963`, which is affine in `log y`;
/// a negative slope and a negative value at `y_min` therefore rule out
/// every larger `y`.
pub fn dominance(n: u64, y_min: &BigInt) -> Result<Dominance> {
    check_cor2_args(n, y_min)?;
    certify("dominance check", START_DIGITS, MAX_DIGITS, |d| {
        dominance_at(&YTerms::new(y_min, d)?, n)
    })
    .map(|(v, _)| v)
}

/// Certified first upper bound for `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FirstBound {
    #[serde(serialize_with = "bigjson::int")]
    pub y_min: BigInt,
    /// Every `n ≥ n_star` fails the inequality for every `y ≥ y_min`.
    pub n_star: u64,
    /// Verdict at `n_star − 1` (absent when `n_star = 2`).
    pub witness: Option<Dominance>,
    /// From here on both the value at `y_min` and the slope decrease in `n`.
    pub tail_from: u64,
    /// Whether `n_star` lies in the regime where the inequality is derived.
    pub in_regime: bool,
}

/// Smallest `n₀` such that the inequality fails for all `n ≥ n₀`, `y ≥ y_min`.
///
/// Above `tail_from` the value at `y_min` and the slope are decreasing in
/// `n` (both derivatives have the form `c·S(n)/n − const`), so one check
/// there covers the tail; below it every `n` is checked individually,
/// scanning downwards until the first `n` that is not ruled out.
pub fn first_upper_bound(y_min: &BigInt) -> Result<FirstBound> {
    check_cor2_args(2, y_min)?;
    let tail_from = tail_start(y_min)?;
    let mut hi = tail_from;
    while hi > 2 {
        let lo = hi.saturating_sub(SCAN_CHUNK).max(2);
        let verdicts: Vec<(u64, Dominance)> = (lo..hi)
            .into_par_iter()
            .map(|n| dominance(n, y_min).map(|v| (n, v)))
            .collect::<Result<_>>()?;
        if let Some(&(n, v)) = verdicts.iter().rev().find(|(_, v)| *v != Dominance::Fails) {
            return Ok(FirstBound {
                y_min: y_min.clone(),
                n_star: n + 1,
                witness: Some(v),
                tail_from,
                in_regime: n + 1 >= COR2_REGIME_N,
            });
        }
        hi = lo;
    }
    Ok(FirstBound {
        y_min: y_min.clone(),
        n_star: 2,
        witness: None,
        tail_from,
        in_regime: false,
    })
}

/// First `N ≥ a` (found by doubling) with `N > a·S(N)`, where
/// `a = 315.2·L/log y`, and with the check at `N` already failing.
fn tail_start(y_min: &BigInt) -> Result<u64> {
    let (a, _) = certify("tail constant", START_DIGITS, MAX_DIGITS, |d| {
        let t = YTerms::new(y_min, d)?;
        let a = (&dec("315.2", d) * &t.big_l).checked_div(&t.ln_y)?;
        Ok(Some(a.upper().ceil().to_integer().to_u64().unwrap_or(u64::MAX)))
    })?;
    let mut n = a.max(4);
    loop {
        let ok = certify("tail condition", START_DIGITS, MAX_DIGITS, |d| {
            let t = YTerms::new(y_min, d)?;
            let a_real = &(&dec("315.2", d) * &t.big_l).checked_div(&t.ln_y)? * &t.s(n)?;
            let n_real = RealApprox::from_int(&BigInt::from(n), d);
            Ok(n_real.certified_cmp(&a_real).map(|o| o == Ordering::Greater))
        })?
        .0;
        if ok && dominance(n, y_min)? == Dominance::Fails {
            return Ok(n);
        }
        n = n
            .checked_mul(2)
            .ok_or_else(|| Error::Consistency("tail search overflow".into()))?;
    }
}

/// `Λ` built from a solution `5x² − 4 = yⁿ` and an element `π` with
/// `π·|π′| = y`.
#[derive(Clone, Debug)]
pub struct LinearFormInstance {
    /// Unit exponent in `2 + xθ = σ·ε^k·πⁿ`.
    pub k: i64,
    pub n: u32,
    pub sigma: i8,
    /// `x` with the sign for which `πⁿ` divides `2 + xθ`.
    pub x: BigInt,
    pub y: BigInt,
    /// Numerator and denominator of `η = π/|π′|`.
    pub eta: (QuadInt, QuadInt),
    pub lambda_value: RealApprox,
    pub height_eta: RealApprox,
    pub digits: u32,
}

impl LinearFormInstance {
    /// Recovers `σ`, `k` from `2 + xθ = σ·ε^k·πⁿ`, choosing the sign of `x`.
    pub fn from_solution(x: &BigInt, n: u32, pi: &QuadInt, digits: u32) -> Result<Self> {
        if pi.d() != 5 {
            return Err(domain(format!("{pi} is not in Q(√5)")));
        }
        if pi.real_sign()? != Ordering::Greater {
            return Err(domain(format!("π = {pi} must be positive")));
        }
        if n == 0 {
            return Err(precondition("n must be positive"));
        }
        let y = pi.norm().abs();
        let lhs = BigInt::from(5) * x * x - 4;
        if lhs != y.pow(n) {
            return Err(domain(format!("5x² − 4 ≠ yⁿ for x = {x}, y = {y}, n = {n}")));
        }
        let pin = pi.pow(n);
        for xs in [x.clone(), -x] {
            let alpha = QuadInt::new(5, BigInt::from(2), xs.clone(), 1)?;
            let Some(unit) = alpha.div_exact(&pin)? else { continue };
            if unit.norm().abs() != BigInt::one() {
                continue;
            }
            let sigma: i8 = if unit.real_sign()? == Ordering::Greater { 1 } else { -1 };
            let abs_unit = if sigma > 0 { unit.clone() } else { unit.neg() };
            let (k, _) = certify("unit exponent", digits, MAX_DIGITS, |d| {
                let ratio = real_log(&abs_unit, d)?.checked_div(&ln_epsilon(d)?)?;
                Ok(ratio.unique_integer())
            })?;
            let k = k.to_i64().ok_or_else(|| domain("unit exponent out of range"))?;
            let mut rebuilt = quad_pow_unit(k);
            if sigma < 0 {
                rebuilt = rebuilt.neg();
            }
            if rebuilt != unit {
                return Err(Error::Consistency(format!("unit {unit} is not ±ε^{k}")));
            }
            let conj = pi.conj();
            let conj_abs = if conj.real_sign()? == Ordering::Less {
                conj.neg()
            } else {
                conj
            };
            let eta = (pi.clone(), conj_abs);
            let lambda_value = lambda(k, n, &eta, digits)?;
            let height_eta = height(&eta, &y, digits)?;
            return Ok(LinearFormInstance {
                k,
                n,
                sigma,
                x: xs,
                y,
                eta,
                lambda_value,
                height_eta,
                digits,
            });
        }
        Err(domain(format!(
            "2 + x√5 is not associated with ({pi})^{n} for either sign of x"
        )))
    }

    /// `Λ` recomputed at `digits`.
    pub fn lambda_at(&self, digits: u32) -> Result<RealApprox> {
        lambda(self.k, self.n, &self.eta, digits)
    }

    /// `|e^Λ − 1| − 4/|xθ − 2|` at `digits`; zero up to the enclosure width.
    pub fn exp_identity_residual(&self, digits: u32) -> Result<RealApprox> {
        let lam = self.lambda_at(digits)?;
        let one = RealApprox::from_i64(1, digits);
        let lhs = (&lam.exp()? - &one).abs();
        let root5 = RealApprox::from_i64(5, digits).sqrt()?;
        let denom = &(&RealApprox::from_int(&self.x, digits) * &root5) - &RealApprox::from_i64(2, digits);
        let rhs = RealApprox::from_i64(4, digits).checked_div(&denom.abs())?;
        Ok(&lhs - &rhs)
    }

    /// `0 < |Λ| < 4.0402 / y^(n/2)`, certified.
    pub fn satisfies_upper_bound(&self) -> Result<bool> {
        let extra = (self.y.bits() as f64 * self.n as f64 * 0.1505).ceil() as u32;
        certify("upper bound for |Λ|", self.digits + extra, MAX_DIGITS, |d| {
            let lam = self.lambda_at(d)?.abs();
            if lam.sign() != Some(Ordering::Greater) {
                return Ok(if lam.sign().is_some() { Some(false) } else { None });
            }
            let root_y = RealApprox::from_int(&self.y, d).sqrt()?;
            let scaled = &lam * &root_y.powi(self.n);
            Ok(scaled
                .certified_cmp(&dec(LAMBDA_NUMERATOR, d))
                .map(|o| o == Ordering::Less))
        })
        .map(|(v, _)| v)
    }

    /// `|k| ≤ n/2`.
    pub fn k_within_half_n(&self) -> bool {
        2 * self.k.unsigned_abs() <= self.n as u64
    }

    /// `h(η) < (log y + log ε)/2`, certified.
    pub fn height_below_bound(&self) -> Result<bool> {
        certify("height bound", self.digits, MAX_DIGITS, |d| {
            let h = height(&self.eta, &self.y, d)?;
            let bound = (&RealApprox::from_int(&self.y, d).ln()? + &ln_epsilon(d)?).mul_pow2(-1);
            Ok(h.certified_cmp(&bound).map(|o| o == Ordering::Less))
        })
        .map(|(v, _)| v)
    }
}

fn lambda(k: i64, n: u32, eta: &(QuadInt, QuadInt), digits: u32) -> Result<RealApprox> {
    let two_k = ln_epsilon(digits)?.mul_int(&BigInt::from(2 * k));
    let log_eta = &real_log(&eta.0, digits)? - &real_log(&eta.1, digits)?;
    Ok(&two_k + &log_eta.mul_int(&BigInt::from(n)))
}

/// Absolute logarithmic height of `η`, a root of
/// `yX² − (π² + π′²)X + y` divided by its content.
fn height(eta: &(QuadInt, QuadInt), y: &BigInt, digits: u32) -> Result<RealApprox> {
    let middle = eta.0.pow(2).trace();
    let g = y.gcd(&middle);
    let lead = RealApprox::from_int(&(y / &g), digits).ln()?;
    let log_eta = (&real_log(&eta.0, digits)? - &real_log(&eta.1, digits)?).abs();
    Ok((&lead + &log_eta).mul_pow2(-1))
}

/// One row of the parameter schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRow {
    /// Decimal literal, kept verbatim.
    pub rho: String,
    pub mu: String,
    pub r1: u64,
    pub s1: u64,
    pub r2: u64,
    pub s2: u64,
    pub start_ub: u64,
    pub reduced_ub: u64,
}

impl ReductionRow {
    pub fn rho_value(&self) -> BigRational {
        parse_decimal(&self.rho)
    }

    pub fn mu_value(&self) -> BigRational {
        parse_decimal(&self.mu)
    }

    /// `L = R₁S₁`.
    pub fn l(&self) -> u64 {
        self.r1 * self.s1
    }

    /// `K = max(⌈(R₂S₂ − 1)/(R₁S₁)⌉, 2)`.
    pub fn k(&self) -> u64 {
        (self.r2 * self.s2 - 1).div_ceil(self.l()).max(2)
    }
}

/// Parses a schedule from CSV with header
/// `rho,mu,r1,s1,r2,s2,start_ub,reduced_ub`.
pub fn parse_table(reader: impl Read) -> Result<Vec<ReductionRow>> {
    let mut rows = Vec::new();
    for rec in csv::Reader::from_reader(reader).deserialize() {
        let row: ReductionRow = rec.map_err(|e| Error::Parse(e.to_string()))?;
        parse_decimal_checked(&row.rho)?;
        parse_decimal_checked(&row.mu)?;
        if row.r1 == 0 || row.s1 == 0 || row.r2 == 0 || row.s2 == 0 {
            return Err(Error::Parse(format!("zero parameter in row {row:?}")));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn parse_decimal_checked(lit: &str) -> Result<()> {
    let ok = !lit.is_empty()
        && lit.chars().filter(|&c| c == '.').count() <= 1
        && lit.chars().all(|c| c.is_ascii_digit() || c == '.');
    if ok {
        Ok(())
    } else {
        Err(Error::Parse(format!("bad decimal literal `{lit}`")))
    }
}

/// The bundled schedule, rows in the published order.
pub fn table1() -> Result<Vec<ReductionRow>> {
    parse_table(include_str!("../resources/table1.csv").as_bytes())
}

/// Lower bound for `|Λ|` turned into a new upper bound for `n`.
pub trait BoundFunctional: Sync {
    fn name(&self) -> &str;
    /// New upper bound for `n` from the row's parameters, given the current one.
    fn reduced_bound(&self, row: &ReductionRow, start_ub: u64) -> Result<u64>;
}

/// How a schedule was replayed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ReplayMode {
    ShapeOnly { reason: String },
    Functional { name: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayStep {
    /// 1-based row number.
    pub row: usize,
    pub start_ub: u64,
    pub reduced_ub: u64,
    pub k: u64,
    pub l: u64,
    /// Earlier row this one repeats verbatim.
    pub duplicate_of: Option<usize>,
    pub functional_ub: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    #[serde(flatten)]
    pub mode: ReplayMode,
    pub steps: Vec<ReplayStep>,
    pub start: u64,
    pub end: u64,
}

impl Trajectory {
    pub fn duplicates(&self) -> Vec<(usize, usize)> {
        self.steps
            .iter()
            .filter_map(|s| s.duplicate_of.map(|d| (d, s.row)))
            .collect()
    }
}

/// Walks the schedule, checking that each row lowers the bound and starts
/// where the previous one ended (a verbatim repeat restarts from its
/// original). With a functional, each row's bound must be reproduced.
pub fn replay_reduction(rows: &[ReductionRow], functional: Option<&dyn BoundFunctional>) -> Result<Trajectory> {
    let (first, last) = match (rows.first(), rows.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(precondition("empty schedule")),
    };
    let mut steps = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let number = i + 1;
        if row.reduced_ub >= row.start_ub {
            return Err(Error::Violation(format!(
                "row {number}: reduced bound {} is not below {}",
                row.reduced_ub, row.start_ub
            )));
        }
        let duplicate_of = rows[..i].iter().position(|r| r == row).map(|j| j + 1);
        if i > 0 && duplicate_of.is_none() && row.start_ub != rows[i - 1].reduced_ub {
            return Err(Error::Violation(format!(
                "row {number} starts at {} but the previous row ended at {}",
                row.start_ub,
                rows[i - 1].reduced_ub
            )));
        }
        let functional_ub = match functional {
            Some(f) => {
                let ub = f.reduced_bound(row, row.start_ub)?;
                if ub > row.reduced_ub {
                    return Err(Error::Violation(format!(
                        "row {number}: {} gives {ub}, table claims {}",
                        f.name(),
                        row.reduced_ub
                    )));
                }
                Some(ub)
            }
            None => None,
        };
        steps.push(ReplayStep {
            row: number,
            start_ub: row.start_ub,
            reduced_ub: row.reduced_ub,
            k: row.k(),
            l: row.l(),
            duplicate_of,
            functional_ub,
        });
    }
    let mode = match functional {
        Some(f) => ReplayMode::Functional {
            name: f.name().to_string(),
        },
        None => ReplayMode::ShapeOnly {
            reason: "no bound functional supplied; shape checked only".to_string(),
        },
    };
    Ok(Trajectory {
        mode,
        steps,
        start: first.start_ub,
        end: last.reduced_ub,
    })
}
