//! Elimination of small `y` through continued fractions of `log η / log ε`.
//!
//! For every `y ≡ 1 (mod 10)` the split primes above `y` give `2^(m−1)`
//! numbers `η = π/|π′|` (up to conjugation), normalised so that
//! `1 < η ≤ ε`. A solution with exponent `n` forces `2k/n` to be a convergent
//! of `log η / log ε` of denominator below `10⁵`, and then
//! `4.0402·(A+2)·n > log ε · y^(n/2)` with `A` the largest partial quotient
//! up to the first denominator `≥ 10⁵`. [`sieve_y`] checks that relation;
//! [`range::sieve_range`] runs it over intervals with checkpoints.

pub mod range;

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::primes::{factor_u64, legendre, sqrt_mod_p};
use crate::arith::quad::{ln_epsilon, quad_pow_unit, real_log, QuadInt};
use crate::arith::real::{certify, RealApprox};
use crate::bigjson;
use crate::error::{domain, precondition, Error, Result};
use crate::linf::LAMBDA_NUMERATOR;

/// Working precision for the logarithms.
pub const SIEVE_DIGITS: u32 = 50;
/// Convergent denominators are followed up to the first one at least this large.
pub const Q_LIMIT: u64 = 100_000;
/// Smallest exponent still open after the small-`n` analysis.
pub const N_MIN: u64 = 17;

const MAX_DIGITS: u32 = 400;
const LB_START_DIGITS: u32 = 20;

fn sqrt5(a: BigInt, b: BigInt, denom: u8) -> QuadInt {
    QuadInt::new(5, a, b, denom).expect("valid element of Z[(1+√5)/2]")
}

/// Coordinates `(x, y)` of `α = x + y·ω`, `ω = (1+√5)/2`.
fn omega_coords(alpha: &QuadInt) -> (BigInt, BigInt) {
    let (a, b) = alpha.halves();
    ((&a - &b) / 2, b)
}

fn from_omega(x: &BigInt, y: &BigInt) -> QuadInt {
    sqrt5(x * 2 + y, y.clone(), 2)
}

fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    // Nearest integer to n/d for d > 0.
    let twice: BigInt = n * 2 + d;
    twice.div_floor(&(d * 2))
}

/// Euclidean division with rounding in the `ω`-basis; the ring is
/// norm-Euclidean, so the remainder's norm strictly drops.
fn quad_gcd(mut a: QuadInt, mut b: QuadInt) -> QuadInt {
    while !b.norm().is_zero() {
        let n = b.norm();
        let num = a.mul(&b.conj()).expect("same order");
        let (x, y) = omega_coords(&num);
        let (x, y) = if n.is_negative() { (-x, -y) } else { (x, y) };
        let n = n.abs();
        let q = from_omega(&round_div(&x, &n), &round_div(&y, &n));
        let r = a.sub(&q.mul(&b).expect("same order")).expect("same order");
        a = b;
        b = r;
    }
    a
}

/// An element of norm `±p` for a prime `p ≡ ±1 (mod 5)`.
///
/// The result is `a + b√5` with `a² − 5b² = p` and the least `b > 0`, a
/// canonical choice among the associates of both primes above `p`.
pub fn split_prime(p: u64) -> Result<QuadInt> {
    if p == 5 {
        return Err(domain("5 ramifies in Q(√5)"));
    }
    if p < 3 || !crate::arith::primes::is_prime_u64(p) {
        return Err(domain(format!("{p} is not an odd prime")));
    }
    if legendre(5, p) != 1 {
        return Err(domain(format!("{p} is inert in Q(√5) ({p} ≡ {} mod 5)", p % 5)));
    }
    let r = sqrt_mod_p(5, p).expect("5 is a square modulo p");
    let g = quad_gcd(
        QuadInt::from_int(5, BigInt::from(p))?,
        sqrt5(BigInt::from(r), BigInt::one(), 1),
    );
    if g.norm().abs() != BigInt::from(p) {
        return Err(Error::Consistency(format!("gcd above {p} has norm {}", g.norm())));
    }
    Ok(canonical_associate(g))
}

fn canonical_associate(mut pi: QuadInt) -> QuadInt {
    if pi.norm().is_negative() {
        pi = pi.mul(&QuadInt::epsilon()).expect("same order");
    }
    if pi.real_sign().expect("real field") == Ordering::Less {
        pi = pi.neg();
    }
    let eps2 = quad_pow_unit(2);
    while pi.denom() != 1 {
        pi = pi.mul(&eps2).expect("same order");
    }
    let up = sqrt5(BigInt::from(9), BigInt::from(4), 1);
    let down = up.conj();
    loop {
        let better = [pi.mul(&up).unwrap(), pi.mul(&down).unwrap()]
            .into_iter()
            .find(|c| c.b().abs() < pi.b().abs());
        match better {
            Some(c) => pi = c,
            None => break,
        }
    }
    if pi.b().is_negative() {
        pi.conj()
    } else {
        pi
    }
}

/// Normalised pair `{π, π′}` with `π > 0`, `π·|π′| = y`, `1 < π/|π′| ≤ ε`.
#[derive(Clone, Debug, Serialize)]
pub struct EtaCandidate {
    pub y: u64,
    #[serde(serialize_with = "bigjson::display")]
    pub pi: QuadInt,
    #[serde(serialize_with = "bigjson::display")]
    pub pi_conj_abs: QuadInt,
    /// Exponent `m` of the unit `ε^m` applied before the final choice.
    pub unit_exponent: i64,
    #[serde(serialize_with = "bigjson::real")]
    pub eta_log_ratio: RealApprox,
}

fn abs_quad(a: &QuadInt) -> QuadInt {
    if a.real_sign().expect("real field") == Ordering::Less {
        a.neg()
    } else {
        a.clone()
    }
}

/// `log η / log ε` for `η = π/|π′|`, certified to `digits`.
pub fn eta_log_ratio(pi: &QuadInt, digits: u32) -> Result<RealApprox> {
    let conj_abs = abs_quad(&pi.conj());
    let log_eta = &real_log(pi, digits)? - &real_log(&conj_abs, digits)?;
    log_eta.checked_div(&ln_epsilon(digits)?)
}

/// Unit-adjusts `π` (with `π·|π′| = y`) into the normalised range.
pub fn normalize_pi(pi: &QuadInt, y: u64) -> Result<EtaCandidate> {
    if pi.d() != 5 {
        return Err(domain(format!("{pi} is not in Q(√5)")));
    }
    if pi.norm().abs() != BigInt::from(y) {
        return Err(precondition(format!("|N({pi})| ≠ {y}")));
    }
    if pi.real_sign()? != Ordering::Greater {
        return Err(precondition(format!("π = {pi} must be positive")));
    }
    let yq = QuadInt::from_int(5, BigInt::from(y))?;
    let upper = yq.mul(&QuadInt::epsilon())?;
    let lower = yq.mul(&quad_pow_unit(-1))?;
    // Initial guess from floating logs, then exact correction.
    let digits = 30;
    let ln_eps = ln_epsilon(digits)?;
    let half_ln_y = RealApprox::from_i64(y as i64, digits).ln()?.mul_pow2(-1);
    let t = (&half_ln_y - &real_log(pi, digits)?).checked_div(&ln_eps)?;
    let mut m = t.to_f64().round() as i64;
    let mut pi1 = quad_pow_unit(m).mul(pi)?;
    loop {
        let sq = pi1.pow(2);
        if sq.cmp_real(&upper)? == Ordering::Greater {
            m -= 1;
        } else if sq.cmp_real(&lower)? != Ordering::Greater {
            m += 1;
        } else {
            break;
        }
        pi1 = quad_pow_unit(m).mul(pi)?;
    }
    let conj_abs = abs_quad(&pi1.conj());
    let (pi, conj_abs) = match pi1.cmp_real(&conj_abs)? {
        Ordering::Greater => (pi1, conj_abs),
        Ordering::Less => (conj_abs, pi1),
        Ordering::Equal => return Err(domain(format!("π/|π′| = 1 for y = {y}"))),
    };
    let ratio = eta_log_ratio(&pi, SIEVE_DIGITS)?;
    Ok(EtaCandidate {
        y,
        pi,
        pi_conj_abs: conj_abs,
        unit_exponent: m,
        eta_log_ratio: ratio,
    })
}

/// Outcome of building the `η`'s for `y`.
#[derive(Clone, Debug)]
pub enum EtaEnumeration {
    Candidates(Vec<EtaCandidate>),
    /// `y` has a prime factor that does not split, so no solution exists.
    NonSplit {
        prime: u64,
    },
}

fn check_y(y: u64) -> Result<()> {
    if y < 11 || y % 10 != 1 {
        return Err(precondition(format!("y = {y} must satisfy y ≡ 1 (mod 10), y ≥ 11")));
    }
    Ok(())
}

/// All `2^(m−1)` normalised candidates for `y`, conjugate pairs counted once.
pub fn enumerate_etas(y: u64) -> Result<EtaEnumeration> {
    check_y(y)?;
    let factors = factor_u64(y);
    let mut split = Vec::with_capacity(factors.len());
    for &(p, e) in &factors {
        if p == 5 || legendre(5, p) != 1 {
            return Ok(EtaEnumeration::NonSplit { prime: p });
        }
        split.push((split_prime(p)?, e));
    }
    let m = split.len();
    let mut out = Vec::with_capacity(1 << (m - 1));
    for mask in 0u64..(1 << (m - 1)) {
        let mut pi = QuadInt::one(5)?;
        for (i, (pp, e)) in split.iter().enumerate() {
            let choice = if i > 0 && mask >> (i - 1) & 1 == 1 {
                pp.conj()
            } else {
                pp.clone()
            };
            pi = pi.mul(&choice.pow(*e))?;
        }
        out.push(normalize_pi(&abs_quad(&pi), y)?);
    }
    Ok(EtaEnumeration::Candidates(out))
}

/// Partial quotients and convergents `p_i/q_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    #[serde(serialize_with = "bigjson::ints")]
    pub quotients: Vec<BigInt>,
    #[serde(skip)]
    pub convergents: Vec<(BigInt, BigInt)>,
}

impl ContinuedFraction {
    pub fn a_max(&self) -> BigInt {
        self.quotients.iter().max().cloned().unwrap_or_default()
    }

    pub fn h(&self) -> usize {
        self.quotients.len().saturating_sub(1)
    }

    pub fn last_denominator(&self) -> BigInt {
        self.convergents.last().map(|c| c.1.clone()).unwrap_or_default()
    }
}

/// Expands the number enclosed by `x` until a convergent denominator reaches
/// `q_limit`; `None` if the enclosure is too wide to fix a quotient.
pub fn expand_cf(x: &RealApprox, q_limit: &BigInt) -> Option<ContinuedFraction> {
    let (mut lo, mut hi) = (x.lower(), x.upper());
    let mut quotients = Vec::new();
    let mut convergents: Vec<(BigInt, BigInt)> = Vec::new();
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    loop {
        let a = lo.floor().to_integer();
        if hi.floor().to_integer() != a {
            return None;
        }
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        quotients.push(a.clone());
        convergents.push((p.clone(), q.clone()));
        if &q >= q_limit {
            return Some(ContinuedFraction { quotients, convergents });
        }
        (p2, q2, p1, q1) = (p1, q1, p, q);
        let a_rat = BigRational::from_integer(a);
        let (flo, fhi) = (&lo - &a_rat, &hi - &a_rat);
        if flo.is_zero() {
            return None;
        }
        (lo, hi) = (fhi.recip(), flo.recip());
    }
}

/// Certified expansion of `log η / log ε` for `π`, escalating precision.
pub fn eta_cf(pi: &QuadInt, start_digits: u32) -> Result<(ContinuedFraction, u32)> {
    let limit = BigInt::from(Q_LIMIT);
    certify("continued fraction of log η / log ε", start_digits, MAX_DIGITS, |d| {
        Ok(expand_cf(&eta_log_ratio(pi, d)?, &limit))
    })
}

const LB_CONSTANT_DIGITS: u32 = 200;

/// `log 4.0402 − log log ε`.
fn lb_constant(digits: u32) -> Result<RealApprox> {
    let at = |d: u32| -> Result<RealApprox> {
        Ok(&RealApprox::from_decimal(LAMBDA_NUMERATOR, d).ln()? - &ln_epsilon(d)?.ln()?)
    };
    static CACHE: OnceLock<RealApprox> = OnceLock::new();
    if digits + 2 > LB_CONSTANT_DIGITS {
        return at(digits);
    }
    if let Some(c) = CACHE.get() {
        return Ok(c.with_digits(digits));
    }
    let c = at(LB_CONSTANT_DIGITS)?;
    Ok(CACHE.get_or_init(|| c).with_digits(digits))
}

/// `4.0402·(A+2)·n > log ε · y^(n/2)`, compared through logarithms.
pub fn lb_for_a_holds(a_max: &BigInt, n: u64, y: u64) -> Result<bool> {
    certify("A-inequality", LB_START_DIGITS, MAX_DIGITS, |d| {
        let lhs = &(&lb_constant(d)? + &RealApprox::from_int(&(a_max + 2), d).ln()?)
            + &RealApprox::from_int(&BigInt::from(n), d).ln()?;
        let rhs = RealApprox::from_int(&BigInt::from(y), d)
            .ln()?
            .mul_int(&BigInt::from(n))
            .mul_pow2(-1);
        Ok(lhs.certified_cmp(&rhs).map(|o| o == Ordering::Greater))
    })
    .map(|(v, _)| v)
}

/// Largest `n ∈ [17, n_max]` satisfying the `A`-inequality.
///
/// In `n` the log-difference has derivative `1/n − (log y)/2 < 0`, so the
/// surviving exponents form an initial segment of `[17, n_max]`.
pub fn largest_surviving_n(a_max: &BigInt, y: u64, n_max: u64) -> Result<Option<u64>> {
    if n_max < N_MIN || !lb_for_a_holds(a_max, N_MIN, y)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (N_MIN, n_max);
    if lb_for_a_holds(a_max, hi, y)? {
        return Ok(Some(hi));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if lb_for_a_holds(a_max, mid, y)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// Per-`η` outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaRecord {
    #[serde(serialize_with = "bigjson::display")]
    pub pi: QuadInt,
    #[serde(serialize_with = "bigjson::int")]
    pub a_max: BigInt,
    pub h: usize,
    #[serde(serialize_with = "bigjson::int")]
    pub q_h: BigInt,
    pub surviving_n: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SieveStatus {
    /// A prime factor of `y` is inert.
    NonSplit { prime: u64 },
    /// The `A`-inequality fails for every `η` and every `n ∈ [17, n_max]`.
    Eliminated,
    /// Some `η` admits an exponent in range.
    Survives { max_n: u64 },
    /// Precision ran out before a decision.
    Undecided { detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveVerdict {
    pub y: u64,
    pub factors: Vec<(u64, u32)>,
    #[serde(flatten)]
    pub status: SieveStatus,
    pub etas: Vec<EtaRecord>,
    pub digits: u32,
}

impl SieveVerdict {
    pub fn eliminated(&self) -> bool {
        matches!(self.status, SieveStatus::Eliminated | SieveStatus::NonSplit { .. })
    }

    pub fn max_a(&self) -> Option<&BigInt> {
        self.etas.iter().map(|e| &e.a_max).max()
    }
}

/// Runs the continued-fraction test for one `y ≡ 1 (mod 10)`.
pub fn sieve_y(y: u64, n_max: u64) -> Result<SieveVerdict> {
    check_y(y)?;
    let factors = factor_u64(y);
    let verdict = |status, etas, digits| SieveVerdict {
        y,
        factors: factors.clone(),
        status,
        etas,
        digits,
    };
    let cands = match enumerate_etas(y)? {
        EtaEnumeration::NonSplit { prime } => {
            return Ok(verdict(SieveStatus::NonSplit { prime }, Vec::new(), 0));
        }
        EtaEnumeration::Candidates(c) => c,
    };
    let mut etas = Vec::with_capacity(cands.len());
    let mut digits_used = SIEVE_DIGITS;
    let mut max_n: Option<u64> = None;
    for cand in cands {
        let first = expand_cf(&cand.eta_log_ratio, &BigInt::from(Q_LIMIT));
        let expansion = match first {
            Some(cf) => Ok((cf, SIEVE_DIGITS)),
            None => eta_cf(&cand.pi, 2 * SIEVE_DIGITS),
        };
        let outcome = expansion.and_then(|(cf, d)| {
            let a = cf.a_max();
            largest_surviving_n(&a, y, n_max).map(|s| (cf, d, s))
        });
        let (cf, d, surviving) = match outcome {
            Ok(v) => v,
            Err(Error::PrecisionExhausted { what, digits }) => {
                let detail = format!("{what} undecided at {digits} digits for π = {}", cand.pi);
                return Ok(verdict(SieveStatus::Undecided { detail }, etas, digits));
            }
            Err(e) => return Err(e),
        };
        digits_used = digits_used.max(d);
        if let Some(n) = surviving {
            max_n = Some(max_n.map_or(n, |m| m.max(n)));
        }
        etas.push(EtaRecord {
            pi: cand.pi,
            a_max: cf.a_max(),
            h: cf.h(),
            q_h: cf.last_denominator(),
            surviving_n: surviving,
        });
    }
    let status = match max_n {
        Some(n) => SieveStatus::Survives { max_n: n },
        None => SieveStatus::Eliminated,
    };
    Ok(verdict(status, etas, digits_used))
}

/// The test applied to an arbitrary ratio in place of `log η / log ε`.
pub fn sieve_ratio(ratio: &RealApprox, y: u64, n_max: u64) -> Result<Option<(ContinuedFraction, Option<u64>)>> {
    let Some(cf) = expand_cf(ratio, &BigInt::from(Q_LIMIT)) else {
        return Ok(None);
    };
    let s = largest_surviving_n(&cf.a_max(), y, n_max)?;
    Ok(Some((cf, s)))
}

/// Every `y ≡ 1 (mod 10)` in `[lo, hi]`.
pub fn candidates_in(lo: u64, hi: u64) -> impl Iterator<Item = u64> {
    let first = if lo <= 11 { 11 } else { lo + (11 - lo % 10) % 10 };
    (first..=hi).step_by(10)
}
