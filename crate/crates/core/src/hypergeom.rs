//! Hypergeometric polynomials and the gap argument for `5x² = qⁿ + 4`.
//!
//! [`build_pair`] produces the exact polynomials `G = F(−n₂−½, −n₁, −m, z)` and
//! `H = F(−n₁+½, −n₂, −m, z)`, and [`check_properties`] verifies their
//! approximation properties exactly on rational sample points. The gap between
//! two solutions comes from [`gap_lower_bound`]; [`technical_lower_bound`]
//! evaluates the hypergeometric lower bound for `|y√5/N^(1/2) − 1|`, and
//! [`uniqueness_decision`] runs the final inequality over every odd `n < 820`.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::binomial;
use crate::arith::poly::RatPoly;
use crate::arith::primes::{exact_sqrt, is_prime, Primality};
use crate::arith::quad::{ln_epsilon, QuadInt};
use crate::arith::real::{certify, RealApprox};
use crate::bigjson;
use crate::error::{domain, precondition, Error, Result};
use crate::solutions::N_UPPER;

/// `q` above which the uniqueness inequality is the deciding argument.
pub const REGIME_Q: u64 = 3_000_000_000;
/// Constant of the final inequality's right-hand side.
pub const UNIQUE_RHS_FACTOR: &str = "0.12";
/// Slope constant of the final inequality's left-hand side.
pub const UNIQUE_LHS_SLOPE: &str = "6.127";
/// Base of `ν`: `q^(nν) = 2.007·(4.03·qⁿ)^(r/s)`.
pub const NU_BASE: &str = "2.007";
/// Scale inside the power of `ν`.
pub const NU_SCALE: &str = "4.03";
/// Constant of the hypergeometric lower bound.
pub const LEMMA_CONSTANT: &str = "0.27";
/// Lower limit on `qⁿ` for the hypergeometric lower bound.
pub const LEMMA_MIN_QN: u64 = 600;

const START_DIGITS: u32 = 30;
const MAX_DIGITS: u32 = 3200;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int_rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Terminating `F(α, −k, γ, z)`, built by the ratio of consecutive terms.
fn terminating_series(alpha: &BigRational, k: u64, gamma: &BigRational) -> RatPoly {
    let beta = -int_rat(k);
    let mut coeffs = vec![BigRational::one()];
    for j in 0..k {
        let j_r = int_rat(j);
        let prev = coeffs.last().unwrap().clone();
        let num = (alpha + &j_r) * (&beta + &j_r);
        let den = (gamma + &j_r) * (&j_r + BigRational::one());
        coeffs.push(prev * num / den);
    }
    RatPoly::new(coeffs)
}

/// `G` and `H` for `0 < n₁ < n₂`, with `m = n₁ + n₂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypergeomPair {
    pub n1: u64,
    pub n2: u64,
    pub m: u64,
    #[serde(serialize_with = "rat_poly")]
    pub g: RatPoly,
    #[serde(serialize_with = "rat_poly")]
    pub h: RatPoly,
}

fn rat_poly<S: serde::Serializer>(p: &RatPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    rat_list(p.coeffs(), s)
}

/// Builds `G(z) = F(−n₂−½, −n₁, −m, z)` and `H(z) = F(−n₁+½, −n₂, −m, z)`.
pub fn build_pair(n1: u64, n2: u64) -> Result<HypergeomPair> {
    if n1 == 0 || n1 >= n2 {
        return Err(precondition(format!("need 0 < n1 < n2, got ({n1}, {n2})")));
    }
    let m = n1 + n2;
    let gamma = -int_rat(m);
    let half = rat(1, 2);
    let g = terminating_series(&(-int_rat(n2) - &half), n1, &gamma);
    let h = terminating_series(&(-int_rat(n1) + &half), n2, &gamma);
    Ok(HypergeomPair { n1, n2, m, g, h })
}

impl HypergeomPair {
    /// `C(m, n₁)·P(4z)` as an exact rational polynomial.
    pub fn scaled(&self, p: &RatPoly) -> RatPoly {
        let c = BigRational::from_integer(binomial(self.m, self.n1));
        p.compose_scale(&int_rat(4)).scale(&c)
    }

    /// `true` when every coefficient of `G` has the sign of `(−1)^k`, so that
    /// `G(z) > 0` for all real `z < 0`.
    pub fn positive_on_negatives(&self) -> bool {
        self.g.coeffs().iter().enumerate().all(|(k, c)| {
            let want = if k % 2 == 0 { Sign::Plus } else { Sign::Minus };
            c.numer().sign() == want
        })
    }

    /// `G*·H − G·H*`, where the starred pair is built from `(n₁+1, n₂+1)`.
    pub fn wronskian(&self) -> Result<RatPoly> {
        let next = build_pair(self.n1 + 1, self.n2 + 1)?;
        Ok(&(&next.g * &self.h) - &(&self.g * &next.h))
    }
}

/// A Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    /// The point of modulus `|r|` at angle parameter `t`:
    /// `r·((1 − t²) + 2t·i)/(1 + t²)`.
    pub fn on_circle(r: &BigRational, t: &BigRational) -> Self {
        let t2 = t * t;
        let d = BigRational::one() + &t2;
        GaussRational {
            re: r * (BigRational::one() - &t2) / &d,
            im: r * (t * int_rat(2)) / &d,
        }
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

fn eval_complex(p: &RatPoly, z: &GaussRational) -> GaussRational {
    let (mut re, mut im) = (BigRational::zero(), BigRational::zero());
    for c in p.coeffs().iter().rev() {
        let nr = &re * &z.re - &im * &z.im + c;
        let ni = &re * &z.im + &im * &z.re;
        (re, im) = (nr, ni);
    }
    GaussRational { re, im }
}

/// Compares `t = ±√t_sq` (sign `neg`) with a rational `v`.
fn cmp_signed_sqrt(t_sq: &BigRational, neg: bool, v: &BigRational) -> Ordering {
    if t_sq.is_zero() {
        return BigRational::zero().cmp(v);
    }
    let v_sq = v * v;
    if neg {
        if !v.is_negative() {
            Ordering::Less
        } else {
            v_sq.cmp(t_sq)
        }
    } else if !v.is_positive() {
        Ordering::Greater
    } else {
        t_sq.cmp(&v_sq)
    }
}

/// Sample points for the analytic properties.
#[derive(Clone, Debug)]
pub struct ZSamples {
    /// Real points in `(−1, 1) \ {0}`.
    pub approximation: Vec<BigRational>,
    /// Real points in `(0, 1)`.
    pub monotone: Vec<BigRational>,
    /// Complex points on circles of non-zero rational radius; at `z = 0` the
    /// growth bound is an equality.
    pub growth: Vec<(BigRational, GaussRational)>,
}

impl ZSamples {
    /// `count` deterministic points for each property.
    pub fn grid(count: usize) -> Self {
        let c = count as i64;
        let approximation = (0..c)
            .map(|i| {
                let k = 2 * i + 1 - c;
                if k == 0 {
                    BigRational::new(BigInt::one(), BigInt::one() << 40)
                } else {
                    rat(k, c + 1)
                }
            })
            .collect();
        let monotone = (0..c).map(|i| rat(i + 1, c + 1)).collect();
        let growth = (0..c)
            .map(|i| {
                let r = rat(i % 20 + 1, 4);
                let t = rat(i / 20 - c / 40, 4);
                let z = GaussRational::on_circle(&r, &t);
                (r, z)
            })
            .collect();
        ZSamples {
            approximation,
            monotone,
            growth,
        }
    }
}

/// Outcome of [`check_properties`]; produced only when every check passed.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub n1: u64,
    pub n2: u64,
    pub m: u64,
    #[serde(serialize_with = "rat_list")]
    pub g: Vec<BigRational>,
    #[serde(serialize_with = "rat_list")]
    pub h: Vec<BigRational>,
    /// `c` in `G*H − GH* = c·z^(m+1)`.
    #[serde(serialize_with = "bigjson::display")]
    pub wronskian_constant: BigRational,
    #[serde(serialize_with = "bigjson::display")]
    pub g_at_one: BigRational,
    pub approximation_samples: usize,
    pub monotone_samples: usize,
    pub growth_samples: usize,
}

fn rat_list<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

fn violated(pair: &HypergeomPair, what: impl Into<String>) -> Error {
    Error::Violation(format!("(n1, n2) = ({}, {}): {}", pair.n1, pair.n2, what.into()))
}

/// `|G(z) − (1−z)^(1/2)·H(z)| < G(1)·|z|^(m+1)`, decided exactly.
fn check_approximation(pair: &HypergeomPair, g1: &BigRational, z: &BigRational) -> Result<()> {
    let one = BigRational::one();
    if z.is_zero() || z.abs() >= one {
        return Err(precondition(format!(
            "approximation sample {z} outside (−1, 1) \\ {{0}}"
        )));
    }
    let gz = pair.g.eval(z);
    let hz = pair.h.eval(z);
    let radius = g1 * z.abs().pow((pair.m + 1) as i32);
    let t_sq = (&one - z) * &hz * &hz;
    let neg = hz.is_negative();
    let above = cmp_signed_sqrt(&t_sq, neg, &(&gz - &radius)) == Ordering::Greater;
    let below = cmp_signed_sqrt(&t_sq, neg, &(&gz + &radius)) == Ordering::Less;
    if above && below {
        Ok(())
    } else {
        Err(violated(
            pair,
            format!("|G − (1−z)^(1/2)·H| ≥ G(1)|z|^(m+1) at z = {z}"),
        ))
    }
}

/// Verifies the five properties of `G, H` exactly.
///
/// Degrees, integrality of `C(m, n₁)·G(4z)` and `C(m, n₁)·H(4z)`, positivity
/// on `z < 0` and the shape of `G*H − GH*` are polynomial identities. The
/// approximation bound, monotonicity on `(0, 1)` and the growth bound are
/// decided with exact rational arithmetic at every sample point.
pub fn check_properties(pair: &HypergeomPair, samples: &ZSamples) -> Result<PropertyReport> {
    if pair.g.degree() != Some(pair.n1 as usize) || pair.h.degree() != Some(pair.n2 as usize) {
        return Err(violated(pair, "degrees differ from (n1, n2)"));
    }
    if pair.scaled(&pair.g).to_int().is_none() || pair.scaled(&pair.h).to_int().is_none() {
        return Err(violated(pair, "C(m, n1)·G(4z) or C(m, n1)·H(4z) is not integral"));
    }
    if !pair.positive_on_negatives() {
        return Err(violated(pair, "G has a coefficient of the wrong sign"));
    }

    let w = pair.wronskian()?;
    let top = (pair.m + 1) as usize;
    if w.order() != Some(top) || w.degree() != Some(top) {
        return Err(violated(
            pair,
            format!("G*H − GH* = {w} is not a monomial of degree m+1"),
        ));
    }
    let wronskian_constant = w.coeff(top);

    let one = BigRational::one();
    let g1 = pair.g.eval(&one);
    if !g1.is_positive() {
        return Err(violated(pair, "G(1) ≤ 0"));
    }
    if pair.g.eval(&BigRational::zero()) != one {
        return Err(violated(pair, "G(0) ≠ 1"));
    }

    for z in &samples.approximation {
        check_approximation(pair, &g1, z)?;
    }

    for z in &samples.monotone {
        if !z.is_positive() || z >= &one {
            return Err(precondition(format!("monotone sample {z} outside (0, 1)")));
        }
        let gz = pair.g.eval(z);
        if !(g1 < gz && gz < one) {
            return Err(violated(pair, format!("G(1) < G(z) < G(0) fails at z = {z}")));
        }
    }

    for (r, z) in &samples.growth {
        if r.is_zero() || z.norm_sq() != r * r {
            return Err(precondition(format!("growth sample must satisfy |z| = {r} > 0")));
        }
        let bound = (&one + r.abs() / int_rat(2)).pow((pair.n2 + 1) as i32);
        if eval_complex(&pair.g, z).norm_sq() >= &bound * &bound {
            return Err(violated(
                pair,
                format!("|G(z)| ≥ (1 + |z|/2)^(n2+1) at z = {} + {}i", z.re, z.im),
            ));
        }
    }

    Ok(PropertyReport {
        n1: pair.n1,
        n2: pair.n2,
        m: pair.m,
        g: pair.g.coeffs().to_vec(),
        h: pair.h.coeffs().to_vec(),
        wronskian_constant,
        g_at_one: g1,
        approximation_samples: samples.approximation.len(),
        monotone_samples: samples.monotone.len(),
        growth_samples: samples.growth.len(),
    })
}

/// `u = log((3+√5)/2) = 2·log ε`.
pub fn gap_unit_log(digits: u32) -> Result<RealApprox> {
    Ok(ln_epsilon(digits)?.mul_int(&BigInt::from(2)))
}

fn check_q(q: &BigInt) -> Result<()> {
    if q.mod_floor(&BigInt::from(10)) != BigInt::one() {
        return Err(precondition(format!("q = {q} is not ≡ 1 (mod 10)")));
    }
    if is_prime(q) == Primality::Composite {
        return Err(precondition(format!("q = {q} is not prime")));
    }
    Ok(())
}

/// The positive `x` with `5x² = qⁿ + 4`, if any.
pub fn anchor_solution(q: &BigInt, n: u32) -> Option<BigInt> {
    let t: BigInt = q.pow(n) + 4;
    let (x2, r) = t.div_rem(&BigInt::from(5));
    if !r.is_zero() {
        return None;
    }
    exact_sqrt(&x2)
}

fn certified_floor(r: &RealApprox) -> Option<BigInt> {
    let lo = r.lower().floor().to_integer();
    (lo == r.upper().floor().to_integer()).then_some(lo)
}

/// Digits that keep `q^(−n/2)`-sized quantities resolved.
fn digits_for(qn: &BigInt) -> u32 {
    START_DIGITS + (qn.bits() as u32 * 3) / 20
}

/// Lower bound on the exponent of a second solution.
#[derive(Clone, Debug, Serialize)]
pub struct GapBound {
    #[serde(serialize_with = "bigjson::int")]
    pub q: BigInt,
    pub n: u32,
    #[serde(serialize_with = "bigjson::int")]
    pub x: BigInt,
    /// `δ = 4/(2 + √(qⁿ+4))`.
    #[serde(serialize_with = "bigjson::real")]
    pub delta: RealApprox,
    #[serde(serialize_with = "bigjson::real")]
    pub u: RealApprox,
    /// `(u/2)·δ⁻¹·(1+δ)⁻¹`.
    #[serde(serialize_with = "bigjson::real")]
    pub bound: RealApprox,
    /// Smallest odd integer above `bound`.
    #[serde(serialize_with = "bigjson::int")]
    pub n_prime_min: BigInt,
    pub digits: u32,
}

/// Any second solution `(x′, n′)` of `5x² = qⁿ + 4` with `n′ > n` has
/// `n′ > (u/2)·δ⁻¹·(1+δ)⁻¹`.
pub fn gap_lower_bound(q: &BigInt, n: u32) -> Result<GapBound> {
    check_q(q)?;
    if n == 0 {
        return Err(precondition("n must be positive"));
    }
    let x = anchor_solution(q, n)
        .ok_or_else(|| domain(format!("(q^n + 4)/5 is not a perfect square for q = {q}, n = {n}")))?;
    let qn4 = q.pow(n) + 4;
    let ((bound, delta, u), digits) = certify("gap lower bound", digits_for(&qn4), MAX_DIGITS, |d| {
        let s = RealApprox::from_int(&qn4, d).sqrt()?;
        let two = RealApprox::from_i64(2, d);
        let delta = RealApprox::from_i64(4, d).checked_div(&(&two + &s))?;
        let u = gap_unit_log(d)?;
        let denom = &delta * &(&RealApprox::from_i64(1, d) + &delta);
        let bound = u.mul_pow2(-1).checked_div(&denom)?;
        Ok(certified_floor(&bound).map(|_| (bound, delta, u)))
    })?;
    let mut n_prime_min: BigInt = certified_floor(&bound).expect("certified above") + 1;
    if n_prime_min.is_even() {
        n_prime_min += 1;
    }
    Ok(GapBound {
        q: q.clone(),
        n,
        x,
        delta,
        u,
        bound,
        n_prime_min,
        digits,
    })
}

/// Data of a solution `(x, n)` and the method integers `(r, s)`.
#[derive(Clone, Debug, Serialize)]
pub struct GapContext {
    #[serde(serialize_with = "bigjson::int")]
    pub q: BigInt,
    pub n: u32,
    #[serde(serialize_with = "bigjson::int")]
    pub x: BigInt,
    pub r: u32,
    pub s: u32,
    #[serde(serialize_with = "bigjson::real")]
    pub delta: RealApprox,
    #[serde(serialize_with = "bigjson::real")]
    pub u: RealApprox,
    /// `ν` with `q^(nν) = 2.007·(4.03·qⁿ)^(r/s)`.
    #[serde(serialize_with = "bigjson::real")]
    pub nu: RealApprox,
    pub digits: u32,
}

/// `ν` from `q^(nν) = 2.007·(4.03·qⁿ)^(r/s)`.
pub fn nu(q: &BigInt, n: u32, r: u32, s: u32, digits: u32) -> Result<RealApprox> {
    let n_ln_q = RealApprox::from_int(q, digits).ln()?.mul_int(&BigInt::from(n));
    let scale = &RealApprox::from_decimal(NU_SCALE, digits).ln()? + &n_ln_q;
    let num =
        &RealApprox::from_decimal(NU_BASE, digits).ln()? + &scale.mul_int(&BigInt::from(r)).div_int(&BigInt::from(s));
    num.checked_div(&n_ln_q)
}

impl GapContext {
    /// Checks `qⁿ > 600`, `qⁿ ≥ 2^(6+4s/r)` and that `(qⁿ+4)/5` is a square.
    pub fn new(q: &BigInt, n: u32, r: u32, s: u32, digits: u32) -> Result<Self> {
        if r == 0 || s == 0 || n == 0 {
            return Err(precondition("n, r and s must be positive"));
        }
        let qn = q.pow(n);
        if qn <= BigInt::from(LEMMA_MIN_QN) {
            return Err(domain(format!("q^n ≤ {LEMMA_MIN_QN}")));
        }
        // qⁿ ≥ 2^(6+4s/r) ⇔ q^(nr) ≥ 2^(6r+4s).
        if qn.pow(r) < BigInt::one() << (6 * r + 4 * s) as usize {
            return Err(domain(format!("q^n < 2^(6+4s/r) for (r, s) = ({r}, {s})")));
        }
        check_q(q)?;
        let x = anchor_solution(q, n)
            .ok_or_else(|| domain(format!("(q^n + 4)/5 is not a perfect square for q = {q}, n = {n}")))?;
        let digits = digits.max(digits_for(&qn));
        let s5 = QuadInt::from_i64s(5, 0, 1, 1)?.to_real(digits)?;
        let delta =
            RealApprox::from_i64(4, digits).checked_div(&(&RealApprox::from_i64(2, digits) + &s5.mul_int(&x)))?;
        Ok(GapContext {
            q: q.clone(),
            n,
            x,
            r,
            s,
            delta,
            u: gap_unit_log(digits)?,
            nu: nu(q, n, r, s, digits)?,
            digits,
        })
    }
}

/// `λ = ⌈(n′ − n)/(2n)⌉` and the two admissible values of `n₁`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaParameters {
    pub lambda: u64,
    pub n1_choices: Vec<u64>,
}

/// Integers in `[rλ/s, (rλ + 2s − 1)/s]`.
pub fn n1_interval(r: u64, s: u64, lambda: u64) -> Vec<u64> {
    let lo = (r * lambda).div_ceil(s);
    let hi = (r * lambda + 2 * s - 1) / s;
    (lo..=hi).collect()
}

pub fn lemma_parameters(r: u32, s: u32, n: u32, n_prime: u64) -> LemmaParameters {
    let lambda = (n_prime - n as u64).div_ceil(2 * n as u64);
    LemmaParameters {
        lambda,
        n1_choices: n1_interval(r as u64, s as u64, lambda),
    }
}

/// Hypergeometric lower bound at one `(n′, y)`, in logarithms.
#[derive(Clone, Debug, Serialize)]
pub struct TechnicalBound {
    pub n_prime: u64,
    #[serde(serialize_with = "bigjson::int")]
    pub y: BigInt,
    pub parameters: LemmaParameters,
    /// `log(0.27·q^(n/s) / (q^(n(3+ν/2))·N^((1+ν)/2)))`.
    #[serde(serialize_with = "bigjson::real")]
    pub log_bound: RealApprox,
    /// `log|y√5/N^(1/2) − 1|`.
    #[serde(serialize_with = "bigjson::real")]
    pub log_err_ratio: RealApprox,
    pub digits: u32,
}

/// Natural log of the lower bound for `|y√5/N^(1/2) − 1|` with `N = q^(n′)`,
/// together with the actual value for the given `y`.
///
/// The bound itself underflows any fixed scale once `n′` grows, so only its
/// logarithm is returned. A `y` beating the bound is reported as a violation.
pub fn technical_lower_bound(ctx: &GapContext, n_prime: u64, y: &BigInt) -> Result<TechnicalBound> {
    if n_prime <= ctx.n as u64 {
        return Err(precondition(format!("need n' > n = {}", ctx.n)));
    }
    let n_prime_u32 = u32::try_from(n_prime).map_err(|_| precondition("n' does not fit in 32 bits"))?;
    let big_n = ctx.q.pow(n_prime_u32);
    let five_y2 = y * y * 5;
    let start = ctx.digits.max(START_DIGITS);
    let ((log_bound, log_err_ratio), digits) = certify("hypergeometric lower bound", start, MAX_DIGITS, |d| {
        let ln_q = RealApprox::from_int(&ctx.q, d).ln()?;
        let nu = nu(&ctx.q, ctx.n, ctx.r, ctx.s, d)?;
        let one = RealApprox::from_i64(1, d);
        let n = BigInt::from(ctx.n);
        let exp_q = &(&RealApprox::from_i64(3, d) + &nu.mul_pow2(-1)).mul_int(&n)
            - &RealApprox::from_int(&n, d).div_int(&BigInt::from(ctx.s));
        let exp_n = (&one + &nu).mul_pow2(-1).mul_int(&BigInt::from(n_prime));
        let log_bound = &(&RealApprox::from_decimal(LEMMA_CONSTANT, d).ln()? - &(&exp_q * &ln_q)) - &(&exp_n * &ln_q);

        let half_ln_n = ln_q.mul_int(&BigInt::from(n_prime)).mul_pow2(-1);
        let root_n = RealApprox::from_int(&big_n, d).sqrt()?;
        let y_root5 = RealApprox::from_int(&five_y2, d).sqrt()?;
        let log_err = if y.is_positive() {
            let diff = RealApprox::from_int(&(&five_y2 - &big_n).abs(), d).ln()?;
            &(&diff - &half_ln_n) - &(&y_root5 + &root_n).ln()?
        } else {
            &(&y_root5 + &root_n).ln()? - &half_ln_n
        };
        Ok(log_err.certified_cmp(&log_bound).map(|o| (o, log_bound, log_err)))
    })
    .and_then(|((o, b, e), d)| {
        if o == Ordering::Greater {
            Ok(((b, e), d))
        } else {
            Err(Error::Violation(format!(
                "y = {y} beats the hypergeometric lower bound at n' = {n_prime}"
            )))
        }
    })?;
    Ok(TechnicalBound {
        n_prime,
        y: y.clone(),
        parameters: lemma_parameters(ctx.r, ctx.s, ctx.n, n_prime),
        log_bound,
        log_err_ratio,
        digits,
    })
}

/// `γ = log(2.007·4.03^(1/2))`.
pub fn unique_gamma(digits: u32) -> Result<RealApprox> {
    Ok(&RealApprox::from_decimal(NU_BASE, digits).ln()?
        + &RealApprox::from_decimal(NU_SCALE, digits).ln()?.mul_pow2(-1))
}

/// One exponent of the final inequality
/// `n·(6.127·n·log q + γ)/(0.5·n·log q − γ) > 0.12·(2 + q^(n/2))²/(6 + q^(n/2))`.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub n: u32,
    #[serde(serialize_with = "bigjson::real")]
    pub lhs: RealApprox,
    /// `log` of the right-hand side.
    #[serde(serialize_with = "bigjson::real")]
    pub log_rhs: RealApprox,
    pub holds: bool,
}

/// Evaluates the final inequality at one odd `n`.
pub fn unique_inequality(q: &BigInt, n: u32) -> Result<InequalityCheck> {
    let qn = q.pow(n);
    let ((lhs, log_rhs, holds), _) = certify("uniqueness inequality", START_DIGITS, MAX_DIGITS, |d| {
        let n_big = BigInt::from(n);
        let ln_q = RealApprox::from_int(q, d).ln()?;
        let gamma = unique_gamma(d)?;
        let nl = ln_q.mul_int(&n_big);
        let num = &RealApprox::from_decimal(UNIQUE_LHS_SLOPE, d).mul_int(&n_big) * &ln_q;
        let den = &nl.mul_pow2(-1) - &gamma;
        if den.sign() != Some(Ordering::Greater) {
            return Err(domain(format!("0.5·n·log q ≤ γ at n = {n}")));
        }
        let lhs = (&num + &gamma).checked_div(&den)?.mul_int(&n_big);
        let root = RealApprox::from_int(&qn, d).sqrt()?;
        let two = RealApprox::from_i64(2, d);
        let six = RealApprox::from_i64(6, d);
        let rhs = (&RealApprox::from_decimal(UNIQUE_RHS_FACTOR, d) * &(&two + &root).square())
            .checked_div(&(&six + &root))?;
        Ok(lhs.certified_cmp(&rhs).map(|o| {
            let log_rhs = rhs.ln().expect("right-hand side is positive");
            (lhs.clone(), log_rhs, o == Ordering::Greater)
        }))
    })?;
    Ok(InequalityCheck { n, lhs, log_rhs, holds })
}

/// Outcome of [`uniqueness_decision`].
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum UniquenessVerdict {
    /// No solution with `n = 1`; at most one in total.
    AtMostOne,
    /// `(q + 4)/5 = x²`: the solution `(x, 1)` is the only one.
    ExactlyOne {
        #[serde(serialize_with = "bigjson::int")]
        x: BigInt,
        n: u32,
    },
    /// `q ≤ 3·10⁹`: the uniqueness inequality is not the deciding argument;
    /// the small-`q` regime admits no solutions with `n > 2`.
    OutOfRegime,
    /// The inequality holds at `n`, so this argument does not decide `q`.
    Undecided { n: u32 },
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    #[serde(serialize_with = "bigjson::int")]
    pub q: BigInt,
    #[serde(flatten)]
    pub verdict: UniquenessVerdict,
    /// Odd exponents at which the inequality was certified to fail.
    pub exponents_checked: u32,
    /// Evaluation at `n = 1`, kept for audit.
    pub first: Option<InequalityCheck>,
    #[serde(serialize_with = "bigjson::real")]
    pub gamma: RealApprox,
    /// `ν` for `(r, s) = (1, 2)`, `n = 1`.
    #[serde(serialize_with = "bigjson::real")]
    pub nu: RealApprox,
}

/// Decides `5x² = qⁿ + 4` for `q > 3·10⁹` by showing the final inequality
/// fails for every odd `n < 820`.
pub fn uniqueness_decision(q: &BigInt) -> Result<UniquenessReport> {
    check_q(q)?;
    let gamma = unique_gamma(START_DIGITS)?;
    let nu = nu(q, 1, 1, 2, START_DIGITS)?;
    if q <= &BigInt::from(REGIME_Q) {
        return Ok(UniquenessReport {
            q: q.clone(),
            verdict: UniquenessVerdict::OutOfRegime,
            exponents_checked: 0,
            first: None,
            gamma,
            nu,
        });
    }
    let mut first = None;
    let mut checked = 0;
    for n in (1..N_UPPER).step_by(2) {
        let c = unique_inequality(q, n)?;
        if c.holds {
            return Ok(UniquenessReport {
                q: q.clone(),
                verdict: UniquenessVerdict::Undecided { n },
                exponents_checked: checked,
                first,
                gamma,
                nu,
            });
        }
        checked += 1;
        if n == 1 {
            first = Some(c);
        }
    }
    let verdict = match anchor_solution(q, 1) {
        Some(x) => UniquenessVerdict::ExactlyOne { x, n: 1 },
        None => UniquenessVerdict::AtMostOne,
    };
    Ok(UniquenessReport {
        q: q.clone(),
        verdict,
        exponents_checked: checked,
        first,
        gamma,
        nu,
    })
}

/// The first `count` primes `q ≡ 1 (mod 10)` above `lo`.
pub fn primes_one_mod_ten_above(lo: u64, count: usize) -> Vec<u64> {
    let mut q = lo + 1;
    while q % 10 != 1 {
        q += 1;
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if crate::arith::primes::is_prime_u64(q) {
            out.push(q);
        }
        q += 10;
    }
    out
}

/// All `ξ = (b + c√5)/2` with `|b|, |c| ≤ bound`, `b ≡ c (mod 2)`, and
/// `2 ≤ a ≤ a_max` such that `ξ^a = 2 + x√5` with `x > 0`.
///
/// Returns `(b, c, a, x)`.
pub fn power_oracle(a_max: u32, bound: i64) -> Vec<(i64, i64, u32, BigInt)> {
    let mut hits = Vec::new();
    for b in -bound..=bound {
        for c in -bound..=bound {
            if (b - c).rem_euclid(2) != 0 {
                continue;
            }
            // Traces tₖ = tr(ξᵏ) satisfy tₖ₊₁ = b·tₖ − N·tₖ₋₁; ξ^a = 2 + x√5 needs tₐ = 4.
            let norm = ((b * b - 5 * c * c) / 4) as u64;
            let (mut prev, mut cur) = (2u64, b as u64);
            for a in 2..=a_max {
                (prev, cur) = (cur, cur.wrapping_mul(b as u64).wrapping_sub(norm.wrapping_mul(prev)));
                if cur != 4 {
                    continue;
                }
                let xi = QuadInt::from_i64s(5, b, c, 2).expect("parity checked");
                let (t, w) = xi.pow(a).halves();
                if t == BigInt::from(4) && w.is_positive() && w.is_even() {
                    hits.push((b, c, a, w / 2));
                }
            }
        }
    }
    hits
}

/// `C(m, n₁)·(qⁿ)^deg·P(−4/qⁿ)`, when integral.
fn scaled_value_at(pair: &HypergeomPair, p: &RatPoly, qn: &BigInt, deg: u64) -> Option<BigInt> {
    let z = BigRational::new(BigInt::from(-4), qn.clone());
    let c = BigRational::from_integer(binomial(pair.m, pair.n1) * qn.pow(deg as u32));
    let v = p.eval(&z) * c;
    v.is_integer().then(|| v.to_integer())
}

impl HypergeomPair {
    /// `A = C(m, n₁)·q^(n·n₁)·G(−4/qⁿ)`.
    pub fn a_integer(&self, qn: &BigInt) -> Option<BigInt> {
        scaled_value_at(self, &self.g, qn, self.n1)
    }

    /// `B = C(m, n₁)·q^(n·n₂)·H(−4/qⁿ)`.
    pub fn b_integer(&self, qn: &BigInt) -> Option<BigInt> {
        scaled_value_at(self, &self.h, qn, self.n2)
    }
}

impl GaussRational {
    pub fn real(re: BigRational) -> Self {
        GaussRational {
            re,
            im: BigRational::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        rat(n, d)
    }

    /// `Σ C(n₂+½, k)·C(n₁, k)·C(m, k)⁻¹·(−z)^k`, written out independently.
    fn g_by_binomials(n1: u64, n2: u64) -> RatPoly {
        let m = n1 + n2;
        let top = r(2 * n2 as i64 + 1, 2);
        let mut coeffs = Vec::new();
        for k in 0..=n1 {
            let mut c_half = BigRational::one();
            for j in 0..k {
                c_half = c_half * (&top - int_rat(j)) / int_rat(j + 1);
            }
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let c = c_half * BigRational::from_integer(binomial(n1, k)) / BigRational::from_integer(binomial(m, k))
                * r(sign, 1);
            coeffs.push(c);
        }
        RatPoly::new(coeffs)
    }

    #[test]
    fn smallest_pair_is_frozen() {
        let p = build_pair(1, 2).unwrap();
        assert_eq!(p.g, RatPoly::new(vec![r(1, 1), r(-5, 6)]));
        assert_eq!(p.h, RatPoly::new(vec![r(1, 1), r(-1, 3), r(-1, 24)]));
        let scaled = p.scaled(&p.g).to_int().unwrap();
        assert_eq!(scaled.coeffs(), &[BigInt::from(3), BigInt::from(-10)]);
        let w = p.wronskian().unwrap();
        assert_eq!(w, RatPoly::new(vec![r(0, 1), r(0, 1), r(0, 1), r(0, 1), r(-5, 384)]));
        let w35 = build_pair(3, 5).unwrap().wronskian().unwrap();
        assert_eq!(w35.order(), Some(9));
        assert_eq!(w35.coeff(9), r(-55, 3670016));
    }

    #[test]
    fn degenerate_pairs_are_rejected() {
        assert!(matches!(build_pair(2, 2), Err(Error::Precondition(_))));
        assert!(matches!(build_pair(0, 3), Err(Error::Precondition(_))));
        assert!(matches!(build_pair(4, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn g_matches_binomial_sum() {
        for n2 in 2..=20 {
            for n1 in 1..n2 {
                assert_eq!(build_pair(n1, n2).unwrap().g, g_by_binomials(n1, n2), "({n1}, {n2})");
            }
        }
    }

    #[test]
    fn all_properties_hold_on_the_small_grid() {
        let samples = ZSamples::grid(60);
        for n2 in 2..=12 {
            for n1 in 1..n2 {
                let rep = check_properties(&build_pair(n1, n2).unwrap(), &samples).unwrap();
                assert!(!rep.wronskian_constant.is_zero());
            }
        }
    }

    #[test]
    fn approximation_at_minus_quarter() {
        let p = build_pair(3, 5).unwrap();
        let z = r(-1, 4);
        let samples = ZSamples {
            approximation: vec![z.clone()],
            monotone: vec![],
            growth: vec![],
        };
        check_properties(&p, &samples).unwrap();
        let d = 80;
        let gz = RealApprox::from_rational(&p.g.eval(&z), d);
        let hz = RealApprox::from_rational(&p.h.eval(&z), d);
        let root = RealApprox::from_rational(&(BigRational::one() - &z), d).sqrt().unwrap();
        let lhs = (&gz - &(&root * &hz)).abs();
        let rhs = RealApprox::from_rational(&(p.g.eval(&BigRational::one()) * r(1, 4).pow(9)), d);
        assert_eq!(lhs.certified_cmp(&rhs), Some(Ordering::Less));
    }

    #[test]
    fn violated_samples_are_reported() {
        // A perturbed H breaks the approximation bound at small z.
        let mut p = build_pair(1, 2).unwrap();
        let g1 = p.g.eval(&BigRational::one());
        check_approximation(&p, &g1, &r(1, 10)).unwrap();
        p.h = &p.h + &RatPoly::new(vec![r(0, 1), r(0, 1), r(1, 48)]);
        match check_approximation(&p, &g1, &r(1, 10)) {
            Err(Error::Violation(m)) => assert!(m.contains("z = 1/10"), "{m}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            check_properties(&p, &ZSamples::grid(4)),
            Err(Error::Violation(_))
        ));
        let p = build_pair(1, 2).unwrap();
        let bad = ZSamples {
            approximation: vec![r(0, 1)],
            monotone: vec![],
            growth: vec![],
        };
        assert!(matches!(check_properties(&p, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn signed_square_root_comparison() {
        // t = −√2 against −1 and −2.
        assert_eq!(cmp_signed_sqrt(&r(2, 1), true, &r(-1, 1)), Ordering::Less);
        assert_eq!(cmp_signed_sqrt(&r(2, 1), true, &r(-2, 1)), Ordering::Greater);
        assert_eq!(cmp_signed_sqrt(&r(2, 1), false, &r(1, 1)), Ordering::Greater);
        assert_eq!(cmp_signed_sqrt(&r(2, 1), false, &r(-5, 1)), Ordering::Greater);
        assert_eq!(cmp_signed_sqrt(&r(0, 1), false, &r(0, 1)), Ordering::Equal);
    }

    #[test]
    fn growth_bound_is_tight_at_zero() {
        let p = build_pair(2, 5).unwrap();
        assert_eq!(p.g.eval(&BigRational::zero()), BigRational::one());
        let zero = ZSamples {
            approximation: vec![],
            monotone: vec![],
            growth: vec![(r(0, 1), GaussRational::real(r(0, 1)))],
        };
        assert!(matches!(check_properties(&p, &zero), Err(Error::Precondition(_))));
    }

    #[test]
    fn circle_points_have_rational_modulus() {
        for (radius, z) in ZSamples::grid(200).growth {
            assert_eq!(z.norm_sq(), &radius * &radius);
        }
    }

    #[test]
    fn gap_bounds_match_float_oracle() {
        let b = gap_lower_bound(&BigInt::from(1801), 1).unwrap();
        assert_eq!(b.x, BigInt::from(19));
        assert!((b.bound.to_f64() - 4.910_199_874_182_997).abs() < 1e-12);
        assert_eq!(b.n_prime_min, BigInt::from(5));
        let b = gap_lower_bound(&BigInt::from(160201), 1).unwrap();
        assert_eq!(b.x, BigInt::from(179));
        assert!((b.bound.to_f64() - 47.916_132_371_544_435).abs() < 1e-10);
        assert_eq!(b.n_prime_min, BigInt::from(49));
        assert!((b.u.to_f64() - 0.962_423_650_119_206_9).abs() < 1e-15);
    }

    #[test]
    fn gap_bound_rejects_unanchored_q() {
        assert!(matches!(gap_lower_bound(&BigInt::from(11), 1), Err(Error::Domain(_))));
        assert!(matches!(
            gap_lower_bound(&BigInt::from(7), 1),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            gap_lower_bound(&BigInt::from(1901 * 11), 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn gap_bound_grows_with_the_family() {
        let family = crate::solutions::family_search(10);
        let mut last = BigInt::zero();
        for fp in family {
            let b = gap_lower_bound(&fp.q, 1).unwrap();
            assert!(b.n_prime_min > BigInt::one());
            assert!(b.n_prime_min >= last);
            assert_eq!(b.x, BigInt::from(20 * fp.v * fp.v - 1));
            last = b.n_prime_min;
        }
    }

    #[test]
    fn delta_from_x_matches_delta_from_q() {
        for q in [160201u64, 1245001, 4792201] {
            let q = BigInt::from(q);
            let ctx = GapContext::new(&q, 1, 1, 2, 40).unwrap();
            let b = gap_lower_bound(&q, 1).unwrap();
            let diff = (&ctx.delta - &b.delta.with_digits(ctx.digits)).abs();
            assert!(diff.to_f64() < 1e-35);
            assert!(ctx.delta.to_f64() < 0.5);
        }
    }

    #[test]
    fn technical_bound_preconditions() {
        let ctx = GapContext::new(&BigInt::from(160201), 1, 1, 2, 40).unwrap();
        let tb = technical_lower_bound(&ctx, 3, &BigInt::from(100)).unwrap();
        assert!(tb.log_err_ratio.certified_cmp(&tb.log_bound) == Some(Ordering::Greater));
        assert_eq!(
            tb.parameters,
            LemmaParameters {
                lambda: 1,
                n1_choices: vec![1, 2]
            }
        );
        match GapContext::new(&BigInt::from(7), 1, 1, 2, 40) {
            Err(Error::Domain(m)) => assert!(m.contains("q^n ≤ 600"), "{m}"),
            other => panic!("{other:?}"),
        }
        // (r, s) = (1, 2) needs qⁿ ≥ 2¹⁴; (2, 1) needs only 2⁸.
        match GapContext::new(&BigInt::from(1801), 1, 1, 2, 40) {
            Err(Error::Domain(m)) => assert!(m.contains("2^(6+4s/r)"), "{m}"),
            other => panic!("{other:?}"),
        }
        let ctx = GapContext::new(&BigInt::from(1801), 1, 2, 1, 40).unwrap();
        technical_lower_bound(&ctx, 5, &BigInt::from(1_000_000)).unwrap();
        assert!(matches!(
            technical_lower_bound(&ctx, 1, &BigInt::one()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn best_approximations_respect_the_technical_bound() {
        let q = BigInt::from(160201);
        let ctx = GapContext::new(&q, 1, 1, 2, 40).unwrap();
        for n_prime in [3u64, 5, 7, 11, 21] {
            let big_n = q.pow(n_prime as u32);
            let y = (&big_n / 5u32).sqrt();
            for y in [y.clone(), y + 1u32] {
                technical_lower_bound(&ctx, n_prime, &y).unwrap();
            }
        }
    }

    #[test]
    fn nu_limits() {
        let d = 40;
        let at_regime = nu(&BigInt::from(REGIME_Q), 1, 1, 2, d).unwrap();
        assert!(at_regime.certified_cmp(&RealApprox::from_decimal("0.7178", d)) == Some(Ordering::Less));
        let huge = nu(&BigInt::from(10).pow(400), 1, 1, 2, d).unwrap();
        assert!(huge.certified_cmp(&RealApprox::from_decimal("0.5", d)) == Some(Ordering::Greater));
        assert!(huge.to_f64() < 0.5016);
        let oracle = 0.5 + ((2.007f64).ln() + 0.5 * (4.03f64).ln()) / (3e9f64).ln();
        assert!((at_regime.to_f64() - oracle).abs() < 1e-12);
    }

    #[test]
    fn uniqueness_above_the_regime() {
        let qs = primes_one_mod_ten_above(REGIME_Q, 1);
        let rep = uniqueness_decision(&BigInt::from(qs[0])).unwrap();
        assert!(matches!(
            rep.verdict,
            UniquenessVerdict::AtMostOne | UniquenessVerdict::ExactlyOne { .. }
        ));
        assert_eq!(rep.exponents_checked, 410);
        let first = rep.first.unwrap();
        assert!(!first.holds);
        assert!((first.lhs.to_f64() - 14.19).abs() < 0.01);
    }

    #[test]
    fn uniqueness_below_the_regime() {
        let rep = uniqueness_decision(&BigInt::from(1801)).unwrap();
        assert!(matches!(rep.verdict, UniquenessVerdict::OutOfRegime));
        assert!(matches!(
            uniqueness_decision(&BigInt::from(7)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn anchored_prime_above_the_regime_has_exactly_one() {
        // q = 5x² − 4 prime with q > 3·10⁹.
        let x = (24_495u64..)
            .find(|&x| {
                let q = 5 * x * x - 4;
                q > REGIME_Q && crate::arith::primes::is_prime_u64(q)
            })
            .unwrap();
        let q = BigInt::from(5 * x * x - 4);
        let rep = uniqueness_decision(&q).unwrap();
        match rep.verdict {
            UniquenessVerdict::ExactlyOne { x: found, n } => {
                assert_eq!(found, BigInt::from(x));
                assert_eq!(n, 1);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn inequality_holds_for_small_q() {
        // For small q the inequality is satisfiable, which is why the regime matters.
        assert!(unique_inequality(&BigInt::from(31), 1).unwrap().holds);
        assert!(matches!(unique_inequality(&BigInt::from(11), 1), Err(Error::Domain(_))));
    }

    #[test]
    fn only_the_golden_cube_is_a_power() {
        let hits = power_oracle(15, 1000);
        assert_eq!(hits, vec![(1, 1, 3, BigInt::one())]);
    }

    #[test]
    fn n1_interval_has_two_integers() {
        for lambda in 1..=1_000_000u64 {
            let v = n1_interval(1, 2, lambda);
            assert_eq!(v.len(), 2, "λ = {lambda}");
            assert_eq!(v[1], v[0] + 1);
        }
    }

    #[test]
    fn lemma_integers_are_integral() {
        let q = BigInt::from(1801);
        for (n1, n2) in [(1, 2), (2, 3), (3, 7)] {
            let p = build_pair(n1, n2).unwrap();
            let a = p.a_integer(&q).unwrap();
            assert!(a.is_positive());
            assert!(p.b_integer(&q).is_some());
        }
    }

    proptest! {
        #[test]
        fn n1_interval_general(r in 1u64..20, s in 1u64..20, lambda in 1u64..100_000) {
            let v = n1_interval(r, s, lambda);
            prop_assert_eq!(v.len(), 2);
        }

        #[test]
        fn wronskian_is_a_nonzero_monomial(n1 in 1u64..20, extra in 1u64..20) {
            let p = build_pair(n1, n1 + extra).unwrap();
            let w = p.wronskian().unwrap();
            let top = (p.m + 1) as usize;
            prop_assert_eq!(w.order(), Some(top));
            prop_assert_eq!(w.degree(), Some(top));
        }

        #[test]
        fn real_growth_samples(n1 in 1u64..10, extra in 1u64..10, num in -4000i64..4000) {
            prop_assume!(num != 0);
            let p = build_pair(n1, n1 + extra).unwrap();
            let z = r(num, 100);
            let samples = ZSamples {
                approximation: vec![],
                monotone: vec![],
                growth: vec![(z.clone(), GaussRational::real(z))],
            };
            prop_assert!(check_properties(&p, &samples).is_ok());
        }
    }
}
