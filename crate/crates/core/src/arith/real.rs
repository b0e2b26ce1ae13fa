//! Certified real arithmetic.
//!
//! A [`RealApprox`] is a closed interval `[lo, hi]·2^(−bits)` with big-integer
//! endpoints. Every operation rounds its lower endpoint down and its upper
//! endpoint up, so the true value is always enclosed. Comparisons only answer
//! when the enclosures are disjoint; callers escalate precision otherwise
//! (see [`certify`]).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

const GUARD_BITS: u32 = 32;
const LOG2_10: f64 = std::f64::consts::LOG2_10;
const CONST_BITS: u32 = 4096;

/// Interval enclosure of a real number at a fixed binary scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealApprox {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
    digits: u32,
}

fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + GUARD_BITS
}

fn floor_shr(x: &BigInt, s: u32) -> BigInt {
    x.div_floor(&(BigInt::one() << s))
}

fn ceil_shr(x: &BigInt, s: u32) -> BigInt {
    -floor_shr(&-x, s)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn ceil_sqrt(x: &BigInt) -> BigInt {
    let s = x.sqrt();
    if &(&s * &s) < x {
        s + 1
    } else {
        s
    }
}

impl RealApprox {
    fn raw(lo: BigInt, hi: BigInt, bits: u32, digits: u32) -> Self {
        debug_assert!(lo <= hi);
        RealApprox { lo, hi, bits, digits }
    }

    fn scale_for(digits: u32) -> (u32, u32) {
        (bits_for_digits(digits), digits)
    }

    pub fn from_int(n: &BigInt, digits: u32) -> Self {
        let (bits, digits) = Self::scale_for(digits);
        let v = n << bits;
        Self::raw(v.clone(), v, bits, digits)
    }

    pub fn from_i64(n: i64, digits: u32) -> Self {
        Self::from_int(&BigInt::from(n), digits)
    }

    /// Enclosure of `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, digits: u32) -> Self {
        let (bits, digits) = Self::scale_for(digits);
        Self::ratio_at_bits(num, den, bits, digits)
    }

    fn ratio_at_bits(num: &BigInt, den: &BigInt, bits: u32, digits: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        let scaled = num << bits;
        let lo = scaled.div_floor(&den);
        let hi = ceil_div(&scaled, &den);
        Self::raw(lo, hi, bits, digits)
    }

    pub fn from_rational(q: &BigRational, digits: u32) -> Self {
        Self::from_ratio(q.numer(), q.denom(), digits)
    }

    /// Exact decimal literal such as `"4.0402"` or `"-0.38"`.
    pub fn from_decimal(lit: &str, digits: u32) -> Self {
        Self::from_rational(&parse_decimal(lit), digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Same value re-enclosed at a different precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        let (bits, digits) = Self::scale_for(digits);
        self.rescale(bits, digits)
    }

    fn rescale(&self, bits: u32, digits: u32) -> Self {
        match bits.cmp(&self.bits) {
            Ordering::Equal => Self::raw(self.lo.clone(), self.hi.clone(), bits, digits),
            Ordering::Greater => {
                let s = bits - self.bits;
                Self::raw(&self.lo << s, &self.hi << s, bits, digits)
            }
            Ordering::Less => {
                let s = self.bits - bits;
                Self::raw(floor_shr(&self.lo, s), ceil_shr(&self.hi, s), bits, digits)
            }
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        if self.bits == other.bits {
            (self.clone(), other.clone())
        } else if self.bits > other.bits {
            (self.clone(), other.rescale(self.bits, self.digits))
        } else {
            (self.rescale(other.bits, other.digits), other.clone())
        }
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.bits)
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.bits)
    }

    /// Midpoint of the enclosure.
    pub fn value(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, BigInt::one() << (self.bits + 1))
    }

    /// Half-width of the enclosure: the certified absolute error of [`value`](Self::value).
    pub fn error_bound(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, BigInt::one() << (self.bits + 1))
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.value();
        ratio_to_f64(&v)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign of the value if the enclosure excludes zero (or is exactly zero).
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Ordering of the two enclosed values, when the enclosures decide it.
    pub fn certified_cmp(&self, other: &Self) -> Option<Ordering> {
        let (a, b) = self.aligned(other);
        if a.hi < b.lo {
            Some(Ordering::Less)
        } else if a.lo > b.hi {
            Some(Ordering::Greater)
        } else if a.is_point() && b.is_point() && a.lo == b.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// The unique integer inside the enclosure, if the enclosure is narrower
    /// than one unit and contains one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let unit = BigInt::one() << self.bits;
        if &self.hi - &self.lo >= unit {
            return None;
        }
        let candidate = ceil_shr(&self.lo, self.bits);
        if (&candidate << self.bits) <= self.hi {
            Some(candidate)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self
        } else {
            let m = std::cmp::max(-&self.lo, self.hi.clone());
            Self::raw(BigInt::zero(), m, self.bits, self.digits)
        }
    }

    pub fn square(&self) -> Self {
        let a = self.abs();
        let lo = floor_shr(&(&a.lo * &a.lo), a.bits);
        let hi = ceil_shr(&(&a.hi * &a.hi), a.bits);
        Self::raw(lo, hi, a.bits, a.digits)
    }

    pub fn powi(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::raw(
            BigInt::one() << self.bits,
            BigInt::one() << self.bits,
            self.bits,
            self.digits,
        );
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.is_negative() {
            Self::raw(b, a, self.bits, self.digits)
        } else {
            Self::raw(a, b, self.bits, self.digits)
        }
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero(), "division by zero");
        let (lo, hi) = if k.is_negative() {
            (-&self.hi, -&self.lo)
        } else {
            (self.lo.clone(), self.hi.clone())
        };
        let k = k.abs();
        Self::raw(lo.div_floor(&k), ceil_div(&hi, &k), self.bits, self.digits)
    }

    /// Multiplication by `2^e` (exact for `e ≥ 0`).
    pub fn mul_pow2(&self, e: i64) -> Self {
        if e >= 0 {
            Self::raw(&self.lo << e as u32, &self.hi << e as u32, self.bits, self.digits)
        } else {
            let s = (-e) as u32;
            Self::raw(floor_shr(&self.lo, s), ceil_shr(&self.hi, s), self.bits, self.digits)
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other);
        if b.contains_zero() {
            return Err(domain("division by an enclosure containing zero"));
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in [&a.lo, &a.hi] {
            let scaled = n << a.bits;
            for d in [&b.lo, &b.hi] {
                let f = scaled.div_floor(d);
                let c = ceil_div(&scaled, d);
                lo = Some(match lo {
                    Some(l) if l <= f => l,
                    _ => f,
                });
                hi = Some(match hi {
                    Some(h) if h >= c => h,
                    _ => c,
                });
            }
        }
        Ok(Self::raw(lo.unwrap(), hi.unwrap(), a.bits, a.digits))
    }

    pub fn recip(&self) -> Result<Self> {
        let one = Self::raw(
            BigInt::one() << self.bits,
            BigInt::one() << self.bits,
            self.bits,
            self.digits,
        );
        one.checked_div(self)
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.hi.is_negative() {
            return Err(domain("square root of a negative enclosure"));
        }
        let lo = if self.lo.is_negative() {
            BigInt::zero()
        } else {
            (&self.lo << self.bits).sqrt()
        };
        let hi = ceil_sqrt(&(&self.hi << self.bits));
        Ok(Self::raw(lo, hi, self.bits, self.digits))
    }

    /// Natural logarithm; the enclosure must be strictly positive.
    pub fn ln(&self) -> Result<Self> {
        if !self.lo.is_positive() {
            return Err(domain("logarithm of a non-positive enclosure"));
        }
        let at_lo = ln_point(&self.lo, self.bits);
        let wp = self.bits + GUARD_BITS;
        let shift = wp - self.bits;
        // ln(hi) ≤ ln(lo) + (hi − lo)/lo.
        let width = &self.hi - &self.lo;
        let hi = if width.is_zero() {
            at_lo.hi
        } else {
            at_lo.hi + ceil_div(&(width << wp), &self.lo)
        };
        Ok(Self::raw(
            floor_shr(&at_lo.lo, shift),
            ceil_shr(&hi, shift),
            self.bits,
            self.digits,
        ))
    }

    pub fn exp(&self) -> Result<Self> {
        let lo = exp_point(&self.lo, self.bits)?.lo;
        let hi = exp_point(&self.hi, self.bits)?.hi;
        let wp = self.bits + GUARD_BITS;
        let shift = wp - self.bits;
        Ok(Self::raw(
            floor_shr(&lo, shift),
            ceil_shr(&hi, shift),
            self.bits,
            self.digits,
        ))
    }

    /// Simultaneous enclosures of `sin` and `cos`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let wp = self.bits + GUARD_BITS;
        let x = self.rescale(wp, self.digits);
        let pi = pi_at(wp, self.digits);
        let two_pi = pi.mul_int(&BigInt::from(2));
        // Bring |x| to at most ~π using the midpoint as a guide.
        let turns = (x.to_f64() / (2.0 * std::f64::consts::PI)).round() as i64;
        let x = &x - &two_pi.mul_int(&BigInt::from(turns));
        let x2 = x.square();
        let eps = BigInt::one();
        let mut sin = x.clone();
        let mut cos = Self::raw(BigInt::one() << wp, BigInt::one() << wp, wp, self.digits);
        let mut s_term = x.clone();
        let mut c_term = cos.clone();
        let mut j: u64 = 1;
        loop {
            s_term = (&s_term * &x2).div_int(&BigInt::from((2 * j) * (2 * j + 1)));
            c_term = (&c_term * &x2).div_int(&BigInt::from((2 * j - 1) * (2 * j)));
            if j % 2 == 1 {
                sin = &sin - &s_term;
                cos = &cos - &c_term;
            } else {
                sin = &sin + &s_term;
                cos = &cos + &c_term;
            }
            let mag = std::cmp::max(s_term.abs().hi.clone(), c_term.abs().hi.clone());
            if mag <= eps && j > 2 {
                break;
            }
            j += 1;
        }
        // Alternating tails are bounded by the next term, which is below the
        // last one once j > |x|.
        let tail = std::cmp::max(s_term.abs().hi, c_term.abs().hi) + 1;
        let widen = |v: Self| Self::raw(&v.lo - &tail, &v.hi + &tail, wp, v.digits);
        let sin = widen(sin).rescale(self.bits, self.digits);
        let cos = widen(cos).rescale(self.bits, self.digits);
        (sin, cos)
    }

    pub fn pi(digits: u32) -> Self {
        let (bits, digits) = Self::scale_for(digits);
        pi_at(bits, digits)
    }

    pub fn ln2(digits: u32) -> Self {
        let (bits, digits) = Self::scale_for(digits);
        ln2_at(bits, digits)
    }

    /// Widen the enclosure symmetrically by `r` (absolute).
    pub fn widen(&self, r: &BigRational) -> Self {
        let rr = Self::ratio_at_bits(r.numer(), r.denom(), self.bits, self.digits);
        Self::raw(&self.lo - &rr.hi, &self.hi + &rr.hi, self.bits, self.digits)
    }

    /// Convex hull of two enclosures.
    pub fn hull(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self::raw(
            std::cmp::min(a.lo.clone(), b.lo.clone()),
            std::cmp::max(a.hi.clone(), b.hi.clone()),
            a.bits,
            a.digits,
        )
    }
}

impl fmt::Display for RealApprox {
    /// Decimal rendering of the midpoint with `digits` places.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let places = f.precision().unwrap_or(self.digits as usize);
        let v = self.value();
        f.write_str(&format_decimal(&v, places))
    }
}

fn ratio_to_f64(v: &BigRational) -> f64 {
    let n = v.numer();
    let d = v.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    // Shift both into f64 range before dividing.
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let nf = (n >> shift_n as u32).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift_d as u32).to_f64().unwrap_or(f64::NAN);
    nf / df * 2f64.powi((shift_n - shift_d) as i32)
}

/// Truncated decimal expansion of a rational.
pub fn format_decimal(v: &BigRational, places: usize) -> String {
    let neg = v.is_negative();
    let a = v.abs();
    let scale = BigInt::from(10).pow(places as u32);
    let scaled = (a.numer() * &scale).div_floor(a.denom());
    let (int, frac) = scaled.div_rem(&scale);
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if places > 0 {
        s.push('.');
        let fs = frac.to_string();
        for _ in fs.len()..places {
            s.push('0');
        }
        s.push_str(&fs);
    }
    s
}

/// Parses a plain decimal literal into an exact rational.
pub fn parse_decimal(lit: &str) -> BigRational {
    let lit = lit.trim();
    let (neg, body) = match lit.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, lit),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().expect("malformed decimal literal");
    let den = BigInt::from(10).pow(frac.len() as u32);
    let q = BigRational::new(num, den);
    if neg {
        -q
    } else {
        q
    }
}

fn atanh_series(t: &RealApprox) -> RealApprox {
    let wp = t.bits;
    let t2 = t.square();
    let mut sum = t.clone();
    let mut term = t.clone();
    let mut j: u64 = 1;
    loop {
        term = &term * &t2;
        let part = term.div_int(&BigInt::from(2 * j + 1));
        sum = &sum + &part;
        if term.abs().hi <= BigInt::one() {
            break;
        }
        j += 1;
    }
    // |t| ≤ 1/3 here, so the remaining tail is below the last term.
    let tail = term.abs().hi + 1;
    RealApprox::raw(&sum.lo - &tail, &sum.hi + &tail, wp, t.digits)
}

fn atan_series(t: &RealApprox) -> RealApprox {
    let wp = t.bits;
    let t2 = t.square();
    let mut sum = t.clone();
    let mut term = t.clone();
    let mut j: u64 = 1;
    loop {
        term = &term * &t2;
        let part = term.div_int(&BigInt::from(2 * j + 1));
        if j % 2 == 1 {
            sum = &sum - &part;
        } else {
            sum = &sum + &part;
        }
        if term.abs().hi <= BigInt::one() {
            break;
        }
        j += 1;
    }
    let tail = term.abs().hi + 1;
    RealApprox::raw(&sum.lo - &tail, &sum.hi + &tail, wp, t.digits)
}

fn ln2_const() -> &'static RealApprox {
    static LN2: OnceLock<RealApprox> = OnceLock::new();
    LN2.get_or_init(|| {
        let third = RealApprox::ratio_at_bits(&BigInt::one(), &BigInt::from(3), CONST_BITS, 0);
        atanh_series(&third).mul_int(&BigInt::from(2))
    })
}

fn pi_const() -> &'static RealApprox {
    static PI: OnceLock<RealApprox> = OnceLock::new();
    PI.get_or_init(|| {
        let a = RealApprox::ratio_at_bits(&BigInt::one(), &BigInt::from(5), CONST_BITS, 0);
        let b = RealApprox::ratio_at_bits(&BigInt::one(), &BigInt::from(239), CONST_BITS, 0);
        let a = atan_series(&a).mul_int(&BigInt::from(16));
        let b = atan_series(&b).mul_int(&BigInt::from(4));
        &a - &b
    })
}

fn ln2_at(bits: u32, digits: u32) -> RealApprox {
    if bits + 8 <= CONST_BITS {
        ln2_const().rescale(bits, digits)
    } else {
        let wp = bits + GUARD_BITS;
        let third = RealApprox::ratio_at_bits(&BigInt::one(), &BigInt::from(3), wp, digits);
        atanh_series(&third).mul_int(&BigInt::from(2)).rescale(bits, digits)
    }
}

fn pi_at(bits: u32, digits: u32) -> RealApprox {
    if bits + 8 <= CONST_BITS {
        pi_const().rescale(bits, digits)
    } else {
        let wp = bits + GUARD_BITS;
        let a = RealApprox::ratio_at_bits(&BigInt::one(), &BigInt::from(5), wp, digits);
        let b = RealApprox::ratio_at_bits(&BigInt::one(), &BigInt::from(239), wp, digits);
        let a = atan_series(&a).mul_int(&BigInt::from(16));
        let b = atan_series(&b).mul_int(&BigInt::from(4));
        (&a - &b).rescale(bits, digits)
    }
}

/// Enclosure of `ln(m / 2^bits)` at `bits + GUARD_BITS` bits, `m > 0`.
fn ln_point(m: &BigInt, bits: u32) -> RealApprox {
    let wp = bits + GUARD_BITS;
    // v = m·2^-bits = w·2^k with w in [0.75, 1.5).
    let top = m.bits() as i64 - 1;
    let mut k = top - bits as i64;
    if top >= 1 && m.bit((top - 1) as u64) {
        k += 1;
    }
    let e = bits as i64 + k;
    // w = m / 2^e, t = (w - 1)/(w + 1) = (m - 2^e)/(m + 2^e)
    let (num, den) = if e >= 0 {
        let p = BigInt::one() << e as u32;
        (m - &p, m + &p)
    } else {
        let mm = m << (-e) as u32;
        (&mm - 1, &mm + 1)
    };
    let t = RealApprox::ratio_at_bits(&num, &den, wp, 0);
    let at = atanh_series(&t).mul_int(&BigInt::from(2));
    let ln2 = ln2_at(wp, 0);
    &at + &ln2.mul_int(&BigInt::from(k))
}

/// Enclosure of `exp(m / 2^bits)` at `bits + GUARD_BITS` bits.
fn exp_point(m: &BigInt, bits: u32) -> Result<RealApprox> {
    const HALVINGS: u32 = 12;
    let v = RealApprox::raw(m.clone(), m.clone(), bits, 0);
    let approx = v.to_f64();
    if !approx.is_finite() || approx.abs() > 1.0e7 {
        return Err(domain("exponential argument out of range"));
    }
    let wp = bits + GUARD_BITS + HALVINGS + 16;
    let ln2 = ln2_at(wp, 0);
    let k = (approx / std::f64::consts::LN_2).round() as i64;
    let r = &v.rescale(wp, 0) - &ln2.mul_int(&BigInt::from(k));
    let r = r.mul_pow2(-(HALVINGS as i64));
    let one = RealApprox::raw(BigInt::one() << wp, BigInt::one() << wp, wp, 0);
    let mut sum = one.clone();
    let mut term = one;
    let mut j: u64 = 1;
    loop {
        term = (&term * &r).div_int(&BigInt::from(j));
        sum = &sum + &term;
        if term.abs().hi <= BigInt::one() {
            break;
        }
        j += 1;
    }
    let tail = term.abs().hi * 2 + 1;
    let mut e = RealApprox::raw(&sum.lo - &tail, &sum.hi + &tail, wp, 0);
    for _ in 0..HALVINGS {
        e = e.square();
    }
    let e = e.mul_pow2(k);
    Ok(e.rescale(bits + GUARD_BITS, 0))
}

impl<'a> Add<&'a RealApprox> for &'a RealApprox {
    type Output = RealApprox;
    fn add(self, rhs: &'a RealApprox) -> RealApprox {
        let (a, b) = self.aligned(rhs);
        RealApprox::raw(&a.lo + &b.lo, &a.hi + &b.hi, a.bits, a.digits)
    }
}

impl<'a> Sub<&'a RealApprox> for &'a RealApprox {
    type Output = RealApprox;
    fn sub(self, rhs: &'a RealApprox) -> RealApprox {
        let (a, b) = self.aligned(rhs);
        RealApprox::raw(&a.lo - &b.hi, &a.hi - &b.lo, a.bits, a.digits)
    }
}

impl<'a> Mul<&'a RealApprox> for &'a RealApprox {
    type Output = RealApprox;
    fn mul(self, rhs: &'a RealApprox) -> RealApprox {
        let (a, b) = self.aligned(rhs);
        let p = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = p.iter().min().unwrap();
        let max = p.iter().max().unwrap();
        RealApprox::raw(floor_shr(min, a.bits), ceil_shr(max, a.bits), a.bits, a.digits)
    }
}

impl Neg for &RealApprox {
    type Output = RealApprox;
    fn neg(self) -> RealApprox {
        RealApprox::raw(-&self.hi, -&self.lo, self.bits, self.digits)
    }
}

impl Neg for RealApprox {
    type Output = RealApprox;
    fn neg(self) -> RealApprox {
        -&self
    }
}

/// Runs `attempt` at `start` digits, doubling until it yields an answer or
/// `max` digits is exceeded.
pub fn certify<T>(
    what: &str,
    start: u32,
    max: u32,
    mut attempt: impl FnMut(u32) -> Result<Option<T>>,
) -> Result<(T, u32)> {
    let mut digits = start.max(1);
    loop {
        if let Some(v) = attempt(digits)? {
            return Ok((v, digits));
        }
        if digits >= max {
            return Err(Error::PrecisionExhausted {
                what: what.to_string(),
                digits,
            });
        }
        digits = (digits * 2).min(max);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &RealApprox, expect: f64, tol: f64) -> bool {
        (a.to_f64() - expect).abs() < tol
    }

    #[test]
    fn shifts_round_as_documented() {
        assert_eq!(floor_shr(&BigInt::from(-5), 1), BigInt::from(-3));
        assert_eq!(ceil_shr(&BigInt::from(-5), 1), BigInt::from(-2));
        assert_eq!(ceil_shr(&BigInt::from(5), 1), BigInt::from(3));
    }

    #[test]
    fn constants_match_reference_digits() {
        let pi = RealApprox::pi(40);
        assert_eq!(format!("{:.30}", pi), "3.141592653589793238462643383279");
        let ln2 = RealApprox::ln2(40);
        assert_eq!(format!("{:.30}", ln2), "0.693147180559945309417232121458");
        let tiny = BigRational::new(BigInt::one(), BigInt::from(10).pow(40));
        assert!(pi.error_bound() < tiny);
    }

    #[test]
    fn ln_of_one_is_zero_and_encloses_known_values() {
        let z = RealApprox::from_i64(1, 30).ln().unwrap();
        assert!(z.contains_zero());
        let l10 = RealApprox::from_i64(10, 30).ln().unwrap();
        assert_eq!(format!("{:.25}", l10), "2.3025850929940456840179914");
        let small = RealApprox::from_ratio(&BigInt::from(1), &BigInt::from(1000), 30)
            .ln()
            .unwrap();
        assert!(close(&small, -6.907755278982137, 1e-12));
        assert!(RealApprox::from_i64(0, 10).ln().is_err());
    }

    #[test]
    fn exp_inverts_ln() {
        let x = RealApprox::from_decimal("2.75", 40);
        let back = x.exp().unwrap().ln().unwrap();
        assert!(back
            .certified_cmp(&x.widen(&parse_decimal("0.000000000000000000000000000001")))
            .is_none());
        assert!(close(
            &RealApprox::from_decimal("-3.5", 30).exp().unwrap(),
            (-3.5f64).exp(),
            1e-15
        ));
    }

    #[test]
    fn sin_cos_basic_identities() {
        let (s, c) = RealApprox::from_decimal("1.25", 40).sin_cos();
        assert!(close(&s, 1.25f64.sin(), 1e-14));
        assert!(close(&c, 1.25f64.cos(), 1e-14));
        let one = &s.square() + &c.square();
        assert!(one.certified_cmp(&RealApprox::from_i64(1, 40)).is_none());
        let (s, c) = RealApprox::pi(40).mul_int(&BigInt::from(2)).sin_cos();
        assert!(s.contains_zero());
        assert!(close(&c, 1.0, 1e-30));
    }

    #[test]
    fn unique_integer_needs_narrow_enclosure() {
        let x = RealApprox::from_ratio(&BigInt::from(7), &BigInt::from(1), 20);
        assert_eq!(x.unique_integer(), Some(BigInt::from(7)));
        let y = RealApprox::from_ratio(&BigInt::from(15), &BigInt::from(2), 20);
        assert_eq!(y.unique_integer(), None);
    }

    #[test]
    fn certify_escalates_until_decided() {
        let (v, d) = certify("toy", 10, 160, |digits| Ok((digits >= 40).then_some(digits))).unwrap();
        assert_eq!(v, 40);
        assert_eq!(d, 40);
        assert!(certify::<()>("never", 10, 40, |_| Ok(None)).is_err());
    }
}
