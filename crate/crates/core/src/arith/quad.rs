//! Elements `(a + b√d)/denom` of a quadratic order.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::real::RealApprox;
use crate::error::{domain, Result};

/// An element `(a + b√d)/denom` with `denom ∈ {1, 2}`.
///
/// Half-integral elements are only allowed when `d ≡ 1 (mod 4)` and
/// `a ≡ b (mod 2)`. The representation is canonical: `denom` is 1 whenever
/// both `a` and `b` are even, so derived equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    d: i64,
    a: BigInt,
    b: BigInt,
    denom: u8,
}

fn is_squarefree(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let m = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

impl QuadInt {
    pub fn new(d: i64, a: BigInt, b: BigInt, denom: u8) -> Result<Self> {
        if !is_squarefree(d) {
            return Err(domain(format!("d = {d} is not a squarefree non-unit")));
        }
        match denom {
            1 => Ok(QuadInt { d, a, b, denom }),
            2 => {
                if a.is_even() && b.is_even() {
                    return Ok(QuadInt {
                        d,
                        a: a / 2,
                        b: b / 2,
                        denom: 1,
                    });
                }
                if d.rem_euclid(4) != 1 {
                    return Err(domain(format!("half-integers need d ≡ 1 (mod 4), got {d}")));
                }
                if a.is_even() != b.is_even() {
                    return Err(domain("half-integer element needs a ≡ b (mod 2)"));
                }
                Ok(QuadInt { d, a, b, denom })
            }
            _ => Err(domain(format!("denominator must be 1 or 2, got {denom}"))),
        }
    }

    pub fn from_i64s(d: i64, a: i64, b: i64, denom: u8) -> Result<Self> {
        Self::new(d, BigInt::from(a), BigInt::from(b), denom)
    }

    pub fn from_int(d: i64, n: BigInt) -> Result<Self> {
        Self::new(d, n, BigInt::zero(), 1)
    }

    pub fn one(d: i64) -> Result<Self> {
        Self::from_int(d, BigInt::one())
    }

    /// The fundamental unit `ε = (1+√5)/2`.
    pub fn epsilon() -> Self {
        QuadInt {
            d: 5,
            a: BigInt::one(),
            b: BigInt::one(),
            denom: 2,
        }
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn denom(&self) -> u8 {
        self.denom
    }

    /// Coordinates over the basis `(1, √d)/2`: returns `(A, B)` with value `(A + B√d)/2`.
    pub fn halves(&self) -> (BigInt, BigInt) {
        if self.denom == 2 {
            (self.a.clone(), self.b.clone())
        } else {
            (&self.a * 2, &self.b * 2)
        }
    }

    fn from_halves(d: i64, a: BigInt, b: BigInt) -> Self {
        Self::new(d, a, b, 2).expect("closed under ring operations")
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadInt {
            d: self.d,
            a: self.a.clone(),
            b: -&self.b,
            denom: self.denom,
        }
    }

    pub fn norm(&self) -> BigInt {
        let n = &self.a * &self.a - BigInt::from(self.d) * &self.b * &self.b;
        let dd = BigInt::from(self.denom as u32 * self.denom as u32);
        n / dd
    }

    pub fn trace(&self) -> BigInt {
        (&self.a * 2) / BigInt::from(self.denom)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(domain(format!(
                "mismatched quadratic orders: d = {} vs d = {}",
                self.d, other.d
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let (a1, b1) = self.halves();
        let (a2, b2) = other.halves();
        Ok(Self::from_halves(self.d, a1 + a2, b1 + b2))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QuadInt {
            d: self.d,
            a: -&self.a,
            b: -&self.b,
            denom: self.denom,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let (a1, b1) = self.halves();
        let (a2, b2) = other.halves();
        let d = BigInt::from(self.d);
        // ((a1 + b1√d)(a2 + b2√d))/4 = ((a1a2 + d b1b2)/2 + (a1b2 + a2b1)/2 √d)/2
        let a = (&a1 * &a2 + &d * &b1 * &b2) / 2;
        let b = (&a1 * &b2 + &a2 * &b1) / 2;
        Ok(Self::from_halves(self.d, a, b))
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let (a, b) = self.halves();
        Self::from_halves(self.d, a * k, b * k)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.d).expect("valid d");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same order");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same order");
            }
        }
        acc
    }

    /// `self / other` when the quotient lies in the order.
    pub fn div_exact(&self, other: &Self) -> Result<Option<Self>> {
        self.check_same(other)?;
        let n = other.norm();
        if n.is_zero() {
            return Err(domain("division by zero"));
        }
        let (a, b) = self.mul(&other.conj())?.halves();
        if !a.is_multiple_of(&n) || !b.is_multiple_of(&n) {
            return Ok(None);
        }
        Ok(Self::new(self.d, a / &n, b / &n, 2).ok())
    }

    /// Sign of the real embedding `√d > 0`.
    pub fn real_sign(&self) -> Result<Ordering> {
        if self.d < 0 {
            return Err(domain("imaginary quadratic element has no real sign"));
        }
        Ok(sign_of_sum(&self.a, &self.b, &BigInt::from(self.d)))
    }

    /// Exact comparison of real embeddings.
    pub fn cmp_real(&self, other: &Self) -> Result<Ordering> {
        self.sub(other)?.real_sign()
    }

    /// Real embedding as a certified enclosure.
    pub fn to_real(&self, digits: u32) -> Result<RealApprox> {
        if self.d < 0 {
            return Err(domain("imaginary quadratic element has no real embedding"));
        }
        let root = RealApprox::from_i64(self.d, digits).sqrt()?;
        let v = &RealApprox::from_int(&self.a, digits) + &root.mul_int(&self.b);
        Ok(v.div_int(&BigInt::from(self.denom)))
    }
}

/// Exact sign of `a + b√w` for `w > 0` non-square.
pub fn sign_of_sum(a: &BigInt, b: &BigInt, w: &BigInt) -> Ordering {
    let sa = a.sign();
    let sb = b.sign();
    use num_bigint::Sign::*;
    match (sa, sb) {
        (NoSign, NoSign) => Ordering::Equal,
        (Plus, Plus) | (Plus, NoSign) | (NoSign, Plus) => Ordering::Greater,
        (Minus, Minus) | (Minus, NoSign) | (NoSign, Minus) => Ordering::Less,
        _ => {
            let a2 = a * a;
            let b2w = b * b * w;
            let mag = a2.cmp(&b2w);
            // The term of larger magnitude decides.
            match (mag, sa) {
                (Ordering::Equal, _) => Ordering::Equal,
                (Ordering::Greater, Plus) | (Ordering::Less, Minus) => Ordering::Greater,
                _ => Ordering::Less,
            }
        }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = if self.b.is_zero() {
            format!("{}", self.a)
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            let mag = self.b.abs();
            let coef = if mag.is_one() { String::new() } else { mag.to_string() };
            format!("{}{}{}√{}", self.a, sign, coef, self.d)
        };
        if self.denom == 2 {
            write!(f, "({body})/2")
        } else {
            f.write_str(&body)
        }
    }
}

/// Exact product of two elements of the same order.
pub fn quad_mul(alpha: &QuadInt, beta: &QuadInt) -> Result<QuadInt> {
    alpha.mul(beta)
}

/// `ε^k` with `ε = (1+√5)/2`; negative `k` uses `ε⁻¹ = −ε′`.
pub fn quad_pow_unit(k: i64) -> QuadInt {
    let e = QuadInt::epsilon();
    let base = if k >= 0 { e } else { e.conj().neg() };
    base.pow(k.unsigned_abs() as u32)
}

const LN_EPSILON_DIGITS: u32 = 200;

/// `log ε`, served from a cached high-precision enclosure when possible.
pub fn ln_epsilon(digits: u32) -> Result<RealApprox> {
    static CACHE: OnceLock<RealApprox> = OnceLock::new();
    if digits + 2 <= LN_EPSILON_DIGITS {
        if let Some(c) = CACHE.get() {
            return Ok(c.with_digits(digits));
        }
        let c = QuadInt::epsilon().to_real(LN_EPSILON_DIGITS)?.ln()?;
        return Ok(CACHE.get_or_init(|| c).with_digits(digits));
    }
    QuadInt::epsilon().to_real(digits)?.ln()
}

/// Natural logarithm of the real embedding of `α`, certified to `digits`.
pub fn real_log(alpha: &QuadInt, digits: u32) -> Result<RealApprox> {
    if alpha.real_sign()? != Ordering::Greater {
        return Err(domain(format!("logarithm of non-positive element {alpha}")));
    }
    alpha.to_real(digits)?.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(d: i64, a: i64, b: i64, den: u8) -> QuadInt {
        QuadInt::from_i64s(d, a, b, den).unwrap()
    }

    #[test]
    fn products_from_the_worked_examples() {
        assert_eq!(quad_mul(&q(5, 4, 1, 1), &q(5, 4, -1, 1)).unwrap(), q(5, 11, 0, 1));
        let e = QuadInt::epsilon();
        assert_eq!(quad_mul(&e, &e.conj()).unwrap(), q(5, -1, 0, 1));
        assert_eq!(quad_mul(&q(5, 1, 3, 2), &q(5, 1, -3, 2)).unwrap(), q(5, -11, 0, 1));
        assert!(quad_mul(&q(5, 1, 1, 1), &q(-11, 1, 1, 1)).is_err());
    }

    #[test]
    fn unit_powers() {
        assert_eq!(quad_pow_unit(0), q(5, 1, 0, 1));
        assert_eq!(quad_pow_unit(2), q(5, 3, 1, 2));
        assert_eq!(quad_pow_unit(-1), q(5, -1, 1, 2));
        let (f, l) = crate::arith::fib_lucas(-7);
        assert_eq!(quad_pow_unit(-7), QuadInt::new(5, l, f, 2).unwrap());
    }

    #[test]
    fn canonical_denominator() {
        let x = q(5, 4, 2, 2);
        assert_eq!(x.denom(), 1);
        assert_eq!(x, q(5, 2, 1, 1));
        assert!(QuadInt::from_i64s(5, 1, 2, 2).is_err());
        assert!(QuadInt::from_i64s(-5, 1, 1, 2).is_err());
        assert!(QuadInt::from_i64s(-11, 1, 1, 2).is_ok());
        assert!(QuadInt::from_i64s(20, 1, 1, 1).is_err());
    }

    #[test]
    fn exact_division_and_signs() {
        let pi = q(5, 4, 1, 1);
        let e = QuadInt::epsilon();
        assert_eq!(pi.div_exact(&e).unwrap().unwrap(), q(5, 1, 3, 2));
        assert_eq!(pi.div_exact(&q(5, 3, 0, 1)).unwrap(), None);
        assert_eq!(q(5, 1, -3, 2).real_sign().unwrap(), Ordering::Less);
        assert_eq!(q(5, -2, 1, 1).real_sign().unwrap(), Ordering::Greater);
        assert_eq!(q(5, 3, 1, 2).cmp_real(&q(5, 2, 0, 1)).unwrap(), Ordering::Greater);
    }

    #[test]
    fn logs_of_units() {
        let l1 = real_log(&QuadInt::epsilon(), 20).unwrap();
        assert_eq!(format!("{:.20}", l1), "0.48121182505960344749");
        let l2 = real_log(&quad_pow_unit(2), 20).unwrap();
        let twice = l1.mul_int(&BigInt::from(2));
        assert!(l2.certified_cmp(&twice).is_none());
        assert!(real_log(&q(5, 1, 0, 1), 20).unwrap().contains_zero());
        assert!(real_log(&q(5, 1, -3, 2), 20).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(q(5, 1, 3, 2).to_string(), "(1+3√5)/2");
        assert_eq!(q(5, 4, -1, 1).to_string(), "4-√5");
        assert_eq!(q(-11, 7, 0, 1).to_string(), "7");
    }

    fn arb_quad(d: i64) -> impl Strategy<Value = QuadInt> {
        (-10_000i64..10_000, -10_000i64..10_000, any::<bool>()).prop_map(move |(a, b, half)| {
            if half && d.rem_euclid(4) == 1 {
                let b = if (a - b) % 2 == 0 { b } else { b + 1 };
                QuadInt::from_i64s(d, a, b, 2).unwrap()
            } else {
                QuadInt::from_i64s(d, a, b, 1).unwrap()
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn norm_is_multiplicative(x in arb_quad(5), y in arb_quad(5)) {
            let xy = x.mul(&y).unwrap();
            prop_assert_eq!(xy.norm(), x.norm() * y.norm());
        }

        #[test]
        fn conjugation_is_a_ring_involution(x in arb_quad(-11), y in arb_quad(-11)) {
            prop_assert_eq!(x.conj().conj(), x.clone());
            prop_assert_eq!(x.mul(&y).unwrap().conj(), x.conj().mul(&y.conj()).unwrap());
            prop_assert_eq!(x.add(&y).unwrap().conj(), x.conj().add(&y.conj()).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn escalation_never_flips_a_certified_comparison(a in 1i64..5000, b in -100i64..100, t in 0i64..10) {
            let x = q(5, a, b, 1);
            prop_assume!(x.real_sign().unwrap() == Ordering::Greater);
            let thr = RealApprox::from_i64(t, 20);
            let lo = real_log(&x, 20).unwrap();
            if let Some(ord) = lo.certified_cmp(&thr) {
                let hi = real_log(&x, 40).unwrap();
                prop_assert_eq!(hi.certified_cmp(&thr.with_digits(40)), Some(ord));
            }
        }
    }
}
