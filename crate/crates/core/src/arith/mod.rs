//! Exact arithmetic substrate.

pub mod poly;
pub mod primes;
pub mod quad;
pub mod real;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `(F_k, L_k)` for any integer `k`, using `F_{−k} = (−1)^{k+1} F_k` and
/// `L_{−k} = (−1)^k L_k`.
pub fn fib_lucas(k: i64) -> (BigInt, BigInt) {
    let m = k.unsigned_abs();
    let (f, l) = fib_lucas_nonneg(m);
    if k >= 0 {
        (f, l)
    } else if m.is_multiple_of(2) {
        (-f, l)
    } else {
        (f, -l)
    }
}

fn fib_lucas_nonneg(m: u64) -> (BigInt, BigInt) {
    // Fast doubling on (F_k, F_{k+1}).
    let mut a = BigInt::zero();
    let mut b = BigInt::one();
    for bit in (0..64 - m.leading_zeros()).rev() {
        let two_b_minus_a = (&b << 1) - &a;
        let c = &a * &two_b_minus_a;
        let d = &a * &a + &b * &b;
        if (m >> bit) & 1 == 1 {
            b = &c + &d;
            a = d;
        } else {
            a = c;
            b = d;
        }
    }
    // L_k = 2F_{k+1} − F_k
    let l = (&b << 1) - &a;
    (a, l)
}

/// p-adic valuation of a non-zero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(13, 6), BigInt::from(1716));
        assert_eq!(binomial(5, 7), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
    }

    #[test]
    fn fib_lucas_small_and_negative() {
        let want = [(0, 2), (1, 1), (1, 3), (2, 4), (3, 7), (5, 11), (8, 18)];
        for (k, (f, l)) in want.iter().enumerate() {
            assert_eq!(fib_lucas(k as i64), (BigInt::from(*f), BigInt::from(*l)));
        }
        assert_eq!(fib_lucas(13).1, BigInt::from(521));
        assert_eq!(fib_lucas(-1), (BigInt::from(1), BigInt::from(-1)));
        assert_eq!(fib_lucas(-2), (BigInt::from(-1), BigInt::from(3)));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(4268032), 2), 13);
        assert_eq!(valuation(&BigInt::from(-1331), 11), 3);
        assert_eq!(valuation(&BigInt::from(7), 11), 0);
    }
}
