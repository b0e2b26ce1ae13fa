//! Primality, factorisation and modular square roots.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Outcome of a primality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Primality {
    Prime,
    /// Passed strong probable-prime tests beyond the deterministic range.
    ProbablePrime,
    Composite,
}

impl Primality {
    pub fn is_probably_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Bases 2..41 are deterministic below this bound.
fn deterministic_limit() -> BigInt {
    "3317044064679887385961981".parse().unwrap()
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &MR_BASES[..12] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &BigInt, a: u64) -> bool {
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut x = BigInt::from(a).modpow(&d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigInt::from(2), n);
        if x == nm1 {
            return true;
        }
    }
    false
}

/// Primality of an arbitrary integer.
pub fn is_prime(n: &BigInt) -> Primality {
    if let Some(m) = n.to_u64() {
        return if is_prime_u64(m) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    if n.is_negative() {
        return Primality::Composite;
    }
    for p in MR_BASES {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    if MR_BASES.iter().all(|&a| strong_probable_prime(n, a)) {
        if n < &deterministic_limit() {
            Primality::Prime
        } else {
            Primality::ProbablePrime
        }
    } else {
        Primality::Composite
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Pollard rho with Floyd cycle detection; `n` must be odd composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorisation `[(p, e)]` in increasing order: trial division up to
/// `2^16`, then Pollard rho on the cofactor.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let push = |p: u64, n: &mut u64, out: &mut Vec<(u64, u32)>| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n, &mut out);
    let mut p = 3u64;
    while p <= 65_536 && p * p <= n {
        push(p, &mut n, &mut out);
        p += 2;
    }
    if n > 1 {
        let mut stack = vec![n];
        let mut big = Vec::new();
        while let Some(m) = stack.pop() {
            if is_prime_u64(m) {
                big.push(m);
            } else {
                let d = pollard_rho(m);
                stack.push(d);
                stack.push(m / d);
            }
        }
        big.sort_unstable();
        for q in big {
            match out.last_mut() {
                Some((last, e)) if *last == q => *e += 1,
                _ => out.push((q, 1)),
            }
        }
    }
    out
}

/// Legendre symbol `(a|p)` for odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Tonelli–Shanks square root of `a` modulo an odd prime `p`.
pub fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if legendre(a as i64, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..p).find(|&z| legendre(z as i64, p) == -1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Multiplicative order of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn order_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd_u64(a % m, m) != 1 {
        return None;
    }
    let phi: u64 = factor_u64(m).iter().map(|&(p, e)| (p - 1) * p.pow(e - 1)).product();
    let mut ord = phi;
    for (p, _) in factor_u64(phi) {
        while ord.is_multiple_of(p) && pow_mod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    Some(ord)
}

/// Smallest positive primitive root modulo an odd prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    let fs = factor_u64(p - 1);
    (2..p)
        .find(|&g| fs.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("primes have primitive roots")
}

/// `Some(r)` with `r² = n` when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// `Some((r, k))` with `r^k = n`, `k ≥ 2` maximal, when `|n| > 1` is a perfect power.
pub fn perfect_power(n: &BigInt) -> Option<(BigInt, u32)> {
    if n.abs() <= BigInt::one() {
        return None;
    }
    let bits = n.bits() as u32;
    for k in (2..=bits).rev() {
        if n.is_negative() && k % 2 == 0 {
            continue;
        }
        let r = if n.is_negative() {
            -(-n).nth_root(k)
        } else {
            n.nth_root(k)
        };
        if r.pow(k) == *n {
            return Some((r, k));
        }
    }
    None
}

/// All primes up to `n` (sieve of Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// `true` when `n` is a perfect square.
pub fn is_square_u64(n: u64) -> bool {
    let r = n.sqrt();
    r * r == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_primes_agree_with_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime_u64(n), trial_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn family_members_and_known_composites() {
        for q in [1801u64, 160201, 1245001, 4792201, 8179201] {
            assert!(is_prime_u64(q));
        }
        assert!(!is_prime_u64(31201));
        assert_eq!(factor_u64(31201), vec![(41, 1), (761, 1)]);
        // Strong pseudoprime to bases 2..37 but caught by 41.
        let n: BigInt = "3825123056546413051".parse().unwrap();
        assert_eq!(is_prime(&n), Primality::Composite);
        let m127 = (BigInt::one() << 127) - 1;
        assert_eq!(is_prime(&m127), Primality::ProbablePrime);
        let p: BigInt = "1000000000000000000000007".parse().unwrap();
        assert_eq!(is_prime(&p), Primality::Prime);
    }

    #[test]
    fn factoring_with_large_cofactors() {
        let n = 1_000_003u64 * 998_244_353;
        assert_eq!(factor_u64(n), vec![(1_000_003, 1), (998_244_353, 1)]);
        assert_eq!(factor_u64(1 << 20), vec![(2, 20)]);
        assert_eq!(factor_u64(1), vec![]);
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(legendre(5, 11), 1);
        assert_eq!(legendre(5, 13), -1);
        assert_eq!(legendre(22, 11), 0);
        assert_eq!(primitive_root(11), 2);
        assert_eq!(primitive_root(19), 2);
        assert_eq!(primitive_root(43), 3);
        assert_eq!(order_mod(1801, 600), Some(1));
        assert_eq!(order_mod(7, 600), Some(4));
        assert_eq!(order_mod(5, 600), None);
    }

    #[test]
    fn powers() {
        assert_eq!(perfect_power(&BigInt::from(4)), Some((BigInt::from(2), 2)));
        assert_eq!(perfect_power(&BigInt::from(64)), Some((BigInt::from(2), 6)));
        assert_eq!(perfect_power(&BigInt::from(-27)), Some((BigInt::from(-3), 3)));
        assert_eq!(perfect_power(&BigInt::from(18)), None);
        assert_eq!(exact_sqrt(&BigInt::from(361)), Some(BigInt::from(19)));
        assert_eq!(exact_sqrt(&BigInt::from(362)), None);
    }

    proptest! {
        #[test]
        fn tonelli_shanks_roots_square_back(idx in 0usize..500, a in 1u64..1_000_000) {
            let ps = primes_up_to(4000);
            let p = ps[1 + idx % (ps.len() - 1)];
            match sqrt_mod_p(a, p) {
                Some(r) => prop_assert_eq!(mul_mod(r, r, p), a % p),
                None => prop_assert_eq!(legendre(a as i64, p), -1),
            }
        }

        #[test]
        fn factorisation_multiplies_back(n in 2u64..u64::MAX / 4) {
            let f = factor_u64(n);
            let prod: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(prod, n);
            prop_assert!(f.iter().all(|&(p, _)| is_prime_u64(p)));
        }
    }
}
