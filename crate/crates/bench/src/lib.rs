//! Fixed workloads shared by the criterion benches.

use num_bigint::BigInt;

use expdio_core::hypergeom::{primes_one_mod_ten_above, REGIME_Q};

/// `y` values for the per-candidate sieve: two family primes and the `y` with
/// the largest partial quotient below 20001.
pub const SIEVE_YS: [u64; 3] = [1801, 160201, 12871];

/// Sieve window width in `y`.
pub const SIEVE_WINDOW: (u64, u64) = (100_011, 102_001);

/// Hypergeometric pairs of growing degree.
pub const PAIRS: [(u64, u64); 3] = [(1, 2), (5, 10), (10, 20)];

pub const PROPERTY_SAMPLES: usize = 100;

/// Primes `p ≡ 3 (mod 8)` for the splitting.
pub const SPLIT_PRIMES: [u64; 3] = [11, 19, 43];

/// The first prime `≡ 1 (mod 10)` above the regime threshold.
pub fn regime_prime() -> BigInt {
    BigInt::from(primes_one_mod_ten_above(REGIME_Q, 1)[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_are_valid() {
        assert!(SIEVE_YS.iter().all(|y| y % 10 == 1));
        assert!(SIEVE_WINDOW.0 % 10 == 1 && SIEVE_WINDOW.0 < SIEVE_WINDOW.1);
        assert!(SPLIT_PRIMES.iter().all(|p| p % 8 == 3));
        assert!(regime_prime() > BigInt::from(REGIME_Q));
    }
}
