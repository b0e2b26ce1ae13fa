//! Solution structure of `p·x² + q^(2n) = y^p`.
//!
//! Covers the parametrisation of solutions by an integer `a`, the prime
//! family `q = 2000v⁴ − 200v² + 1`, the congruence constraints on `(q, n)`,
//! exact witness checks, the Pell equation `5X² − 4 = Y²` and bounded
//! confirmations of facts imported from the literature.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::{is_prime, is_square_u64, order_mod, perfect_power, Primality};
use crate::arith::{binomial, fib_lucas};
use crate::bigjson;
use crate::error::{precondition, Error, Result};

/// A solution `(x, y, n)` of `p·x² + q^(2n) = y^p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionRecord {
    pub p: u64,
    #[serde(serialize_with = "bigjson::int")]
    pub q: BigInt,
    pub n: u32,
    #[serde(serialize_with = "bigjson::int")]
    pub x: BigInt,
    #[serde(serialize_with = "bigjson::int")]
    pub y: BigInt,
    pub v: Option<i64>,
}

impl SolutionRecord {
    /// The family member with parameter `v` (`p = 5`, `n = 1`).
    pub fn from_family(v: i64) -> Self {
        let (q, x, y) = family_values(&BigInt::from(v));
        SolutionRecord {
            p: 5,
            q,
            n: 1,
            x,
            y,
            v: Some(v),
        }
    }
}

/// Fibonacci and Lucas terms at index `k`; `ψ_k` is the Lucas term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LucasState {
    pub k: i64,
    pub f: BigInt,
    pub l: BigInt,
}

impl LucasState {
    pub fn new(k: i64) -> Self {
        let (f, l) = fib_lucas(k);
        LucasState { k, f, l }
    }

    pub fn psi(&self) -> &BigInt {
        &self.l
    }

    /// `L_k² − 5F_k² = 4·(−1)^k`.
    pub fn check(&self) -> bool {
        let lhs = &self.l * &self.l - BigInt::from(5) * &self.f * &self.f;
        let rhs = if self.k.rem_euclid(2) == 0 { 4 } else { -4 };
        lhs == BigInt::from(rhs)
    }
}

/// `(q(v), x(v), y(v)) = (2000v⁴ − 200v² + 1, 10v(80v⁴ − 40v² + 1), 20v² + 1)`.
pub fn family_values(v: &BigInt) -> (BigInt, BigInt, BigInt) {
    let v2 = v * v;
    let v4 = &v2 * &v2;
    let q = &v4 * 2000 - &v2 * 200 + 1;
    let x = v * 10 * (&v4 * 80 - &v2 * 40 + 1);
    let y = &v2 * 20 + 1;
    (q, x, y)
}

/// Returns `(±qⁿ candidate, x)` for the parameter `a`:
/// `Σ C(p,2i+1) a^(p−2i−1) (−p)^((p−2i−1)/2)` and
/// `Σ C(p,2i) a^(p−2i) (−p)^((p−2i−1)/2)`.
pub fn parametrize(p: u64, a: &BigInt) -> Result<(BigInt, BigInt)> {
    if p <= 3 || is_prime(&BigInt::from(p)) != Primality::Prime {
        return Err(precondition(format!("p = {p} must be a prime > 3")));
    }
    if p % 8 == 7 {
        return Err(precondition(format!("p = {p} ≡ 7 (mod 8) is excluded")));
    }
    let minus_p = -BigInt::from(p);
    let mut qn = BigInt::zero();
    let mut x = BigInt::zero();
    for i in 0..=(p - 1) / 2 {
        let e = p - 2 * i - 1;
        let w = minus_p.pow((e / 2) as u32);
        qn += binomial(p, 2 * i + 1) * a.pow(e as u32) * &w;
        x += binomial(p, 2 * i) * a.pow((e + 1) as u32) * &w;
    }
    Ok((qn, x))
}

/// One prime of the family `2000v⁴ − 200v² + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyPrime {
    pub v: u64,
    #[serde(serialize_with = "bigjson::int")]
    pub q: BigInt,
    /// `false` when primality is only probable.
    pub proven: bool,
}

/// All `v ∈ [1, v_max]` for which `2000v⁴ − 200v² + 1` is prime, in order.
pub fn family_search(v_max: u64) -> Vec<FamilyPrime> {
    (1..=v_max)
        .into_par_iter()
        .filter_map(|v| {
            let (q, _, _) = family_values(&BigInt::from(v));
            match is_prime(&q) {
                Primality::Composite => None,
                c => Some(FamilyPrime {
                    v,
                    q,
                    proven: c == Primality::Prime,
                }),
            }
        })
        .collect()
}

/// Why a pair `(q, n)` cannot carry a solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "code", rename_all = "kebab-case")]
pub enum QReason {
    NotOddPrime,
    QModNot1 { residue: u64, order: Option<u64> },
    NDivisibleBy { prime: u64 },
    NTooLarge { bound: u32 },
    NZero,
}

impl fmt::Display for QReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QReason::NotOddPrime => f.write_str("q is not an odd prime"),
            QReason::QModNot1 { .. } => f.write_str("q mod 600 ≠ 1"),
            QReason::NDivisibleBy { prime } => write!(f, "n divisible by {prime}"),
            QReason::NTooLarge { bound } => write!(f, "n ≥ {bound}"),
            QReason::NZero => f.write_str("n must be positive"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QVerdict {
    pub pass: bool,
    pub q_mod_600: u64,
    /// Multiplicative order of `q` modulo 600 (must be 1 for a solution).
    pub order_mod_600: Option<u64>,
    pub reasons: Vec<QReason>,
}

/// Exponents must stay below this bound.
pub const N_UPPER: u32 = 820;

/// Checks `q ≡ 1 (mod 600)`, `gcd(n, 30030) = 1` and `n < 820`.
pub fn check_q_constraints(q: &BigInt, n: u32) -> QVerdict {
    let mut reasons = Vec::new();
    let r = q.mod_floor(&BigInt::from(600)).to_u64().unwrap();
    let order = order_mod(r, 600);
    if q.is_even() || is_prime(q) == Primality::Composite {
        reasons.push(QReason::NotOddPrime);
    }
    if r != 1 {
        reasons.push(QReason::QModNot1 { residue: r, order });
    }
    if n == 0 {
        reasons.push(QReason::NZero);
    } else {
        for prime in [2u64, 3, 5, 7, 11, 13] {
            if (n as u64).is_multiple_of(prime) {
                reasons.push(QReason::NDivisibleBy { prime });
            }
        }
        if n >= N_UPPER {
            reasons.push(QReason::NTooLarge { bound: N_UPPER });
        }
    }
    QVerdict {
        pass: reasons.is_empty(),
        q_mod_600: r,
        order_mod_600: order,
        reasons,
    }
}

/// Exact check of `p·x² + q^(2n) = y^p` with `gcd(x, y) = 1`, optionally also
/// requiring `q` to be prime.
pub fn verify_witness(rec: &SolutionRecord, check_primality: bool) -> bool {
    if rec.p < 2 || rec.x.is_negative() || !rec.y.is_positive() {
        return false;
    }
    if !rec.x.gcd(&rec.y).is_one() {
        return false;
    }
    if check_primality && !is_prime(&rec.q).is_probably_prime() {
        return false;
    }
    let lhs = BigInt::from(rec.p) * &rec.x * &rec.x + rec.q.pow(2 * rec.n);
    lhs == rec.y.pow(rec.p as u32)
}

/// A positive solution of `5X² − 4 = Y²`, with `X = F_{2k+1}`, `Y = L_{2k+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PellPoint {
    pub x: u64,
    pub y: u64,
    pub k: u32,
}

/// All positive `(X, Y)` with `X ≤ bound` and `5X² − 4 = Y²` by brute force,
/// each matched to its odd Fibonacci/Lucas index.
pub fn pell_classify(bound: u64) -> Result<Vec<PellPoint>> {
    let mut out = Vec::new();
    let mut k = 0u32;
    for x in 1..=bound {
        let t = 5u128 * x as u128 * x as u128 - 4;
        let y = t.sqrt();
        if y * y != t {
            continue;
        }
        // Advance to the first odd-index Fibonacci number ≥ x.
        let (mut f, mut l) = fib_lucas(2 * k as i64 + 1);
        while f < BigInt::from(x) {
            k += 1;
            (f, l) = fib_lucas(2 * k as i64 + 1);
        }
        if f != BigInt::from(x) || l != BigInt::from(y) {
            return Err(Error::Consistency(format!(
                "Pell point ({x}, {y}) is not (F_(2k+1), L_(2k+1))"
            )));
        }
        out.push(PellPoint { x, y: y as u64, k });
    }
    Ok(out)
}

/// Solutions `(x, y, n)` of `5x² − 4 = yⁿ` with even `n > 2`, `y > 1` and
/// `x ≤ bound`.
pub fn even_exponent_solutions(bound: u64) -> Result<Vec<(u64, u64, u32)>> {
    let mut out = Vec::new();
    for pt in pell_classify(bound)? {
        if let Some((r, e)) = perfect_power(&BigInt::from(pt.y)) {
            // Y = r^e = (r^(e/d))^d for every divisor d ≥ 2 of e; n = 2d.
            for d in (2..=e).filter(|d| e % d == 0) {
                let base = r.pow(e / d).to_u64().unwrap();
                if base > 1 {
                    out.push((pt.x, base, 2 * d));
                }
            }
        }
    }
    Ok(out)
}

/// Facts taken from the literature that admit a bounded confirmation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CitedFact {
    /// Integral points on `Y² = X³ + 500` are `(5, ±25)`.
    Mordell500,
    /// The only perfect-power Lucas number is `L₃ = 4`.
    LucasPower,
    /// `ψ_n ≢ 0 (mod 5)` for the Lucas sequence.
    PsiMod5,
}

impl FromStr for CitedFact {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mordell500" => Ok(CitedFact::Mordell500),
            "lucas-power" => Ok(CitedFact::LucasPower),
            "psi-mod5" => Ok(CitedFact::PsiMod5),
            other => Err(Error::UnknownFact(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactReport {
    pub fact: CitedFact,
    pub bound: u64,
    /// Everything the scan found, rendered as text.
    pub findings: Vec<String>,
    pub confirmed: bool,
}

/// Bounded brute-force confirmation of a cited fact.
pub fn cited_fact_oracle(fact: CitedFact, bound: u64) -> FactReport {
    let (findings, confirmed) = match fact {
        CitedFact::Mordell500 => {
            let mut pts = Vec::new();
            // X³ + 500 ≥ 0 forces X ≥ −7.
            for x in -7i64..=bound as i64 {
                let t = (x as i128).pow(3) + 500;
                if t < 0 {
                    continue;
                }
                let y = (t as u128).sqrt();
                if y * y == t as u128 {
                    pts.push((x, y));
                }
            }
            let found = pts.iter().map(|(x, y)| format!("({x}, ±{y})")).collect();
            (found, pts == vec![(5, 25)])
        }
        CitedFact::LucasPower => {
            let mut hits = Vec::new();
            let limit = BigInt::from(bound);
            for k in 0i64.. {
                let l = LucasState::new(k).l;
                if l > limit {
                    break;
                }
                if let Some((r, e)) = perfect_power(&l) {
                    hits.push((k, l, r, e));
                }
            }
            let ok = hits.len() == 1 && hits[0].0 == 3;
            let found = hits
                .into_iter()
                .map(|(k, l, r, e)| format!("L_{k} = {l} = {r}^{e}"))
                .collect();
            (found, ok)
        }
        CitedFact::PsiMod5 => {
            let (mut a, mut b) = (2u8, 1u8);
            let mut cycle = vec![a];
            loop {
                (a, b) = (b, (a + b) % 5);
                if (a, b) == (2, 1) {
                    break;
                }
                cycle.push(a);
            }
            let ok = !cycle.contains(&0);
            let text = cycle.iter().map(u8::to_string).collect::<Vec<_>>().join(",");
            (vec![format!("cycle ({text})")], ok)
        }
    };
    FactReport {
        fact,
        bound,
        findings,
        confirmed,
    }
}

/// `true` when `(q + 4)/5` is a perfect square, i.e. `5x² = q + 4` is solvable.
pub fn anchors_family(q: u64) -> bool {
    (q + 4).is_multiple_of(5) && is_square_u64(q.div_ceil(5))
}
