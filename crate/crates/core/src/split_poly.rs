//! The factorisation `f = f₁·f₂` of `f(x) = ((ωx+1)^p − (ωx−1)^p)/2`,
//! `ω = √−p`, for primes `p ≡ 3 (mod 8)`, and the identities that rule out
//! `f_i(a) = ±1` for `a ≠ 0`.
//!
//! With `ω = i√p` and `ζ = e^(2πi/p)` the roots `(ω/p)(1+ζᵏ)/(1−ζᵏ)` equal
//! `−cot(πk/p)/√p`, so [`split_f`] forms the residue and non-residue products
//! in real interval arithmetic, rounds, and certifies the result by exact
//! multiplication.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::poly::IntPoly;
use crate::arith::primes::{is_prime_u64, legendre, primitive_root};
use crate::arith::real::{certify, RealApprox};
use crate::arith::{binomial, valuation};
use crate::bigjson;
use crate::error::{precondition, Error, Result};

/// Largest admissible distance between a coefficient and its rounding.
pub const ROUNDING_TOLERANCE: f64 = 1e-6;

fn check_p(p: u64) -> Result<()> {
    if p <= 3 || p % 8 != 3 || !is_prime_u64(p) {
        return Err(precondition(format!("p = {p} is not a prime ≡ 3 (mod 8) above 3")));
    }
    Ok(())
}

/// `f(x) = Σ_{k even} C(p, k)·(−p)^(k/2)·x^k`.
pub fn build_f(p: u64) -> Result<IntPoly> {
    check_p(p)?;
    let minus_p = -BigInt::from(p);
    let coeffs = (0..p)
        .map(|k| {
            if k % 2 == 0 {
                binomial(p, k) * minus_p.pow((k / 2) as u32)
            } else {
                BigInt::zero()
            }
        })
        .collect();
    Ok(IntPoly::new(coeffs))
}

/// Default working precision `max(60, 2p)` digits.
pub fn default_digits(p: u64) -> u32 {
    60u32.max(2 * p as u32)
}

/// How `f₂` relates to `f₁` under `x ↦ −x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reflection {
    /// `f₂(x) = f₁(−x)`.
    Even,
    /// `f₂(x) = −f₁(−x)`.
    Odd,
    Neither,
}

/// A certified splitting of `f`.
#[derive(Clone, Debug, Serialize)]
pub struct SplitResult {
    pub p: u64,
    /// Primitive root fixing the residue ordering.
    pub g: u64,
    #[serde(serialize_with = "poly_coeffs")]
    pub f: IntPoly,
    #[serde(serialize_with = "poly_coeffs")]
    pub f1: IntPoly,
    #[serde(serialize_with = "poly_coeffs")]
    pub f2: IntPoly,
    pub reflection: Reflection,
    /// Largest distance of a computed coefficient from its integer.
    pub max_residual: f64,
    pub digits: u32,
}

fn poly_coeffs<S: serde::Serializer>(p: &IntPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    bigjson::ints(p.coeffs(), s)
}

/// Rounds every coefficient to its integer, if each lies within the tolerance.
fn round_coeffs(coeffs: &[RealApprox]) -> Option<(Vec<BigInt>, f64)> {
    let tol = RealApprox::from_decimal("0.000001", coeffs.first()?.digits());
    let mut out = Vec::with_capacity(coeffs.len());
    let mut worst = 0f64;
    for c in coeffs {
        let n = c.value().round().to_integer();
        let dist = (c - &RealApprox::from_int(&n, c.digits())).abs();
        if dist.certified_cmp(&tol) != Some(std::cmp::Ordering::Less) {
            return None;
        }
        worst = worst.max(dist.upper().to_f64().unwrap_or(f64::INFINITY));
        out.push(n);
    }
    Some((out, worst))
}

/// `scale·Π_{k∈S}(x + cot(πk/p)/√p)` with interval coefficients.
fn root_product(p: u64, ks: &[u64], scale: &BigInt, digits: u32) -> Result<Vec<RealApprox>> {
    let pi = RealApprox::pi(digits);
    let root_p = RealApprox::from_int(&BigInt::from(p), digits).sqrt()?;
    let mut coeffs = vec![RealApprox::from_int(scale, digits)];
    for &k in ks {
        let (sin, cos) = pi.mul_int(&BigInt::from(k)).div_int(&BigInt::from(p)).sin_cos();
        let shift = cos.checked_div(&(&sin * &root_p))?;
        let mut next = vec![RealApprox::from_i64(0, digits); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] + &(c * &shift);
        }
        coeffs = next;
    }
    Ok(coeffs)
}

fn reflect(f: &IntPoly) -> IntPoly {
    IntPoly::new(
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
            .collect(),
    )
}

/// Splits `f` over residues `g^(2j)` and non-residues `g^(2j+1)` and certifies
/// `f₁·f₂ = f` exactly.
pub fn split_f(p: u64, digits: u32) -> Result<SplitResult> {
    let f = build_f(p)?;
    let g = primitive_root(p);
    let half = (p - 1) / 2;
    let mut residues = Vec::with_capacity(half as usize);
    let mut non_residues = Vec::with_capacity(half as usize);
    let mut power = 1u64;
    for e in 0..p - 1 {
        if e % 2 == 0 {
            residues.push(power);
        } else {
            non_residues.push(power);
        }
        power = power * g % p;
    }
    let scale = BigInt::from(p).pow(((p + 1) / 4) as u32);
    let ((f1, f2, max_residual), digits) =
        certify("coefficients of f1 and f2", digits.max(1), 4 * digits.max(60), |d| {
            let c1 = root_product(p, &residues, &scale, d)?;
            let c2 = root_product(p, &non_residues, &-&scale, d)?;
            Ok(round_coeffs(&c1)
                .zip(round_coeffs(&c2))
                .map(|((a, ra), (b, rb))| (IntPoly::new(a), IntPoly::new(b), ra.max(rb))))
        })?;
    if &f1 * &f2 != f {
        return Err(Error::Violation(format!("f1·f2 ≠ f for p = {p}")));
    }
    let r = reflect(&f1);
    let reflection = if f2 == r {
        Reflection::Even
    } else if f2 == -&r {
        Reflection::Odd
    } else {
        Reflection::Neither
    };
    Ok(SplitResult {
        p,
        g,
        f,
        f1,
        f2,
        reflection,
        max_residual,
        digits,
    })
}

/// One checked identity, with the computed and expected values.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub p: u64,
    #[serde(serialize_with = "bigjson::int")]
    pub resultant: BigInt,
    #[serde(serialize_with = "bigjson::int")]
    pub disc_f: BigInt,
    #[serde(serialize_with = "bigjson::int")]
    pub disc_f1: BigInt,
    #[serde(serialize_with = "bigjson::int")]
    pub c1: BigInt,
    pub v_p_c1: u32,
    /// `(2p√p/π)·(3/2 + log((p−1)/4))`.
    pub c1_bound: f64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn power_form(two: u64, pe: u64, p: u64) -> String {
    format!("2^{two}·{p}^{pe}")
}

/// Checks the resultant and discriminant closed forms, the constant terms,
/// the `p`-adic shape of the coefficients and the bound on `c₁`.
pub fn verify_identities(res: &SplitResult) -> Result<IdentityReport> {
    let p = res.p;
    let pb = BigInt::from(p);
    let two = BigInt::from(2);
    let closed = |e2: u64, ep: u64| two.pow(e2 as u32) * pb.pow(ep as u32);
    let mut checks = Vec::new();
    let mut push = |name: &'static str, computed: String, expected: String, pass: bool| {
        checks.push(IdentityCheck {
            name,
            computed,
            expected,
            pass,
        });
    };

    let half = ((p - 1) / 2) as usize;
    push(
        "degrees",
        format!("({:?}, {:?})", res.f1.degree(), res.f2.degree()),
        format!("({half}, {half})"),
        res.f1.degree() == Some(half) && res.f2.degree() == Some(half),
    );
    push("product", "f1·f2".into(), "f".into(), &res.f1 * &res.f2 == res.f);
    let lead = -pb.pow(p.div_ceil(2) as u32);
    push(
        "leading coefficient of f",
        res.f.leading().to_string(),
        lead.to_string(),
        res.f.leading() == lead,
    );
    push(
        "constant term of f",
        res.f.coeff(0).to_string(),
        "1".into(),
        res.f.coeff(0).is_one(),
    );

    let (b1, b2) = (res.f1.coeff(0), res.f2.coeff(0));
    push(
        "constant terms of f1, f2",
        format!("({b1}, {b2})"),
        "equal, ±1".into(),
        b1.abs().is_one() && b1 == b2,
    );
    // Reciprocal polynomials have leading coefficient f_i(0).
    push(
        "reciprocal leading coefficients",
        format!("({}, {})", res.f1.reciprocal().leading(), res.f2.reciprocal().leading()),
        "±1".into(),
        res.f1.reciprocal().leading().abs().is_one() && res.f2.reciprocal().leading().abs().is_one(),
    );

    let x2 = res.f.coeff(2);
    let x2_expected = -&pb * binomial(p, 2);
    push(
        "coefficient of x² in f",
        x2.to_string(),
        format!("{x2_expected}, odd"),
        x2 == x2_expected && x2.is_odd(),
    );

    let resultant = res.f1.resultant(&res.f2);
    let res_expected = closed((p - 1).pow(2) / 4, (p * p - 1) / 8);
    push(
        "|Res(f1, f2)|",
        resultant.abs().to_string(),
        power_form((p - 1).pow(2) / 4, (p * p - 1) / 8, p),
        resultant.abs() == res_expected,
    );
    let disc_f = res.f.discriminant();
    let disc_f_expected = closed((p - 1) * (p - 2), (p - 2) * (p + 1) / 2);
    push(
        "|Disc(f)|",
        disc_f.abs().to_string(),
        power_form((p - 1) * (p - 2), (p - 2) * (p + 1) / 2, p),
        disc_f.abs() == disc_f_expected,
    );
    let disc_f1 = res.f1.discriminant();
    let disc_f1_expected = closed((p - 1) * (p - 3) / 4, (p - 3) * (p + 1) / 8);
    push(
        "|Disc(f1)|",
        disc_f1.abs().to_string(),
        power_form((p - 1) * (p - 3) / 4, (p - 3) * (p + 1) / 8, p),
        disc_f1.abs() == disc_f1_expected,
    );
    let disc_f2 = res.f2.discriminant();
    push(
        "Disc(f2) = Disc(f1)",
        disc_f2.to_string(),
        disc_f1.to_string(),
        disc_f2 == disc_f1,
    );
    let chain = &disc_f1 * &disc_f2 * &resultant * &resultant;
    push(
        "Disc(f) = Disc(f1)·Disc(f2)·Res²",
        chain.to_string(),
        disc_f.to_string(),
        chain == disc_f,
    );

    let c = res.f1.coeffs();
    let divides_all = c.iter().skip(1).all(|ck| ck.is_zero() || valuation(ck, p) >= 1);
    push("p | c_k for k ≥ 1", divides_all.to_string(), "true".into(), divides_all);
    let square_tail = c.iter().skip(2).all(|ck| ck.is_zero() || valuation(ck, p) >= 2);
    push(
        "p² | c_k for k ≥ 2",
        square_tail.to_string(),
        "true".into(),
        square_tail,
    );

    let c1 = res.f1.coeff(1);
    let v_p_c1 = if c1.is_zero() { u32::MAX } else { valuation(&c1, p) };
    push("v_p(c1)", v_p_c1.to_string(), "1".into(), v_p_c1 == 1);
    push("c1 odd", c1.to_string(), "odd".into(), c1.is_odd());
    let pf = p as f64;
    let c1_bound = 2.0 * pf * pf.sqrt() / std::f64::consts::PI * (1.5 + ((pf - 1.0) / 4.0).ln());
    let c1_abs = c1.abs().to_f64().unwrap_or(f64::INFINITY);
    push(
        "|c1| < (2p√p/π)(3/2 + log((p−1)/4))",
        c1.abs().to_string(),
        format!("{c1_bound:.3}"),
        c1_abs < c1_bound,
    );
    let p2 = &pb * &pb;
    push("|c1| < p²", c1.abs().to_string(), p2.to_string(), c1.abs() < p2);
    push(
        "f2(x) = ±f1(−x)",
        format!("{:?}", res.reflection),
        "Even or Odd".into(),
        res.reflection != Reflection::Neither,
    );
    let residue_count = (1..p).filter(|&t| legendre(t as i64, p) == 1).count();
    push(
        "residue classes",
        residue_count.to_string(),
        half.to_string(),
        residue_count == half,
    );

    let report = IdentityReport {
        p,
        resultant,
        disc_f,
        disc_f1,
        c1,
        v_p_c1,
        c1_bound,
        checks,
    };
    if let Some(bad) = report.checks.iter().find(|c| !c.pass) {
        return Err(Error::Violation(format!(
            "p = {p}: {} is {}, expected {}",
            bad.name, bad.computed, bad.expected
        )));
    }
    Ok(report)
}

/// Outcome of the bounded search for `f_i(a) = ±1`.
#[derive(Clone, Debug, Serialize)]
pub struct NoSolutionReport {
    pub p: u64,
    pub a_bound: u64,
    /// Every `a` with `f₁(a) = ±1` or `f₂(a) = ±1`.
    pub unit_values_at: Vec<i64>,
    /// `f₁(a) ≡ c₀ + c₁a (mod p²a²)` for every `a ≠ 0` in range.
    pub congruence_holds: bool,
    pub only_zero: bool,
}

fn eval_i64(f: &IntPoly, a: i64) -> BigInt {
    f.eval(&BigInt::from(a))
}

/// Scans `|a| ≤ a_bound` for `f₁(a) = ±1` or `f₂(a) = ±1`.
pub fn no_solution_certificate(p: u64, a_bound: u64) -> Result<NoSolutionReport> {
    let res = split_f(p, default_digits(p))?;
    Ok(scan_units(&res, a_bound))
}

/// [`no_solution_certificate`] on an existing splitting.
pub fn scan_units(res: &SplitResult, a_bound: u64) -> NoSolutionReport {
    let p = BigInt::from(res.p);
    let (c0, c1) = (res.f1.coeff(0), res.f1.coeff(1));
    let bound = a_bound as i64;
    let mut unit_values_at = Vec::new();
    let mut congruence_holds = true;
    for a in -bound..=bound {
        let v1 = eval_i64(&res.f1, a);
        let v2 = eval_i64(&res.f2, a);
        if v1.abs().is_one() || v2.abs().is_one() {
            unit_values_at.push(a);
        }
        if a != 0 {
            let ab = BigInt::from(a);
            let m = &p * &p * &ab * &ab;
            if !(v1 - &c0 - &c1 * &ab).is_multiple_of(&m) {
                congruence_holds = false;
            }
        }
    }
    let only_zero = unit_values_at == [0];
    NoSolutionReport {
        p: res.p,
        a_bound,
        unit_values_at,
        congruence_holds,
        only_zero,
    }
}
