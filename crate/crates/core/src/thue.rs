//! Binary forms `T_k(u, v) = ε^k (u + v√5)^n + ε′^k (u − v√5)^n`.
//!
//! A solution of `5x² − 4 = yⁿ` with odd `n` yields an integer point on
//! `T_k(u, v) = 4` or on `T_k(u, v) = 2^(n+2)` with `uv` odd, for some
//! `0 ≤ k ≤ (n−1)/2`. This module builds the forms, decides local
//! solvability modulo prime powers, monicises the forms for external Thue
//! solvers, enumerates small solutions and writes the unresolved equations
//! to a text file.

use std::fmt;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::{factor_u64, mul_mod, pow_mod};
use crate::arith::quad::{quad_pow_unit, QuadInt};
use crate::arith::{binomial, valuation};
use crate::bigjson;
use crate::error::{precondition, Error, Result};

/// A binary form `Σ c_i u^(n−i) v^i`, coefficients listed from `u^n` down to `v^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BinaryForm {
    #[serde(serialize_with = "bigjson::ints")]
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a form needs at least one coefficient");
        BinaryForm { coeffs }
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn eval(&self, u: &BigInt, v: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut vp = BigInt::one();
        for c in self.coeffs.iter() {
            acc = acc * u + c * &vp;
            vp *= v;
        }
        acc
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn div_scalar(&self, k: &BigInt) -> Option<Self> {
        self.coeffs
            .iter()
            .map(|c| c.is_multiple_of(k).then(|| c / k))
            .collect::<Option<Vec<_>>>()
            .map(BinaryForm::new)
    }

    /// `F(u, −v)`.
    pub fn flip_v(&self) -> Self {
        BinaryForm::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    fn residues(&self, m: u64) -> Vec<u64> {
        let mb = BigInt::from(m);
        self.coeffs.iter().map(|c| c.mod_floor(&mb).to_u64().unwrap()).collect()
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        f.write_str(&list.join(","))
    }
}

fn eval_mod(res: &[u64], u: u64, v: u64, m: u64) -> u64 {
    // The degree bound keeps v-powers and coefficients below m.
    let mut acc = 0u64;
    let mut vp = 1u64 % m;
    for &c in res {
        acc = (mul_mod(acc, u, m) + mul_mod(c, vp, m)) % m;
        vp = mul_mod(vp, v, m);
    }
    acc
}

/// The form `T_k` of degree `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThueForm {
    pub n: u32,
    pub k1: i64,
    pub form: BinaryForm,
}

/// Right-hand side variants of the Thue equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// `T = 4`, no parity condition.
    None,
    /// `T = 2^(n+2)` with `uv` odd.
    UvOdd,
}

impl Constraint {
    pub fn tag(self) -> &'static str {
        match self {
            Constraint::None => "none",
            Constraint::UvOdd => "uv-odd",
        }
    }

    pub fn rhs(self, n: u32) -> BigInt {
        match self {
            Constraint::None => BigInt::from(4),
            Constraint::UvOdd => BigInt::one() << (n + 2),
        }
    }
}

/// `T_k` for any `n ≥ 1` and any integer `k`.
///
/// The coefficient of `u^(n−i) v^i` is `C(n,i)·(ε^k θ^i + ε′^k (−θ)^i)`
/// with `θ = √5`; the sum is formed in `Z[(1+√5)/2]` and must come out
/// rational and integral.
pub fn twisted_form(n: u32, k1: i64) -> Result<ThueForm> {
    let ek = quad_pow_unit(k1);
    let ek_conj = quad_pow_unit(k1).conj();
    let theta = QuadInt::from_i64s(5, 0, 1, 1)?;
    let minus_theta = theta.neg();
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    for i in 0..=n {
        let a = ek.mul(&theta.pow(i))?;
        let b = ek_conj.mul(&minus_theta.pow(i))?;
        let s = a.add(&b)?;
        if !s.is_rational() || s.denom() != 1 {
            return Err(Error::Consistency(format!(
                "T_{k1} coefficient {i} for n = {n} is not a rational integer: {s}"
            )));
        }
        coeffs.push(binomial(n as u64, i as u64) * s.a());
    }
    Ok(ThueForm {
        n,
        k1,
        form: BinaryForm::new(coeffs),
    })
}

/// `T_k` for the admissible range: odd `n ≥ 5` prime to 6, `0 ≤ k ≤ (n−1)/2`.
pub fn build_form(n: u32, k1: i64) -> Result<ThueForm> {
    if n < 5 || n.is_multiple_of(2) || n.is_multiple_of(3) {
        return Err(precondition(format!("n = {n} must be odd, ≥ 5 and prime to 6")));
    }
    if k1 < 0 || k1 > (n as i64 - 1) / 2 {
        return Err(precondition(format!("k1 = {k1} outside [0, {}]", (n - 1) / 2)));
    }
    twisted_form(n, k1)
}

impl ThueForm {
    pub fn eval(&self, u: &BigInt, v: &BigInt) -> BigInt {
        self.form.eval(u, v)
    }
}

/// Decides whether `F(u, v) ≡ rhs (mod modulus)` has a solution, with `u, v`
/// both odd when `uv_odd` is set. `false` proves that `F(u, v) = rhs` has no
/// integer solution (with that parity).
///
/// The modulus is split into prime powers; for each, solutions whose
/// coordinates are not both divisible by the prime are found by lifting
/// solutions digit by digit, and the remaining ones by descent to
/// `F ≡ rhs/ℓⁿ (mod ℓ^(e−n))`.
pub fn local_sieve(form: &BinaryForm, rhs: &BigInt, modulus: u64, uv_odd: bool) -> bool {
    assert!(modulus >= 2, "modulus must be at least 2");
    assert!(modulus < 1 << 62, "modulus too large");
    factor_u64(modulus)
        .into_iter()
        .all(|(l, e)| solvable_prime_power(form, rhs, l, e, uv_odd && l == 2))
}

fn solvable_prime_power(form: &BinaryForm, rhs: &BigInt, l: u64, e: u32, odd_pair: bool) -> bool {
    if e == 0 {
        return true;
    }
    if primitive_solution_exists(form, rhs, l, e, odd_pair) {
        return true;
    }
    if odd_pair {
        return false;
    }
    let n = form.degree();
    if e <= n {
        return (rhs % BigInt::from(l).pow(e)).is_zero();
    }
    let ln = BigInt::from(l).pow(n);
    if !(rhs % &ln).is_zero() {
        return false;
    }
    solvable_prime_power(form, &(rhs / ln), l, e - n, false)
}

const CHART_LIMIT: u64 = 1 << 22;

fn primitive_solution_exists(form: &BinaryForm, rhs: &BigInt, l: u64, e: u32, odd_pair: bool) -> bool {
    let m = l.pow(e);
    if m <= CHART_LIMIT {
        return primitive_by_charts(form, rhs, l, m, odd_pair);
    }
    primitive_by_lifting(form, rhs, l, e, odd_pair)
}

/// A primitive pair has a unit coordinate, so `F(u, v) = vⁿ F(u/v, 1)` or
/// `uⁿ F(1, v/u)`; it suffices to compare `F(x, 1)` and `F(1, y)` with the
/// classes `rhs·wⁿ` over units `w`.
fn primitive_by_charts(form: &BinaryForm, rhs: &BigInt, l: u64, m: u64, odd_pair: bool) -> bool {
    let res = form.residues(m);
    let n = form.degree();
    let target = rhs.mod_floor(&BigInt::from(m)).to_u64().unwrap();
    let mut reachable = vec![false; m as usize];
    for w in (1..m).filter(|w| w % l != 0) {
        reachable[mul_mod(target, pow_mod(w, n as u64, m), m) as usize] = true;
    }
    let hit = |u: u64, v: u64| reachable[eval_mod(&res, u, v, m) as usize];
    if odd_pair {
        return (1..m).step_by(2).any(|x| hit(x, 1));
    }
    (0..m).any(|x| hit(x, 1)) || (0..m).step_by(l as usize).any(|y| hit(1, y))
}

fn primitive_by_lifting(form: &BinaryForm, rhs: &BigInt, l: u64, e: u32, odd_pair: bool) -> bool {
    let m = l.pow(e);
    let res = form.residues(m);
    let target = rhs.mod_floor(&BigInt::from(m)).to_u64().unwrap();
    let mut stack: Vec<(u64, u64, u32)> = Vec::new();
    for u in 0..l {
        for v in 0..l {
            if u % l == 0 && v % l == 0 {
                continue;
            }
            if odd_pair && (u % 2 == 0 || v % 2 == 0) {
                continue;
            }
            if eval_mod(&res, u, v, l) == target % l {
                stack.push((u, v, 1));
            }
        }
    }
    while let Some((u, v, j)) = stack.pop() {
        if j == e {
            return true;
        }
        let step = l.pow(j);
        let next = step * l;
        let t = target % next;
        for a in 0..l {
            for b in 0..l {
                let (u2, v2) = (u + a * step, v + b * step);
                if eval_mod(&res, u2, v2, next) == t {
                    stack.push((u2, v2, j + 1));
                }
            }
        }
    }
    false
}

/// A monic form `G(u′, v) = M·F(u, v)` with `u′ = d·u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonicForm {
    pub form: BinaryForm,
    #[serde(serialize_with = "bigjson::int")]
    pub rhs: BigInt,
    #[serde(serialize_with = "bigjson::int")]
    pub multiplier: BigInt,
    #[serde(serialize_with = "bigjson::int")]
    pub substitution: BigInt,
    /// The generic choice `M = c^(n−1)`, `u′ = c·u`, kept for reference.
    #[serde(serialize_with = "bigjson::int")]
    pub generic_multiplier: BigInt,
}

/// Makes `F(u, v) = rhs` monic with the smallest substitution `u′ = d·u`
/// (`d > 0`) for which `M = dⁿ/c` and every `c_i d^i / c` are integers.
pub fn monicize(form: &BinaryForm, rhs: &BigInt) -> MonicForm {
    let n = form.degree();
    let c = form.leading().clone();
    assert!(!c.is_zero(), "leading coefficient must be non-zero");
    let generic_multiplier = c.pow(n.saturating_sub(1));
    let ok = |d: &BigInt| {
        (0..=n as usize).all(|i| (&form.coeffs[i] * d.pow(i as u32)).is_multiple_of(&c)) && d.pow(n).is_multiple_of(&c)
    };
    let mut d = BigInt::one();
    while !ok(&d) {
        d += 1;
    }
    let multiplier = d.pow(n) / &c;
    let coeffs = (0..=n as usize)
        .map(|i| &form.coeffs[i] * d.pow(i as u32) / &c)
        .collect();
    MonicForm {
        form: BinaryForm::new(coeffs),
        rhs: rhs * &multiplier,
        multiplier,
        substitution: d,
        generic_multiplier,
    }
}

/// All `|u|, |v| ≤ bound` with `F(u, v) = rhs` (and `uv` odd if requested).
pub fn bounded_enumerate(form: &BinaryForm, rhs: &BigInt, bound: i64, uv_odd: bool) -> Vec<(BigInt, BigInt)> {
    let mut out: Vec<(BigInt, BigInt)> = (-bound..=bound)
        .into_par_iter()
        .flat_map_iter(|v| {
            let vb = BigInt::from(v);
            (-bound..=bound)
                .filter(move |u| !uv_odd || (u % 2 != 0 && v % 2 != 0))
                .filter_map(move |u| {
                    let ub = BigInt::from(u);
                    (form.eval(&ub, &vb) == *rhs).then_some((ub, vb.clone()))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort();
    out
}

/// Every integer solution of `T_0(u, v) = rhs` for odd `n`.
///
/// `T_0 = 2u·Q(u, v)` with `Q` a positive definite form in `u²`, `v²`, so
/// `2u | rhs` and `Q` is increasing in `|v|`.
pub fn solve_reducible(n: u32, rhs: &BigInt, uv_odd: bool) -> Result<Vec<(BigInt, BigInt)>> {
    if n.is_multiple_of(2) {
        return Err(precondition("T_0 factors through 2u only for odd n"));
    }
    if rhs.is_zero() {
        return Err(precondition("rhs must be non-zero"));
    }
    let form = twisted_form(n, 0)?.form;
    let half: BigInt = rhs / 2;
    if rhs.is_odd() {
        return Ok(Vec::new());
    }
    let q_at = |u: &BigInt, v: &BigInt| form.eval(u, v) / (u * 2);
    let mut out = Vec::new();
    for du in divisors(&half.abs()) {
        for u in [du.clone(), -du] {
            let target = &half / &u;
            if !target.is_positive() {
                continue;
            }
            // Smallest v ≥ 0 with Q(u, v) ≥ target.
            let mut hi = BigInt::one();
            while q_at(&u, &hi) < target {
                hi <<= 1;
            }
            let mut lo = BigInt::zero();
            while lo < hi {
                let mid: BigInt = (&lo + &hi) >> 1;
                if q_at(&u, &mid) < target {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            if q_at(&u, &lo) == target {
                for v in if lo.is_zero() {
                    vec![lo.clone()]
                } else {
                    vec![lo.clone(), -lo.clone()]
                } {
                    if !uv_odd || (u.is_odd() && v.is_odd()) {
                        out.push((u.clone(), v));
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let m = n.to_u64().expect("right-hand sides fit in 64 bits");
    let mut ds = vec![1u64];
    for (p, e) in factor_u64(m) {
        let cur = ds.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds.into_iter().map(BigInt::from).collect()
}

/// How a `(k1, rhs)` case was disposed of.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum CaseStatus {
    /// The form's content does not divide the right-hand side.
    Content,
    /// Solved completely by factoring `T_0`; no admissible solution.
    Reducible,
    /// The reduced equation is unsolvable modulo `modulus`; equivalently the
    /// original one modulo `unreduced_modulus = content·modulus`.
    Congruence {
        modulus: u64,
        #[serde(serialize_with = "bigjson::int")]
        unreduced_modulus: BigInt,
    },
    /// Not decided locally; handed to a Thue solver.
    Survives { monic: MonicForm },
}

impl CaseStatus {
    pub fn killed(&self) -> bool {
        !matches!(self, CaseStatus::Survives { .. })
    }
}

/// One `(n, k1, rhs)` case after the local battery.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseOutcome {
    pub n: u32,
    pub k1: i64,
    #[serde(serialize_with = "bigjson::int")]
    pub rhs: BigInt,
    pub constraint: Constraint,
    #[serde(serialize_with = "bigjson::int")]
    pub content: BigInt,
    /// Form and right-hand side after removing the content.
    pub reduced_form: BinaryForm,
    #[serde(serialize_with = "bigjson::int")]
    pub reduced_rhs: BigInt,
    pub status: CaseStatus,
}

/// Runs the local battery on one case: content, the reducible `k1 = 0`
/// solver, a congruence modulo `n²` and, for the `uv`-odd variant, a 2-adic
/// congruence modulo `2^(v₂(rhs′)−1)`.
pub fn analyse_case(n: u32, k1: i64, constraint: Constraint) -> Result<CaseOutcome> {
    let tf = build_form(n, k1)?;
    let rhs = constraint.rhs(n);
    let uv_odd = constraint == Constraint::UvOdd;
    let content = tf.form.content();
    let reduced_form = tf.form.div_scalar(&content).expect("content divides");
    let outcome = |status, reduced_rhs| CaseOutcome {
        n,
        k1,
        rhs: rhs.clone(),
        constraint,
        content: content.clone(),
        reduced_form: reduced_form.clone(),
        reduced_rhs,
        status,
    };
    let congruence = |modulus: u64| CaseStatus::Congruence {
        modulus,
        unreduced_modulus: &content * modulus,
    };
    if !rhs.is_multiple_of(&content) {
        return Ok(outcome(CaseStatus::Content, BigInt::zero()));
    }
    let reduced_rhs = &rhs / &content;
    if k1 == 0 && solve_reducible(n, &rhs, uv_odd)?.is_empty() {
        return Ok(outcome(CaseStatus::Reducible, reduced_rhs));
    }
    let n2 = (n as u64).pow(2);
    if !local_sieve(&reduced_form, &reduced_rhs, n2, uv_odd) {
        return Ok(outcome(congruence(n2), reduced_rhs));
    }
    if uv_odd {
        let e = valuation(&reduced_rhs, 2);
        if e >= 2 {
            let m = 1u64 << (e - 1);
            if !local_sieve(&reduced_form, &reduced_rhs, m, true) {
                return Ok(outcome(congruence(m), reduced_rhs));
            }
        }
    }
    let monic = monicize(&reduced_form, &reduced_rhs);
    Ok(outcome(CaseStatus::Survives { monic }, reduced_rhs))
}

/// All `2·((n−1)/2 + 1)` cases for degree `n`, ordered by `(k1, constraint)`.
pub fn case_table(n: u32) -> Result<Vec<CaseOutcome>> {
    build_form(n, 0)?;
    let cases: Vec<(i64, Constraint)> = (0..=(n as i64 - 1) / 2)
        .flat_map(|k| [(k, Constraint::None), (k, Constraint::UvOdd)])
        .collect();
    cases.into_par_iter().map(|(k, c)| analyse_case(n, k, c)).collect()
}

/// One export line:
/// `n=<deg>; k1=<k>; coeffs=<c_n,...,c_0>; rhs=<r>; constraints=<tag>; transform=<M>,u'=<d>u`.
pub fn export_line(case: &CaseOutcome) -> Option<String> {
    let CaseStatus::Survives { monic } = &case.status else {
        return None;
    };
    let sub = if monic.substitution.is_one() {
        "u'=u".to_string()
    } else {
        format!("u'={}u", monic.substitution)
    };
    Some(format!(
        "n={}; k1={}; coeffs={}; rhs={}; constraints={}; transform={},{}",
        case.n,
        case.k1,
        case.reduced_form,
        case.reduced_rhs,
        case.constraint.tag(),
        monic.multiplier,
        sub
    ))
}

/// Writes the surviving equations for degree `n`; returns the lines written.
pub fn export_equations(n: u32, path: &Path) -> Result<Vec<String>> {
    let lines: Vec<String> = case_table(n)?.iter().filter_map(export_line).collect();
    let mut f = std::fs::File::create(path)?;
    for l in &lines {
        writeln!(f, "{l}")?;
    }
    f.sync_all()?;
    Ok(lines)
}
