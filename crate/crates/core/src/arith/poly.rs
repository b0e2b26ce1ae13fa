//! Dense univariate polynomials over `Z` and `Q`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Integer polynomial, coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// From coefficients listed in descending degree order.
    pub fn from_descending(coeffs: Vec<BigInt>) -> Self {
        let mut c = coeffs;
        c.reverse();
        Self::new(c)
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().expect("non-zero polynomial")
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn descending(&self) -> Vec<BigInt> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `v^n · f(u/v)`, the degree-`n` binary form at `(u, v)`.
    pub fn eval_form(&self, u: &BigInt, v: &BigInt, n: usize) -> BigInt {
        assert!(self.coeffs.len() <= n + 1, "form degree below polynomial degree");
        let mut acc = BigInt::zero();
        let mut vp = BigInt::one();
        for i in (0..=n).rev() {
            acc = acc * u + self.coeff(i) * &vp;
            vp *= v;
        }
        acc
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Gcd of the coefficients (non-negative).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn div_scalar_exact(&self, k: &BigInt) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(Self::new(out))
    }

    /// `f(−x)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// `x^deg · f(1/x)`.
    pub fn reciprocal(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// `f(c·x)`.
    pub fn compose_scale(&self, c: &BigInt) -> Self {
        let mut pw = BigInt::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pw);
            pw *= c;
        }
        Self::new(out)
    }

    fn shifted(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Self::new(c)
    }

    /// Pseudo-remainder: `lc(b)^(deg a − deg b + 1)·a mod b`.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        assert!(!b.is_zero(), "pseudo-division by zero");
        let db = b.deg();
        let Some(da) = self.degree() else {
            return Self::zero();
        };
        if da < db {
            return self.clone();
        }
        let lb = b.leading();
        let mut r = self.clone();
        let mut steps = 0u32;
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading();
            r = &r.scale(&lb) - &b.scale(&lr).shifted(dr - db);
            steps += 1;
        }
        let e = (da - db + 1) as u32 - steps;
        r.scale(&lb.pow(e))
    }

    /// Exact division by a polynomial; `None` when the remainder is non-zero
    /// or the quotient is not integral.
    pub fn div_exact(&self, b: &Self) -> Option<Self> {
        assert!(!b.is_zero(), "division by zero");
        let db = b.deg();
        let lb = b.leading();
        let mut r = self.clone();
        let mut q = vec![BigInt::zero(); self.coeffs.len().saturating_sub(db).max(1)];
        while let Some(dr) = r.degree() {
            if dr < db {
                return None;
            }
            let (t, rem) = r.leading().div_rem(&lb);
            if !rem.is_zero() {
                return None;
            }
            r = &r - &Self::constant(t.clone()).shifted(dr - db).mul_poly(b);
            q[dr - db] = t;
        }
        Some(Self::new(q))
    }

    fn mul_poly(&self, other: &Self) -> Self {
        self * other
    }

    /// Resultant by the subresultant pseudo-remainder sequence.
    pub fn resultant(&self, other: &Self) -> BigInt {
        if self.is_zero() || other.is_zero() {
            return BigInt::zero();
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        let mut s = BigInt::one();
        if a.deg() < b.deg() {
            if (a.deg() * b.deg()) % 2 == 1 {
                s = -s;
            }
            std::mem::swap(&mut a, &mut b);
        }
        if b.deg() == 0 {
            return s * b.leading().pow(a.deg() as u32);
        }
        let ca = a.content();
        let cb = b.content();
        a = a.div_scalar_exact(&ca).expect("content divides");
        b = b.div_scalar_exact(&cb).expect("content divides");
        let t = ca.pow(b.deg() as u32) * cb.pow(a.deg() as u32);
        let mut g = BigInt::one();
        let mut h = BigInt::one();
        loop {
            let (da, db) = (a.deg(), b.deg());
            let delta = (da - db) as u32;
            if da % 2 == 1 && db % 2 == 1 {
                s = -s;
            }
            let r = a.pseudo_rem(&b);
            a = b;
            if r.is_zero() {
                return BigInt::zero();
            }
            let divisor = &g * h.pow(delta);
            b = r.div_scalar_exact(&divisor).expect("subresultant division is exact");
            g = a.leading();
            h = if delta == 0 { h } else { g.pow(delta) / h.pow(delta - 1) };
            if b.deg() == 0 {
                let da = a.deg() as u32;
                let hh = if da == 0 {
                    h.clone()
                } else {
                    b.leading().pow(da) / h.pow(da - 1)
                };
                return s * t * hh;
            }
        }
    }

    /// Discriminant `(−1)^(n(n−1)/2) Res(f, f′) / lc(f)`.
    pub fn discriminant(&self) -> BigInt {
        let n = self.deg();
        let r = self.resultant(&self.derivative()) / self.leading();
        if (n * (n.saturating_sub(1)) / 2) % 2 == 1 {
            -r
        } else {
            r
        }
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let m = c.abs();
            match (i, m.is_one()) {
                (0, _) => write!(f, "{m}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{m}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{m}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Rational polynomial, coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, z: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * z + c)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `f(c·z)`.
    pub fn compose_scale(&self, c: &BigRational) -> Self {
        let mut pw = BigRational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pw);
            pw *= c;
        }
        Self::new(out)
    }

    /// The integer polynomial, if every coefficient is integral.
    pub fn to_int(&self) -> Option<IntPoly> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(IntPoly::new)
    }

    /// Index of the lowest non-zero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }
}

impl From<&IntPoly> for RatPoly {
    fn from(p: &IntPoly) -> Self {
        RatPoly::new(
            p.coeffs()
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*z"),
                _ => format!("({c})*z^{i}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Determinant of the Sylvester matrix by fraction-free elimination.
    fn sylvester_resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
        let m = f.degree().unwrap();
        let n = g.degree().unwrap();
        let size = m + n;
        if size == 0 {
            return BigInt::one();
        }
        let fd = f.descending();
        let gd = g.descending();
        let mut a = vec![vec![BigInt::zero(); size]; size];
        for i in 0..n {
            for (j, c) in fd.iter().enumerate() {
                a[i][i + j] = c.clone();
            }
        }
        for i in 0..m {
            for (j, c) in gd.iter().enumerate() {
                a[n + i][i + j] = c.clone();
            }
        }
        bareiss(a)
    }

    fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
        let n = a.len();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    #[test]
    fn basic_ops() {
        let f = IntPoly::from_i64s(&[1, 2, 3]);
        let g = IntPoly::from_i64s(&[-1, 1]);
        assert_eq!(&f * &g, IntPoly::from_i64s(&[-1, -1, -1, 3]));
        assert_eq!(f.eval(&BigInt::from(2)), BigInt::from(17));
        assert_eq!(f.derivative(), IntPoly::from_i64s(&[2, 6]));
        assert_eq!(f.reflect(), IntPoly::from_i64s(&[1, -2, 3]));
        assert_eq!(
            f.eval_form(&BigInt::from(2), &BigInt::from(3), 2),
            BigInt::from(9 + 12 + 12)
        );
        assert_eq!((&f * &g).div_exact(&g), Some(f.clone()));
        assert_eq!(f.div_exact(&g), None);
        assert_eq!(f.to_string(), "3*x^2 + 2*x + 1");
    }

    #[test]
    fn pseudo_remainder_identity() {
        let a = IntPoly::from_i64s(&[3, 0, 5, 7, 2]);
        let b = IntPoly::from_i64s(&[1, 4, 3]);
        let r = a.pseudo_rem(&b);
        // lc(b)^3·a − r must be divisible by b.
        let lhs = &a.scale(&BigInt::from(27)) - &r;
        assert!(lhs.div_exact(&b).is_some());
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn resultants_and_discriminants() {
        let f = IntPoly::from_i64s(&[-2, 0, 1]);
        assert_eq!(f.discriminant(), BigInt::from(8));
        let cubic = IntPoly::from_i64s(&[1, -1, 0, 1]);
        assert_eq!(cubic.discriminant(), BigInt::from(-23));
        let g = IntPoly::from_i64s(&[-3, 1]);
        assert_eq!(f.resultant(&g), BigInt::from(7));
        assert_eq!(g.resultant(&f), BigInt::from(7));
        assert_eq!(f.resultant(&(&f * &g)), BigInt::zero());
    }

    fn arb_poly() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-40i64..40, 2..8)
            .prop_map(|c| IntPoly::from_i64s(&c))
            .prop_filter("non-constant", |p| p.degree().is_some_and(|d| d >= 1))
    }

    proptest! {
        #[test]
        fn subresultant_matches_sylvester(f in arb_poly(), g in arb_poly()) {
            prop_assert_eq!(f.resultant(&g), sylvester_resultant(&f, &g));
        }

        #[test]
        fn resultant_is_multiplicative(f in arb_poly(), g in arb_poly(), h in arb_poly()) {
            prop_assert_eq!(f.resultant(&(&g * &h)), f.resultant(&g) * f.resultant(&h));
        }
    }
}
