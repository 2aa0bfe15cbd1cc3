//! Exact rational scalars and quadratic surds.
//!
//! Every distance, cost and ratio in the crate is a [`Scalar`]. Bounds that
//! involve square roots (for example `1 + √2`) are [`Surd`]s, which can be
//! compared against scalars without any rounding.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational number in canonical reduced form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Scalar(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_int(value: i64) -> Self {
        Scalar(BigRational::from_integer(value.into()))
    }

    pub fn from_bigint(value: BigInt) -> Self {
        Scalar(BigRational::from_integer(value))
    }

    pub fn from_ratio(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Scalar(BigRational::new(numer, denom))
    }

    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.recip())
    }

    /// Mathematical floor: `floor(-1/2) = -1`.
    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    pub fn ceil(&self) -> BigInt {
        -((-self.0.numer()).div_floor(self.0.denom()))
    }

    pub fn midpoint(a: &Scalar, b: &Scalar) -> Scalar {
        (a + b) / Scalar::from_int(2)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering truncated (toward zero) to `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        truncated_decimal(self.numer(), self.denom(), digits)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

fn truncated_decimal(numer: &BigInt, denom: &BigInt, digits: usize) -> String {
    if numer.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let negative = numer.sign() == Sign::Minus;
    let num = numer.abs();
    let ten = BigInt::from(10);

    // Find the decimal exponent e with 10^e <= |x| < 10^(e+1).
    let int_part = &num / denom;
    let exponent: i64 = if int_part.is_zero() {
        let mut e = 0i64;
        let mut scaled = num.clone();
        while &scaled < denom {
            scaled *= &ten;
            e -= 1;
        }
        e
    } else {
        int_part.to_string().len() as i64 - 1
    };
    // Scale so the integer part holds exactly `digits` digits.
    let shift = digits as i64 - 1 - exponent;
    let scaled = if shift >= 0 {
        (&num * ten.pow(shift as u32)) / denom
    } else {
        &num / (denom * ten.pow((-shift) as u32))
    };
    let mantissa = scaled.to_string();
    debug_assert_eq!(mantissa.len(), digits);
    let point = exponent + 1; // digits before the decimal point
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(mantissa.trim_end_matches('0'));
    } else if point as usize >= mantissa.len() {
        out.push_str(&mantissa);
        for _ in 0..(point as usize - mantissa.len()) {
            out.push('0');
        }
    } else {
        let (int_digits, frac_digits) = mantissa.split_at(point as usize);
        out.push_str(int_digits);
        let frac = frac_digits.trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseScalarError(pub String);

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts `p`, `p/q`, and plain decimals such as `-0.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseScalarError(s.to_string());
        let s = s.trim();
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Scalar::from_ratio(p, q));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int_part.starts_with('-');
            let int_digits = int_part.trim_start_matches(['-', '+']);
            if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let joined = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac_part);
            let mut numer: BigInt = joined.parse().map_err(|_| bad())?;
            if negative {
                numer = -numer;
            }
            let denom = BigInt::from(10).pow(frac_part.len() as u32);
            return Ok(Scalar::from_ratio(numer, denom));
        }
        let value: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Scalar::from_bigint(value))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Scalar {
    fn from(value: i64) -> Self {
        Scalar::from_int(value)
    }
}

impl From<usize> for Scalar {
    fn from(value: usize) -> Self {
        Scalar::from_bigint(BigInt::from(value))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign<Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        self.0 -= rhs.0;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// A real number `rational + coeff·√radicand` with rational parts.
///
/// Comparisons with [`Scalar`]s are exact. Two surds compare exactly when they
/// share a radicand; otherwise the comparison falls back to isolating both in
/// shrinking rational intervals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    pub rational: Scalar,
    pub coeff: Scalar,
    pub radicand: Scalar,
}

impl Surd {
    pub fn rational(value: Scalar) -> Self {
        Surd { rational: value, coeff: Scalar::zero(), radicand: Scalar::zero() }
    }

    /// `rational + coeff·√radicand`; panics on a negative radicand.
    pub fn new(rational: Scalar, coeff: Scalar, radicand: Scalar) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        Surd { rational, coeff, radicand }
    }

    /// `a + b·√2`.
    pub fn sqrt2(rational: Scalar, coeff: Scalar) -> Self {
        Surd::new(rational, coeff, Scalar::from_int(2))
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.is_zero() || self.radicand.is_zero() || perfect_square(&self.radicand).is_some()
    }

    /// Exact ordering of `self` against a rational `x`.
    pub fn cmp_scalar(&self, x: &Scalar) -> Ordering {
        // self - x = u + b·√r  with u = rational - x
        let u = &self.rational - x;
        sign_of(&u, &self.coeff, &self.radicand)
    }

    /// True iff `x <= self`.
    pub fn ge_scalar(&self, x: &Scalar) -> bool {
        self.cmp_scalar(x) != Ordering::Less
    }

    /// True iff `x < self`.
    pub fn gt_scalar(&self, x: &Scalar) -> bool {
        self.cmp_scalar(x) == Ordering::Greater
    }

    pub fn scale(&self, factor: &Scalar) -> Surd {
        Surd {
            rational: &self.rational * factor,
            coeff: &self.coeff * factor,
            radicand: self.radicand.clone(),
        }
    }

    pub fn shift(&self, delta: &Scalar) -> Surd {
        Surd {
            rational: &self.rational + delta,
            coeff: self.coeff.clone(),
            radicand: self.radicand.clone(),
        }
    }

    /// Sum of two surds; `None` when the radicands differ and neither is rational.
    pub fn checked_add(&self, other: &Surd) -> Option<Surd> {
        if other.coeff.is_zero() {
            return Some(self.shift(&other.rational));
        }
        if self.coeff.is_zero() {
            return Some(other.shift(&self.rational));
        }
        if self.radicand != other.radicand {
            return None;
        }
        Some(Surd {
            rational: &self.rational + &other.rational,
            coeff: &self.coeff + &other.coeff,
            radicand: self.radicand.clone(),
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64() + self.coeff.to_f64() * self.radicand.to_f64().sqrt()
    }

    /// Rational interval `[lo, hi]` of width at most `2^-bits` containing the value.
    pub fn enclosure(&self, bits: u32) -> (Scalar, Scalar) {
        if self.coeff.is_zero() {
            return (self.rational.clone(), self.rational.clone());
        }
        // floor(√r · 2^bits) via integer square roots on r·4^bits.
        let scale = BigInt::one() << bits;
        let scaled = &self.radicand * &Scalar::from_bigint(&scale * &scale);
        let floor_val = scaled.floor();
        let root_lo = floor_val.sqrt();
        let lo_sqrt = Scalar::from_ratio(root_lo.clone(), scale.clone());
        let hi_sqrt = Scalar::from_ratio(root_lo + 1, scale);
        let (a, b) = (&self.coeff * &lo_sqrt, &self.coeff * &hi_sqrt);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        (&self.rational + &lo, &self.rational + &hi)
    }

    pub fn cmp_surd(&self, other: &Surd) -> Ordering {
        if let Some(diff) = self.checked_add(&other.scale(&Scalar::from_int(-1))) {
            return diff.cmp_scalar(&Scalar::zero());
        }
        let mut bits = 32;
        loop {
            let (lo_a, hi_a) = self.enclosure(bits);
            let (lo_b, hi_b) = other.enclosure(bits);
            if hi_a < lo_b {
                return Ordering::Less;
            }
            if hi_b < lo_a {
                return Ordering::Greater;
            }
            if bits > 4096 {
                // Distinct radicands whose values agree to 4096 bits: treat as equal.
                return Ordering::Equal;
            }
            bits *= 2;
        }
    }
}

/// Sign of `u + b·√r`.
fn sign_of(u: &Scalar, b: &Scalar, r: &Scalar) -> Ordering {
    let zero = Scalar::zero();
    if b.is_zero() || r.is_zero() {
        return u.cmp(&zero);
    }
    // Compare u against -b√r.
    let br2 = b * b * r;
    let u2 = u * u;
    match (u.cmp(&zero), b.cmp(&zero)) {
        (Ordering::Greater | Ordering::Equal, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less | Ordering::Equal, Ordering::Less) => Ordering::Less,
        // u > 0, b < 0: sign of u - |b|√r  ~ u² vs b²r
        (Ordering::Greater, Ordering::Less) => u2.cmp(&br2),
        // u < 0, b > 0: sign of |b|√r - |u| ~ b²r vs u²
        (Ordering::Less, Ordering::Greater) => br2.cmp(&u2),
        (_, Ordering::Equal) => unreachable!(),
    }
}

fn perfect_square(x: &Scalar) -> Option<Scalar> {
    if x.is_negative() {
        return None;
    }
    let (p, q) = (x.numer(), x.denom());
    let (rp, rq) = (p.sqrt(), q.sqrt());
    if &(&rp * &rp) == p && &(&rq * &rq) == q {
        Some(Scalar::from_ratio(rp, rq))
    } else {
        None
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() || self.radicand.is_zero() {
            return write!(f, "{}", self.rational);
        }
        if !self.rational.is_zero() {
            write!(f, "{} + ", self.rational)?;
        }
        if self.coeff != Scalar::one() {
            write!(f, "{}*", self.coeff)?;
        }
        write!(f, "sqrt({})", self.radicand)
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{:.6})", self, self.to_f64())
    }
}

impl From<Scalar> for Surd {
    fn from(value: Scalar) -> Self {
        Surd::rational(value)
    }
}

/// Continued-fraction convergents `p/q` of `√(num/den)`, starting with the
/// integer part (depth 0).
pub fn sqrt_convergents(num: u64, den: u64, depth: usize) -> Vec<(BigInt, BigInt)> {
    assert!(den > 0, "zero denominator");
    // √(num/den) = √(num·den)/den, expanded as (P + √Q)/R.
    let q_rad = BigInt::from(num) * BigInt::from(den);
    let root = q_rad.sqrt();
    let mut p = BigInt::zero();
    let mut r = BigInt::from(den);
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::with_capacity(depth + 1);
    for _ in 0..=depth {
        let a = (&p + &root).div_floor(&r);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        out.push((h.clone(), k.clone()));
        p = &a * &r - &p;
        let next_r = (&q_rad - &p * &p) / &r;
        if next_r.is_zero() {
            break; // perfect square: expansion terminates
        }
        r = next_r;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("3/6".parse::<Scalar>().unwrap(), Scalar::new(1, 2));
        assert_eq!("-0.25".parse::<Scalar>().unwrap(), Scalar::new(-1, 4));
        assert_eq!("7".parse::<Scalar>().unwrap().to_string(), "7");
        assert_eq!(Scalar::new(-6, 4).to_string(), "-3/2");
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert!("1.".parse::<Scalar>().is_err());
    }

    #[test]
    fn floor_and_ceil_are_mathematical() {
        assert_eq!(Scalar::new(-1, 2).floor(), BigInt::from(-1));
        assert_eq!(Scalar::new(-1, 2).ceil(), BigInt::from(0));
        assert_eq!(Scalar::new(7, 2).floor(), BigInt::from(3));
        assert_eq!(Scalar::new(7, 2).ceil(), BigInt::from(4));
        assert_eq!(Scalar::from_int(-3).floor(), BigInt::from(-3));
    }

    #[test]
    fn decimal_truncation() {
        assert_eq!(Scalar::new(7, 3).to_decimal(12), "2.33333333333");
        assert_eq!(Scalar::new(2, 3).to_decimal(12), "0.666666666666");
        assert_eq!(Scalar::new(-43, 28).to_decimal(5), "-1.5357");
        assert_eq!(Scalar::from_int(12345).to_decimal(3), "12300");
        assert_eq!(Scalar::new(1, 1000).to_decimal(12), "0.001");
        assert_eq!(Scalar::zero().to_decimal(12), "0");
        assert_eq!(Scalar::from_int(100).to_decimal(12), "100");
    }

    #[test]
    fn surd_against_rationals() {
        let one_plus_root2 = Surd::sqrt2(Scalar::one(), Scalar::one());
        assert!(one_plus_root2.ge_scalar(&Scalar::new(2414, 1000)));
        assert!(!one_plus_root2.ge_scalar(&Scalar::new(2415, 1000)));
        // 1/(1+√2) = √2 - 1
        let inv = Surd::sqrt2(Scalar::from_int(-1), Scalar::one());
        assert_eq!(inv.cmp_scalar(&Scalar::new(41, 100)), Ordering::Greater);
        assert_eq!(inv.cmp_scalar(&Scalar::new(42, 100)), Ordering::Less);
        let negative = Surd::sqrt2(Scalar::from_int(3), Scalar::from_int(-2));
        // 3 - 2√2 ≈ 0.1716
        assert_eq!(negative.cmp_scalar(&Scalar::new(17, 100)), Ordering::Greater);
        assert_eq!(negative.cmp_scalar(&Scalar::new(18, 100)), Ordering::Less);
        assert_eq!(Surd::rational(Scalar::new(7, 3)).cmp_scalar(&Scalar::new(7, 3)), Ordering::Equal);
    }

    #[test]
    fn surd_against_surd() {
        let a = Surd::sqrt2(Scalar::one(), Scalar::one());
        let b = Surd::rational(Scalar::new(7, 3));
        assert_eq!(a.cmp_surd(&b), Ordering::Greater);
        let c = Surd::new(Scalar::one(), Scalar::one(), Scalar::new(3, 2));
        assert_eq!(a.cmp_surd(&c), Ordering::Greater);
        assert_eq!(c.cmp_surd(&b), Ordering::Less);
    }

    #[test]
    fn convergents_of_root_two() {
        let conv = sqrt_convergents(2, 1, 8);
        let expect = [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70), (239, 169), (577, 408), (1393, 985)];
        assert_eq!(conv.len(), expect.len());
        for ((p, q), (ep, eq)) in conv.iter().zip(expect) {
            assert_eq!((p.clone(), q.clone()), (BigInt::from(ep), BigInt::from(eq)));
        }
    }

    #[test]
    fn convergents_of_root_three_halves() {
        // √(3/2) = [1; 4, 2, 4, 2, ...]
        let conv = sqrt_convergents(3, 2, 4);
        let expect = [(1, 1), (5, 4), (11, 9), (49, 40), (109, 89)];
        for ((p, q), (ep, eq)) in conv.iter().zip(expect) {
            assert_eq!((p.clone(), q.clone()), (BigInt::from(ep), BigInt::from(eq)));
        }
    }

    #[test]
    fn convergents_of_perfect_square_terminate() {
        let conv = sqrt_convergents(4, 1, 5);
        assert_eq!(conv, vec![(BigInt::from(2), BigInt::from(1))]);
    }
}
