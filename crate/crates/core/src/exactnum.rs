//! Exact arithmetic over the field Q(i, √2).
//!
//! Every element is stored as `(ra + ia·i) + (rb + ib·i)·√2` with four reduced
//! big rationals. Because `{1, i, √2, i√2}` is a basis of the field over Q,
//! this representation is unique and equality is componentwise.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Reduced fraction with unbounded numerator and positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse exact scalar from {0:?}")]
    Parse(String),
}

/// Gaussian rational `re + im·i`, used internally for the √2-free halves.
#[derive(Clone, PartialEq, Eq)]
struct Gauss {
    re: Rational,
    im: Rational,
}

impl Gauss {
    fn mul(&self, o: &Gauss) -> Gauss {
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn add(&self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn scale(&self, k: &Rational) -> Gauss {
        Gauss { re: &self.re * k, im: &self.im * k }
    }
}

/// An element of Q(i, √2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    ra: Rational,
    ia: Rational,
    rb: Rational,
    ib: Rational,
}

impl ExactScalar {
    /// `(ra + ia·i) + (rb + ib·i)·√2`
    pub fn new(ra: Rational, ia: Rational, rb: Rational, ib: Rational) -> Self {
        ExactScalar { ra, ia, rb, ib }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::gaussian(Rational::zero(), Rational::one())
    }

    pub fn sqrt2() -> Self {
        ExactScalar { rb: Rational::one(), ..Self::default() }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        ExactScalar { ra: r, ..Self::default() }
    }

    /// `numer / denom` as a real rational scalar. Panics if `denom == 0`.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn gaussian(re: Rational, im: Rational) -> Self {
        ExactScalar { ra: re, ia: im, ..Self::default() }
    }

    /// Components in the order `(ra, ia, rb, ib)`.
    pub fn components(&self) -> [&Rational; 4] {
        [&self.ra, &self.ia, &self.rb, &self.ib]
    }

    pub fn is_zero(&self) -> bool {
        self.ra.is_zero() && self.ia.is_zero() && self.rb.is_zero() && self.ib.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.ra.is_one() && self.ia.is_zero() && self.rb.is_zero() && self.ib.is_zero()
    }

    /// Complex conjugation: `i → -i`, `√2` fixed.
    pub fn conj(&self) -> Self {
        ExactScalar {
            ra: self.ra.clone(),
            ia: -self.ia.clone(),
            rb: self.rb.clone(),
            ib: -self.ib.clone(),
        }
    }

    fn halves(&self) -> (Gauss, Gauss) {
        (
            Gauss { re: self.ra.clone(), im: self.ia.clone() },
            Gauss { re: self.rb.clone(), im: self.ib.clone() },
        )
    }

    fn from_halves(a: Gauss, b: Gauss) -> Self {
        ExactScalar { ra: a.re, ia: a.im, rb: b.re, ib: b.im }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        // (A + B√2)^-1 = (A - B√2) / (A² - 2B²); A² - 2B² ≠ 0 since √2 ∉ Q(i).
        let (a, b) = self.halves();
        let two = Rational::from_integer(BigInt::from(2));
        let norm = a.mul(&a).add(&b.mul(&b).scale(&-two));
        let abs2 = &norm.re * &norm.re + &norm.im * &norm.im;
        let norm_inv = Gauss { re: &norm.re / &abs2, im: -(&norm.im / &abs2) };
        let neg_b = Gauss { re: -b.re, im: -b.im };
        Ok(Self::from_halves(a.mul(&norm_inv), neg_b.mul(&norm_inv)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Nearest double-precision complex value.
    ///
    /// Each part `x + y√2` is evaluated against a rational approximation of
    /// √2 whose precision grows until the bracket is far below one ulp, so
    /// cancellation between `x` and `y√2` does not cost accuracy.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(surd_to_f64(&self.ra, &self.rb), surd_to_f64(&self.ia, &self.ib))
    }

    /// Single-component scalars as `(rational, unit)` where unit is one of
    /// `""`, `"i"`, `"r2"`, `"i*r2"`; `None` when more than one component is set.
    pub(crate) fn as_monomial(&self) -> Option<(&Rational, &'static str)> {
        let parts: Vec<(&Rational, &'static str)> = [
            (&self.ra, ""),
            (&self.ia, "i"),
            (&self.rb, "r2"),
            (&self.ib, "i*r2"),
        ]
        .into_iter()
        .filter(|(r, _)| !r.is_zero())
        .collect();
        match parts.as_slice() {
            [one] => Some(*one),
            _ => None,
        }
    }
}

fn surd_to_f64(x: &Rational, y: &Rational) -> f64 {
    if y.is_zero() {
        return x.to_f64().unwrap_or(f64::NAN);
    }
    let mut bits: u64 = 128;
    loop {
        let scale = BigInt::one() << (2 * bits);
        let root2 = (scale * BigInt::from(2)).sqrt();
        let denom = BigInt::one() << bits;
        let approx = x + y * Rational::new(root2, denom.clone());
        // |error| < |y| / 2^bits; accept once that is below 2^-64 of the value.
        let lhs = y.abs() * Rational::from_integer(BigInt::one() << 64u32);
        let rhs = approx.abs() * Rational::from_integer(denom);
        if lhs < rhs || bits > 1 << 16 {
            return approx.to_f64().unwrap_or(f64::NAN);
        }
        bits *= 2;
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign:ident) => {
        impl $trait<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                self.$method(&rhs)
            }
        }
        impl $assign_trait<ExactScalar> for ExactScalar {
            fn $assign(&mut self, rhs: ExactScalar) {
                *self = (&*self).$method(&rhs);
            }
        }
        impl<'a> $assign_trait<&'a ExactScalar> for ExactScalar {
            fn $assign(&mut self, rhs: &'a ExactScalar) {
                *self = (&*self).$method(rhs);
            }
        }
    };
}

impl<'b> Add<&'b ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &'b ExactScalar) -> ExactScalar {
        ExactScalar {
            ra: &self.ra + &rhs.ra,
            ia: &self.ia + &rhs.ia,
            rb: &self.rb + &rhs.rb,
            ib: &self.ib + &rhs.ib,
        }
    }
}

impl<'b> Sub<&'b ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &'b ExactScalar) -> ExactScalar {
        ExactScalar {
            ra: &self.ra - &rhs.ra,
            ia: &self.ia - &rhs.ia,
            rb: &self.rb - &rhs.rb,
            ib: &self.ib - &rhs.ib,
        }
    }
}

impl<'b> Mul<&'b ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &'b ExactScalar) -> ExactScalar {
        // (A + B√2)(C + D√2) = (AC + 2BD) + (AD + BC)√2
        let (a, b) = self.halves();
        let (c, d) = rhs.halves();
        let two = Rational::from_integer(BigInt::from(2));
        let first = a.mul(&c).add(&b.mul(&d).scale(&two));
        let second = a.mul(&d).add(&b.mul(&c));
        ExactScalar::from_halves(first, second)
    }
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { ra: -self.ra, ia: -self.ia, rb: -self.rb, ib: -self.ib }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -self.clone()
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for ExactScalar {
    fn from(n: BigInt) -> Self {
        Self::from_bigint(n)
    }
}

impl From<Rational> for ExactScalar {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

/// Canonical text: nonzero components as `p/q`, `p/q*i`, `p/q*r2`,
/// `p/q*i*r2` joined by `+`; integers print without a denominator and zero
/// prints as `0`.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (r, unit) in [(&self.ra, ""), (&self.ia, "*i"), (&self.rb, "*r2"), (&self.ib, "*i*r2")] {
            if r.is_zero() {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            write!(f, "{}{}", r, unit)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactScalar({})", self)
    }
}

impl FromStr for ExactScalar {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ExactError::Parse(s.to_string());
        let s = s.trim();
        if s.is_empty() {
            return Err(err());
        }
        let mut acc = ExactScalar::zero();
        for part in s.split('+') {
            let part = part.trim();
            let (num, slot) = if let Some(n) = part.strip_suffix("*i*r2") {
                (n, 3)
            } else if let Some(n) = part.strip_suffix("*r2") {
                (n, 2)
            } else if let Some(n) = part.strip_suffix("*i") {
                (n, 1)
            } else {
                (part, 0)
            };
            if num.is_empty() || num.contains(char::is_whitespace) {
                return Err(err());
            }
            let r: Rational = num.parse().map_err(|_| err())?;
            match slot {
                0 => acc.ra += r,
                1 => acc.ia += r,
                2 => acc.rb += r,
                _ => acc.ib += r,
            }
        }
        Ok(acc)
    }
}

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn field_basics() {
        let sum = ExactScalar::one() + ExactScalar::i();
        assert_eq!(sum, ExactScalar::gaussian(q(1, 1), q(1, 1)));
        assert_eq!(ExactScalar::sqrt2() * ExactScalar::sqrt2(), ExactScalar::from_integer(2));
        assert_eq!(ExactScalar::i() * ExactScalar::i(), ExactScalar::from_integer(-1));
    }

    #[test]
    fn invert_one_plus_i() {
        let x = ExactScalar::gaussian(q(1, 1), q(1, 1));
        let inv = x.inv().unwrap();
        assert_eq!(inv, ExactScalar::gaussian(q(1, 2), q(-1, 2)));
        assert!((&x * &inv).is_one());
    }

    #[test]
    fn invert_mixed_surd() {
        let x = ExactScalar::new(q(3, 1), q(-1, 2), q(2, 7), q(5, 3));
        assert!((&x * &x.inv().unwrap()).is_one());
        assert_eq!(ExactScalar::sqrt2().inv().unwrap(), ExactScalar::new(q(0, 1), q(0, 1), q(1, 2), q(0, 1)));
    }

    #[test]
    fn invert_zero_fails() {
        assert_eq!(ExactScalar::zero().inv(), Err(ExactError::DivisionByZero));
    }

    #[test]
    fn to_complex_examples() {
        assert_eq!(ExactScalar::gaussian(q(0, 1), q(1, 2)).to_complex(), Complex64::new(0.0, 0.5));
        assert_eq!(ExactScalar::sqrt2().to_complex(), Complex64::new(core::f64::consts::SQRT_2, 0.0));
        let x = ExactScalar::new(q(0, 1), q(0, 1), q(1, 2), q(1, 2));
        let z = x.to_complex();
        assert_eq!(z.re, core::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(z.im, core::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn to_complex_survives_cancellation() {
        // 99/70 - √2 ≈ 7.2e-5; 665857/470832 - √2 ≈ 1.6e-12
        let x = ExactScalar::new(q(665857, 470832), q(0, 1), q(-1, 1), q(0, 1));
        let v = x.to_complex().re;
        let expected = 1.594861824606854e-12;
        assert!(((v - expected) / expected).abs() < 1e-14, "{v}");
    }

    #[test]
    fn canonical_text() {
        let x = ExactScalar::new(q(1, 2), q(-3, 4), q(0, 1), q(2, 1));
        assert_eq!(format!("{x}"), "1/2+-3/4*i+2*i*r2");
        assert_eq!(x.to_string().parse::<ExactScalar>().unwrap(), x);
        assert_eq!(format!("{}", ExactScalar::zero()), "0");
        assert!("1/0".parse::<ExactScalar>().is_err());
        assert!("".parse::<ExactScalar>().is_err());
        assert!("1*j".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(20), BigInt::from(2432902008176640000u64));
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(30).to_string(), "265252859812191058636308480000000");
    }
}
