//! Scalar types shared by every computation.
//!
//! All routines are generic over [`Scalar`], implemented for exact
//! rationals ([`Rational`]) and for `f64`. Exact mode is the default for
//! every oracle; float mode exists for irrational points and for speed.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{GstError, Result};

/// Arbitrary-precision rational number, always kept in lowest terms.
pub type Rational = BigRational;

/// Computation mode selected at the interface boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Mode {
    type Err = GstError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(GstError::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    fn from_bigint(v: BigInt) -> Self;
    fn from_rational(v: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact rendering for exact values, shortest round-trip for floats.
    fn to_repr(&self) -> String;
    fn parse_repr(s: &str) -> Result<Self>;

    fn from_i64(v: i64) -> Self {
        Self::from_bigint(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(num.into(), den.into()))
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `|self| <= tol`; exact mode ignores `tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Ternary sign using `tol` as the zero band in float mode.
    fn sign_with(&self, tol: f64) -> i8 {
        if self.is_negligible(tol) {
            0
        } else if *self > Self::zero() {
            1
        } else {
            -1
        }
    }

    fn pow_u(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_bigint(v: BigInt) -> Self {
        Rational::from_integer(v)
    }

    fn from_rational(v: &Rational) -> Self {
        v.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_repr(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_repr(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn pow_u(&self, e: u32) -> Self {
        num_traits::pow(self.clone(), e as usize)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_bigint(v: BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }

    fn from_rational(v: &Rational) -> Self {
        rational_to_f64(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_repr(&self) -> String {
        format!("{self:?}")
    }

    fn parse_repr(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num: f64 = parse_f64(a)?;
            let den: f64 = parse_f64(b)?;
            if den == 0.0 {
                return Err(GstError::Parse(format!("zero denominator in `{s}`")));
            }
            return Ok(num / den);
        }
        parse_f64(s)
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn pow_u(&self, e: u32) -> Self {
        self.powi(e as i32)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| GstError::Parse(format!("not a number: `{s}`")))?;
    if !v.is_finite() {
        return Err(GstError::Parse(format!("non-finite value `{s}`")));
    }
    Ok(v)
}

/// Correctly rounded for the magnitudes used here; falls back to a
/// scaled division when numerator or denominator overflow `f64`.
pub fn rational_to_f64(v: &Rational) -> f64 {
    match (v.numer().to_f64(), v.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = v.denom().bits().max(v.numer().bits()) as i64 - 900;
            let scaled = if shift > 0 {
                (v.numer() >> shift as usize).to_f64().unwrap_or(0.0)
                    / (v.denom() >> shift as usize).to_f64().unwrap_or(f64::INFINITY)
            } else {
                0.0
            };
            scaled
        }
    }
}

/// Parses `a`, `a/b`, or a plain decimal such as `0.125` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || GstError::Parse(format!("not a rational: `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((a, b)) = s.split_once('/') {
        let num = parse_rational(a)?;
        let den = parse_rational(b)?;
        if den.is_zero() {
            return Err(GstError::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(num / den);
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.chars().any(|c| !c.is_ascii_digit()) || frac.is_empty() && int.is_empty() {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse::<BigInt>().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse::<BigInt>().map_err(|_| bad())?
        };
        let magnitude = int_part.abs() * &scale + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(numer, scale));
    }
    s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad())
}

/// Binomial coefficient, zero outside `0 <= k <= n`.
pub fn binom(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn binom_s<T: Scalar>(n: i64, k: i64) -> T {
    T::from_bigint(binom(n, k))
}

/// `2^e` as a scalar.
pub fn pow2<T: Scalar>(e: u32) -> T {
    T::from_bigint(BigInt::one() << e as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_rational("-2/4").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("-0.5").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn repr_round_trips() {
        let v = q(-22, 7);
        assert_eq!(Rational::parse_repr(&v.to_repr()).unwrap(), v);
        assert_eq!(q(4, 2).to_repr(), "2");
        let x = 0.1_f64 + 0.2;
        assert_eq!(f64::parse_repr(&x.to_repr()).unwrap(), x);
        assert_eq!(f64::parse_repr("1/4").unwrap(), 0.25);
        assert!(f64::parse_repr("inf").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), BigInt::from(10));
        assert_eq!(binom(4, -1), BigInt::zero());
        assert_eq!(binom(3, 4), BigInt::zero());
        assert_eq!(binom(0, 0), BigInt::one());
        assert_eq!(binom(30, 15), BigInt::from(155_117_520u64));
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = Rational::new(BigInt::one() << 2000usize, (BigInt::one() << 2000usize) * 3);
        assert!((rational_to_f64(&big) - 1.0 / 3.0).abs() < 1e-15);
    }
}
