//! Scalar abstraction shared by the identity evaluators, plus exact
//! rational helpers.

use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Complex, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Commutative ring elements the permanent and subset-sum evaluators run on.
pub trait Scalar:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Absolute value (modulus) as a double, used for error reporting.
    fn modulus(&self) -> f64;

    fn from_i64(v: i64) -> Self;
}

impl Scalar for f64 {
    fn modulus(&self) -> f64 {
        self.abs()
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for Complex64 {
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
}

impl Scalar for BigRational {
    fn modulus(&self) -> f64 {
        to_f64(&self.abs())
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::NonFinite)
}

/// Splits `x` into `floor(x)` and the fractional part in `[0, 1)`.
pub fn floor_frac(x: &BigRational) -> (BigInt, BigRational) {
    let fl = x.numer().div_floor(x.denom());
    let frac = x - BigRational::from_integer(fl.clone());
    (fl, frac)
}

/// Parses `P/Q` or a bare integer `P`. Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("expected an exact rational P/Q, got {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(p, q))
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("10/3").unwrap(), rat(10, 3));
        assert_eq!(parse_rational("4").unwrap(), rat(4, 1));
        assert_eq!(parse_rational("-2/4").unwrap(), rat(-1, 2));
        assert!(parse_rational("0.4").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn floor_frac_negative() {
        let (fl, fr) = floor_frac(&rat(-3, 10));
        assert_eq!(fl, BigInt::from(-1));
        assert_eq!(fr, rat(7, 10));
    }

    #[test]
    fn exact_double_conversion() {
        assert_eq!(from_f64(0.5).unwrap(), rat(1, 2));
        assert!(from_f64(f64::NAN).is_err());
    }
}
