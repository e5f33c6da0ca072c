//! Scalar abstraction shared by the float and exact-rational code paths.
//!
//! Every geometric and game computation is generic over [`Scalar`], so the
//! same routines run on `f64` for speed and on [`Rational`] when results must
//! be exact.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseScalarError {
    #[error("empty number")]
    Empty,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("`{0}` is not finite")]
    NotFinite(String),
}

pub trait Scalar:
    Num + Signed + PartialOrd + Clone + Debug + ToPrimitive + FromPrimitive + Send + Sync + 'static
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    /// Slack used by strict comparisons; zero for exact types.
    fn tolerance() -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Exact conversion for rationals; the value itself for floats.
    fn from_f64_exact(x: f64) -> Self;

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn parse(text: &str) -> Result<Self, ParseScalarError>;

    /// Text form that parses back to the identical value.
    fn render(&self) -> String;

    /// `self > other` by more than the tolerance.
    fn exceeds(&self, other: &Self) -> bool {
        self.clone() > other.clone() + Self::tolerance()
    }

    /// `|self| <= tolerance`.
    fn negligible(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    fn half(&self) -> Self {
        self.clone() / (Self::one() + Self::one())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-12
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64_exact(x: f64) -> Self {
        x
    }

    fn parse(text: &str) -> Result<Self, ParseScalarError> {
        let t = text.trim();
        if t.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        let value = match t.split_once('/') {
            Some((n, d)) => {
                let n: f64 = n.trim().parse().map_err(|_| ParseScalarError::Malformed(t.into()))?;
                let d: f64 = d.trim().parse().map_err(|_| ParseScalarError::Malformed(t.into()))?;
                if d == 0.0 {
                    return Err(ParseScalarError::ZeroDenominator(t.into()));
                }
                n / d
            }
            None => t.parse().map_err(|_| ParseScalarError::Malformed(t.into()))?,
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ParseScalarError::NotFinite(t.into()))
        }
    }

    fn render(&self) -> String {
        // Display for f64 prints the shortest string that round-trips.
        format!("{self}")
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64_exact(x: f64) -> Self {
        Rational::from_float(x).expect("finite float")
    }

    fn exceeds(&self, other: &Self) -> bool {
        self > other
    }

    fn negligible(&self) -> bool {
        self.is_zero()
    }

    fn parse(text: &str) -> Result<Self, ParseScalarError> {
        parse_rational(text)
    }

    fn render(&self) -> String {
        render_rational(self)
    }
}

fn parse_rational(text: &str) -> Result<Rational, ParseScalarError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(ParseScalarError::Empty);
    }
    let malformed = || ParseScalarError::Malformed(t.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| malformed())?;
        let d: BigInt = d.trim().parse().map_err(|_| malformed())?;
        if d.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(t.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(at) => {
            let e: i32 = t[at + 1..].parse().map_err(|_| malformed())?;
            (&t[..at], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(malformed());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| malformed())?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Terminating decimal when the denominator allows it, `p/q` otherwise.
fn render_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        return value.numer().to_string();
    }
    let mut den = value.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", value.numer(), value.denom());
    }
    let places = twos.max(fives);
    let scaled = value * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    let sign = if value.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}

/// Exact rational from a float, exposed for callers that mix the two paths.
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_f64_exact(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_decimal_round_trip() {
        for text in ["0.25", "-0.125", "3", "0.0000001", "12.5"] {
            let value = Rational::parse(text).unwrap();
            assert_eq!(Rational::parse(&value.render()).unwrap(), value);
        }
        assert_eq!(Rational::parse("0.25").unwrap(), Rational::from_ratio(1, 4));
        assert_eq!(Rational::parse("1/3").unwrap().render(), "1/3");
        assert_eq!(Rational::parse("2.5e-1").unwrap(), Rational::from_ratio(1, 4));
        assert_eq!(Rational::from_ratio(-1, 8).render(), "-0.125");
    }

    #[test]
    fn float_render_round_trips_bitwise() {
        for x in [0.1, 1.0 / 3.0, 5e-324, 0.999_999_999_999_999_9, 123.456] {
            let back = f64::parse(&x.render()).unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn exact_float_conversion() {
        let x = 0.1f64;
        let r = rational_from_f64(x);
        assert_eq!(r.to_f64().unwrap(), x);
        assert_ne!(r, Rational::from_ratio(1, 10));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Rational::parse(""), Err(ParseScalarError::Empty));
        assert!(matches!(Rational::parse("1/0"), Err(ParseScalarError::ZeroDenominator(_))));
        assert!(matches!(Rational::parse("0.x"), Err(ParseScalarError::Malformed(_))));
        assert!(matches!(f64::parse("inf"), Err(ParseScalarError::NotFinite(_))));
    }
}
