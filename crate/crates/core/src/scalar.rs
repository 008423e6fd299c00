//! Exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Coefficient field. Always kept in lowest terms with a positive denominator.
pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarParseError {
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

/// Parses `p` or `p/q` with optional leading `-` on either part.
pub fn parse_scalar(src: &str) -> Result<Scalar, ScalarParseError> {
    let s = src.trim();
    let malformed = || ScalarParseError::Malformed(src.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = parse_int_literal(num).ok_or_else(malformed)?;
    let den: BigInt = match den {
        Some(d) => parse_int_literal(d).ok_or_else(malformed)?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(ScalarParseError::ZeroDenominator(src.to_string()));
    }
    Ok(Scalar::new(num, den))
}

fn parse_int_literal(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `p/q`, or `p` when the denominator is one.
pub fn format_scalar(c: &Scalar) -> String {
    c.to_string()
}

pub fn is_integer(c: &Scalar) -> bool {
    c.is_integer()
}

pub fn abs(c: &Scalar) -> Scalar {
    c.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        assert_eq!(parse_scalar("2/4").unwrap(), ratio(1, 2));
        assert_eq!(parse_scalar("-3").unwrap(), int(-3));
        assert_eq!(parse_scalar("3/-6").unwrap(), ratio(-1, 2));
        assert_eq!(*parse_scalar("6/-4").unwrap().denom(), BigInt::from(2));
    }

    #[test]
    fn rejects_zero_denominator_and_junk() {
        assert!(matches!(
            parse_scalar("2/0"),
            Err(ScalarParseError::ZeroDenominator(_))
        ));
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("1/").is_err());
        assert!(parse_scalar("+1").is_err());
        assert!(parse_scalar("1.5").is_err());
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format_scalar(&ratio(4, 6)), "2/3");
        assert_eq!(format_scalar(&ratio(-4, 2)), "-2");
        let big = parse_scalar("123456789012345678901234567891/7").unwrap();
        assert_eq!(format_scalar(&big), "123456789012345678901234567891/7");
    }
}
