//! Helpers for exact rationals and their `"p/q"` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Formats a rational in lowest terms, omitting the denominator when it is 1.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Best-effort conversion to `f64` (falls back to a quotient of rounded parts
/// for values outside the direct range).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::MAX * r.numer().signum().to_f64().unwrap_or(1.0));
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Exact rational from an integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational n/d.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["7/6", "-3/4", "5", "0", "12/8"] {
            let r = parse_rational(s).unwrap();
            let t = format_rational(&r);
            assert_eq!(parse_rational(&t).unwrap(), r);
        }
        assert_eq!(format_rational(&parse_rational("12/8").unwrap()), "3/2");
        assert_eq!(format_rational(&parse_rational("4/1").unwrap()), "4");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }
}
