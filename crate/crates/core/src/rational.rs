//! Exact rational numbers used for every capacity, probability and ratio.
//!
//! `BigRational` keeps values in lowest terms with a positive denominator,
//! and arithmetic never overflows, so simplex pivots and long products of
//! `1/c_j` factors stay exact.

use num::bigint::Sign;
use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `p/q` as a rational. Panics on a zero denominator, which is a programming
/// error everywhere this helper is used.
pub fn rat(p: i64, q: i64) -> Rational {
    assert!(q != 0, "zero denominator");
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Whole number as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p"` or `"p/q"`. Decimal notation is rejected on purpose: the
/// instance format is exact and `0.1` has no finite binary or decimal-free
/// representation contract.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    if s.contains('.') {
        return Err(format!("decimal capacities are not accepted: `{s}`"));
    }
    let mk_int = |t: &str| -> Result<BigInt, String> {
        t.parse::<BigInt>().map_err(|_| format!("not an integer: `{t}`"))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(mk_int(s)?)),
        Some((p, q)) => {
            let den = mk_int(q)?;
            if den.is_zero() {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(Rational::new(mk_int(p)?, den))
        }
    }
}

/// Renders in the same syntax `parse_rational` accepts: `p` when the value
/// is integral, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64`, for the convenience fields in JSON output only.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `num`/`den` as `i64`s for JSON. Values in this crate come from small
/// instances; anything that outgrows an `i64` is reported, not truncated.
pub fn to_i64_pair(r: &Rational) -> Result<(i64, i64), String> {
    let num = r.numer().to_i64();
    let den = r.denom().to_i64();
    match (num, den) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(format!("rational {} does not fit in i64/i64", format_rational(r))),
    }
}

/// True iff `r` is a strictly positive value.
pub fn is_positive(r: &Rational) -> bool {
    r.numer().sign() == Sign::Plus
}
