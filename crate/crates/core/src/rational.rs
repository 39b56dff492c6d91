//! Exact rational helpers.
//!
//! Every quantity in this crate is an exact rational. Values cross the
//! JSON boundary as `"p/q"` strings so nothing is ever rounded.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = num_rational::BigRational;

/// Builds an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds `num/den`, reduced.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {0:?}: expected \"p/q\" or an integer")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, `"-p/q"` or a bare integer. A zero denominator is rejected.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = t.parse().map_err(|_| err())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Canonical `"p/q"` form, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Wrapper that displays a rational in canonical `"p/q"` form.
pub struct Exact<'a>(pub &'a Rational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Smallest non-negative integer `k` with `k*k >= r`. Negative input yields 0.
pub fn ceil_sqrt(r: &Rational) -> BigInt {
    if !r.is_positive() {
        return BigInt::zero();
    }
    // k^2 >= p/q  <=>  k^2 >= ceil(p/q) for integral k
    let bound = r.numer().div_ceil(r.denom());
    let mut k = bound.sqrt();
    while &k * &k < bound {
        k += 1;
    }
    k
}

/// Exact square root when `r` is the square of a rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (p, q) = (r.numer(), r.denom());
    let sp = p.sqrt();
    let sq = q.sqrt();
    if &(&sp * &sp) == p && &(&sq * &sq) == q {
        Some(Rational::new(sp, sq))
    } else {
        None
    }
}

/// Decides `sqrt(a) <= sqrt(b) + sqrt(c)` for non-negative rationals without
/// taking roots.
pub fn sqrt_le_sum(a: &Rational, b: &Rational, c: &Rational) -> bool {
    let lhs = a - b - c;
    if !lhs.is_positive() {
        return true;
    }
    let four = int(4);
    &lhs * &lhs <= four * b * c
}

/// Serde adapter for a single rational as a `"p/q"` string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of rationals as `"p/q"` strings.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(format_rational).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        strings
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
