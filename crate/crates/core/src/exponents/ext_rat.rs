//! Exact rationals extended by `+∞`.
//!
//! Every exponent handled by the crate (`n`, `α`, `γ`, `s`, `q`, `r`, ...) is an
//! [`ExtRat`]. Comparisons are exact, so boundary cases such as
//! `s/n + 1/q = 1/q_c` are decided without rounding.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Finite exact rational used for exponents.
pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtRatError {
    #[error("indeterminate form: {0}")]
    Indeterminate(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational overflow")]
    Overflow,
    #[error("negative infinity is not representable")]
    NegativeInfinity,
    #[error("cannot parse `{0}` as an extended rational")]
    Parse(String),
}

/// A rational number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtRat {
    Finite(Rational),
    Infinity,
}

pub fn rat(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

pub fn int(value: i128) -> Rational {
    Rational::from_integer(value)
}

impl ExtRat {
    pub const INFINITY: ExtRat = ExtRat::Infinity;

    pub fn new(numer: i128, denom: i128) -> Self {
        ExtRat::Finite(Rational::new(numer, denom))
    }

    pub fn integer(value: i128) -> Self {
        ExtRat::Finite(Rational::from_integer(value))
    }

    pub fn zero() -> Self {
        ExtRat::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        ExtRat::Finite(Rational::one())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRat::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn finite(&self) -> Option<Rational> {
        match *self {
            ExtRat::Finite(v) => Some(v),
            ExtRat::Infinity => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRat::Finite(v) if v.is_zero())
    }

    pub fn numerator(&self) -> Option<i128> {
        self.finite().map(|v| *v.numer())
    }

    pub fn denominator(&self) -> Option<i128> {
        self.finite().map(|v| *v.denom())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRat::Finite(v) => ratio_to_f64(v),
            ExtRat::Infinity => f64::INFINITY,
        }
    }

    /// `1/x`, with `1/∞ = 0` and `1/0 = ∞` only for the exact zero.
    pub fn recip(&self) -> Result<ExtRat, ExtRatError> {
        match *self {
            ExtRat::Infinity => Ok(ExtRat::zero()),
            ExtRat::Finite(v) if v.is_zero() => Ok(ExtRat::Infinity),
            ExtRat::Finite(v) => Ok(ExtRat::Finite(v.recip())),
        }
    }

    /// Reciprocal of a value known to be `≥ 1` or `∞`; always finite.
    pub fn recip_finite(&self) -> Rational {
        match *self {
            ExtRat::Infinity => Rational::zero(),
            ExtRat::Finite(v) => v.recip(),
        }
    }

    pub fn try_add(&self, other: &ExtRat) -> Result<ExtRat, ExtRatError> {
        match (*self, *other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => {
                a.checked_add(&b).map(ExtRat::Finite).ok_or(ExtRatError::Overflow)
            }
            _ => Ok(ExtRat::Infinity),
        }
    }

    pub fn try_sub(&self, other: &ExtRat) -> Result<ExtRat, ExtRatError> {
        match (*self, *other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => {
                a.checked_sub(&b).map(ExtRat::Finite).ok_or(ExtRatError::Overflow)
            }
            (ExtRat::Infinity, ExtRat::Finite(_)) => Ok(ExtRat::Infinity),
            (ExtRat::Finite(_), ExtRat::Infinity) => Err(ExtRatError::NegativeInfinity),
            (ExtRat::Infinity, ExtRat::Infinity) => Err(ExtRatError::Indeterminate("∞ - ∞")),
        }
    }

    pub fn try_mul(&self, other: &ExtRat) -> Result<ExtRat, ExtRatError> {
        match (*self, *other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => {
                a.checked_mul(&b).map(ExtRat::Finite).ok_or(ExtRatError::Overflow)
            }
            (ExtRat::Infinity, ExtRat::Infinity) => Ok(ExtRat::Infinity),
            (ExtRat::Infinity, ExtRat::Finite(v)) | (ExtRat::Finite(v), ExtRat::Infinity) => {
                if v.is_zero() {
                    Err(ExtRatError::Indeterminate("0 · ∞"))
                } else if v.is_negative() {
                    Err(ExtRatError::NegativeInfinity)
                } else {
                    Ok(ExtRat::Infinity)
                }
            }
        }
    }

    pub fn try_div(&self, other: &ExtRat) -> Result<ExtRat, ExtRatError> {
        match (*self, *other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => {
                if b.is_zero() {
                    Err(ExtRatError::DivisionByZero)
                } else {
                    a.checked_div(&b).map(ExtRat::Finite).ok_or(ExtRatError::Overflow)
                }
            }
            (ExtRat::Finite(_), ExtRat::Infinity) => Ok(ExtRat::zero()),
            (ExtRat::Infinity, ExtRat::Finite(v)) => {
                if v.is_zero() {
                    Err(ExtRatError::DivisionByZero)
                } else if v.is_negative() {
                    Err(ExtRatError::NegativeInfinity)
                } else {
                    Ok(ExtRat::Infinity)
                }
            }
            (ExtRat::Infinity, ExtRat::Infinity) => Err(ExtRatError::Indeterminate("∞ / ∞")),
        }
    }

    pub fn min(self, other: ExtRat) -> ExtRat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtRat) -> ExtRat {
        if self >= other {
            self
        } else {
            other
        }
    }
}

pub fn ratio_to_f64(v: &Rational) -> f64 {
    // i128 -> f64 is exact to 53 bits; divide after reducing.
    let (n, d) = (*v.numer(), *v.denom());
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) => a / b,
        _ => f64::NAN,
    }
}

impl From<Rational> for ExtRat {
    fn from(v: Rational) -> Self {
        ExtRat::Finite(v)
    }
}

impl From<i128> for ExtRat {
    fn from(v: i128) -> Self {
        ExtRat::integer(v)
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => a.cmp(b),
            (ExtRat::Finite(_), ExtRat::Infinity) => Ordering::Less,
            (ExtRat::Infinity, ExtRat::Finite(_)) => Ordering::Greater,
            (ExtRat::Infinity, ExtRat::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialEq<Rational> for ExtRat {
    fn eq(&self, other: &Rational) -> bool {
        matches!(self, ExtRat::Finite(v) if v == other)
    }
}

impl PartialOrd<Rational> for ExtRat {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(&ExtRat::Finite(*other)))
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Infinity => write!(f, "inf"),
            ExtRat::Finite(v) if v.is_integer() => write!(f, "{}", v.numer()),
            ExtRat::Finite(v) => write!(f, "{}/{}", v.numer(), v.denom()),
        }
    }
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let negative = mantissa.starts_with('-');
    let body = mantissa.trim_start_matches(['+', '-']);
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<i128>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(10);
    for _ in 0..scale.unsigned_abs() {
        value = if scale > 0 { value.checked_mul(&ten)? } else { value.checked_div(&ten)? };
    }
    Some(if negative { -value } else { value })
}

impl FromStr for ExtRat {
    type Err = ExtRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let lower = text.to_ascii_lowercase();
        if matches!(lower.as_str(), "inf" | "+inf" | "infinity" | "+infinity" | "∞") {
            return Ok(ExtRat::Infinity);
        }
        if let Some((a, b)) = text.split_once('/') {
            let numer: i128 = a.trim().parse().map_err(|_| ExtRatError::Parse(s.into()))?;
            let denom: i128 = b.trim().parse().map_err(|_| ExtRatError::Parse(s.into()))?;
            if denom == 0 {
                return Err(ExtRatError::DivisionByZero);
            }
            return Ok(ExtRat::new(numer, denom));
        }
        parse_decimal(text).map(ExtRat::Finite).ok_or_else(|| ExtRatError::Parse(s.into()))
    }
}

impl Serialize for ExtRat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Formats a finite rational the same way [`ExtRat`] does.
pub fn fmt_rational(v: &Rational) -> String {
    ExtRat::Finite(*v).to_string()
}

/// Greatest common divisor helper kept for callers building canonical pairs.
pub fn canonical_pair(numer: i128, denom: i128) -> (i128, i128) {
    let g = numer.gcd(&denom);
    let sign = if denom < 0 { -1 } else { 1 };
    (sign * numer / g, sign * denom / g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        let x = ExtRat::new(6, -4);
        assert_eq!(x.numerator(), Some(-3));
        assert_eq!(x.denominator(), Some(2));
        assert_eq!(canonical_pair(6, -4), (-3, 2));
    }

    #[test]
    fn infinity_ordering_and_reciprocal() {
        assert!(ExtRat::Infinity > ExtRat::integer(1_000_000));
        assert_eq!(ExtRat::Infinity.recip().unwrap(), ExtRat::zero());
        assert_eq!(ExtRat::zero().recip().unwrap(), ExtRat::Infinity);
    }

    #[test]
    fn zero_times_infinity_is_an_error() {
        assert_eq!(
            ExtRat::zero().try_mul(&ExtRat::Infinity),
            Err(ExtRatError::Indeterminate("0 · ∞"))
        );
        assert!(ExtRat::Infinity.try_sub(&ExtRat::Infinity).is_err());
        assert_eq!(ExtRat::one().try_add(&ExtRat::Infinity).unwrap(), ExtRat::Infinity);
    }

    #[test]
    fn parsing() {
        assert_eq!("9/4".parse::<ExtRat>().unwrap(), ExtRat::new(9, 4));
        assert_eq!("inf".parse::<ExtRat>().unwrap(), ExtRat::Infinity);
        assert_eq!("-1.5".parse::<ExtRat>().unwrap(), ExtRat::new(-3, 2));
        assert_eq!("1e-3".parse::<ExtRat>().unwrap(), ExtRat::new(1, 1000));
        assert_eq!("2.5E1".parse::<ExtRat>().unwrap(), ExtRat::integer(25));
        assert!("abc".parse::<ExtRat>().is_err());
        assert!("1/0".parse::<ExtRat>().is_err());
        assert_eq!(ExtRat::new(9, 4).to_string(), "9/4");
    }

    fn finite() -> impl Strategy<Value = ExtRat> {
        (-500i128..500, 1i128..60).prop_map(|(a, b)| ExtRat::new(a, b))
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(x in finite()) {
            prop_assert_eq!(x.to_string().parse::<ExtRat>().unwrap(), x);
        }

        #[test]
        fn ordering_agrees_with_f64(a in finite(), b in finite()) {
            if a < b {
                prop_assert!(a.to_f64() <= b.to_f64());
            }
            prop_assert!(a < ExtRat::Infinity);
        }

        #[test]
        fn add_sub_inverse(a in finite(), b in finite()) {
            let c = a.try_add(&b).unwrap();
            prop_assert_eq!(c.try_sub(&b).unwrap(), a);
        }
    }
}
