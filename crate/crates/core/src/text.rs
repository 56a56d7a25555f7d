//! Canonical text form and structured records.
//!
//! `3/2 + 2*t^(1/2) - t^(1/1)`: the standard part first (omitted when zero and
//! terms exist), then terms by ascending exponent. Unit coefficients are not
//! written and the exponent is always a parenthesized fraction.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::fermat::FermatReal;
use crate::scalar::Scalar;

fn split_sign(s: String) -> (bool, String) {
    match s.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, s),
    }
}

impl<S: Scalar> fmt::Display for FermatReal<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.standard_part().is_zero() || self.terms().is_empty() {
            write!(f, "{}", self.standard_part())?;
            first = false;
        }
        let one = S::one();
        for (e, c) in self.terms() {
            let (neg, mag) = split_sign(c.to_string());
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            if c.abs() != one {
                write!(f, "{mag}*")?;
            }
            write!(f, "t^({e})")?;
            first = false;
        }
        Ok(())
    }
}

/// One `coefficient * t^exponent` term of a [`FermatRecord`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponent: String,
    pub coefficient: String,
}

/// Structured serialization of a Fermat real; scalars are rendered as text so
/// exact values survive JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermatRecord {
    pub standard: String,
    pub terms: Vec<TermRecord>,
}

impl<S: Scalar> From<&FermatReal<S>> for FermatRecord {
    fn from(x: &FermatReal<S>) -> Self {
        FermatRecord {
            standard: x.standard_part().to_string(),
            terms: x
                .terms()
                .iter()
                .map(|(e, c)| TermRecord { exponent: e.to_string(), coefficient: c.to_string() })
                .collect(),
        }
    }
}

/// Parses `p`, `p/q` or a plain decimal such as `-0.125` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_digits}{frac}");
        let n: BigInt = if digits.is_empty() { BigInt::from(0) } else { digits.parse().ok()? };
        let d = BigInt::from(10).pow(frac.len() as u32);
        let r = BigRational::new(n, d);
        return Some(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(n))
}
