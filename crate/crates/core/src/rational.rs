//! Exact rational entries and extended ratios.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Parses an integer, a decimal literal (optionally with exponent), or a
/// `num/den` fraction into an exact rational.
///
/// Decimals are read by their literal denominator, so `"0.1"` is exactly
/// `1/10`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let invalid = |reason| Error::InvalidEntry {
        text: text.to_string(),
        reason,
    };
    if t.is_empty() {
        return Err(invalid("empty"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let num = parse_decimal(n.trim()).ok_or_else(|| invalid("bad numerator"))?;
        let den = parse_decimal(d.trim()).ok_or_else(|| invalid("bad denominator"))?;
        if den.is_zero() {
            return Err(invalid("zero denominator"));
        }
        return Ok(num / den);
    }
    parse_decimal(t).ok_or_else(|| invalid("not a number"))
}

const MAX_DECIMAL_SCALE: u32 = 4096;

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut all = String::with_capacity(int_part.len() + frac_part.len());
    all.push_str(int_part);
    all.push_str(frac_part);
    let mut num: BigInt = all.parse().ok()?;
    if neg {
        num = -num;
    }
    let scale = exponent.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    // Refuse literals whose exact value would need megabytes of digits.
    if scale.unsigned_abs() > MAX_DECIMAL_SCALE {
        return None;
    }
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

/// A nonnegative rational or `+inf`, following the `x/0 = +inf` convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtRatio {
    Finite(Rational),
    Infinite,
}

impl ExtRatio {
    /// `num / den` for nonnegative `num`, `den`, with `x/0 = +inf`.
    pub fn of(num: &Rational, den: &Rational) -> ExtRatio {
        if den.is_zero() {
            ExtRatio::Infinite
        } else {
            ExtRatio::Finite(num / den)
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRatio::Finite(r) => Some(r),
            ExtRatio::Infinite => None,
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            ExtRatio::Finite(r) => crate::math::ln_rational(r),
            ExtRatio::Infinite => f64::INFINITY,
        }
    }
}

impl Ord for ExtRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRatio::Finite(a), ExtRatio::Finite(b)) => a.cmp(b),
            (ExtRatio::Finite(_), ExtRatio::Infinite) => Ordering::Less,
            (ExtRatio::Infinite, ExtRatio::Finite(_)) => Ordering::Greater,
            (ExtRatio::Infinite, ExtRatio::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRatio::Finite(r) => f.write_str(&format_rational(r)),
            ExtRatio::Infinite => f.write_str("inf"),
        }
    }
}


pub(crate) fn one() -> Rational {
    Rational::one()
}
