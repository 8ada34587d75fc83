//! Exact rationals and their text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = num_rational::BigRational;

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Renders `p/q` in lowest terms, or an integer.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::parse(1, 1, format!("invalid rational `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

pub fn to_f64(x: &Q) -> f64 {
    // Shift both sides so huge numerators and denominators stay finite.
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(900) as usize;
    let nf = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    let df = (d >> shift).to_f64().unwrap_or(f64::INFINITY);
    let v = nf / df;
    if n.is_negative() {
        -v
    } else {
        v
    }
}

/// Decimal expansion with a fixed number of digits after the point, truncated toward zero.
pub fn to_decimal(x: &Q, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (x.numer().abs() * &scale).div_floor(x.denom());
    let (int_part, frac) = scaled.div_rem(&scale);
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{:0>width$}", frac.to_string(), width = digits)
}
