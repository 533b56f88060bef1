//! Exact rational arithmetic helpers.
//!
//! Payoffs and probabilities are [`Rational`] values so that equality ties
//! (weak equilibria, envy-freeness boundaries) are decided exactly rather
//! than by floating-point comparison. This module adds the parsing and
//! canonical rendering used by every file format in the crate.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number used for payoffs and probabilities.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses an integer (`-3`), a decimal (`5.93`) or a fraction (`7/2`).
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".to_string());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{s}`"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{s}`"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal `{s}`"));
        }
        let negative = int_part.starts_with('-');
        let int: BigInt = if int_part == "-" || int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| format!("bad decimal `{s}`"))?
        };
        let frac: BigInt = frac_part
            .parse()
            .map_err(|_| format!("bad decimal `{s}`"))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let magnitude = int.abs() * &scale + frac;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| format!("bad number `{s}`"))?;
    Ok(Rational::from_integer(n))
}

/// Canonical rendering: integers plainly, terminating decimals as decimals,
/// everything else as `n/d`. The decimal form is always the shortest exact
/// one, so rendering is stable across runs.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        return r.numer().to_string();
    }
    let (twos, rest) = factor_out(r.denom().clone(), 2u32);
    let (fives, rest) = factor_out(rest, 5u32);
    if !rest.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (r.numer() * &scale) / r.denom();
    let negative = scaled.is_negative();
    let magnitude = scaled.abs().to_string();
    let frac_len = digits as usize;
    let padded = format!("{magnitude:0>width$}", width = frac_len + 1);
    let split = padded.len() - frac_len;
    let (int_part, frac_part) = padded.split_at(split);
    format!("{}{int_part}.{frac_part}", if negative { "-" } else { "" })
}

/// Rounds to `dp` decimal places (half away from zero) and renders with a
/// fixed number of digits. Used for report rows where columns must align.
pub fn format_rational_fixed(r: &Rational, dp: u32) -> String {
    let scale = BigInt::from(10u32).pow(dp);
    let scaled = r * Rational::from_integer(scale.clone());
    let numer = scaled.numer().clone();
    let denom = scaled.denom().clone();
    let twice = BigInt::from(2) * numer.abs() + denom.clone();
    let rounded_abs = twice / (BigInt::from(2) * denom);
    let rounded = if numer.is_negative() {
        -rounded_abs
    } else {
        rounded_abs
    };
    let negative = rounded.is_negative();
    let magnitude = rounded.abs().to_string();
    if dp == 0 {
        return format!("{}{magnitude}", if negative { "-" } else { "" });
    }
    let frac_len = dp as usize;
    let padded = format!("{magnitude:0>width$}", width = frac_len + 1);
    let split = padded.len() - frac_len;
    let (int_part, frac_part) = padded.split_at(split);
    format!("{}{int_part}.{frac_part}", if negative { "-" } else { "" })
}

fn factor_out(mut value: BigInt, factor: u32) -> (u32, BigInt) {
    let f = BigInt::from(factor);
    let mut count = 0;
    while (&value % &f).is_zero() && !value.is_zero() {
        value /= &f;
        count += 1;
    }
    (count, value)
}
