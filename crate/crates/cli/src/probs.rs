//! Exact parsing of probability lists such as `13/64,18/64,19/64,14/64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

fn pow10(exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), exp as usize)
}

/// Decimal literal (`0.25`, `-1.5e-3`, `7`) as an exact rational.
fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::parse_bytes(all_digits.as_bytes(), 10)?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let value = if scale >= 0 {
        BigRational::from_integer(numer * pow10(scale as u32))
    } else {
        BigRational::new(numer, pow10(scale.unsigned_abs()))
    };
    Some(value)
}

/// `a/b` or a decimal literal.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let text = text.trim();
    let bad = || format!("cannot parse probability '{text}'");
    match text.split_once('/') {
        Some((n, d)) => {
            let n = parse_decimal(n.trim()).ok_or_else(bad)?;
            let d = parse_decimal(d.trim()).ok_or_else(bad)?;
            if d.is_zero() {
                return Err(format!("zero denominator in '{text}'"));
            }
            Ok(n / d)
        }
        None => parse_decimal(text).ok_or_else(bad),
    }
}

/// Comma-separated list, each entry rounded to `f64` once. Normalization is
/// left to state validation.
pub fn parse_probs(list: &str) -> Result<Vec<f64>, String> {
    let values: Vec<BigRational> = list.split(',').map(parse_rational).collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err("empty probability list".into());
    }
    if let Some(v) = values.iter().find(|v| v.is_negative()) {
        return Err(format!("negative probability {v}"));
    }
    values.iter().map(|v| v.to_f64().ok_or_else(|| format!("probability {v} out of range"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_decimals() {
        assert_eq!(parse_probs("13/64,18/64,19/64,14/64").unwrap(), vec![0.203125, 0.28125, 0.296875, 0.21875]);
        assert_eq!(parse_probs("0.75, 0.25").unwrap(), vec![0.75, 0.25]);
        assert_eq!(parse_probs("1/3,2/3").unwrap(), vec![1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(parse_probs("2.5e-1,75e-2").unwrap(), vec![0.25, 0.75]);
        assert_eq!(parse_probs("2,1").unwrap(), vec![2.0, 1.0]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_probs("a,b").is_err());
        assert!(parse_probs("1/0").is_err());
        assert!(parse_probs("-0.5,1.5").is_err());
        assert!(parse_probs("nan").is_err());
        assert!(parse_probs("").is_err());
    }
}
