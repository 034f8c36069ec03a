//! Exact rational scalars and their text representation.
//!
//! Every geometric quantity in this crate is a [`Rat`]. Input files carry
//! dimensions as decimal strings (`"0.25"`) or fraction strings (`"1/3"`),
//! both parsed exactly; nothing is ever routed through floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number used for all geometry.
pub type Rat = BigRational;

/// Shorthand for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer rational.
pub fn rint(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

/// Parses `"0.25"`, `"3"`, or `"5/7"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rat> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    let bad = |s: &str| Error::Parse(format!("invalid rational literal {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad(s))?;
        let d: BigInt = den.trim().parse().map_err(|_| bad(s))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let sign = if int_part.trim_start().starts_with('-') { -1 } else { 1 };
        let int_part = if int_part.is_empty() || int_part == "-" { "0" } else { int_part };
        let i: BigInt = int_part.parse().map_err(|_| bad(s))?;
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad(s));
        }
        let f: BigInt = frac_part.parse().map_err(|_| bad(s))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = Rat::new(f, scale);
        let whole = Rat::from_integer(i);
        return Ok(if sign < 0 { whole - frac } else { whole + frac });
    }
    let i: BigInt = s.parse().map_err(|_| bad(s))?;
    Ok(Rat::from_integer(i))
}

/// Formats a rational as a terminating decimal when the denominator is of
/// the form 2^a·5^b, otherwise as `"p/q"`.
pub fn format_rational(value: &Rat) -> String {
    let denom = value.denom();
    if denom.is_one() {
        return value.numer().to_string();
    }
    let (twos, rest) = factor_out(denom.clone(), 2);
    let (fives, rest) = factor_out(rest, 5);
    if rest.is_one() {
        // Terminating decimal with 10^max(twos, fives) scale.
        let digits = twos.max(fives);
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = value * Rat::from_integer(scale);
        debug_assert!(scaled.is_integer());
        let n = scaled.to_integer();
        let negative = n.is_negative();
        let mut body = n.abs().to_string();
        let digits = digits as usize;
        if body.len() <= digits {
            body = format!("{}{}", "0".repeat(digits - body.len() + 1), body);
        }
        let split = body.len() - digits;
        let (int_part, frac_part) = body.split_at(split);
        let frac_part = frac_part.trim_end_matches('0');
        let sign = if negative { "-" } else { "" };
        if frac_part.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn factor_out(mut n: BigInt, p: u32) -> (u32, BigInt) {
    let p = BigInt::from(p);
    let mut count = 0;
    while (&n % &p).is_zero() && !n.is_zero() {
        n /= &p;
        count += 1;
    }
    (count, n)
}

/// Approximate f64 value for human-readable reports; never used in logic.
pub fn approx_f64(value: &Rat) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Largest integer `n` with `n <= value`.
pub fn floor_int(value: &Rat) -> BigInt {
    value.floor().to_integer()
}

/// Smallest integer `n` with `n >= value`.
pub fn ceil_int(value: &Rat) -> BigInt {
    value.ceil().to_integer()
}

/// `ceil(value)` as u64; value must be non-negative and small enough.
pub fn ceil_u64(value: &Rat) -> u64 {
    ceil_int(value).to_u64().expect("ceiling out of u64 range")
}

/// Smallest integer multiple of `step` that is >= `value`.
pub fn ceil_to_multiple(value: &Rat, step: &Rat) -> Rat {
    let q = (value / step).ceil();
    q * step
}

/// If `value` equals `1/q` for a positive integer `q`, returns `q`.
pub fn unit_fraction_q(value: &Rat) -> Option<BigInt> {
    if value.numer().is_one() && value.denom().is_positive() {
        Some(value.denom().clone())
    } else {
        None
    }
}

/// Harmonic number `H_n = sum_{i=1..n} 1/i`.
pub fn harmonic_number(n: u64) -> Rat {
    let mut sum = Rat::zero();
    for i in 1..=n {
        sum += Rat::new(BigInt::one(), BigInt::from(i));
    }
    sum
}

/// Exact gcd-reduced sum used by a few accounting checks.
pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rat>) -> Rat {
    let mut acc = Rat::zero();
    for v in values {
        acc += v;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational(".25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("2").unwrap(), rint(2));
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-0.75").unwrap(), rat(-3, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.1a").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for s in ["0.5", "0.125", "3", "-0.75", "0.2"] {
            let v = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&format_rational(&v)).unwrap(), v);
        }
        assert_eq!(format_rational(&rat(1, 3)), "1/3");
        assert_eq!(format_rational(&rat(1, 2)), "0.5");
        assert_eq!(format_rational(&rat(7, 50)), "0.14");
    }

    #[test]
    fn ceil_to_multiple_works() {
        let step = rat(1, 10);
        assert_eq!(ceil_to_multiple(&rat(1, 4), &step), rat(3, 10));
        assert_eq!(ceil_to_multiple(&rat(1, 5), &step), rat(1, 5));
    }

    #[test]
    fn unit_fraction_detection() {
        assert_eq!(unit_fraction_q(&rat(1, 3)).unwrap(), BigInt::from(3));
        assert!(unit_fraction_q(&rat(2, 3)).is_none());
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic_number(1), rint(1));
        assert_eq!(harmonic_number(4), rat(25, 12));
    }
}
