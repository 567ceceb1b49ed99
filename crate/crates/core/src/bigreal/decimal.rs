//! Decimal rendering and parsing of exact rationals.
//!
//! Certificates carry every real as decimal text, so rounding direction
//! matters: lower endpoints are printed rounded down, radii rounded up.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Nearest,
    /// Toward negative infinity.
    Floor,
    /// Toward positive infinity.
    Ceil,
}

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

fn scale10(r: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        r * BigRational::from_integer(pow10(k as u32))
    } else {
        r / BigRational::from_integer(pow10((-k) as u32))
    }
}

/// `round(num · 10^k / den)` for `den > 0`, without rational normalization.
fn scaled_quotient(num: &BigInt, den: &BigInt, k: i64, mode: Rounding) -> BigInt {
    let (n, d) = if k >= 0 {
        (num * pow10(k as u32), den.clone())
    } else {
        (num.clone(), den * pow10((-k) as u32))
    };
    let (q, r) = n.div_mod_floor(&d);
    if r.is_zero() {
        return q;
    }
    match mode {
        Rounding::Floor => q,
        Rounding::Ceil => q + 1,
        // ties away from zero, matching `BigRational::round`
        Rounding::Nearest => {
            let twice: BigInt = &r * 2;
            if twice > d || (twice == d && !q.is_negative()) {
                q + 1
            } else {
                q
            }
        }
    }
}

/// Largest `e` with `10^e <= num / den`, for `num, den > 0`.
fn decimal_exponent(num: &BigInt, den: &BigInt) -> i64 {
    let guess =
        ((num.bits() as f64 - den.bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    // 10^e <= num / den
    let at_least = |e: i64| {
        if e >= 0 {
            num >= &(den * pow10(e as u32))
        } else {
            num * pow10((-e) as u32) >= *den
        }
    };
    let mut e = guess;
    while !at_least(e) {
        e -= 1;
    }
    while at_least(e + 1) {
        e += 1;
    }
    e
}

/// Formats `r` as `d.ddd…e±X` with `sig` significant digits.
pub fn format_sci(r: &BigRational, sig: usize, mode: Rounding) -> String {
    format_fraction(r.numer(), r.denom(), sig, mode)
}

/// [`format_sci`] for `num / den` with `den > 0`, not necessarily reduced.
pub fn format_fraction(num: &BigInt, den: &BigInt, sig: usize, mode: Rounding) -> String {
    let sig = sig.max(1);
    if num.is_zero() {
        return "0".to_string();
    }
    let mut e = decimal_exponent(&num.abs(), den);
    let mut n = scaled_quotient(num, den, sig as i64 - 1 - e, mode);
    if n.abs() >= pow10(sig as u32) {
        // rounding carried into a new digit
        e += 1;
        n = scaled_quotient(num, den, sig as i64 - 1 - e, mode);
    }
    if n.is_zero() {
        return "0".to_string();
    }
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&digits[..1]);
    let tail = digits[1..].trim_end_matches('0');
    if !tail.is_empty() {
        out.push('.');
        out.push_str(tail);
    }
    // a carry during rounding may leave one extra digit; absorb it
    let extra = digits.len() as i64 - sig as i64;
    out.push_str(&format!("e{}", e + extra));
    out
}

/// Parses `[-]ddd[.ddd][e[±]ddd]` as `(n, k)` with value `n · 10^k`.
pub fn parse_scaled(s: &str) -> Option<(BigInt, i64)> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (body, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match body.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int_part, frac_part) = match body.find('.') {
        Some(i) => (&body[..i], &body[i + 1..]),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut n: BigInt = digits.parse().ok()?;
    if neg {
        n = -n;
    }
    let shift = exp.checked_sub(frac_part.len() as i64)?;
    if shift.unsigned_abs() > 100_000 {
        return None;
    }
    Some((n, shift))
}

/// Parses `[-]ddd[.ddd][e[±]ddd]` exactly.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (n, k) = parse_scaled(s)?;
    Some(scale10(&BigRational::from_integer(n), k))
}

/// Compares `n · 10^k` with `m · 2^e` in integer arithmetic.
pub fn cmp_scaled_dyadic(n: &BigInt, k: i64, m: &BigInt, e: i64) -> std::cmp::Ordering {
    let mut lhs = n.clone();
    let mut rhs = m.clone();
    if k >= 0 {
        lhs *= pow10(k as u32);
    } else {
        rhs *= pow10((-k) as u32);
    }
    if e >= 0 {
        rhs <<= e as u64;
    } else {
        lhs <<= (-e) as u64;
    }
    lhs.cmp(&rhs)
}

/// Parses a decimal that must denote an integer, e.g. `4e43`.
pub fn parse_integer(s: &str) -> Option<BigInt> {
    let r = parse_decimal(s)?;
    if r.denom().is_one() {
        Some(r.numer().clone())
    } else {
        None
    }
}

/// Renders an integer-valued rational without exponent.
pub fn integer_string(n: &BigInt) -> String {
    n.to_str_radix(10)
}

/// Decimal digits carried by `bits` binary digits.
pub fn digits_for_bits(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor() as usize
}
