//! Fixed-point decimals with one fractional digit, stored as tenths in an `i64`.

use crate::error::{Error, Result};

pub const SCALE: i64 = 10;

/// Round a float to the nearest tenth, half away from zero.
pub fn from_f64(x: f64) -> i64 {
    (x * SCALE as f64).round() as i64
}

pub fn to_f64(v: i64) -> f64 {
    v as f64 / SCALE as f64
}

/// Parse a decimal literal such as `3.14159`, `-2`, `.5` or `1e3` into tenths.
pub fn parse(s: &str) -> Option<i64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if s.bytes().any(|b| b == b'e' || b == b'E') {
        let x: f64 = s.parse().ok()?;
        return x.is_finite().then(|| from_f64(x));
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut tenths: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse::<i64>().ok()?.checked_mul(SCALE)?
    };
    let mut digits = frac_part.bytes().map(|b| (b - b'0') as i64);
    tenths = tenths.checked_add(digits.next().unwrap_or(0))?;
    // half away from zero: look at the hundredths digit
    if digits.next().unwrap_or(0) >= 5 {
        tenths = tenths.checked_add(1)?;
    }
    Some(if neg { -tenths } else { tenths })
}

pub fn parse_at(s: &str, line: usize) -> Result<i64> {
    parse(s).ok_or_else(|| Error::parse(line, format!("not a decimal number: {s:?}")))
}

/// Format tenths with exactly one fractional digit.
pub fn format(v: i64) -> String {
    let sign = if v < 0 { "-" } else { "" };
    let a = v.unsigned_abs();
    format!("{sign}{}.{}", a / SCALE as u64, a % SCALE as u64)
}
