//! C `printf`-style `%.Ne` formatting for CSV output.

use std::fmt::Write;

/// Formats `x` like C's `%.{prec}e`, e.g. `1.000000000000e+00`.
pub fn sci(x: f64, prec: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.prec$e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let mut out = String::with_capacity(mantissa.len() + 5);
    out.push_str(mantissa);
    let sign = if exp < 0 { '-' } else { '+' };
    write!(out, "e{sign}{:02}", exp.abs()).expect("write to string");
    out
}
