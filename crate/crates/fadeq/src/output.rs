//! CSV emission for curve points.
//!
//! Format: header `x,y,ci_low,ci_high,n_errors,n_bits`, one row per point,
//! reals with 12 significant digits in `%g` style, `\n` line endings.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use fadeq_core::harness::CurvePoint;

pub const HEADER: &str = "x,y,ci_low,ci_high,n_errors,n_bits";

const DIGITS: usize = 12;

/// `printf("%.12g")`, with `inf`, `-inf` and `nan` for non-finite values.
pub fn format_g(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.into();
    }
    // rounding to DIGITS first fixes the exponent (9.9999999999995 → 10)
    let sci = format!("{:.*e}", DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= DIGITS as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_g(p.x),
            format_g(p.y),
            format_g(p.ci_low),
            format_g(p.ci_high),
            p.n_errors,
            p.n_bits
        )
        .unwrap();
    }
    out
}

pub fn emit_csv(points: &[CurvePoint], path: &Path) -> anyhow::Result<()> {
    std::fs::write(path, to_csv(points)).with_context(|| format!("writing {}", path.display()))
}
