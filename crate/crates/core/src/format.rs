//! Significant-digit number formatting in the style of C's `%g`.

/// `v` rounded to `digits` significant digits. Fixed notation is used when
/// the decimal exponent lies in `[-4, digits)`, scientific otherwise.
/// Trailing zeros are trimmed, but integral values keep a single `.0`.
pub fn format_sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0.0".to_string();
    }
    // the exponent after rounding decides the notation
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim(mantissa);
        format!("{m}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    }
}

fn trim(s: &str) -> String {
    if !s.contains('.') {
        return format!("{s}.0");
    }
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}

/// [`format_sig`] that prints magnitudes below `zero` as `0.0`.
pub fn format_sig_clamped(v: f64, digits: usize, zero: f64) -> String {
    if v.abs() < zero {
        "0.0".to_string()
    } else {
        format_sig(v, digits)
    }
}
