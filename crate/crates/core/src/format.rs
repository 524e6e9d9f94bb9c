//! Fixed numeric formatting for CSV emission.

/// Formats `v` with 9 significant digits in the style of C's `%.9g`:
/// fixed notation for decimal exponents in `[-5, 9)`, scientific otherwise,
/// trailing zeros trimmed.
pub fn sig9(v: f64) -> String {
    const DIGITS: i32 = 9;
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    // Rounding to the target precision can bump the exponent, so read it
    // back from the scientific rendering.
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let mantissa = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::sig9;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(-0.5), "-0.5");
        assert_eq!(sig9(0.230121342), "0.230121342");
        assert_eq!(sig9(0.2301213419077), "0.230121342");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1234567890.0), "1.23456789e+09");
        assert_eq!(sig9(9.999999999e8), "1e+09");
        assert_eq!(sig9(1.5e-7), "1.5e-07");
        assert_eq!(sig9(0.0001), "0.0001");
        assert_eq!(sig9(f64::INFINITY), "inf");
    }
}
