//! Number formatting shared by the CSV, text and LaTeX emitters.

/// `%.{digits}g`-style formatting: `digits` significant digits, trailing
/// zeros trimmed, scientific notation outside `1e-5 <= |v| < 1e{digits}`.
pub fn sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Default precision of emitted floating values.
pub fn sig12(v: f64) -> String {
    sig(v, 12)
}

/// Fixed four-decimal rendering used for table comparison columns.
pub fn fixed4(v: f64) -> String {
    format!("{v:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(0.05), "0.05");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(3.0), "3");
        assert_eq!(sig12(-2.5e-9), "-2.5e-9");
        assert_eq!(sig12(123456.789), "123456.789");
        assert_eq!(sig12(1.0 + 1.0 / 30.0), "1.03333333333");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig(2.0f64.sqrt(), 4), "1.414");
    }

    #[test]
    fn four_decimals() {
        assert_eq!(fixed4(0.14224), "0.1422");
        assert_eq!(fixed4(0.0), "0.0000");
    }
}
