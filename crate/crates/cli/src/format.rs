//! Locale-independent number formatting for CSV and report output.

/// Ten significant digits. Fixed notation for magnitudes in `[1e-4, 1e10)`,
/// scientific otherwise.
pub fn sig10(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..10).contains(&exp) {
        // reformat the already-rounded value so the digit count is exact
        let rounded: f64 = sci.parse().expect("round trip");
        format!("{:.*}", (9 - exp) as usize, rounded)
    } else {
        format!("{mantissa}e{exp}")
    }
}

/// Shortest decimal form of a grid value after removing accumulation noise.
pub fn grid_value(v: f64) -> String {
    let cleaned: f64 = format!("{v:.12e}").parse().expect("round trip");
    if cleaned == 0.0 {
        return "0".into();
    }
    format!("{cleaned}")
}

pub fn optional(v: Option<f64>) -> String {
    v.map(sig10).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_digits() {
        assert_eq!(sig10(0.146_446_609_406_726_24), "0.1464466094");
        assert_eq!(sig10(0.25), "0.2500000000");
        assert_eq!(sig10(0.5), "0.5000000000");
        assert_eq!(sig10(12.5), "12.50000000");
        assert_eq!(sig10(2.5e-7), "2.500000000e-7");
        assert_eq!(sig10(0.099_999_999_999_9), "0.1000000000");
        assert_eq!(sig10(-0.001234), "-0.001234000000");
        assert_eq!(sig10(0.0), "0");
    }

    #[test]
    fn grid_values() {
        assert_eq!(grid_value(2.0), "2");
        assert_eq!(grid_value(0.1 + 0.2), "0.3");
        assert_eq!(grid_value(1e-3), "0.001");
        assert_eq!(grid_value(-0.0), "0");
    }
}
