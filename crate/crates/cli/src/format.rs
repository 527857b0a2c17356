//! Fixed-width number formatting shared by every CSV writer.

/// C `printf("%.12e")`: twelve mantissa digits, signed exponent of at least
/// two digits.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exponent) = s.split_once('e').expect("exponent marker");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let sign = if exponent < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exponent.abs())
}

/// One CSV line, LF terminated.
pub fn csv_row<I: IntoIterator<Item = String>>(cells: I) -> String {
    let mut line = cells.into_iter().collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        assert_eq!(sci(0.0), "0.000000000000e+00");
        assert_eq!(sci(1.0), "1.000000000000e+00");
        assert_eq!(sci(-0.25), "-2.500000000000e-01");
        assert_eq!(sci(123456.0), "1.234560000000e+05");
        assert_eq!(sci(6.02e-123), "6.020000000000e-123");
        assert_eq!(sci(f64::NAN), "nan");
    }

    #[test]
    fn rows() {
        assert_eq!(csv_row(["a".to_string(), "b".to_string()]), "a,b\n");
    }
}
