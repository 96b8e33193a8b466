//! Small numeric helpers shared by the metric and harness code.

/// Above this length sums switch to compensated accumulation.
pub const COMPENSATED_THRESHOLD: usize = 10_000;

/// Neumaier compensated sum.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Plain summation for short slices, compensated above [`COMPENSATED_THRESHOLD`].
pub fn sum(xs: &[f64]) -> f64 {
    if xs.len() > COMPENSATED_THRESHOLD {
        compensated_sum(xs.iter().copied())
    } else {
        xs.iter().sum()
    }
}

/// `log(sum(exp(x)))` with max subtraction. Returns `-inf` for an empty input.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let terms = xs.iter().map(|&x| (x - max).exp());
    let s = if xs.len() > COMPENSATED_THRESHOLD {
        compensated_sum(terms)
    } else {
        terms.sum()
    };
    max + s.ln()
}

/// Format with 10 significant digits, trimming trailing zeros.
///
/// Infinities print as `inf` / `-inf` so that they round-trip through
/// the CSV readers.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        trim_zeros(&s)
    } else {
        let s = format!("{:.9e}", x);
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{}", trim_zeros(mantissa), e),
            None => s,
        }
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Parse a float that may be written as `inf`.
pub fn parse_extended(s: &str) -> Option<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "∞" => Some(f64::INFINITY),
        _ => t.parse::<f64>().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_beats_naive_on_cancellation() {
        let xs = [1e16, 1.0, -1e16];
        assert_eq!(compensated_sum(xs), 1.0);
    }

    #[test]
    fn logsumexp_handles_large_values() {
        let v = logsumexp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(logsumexp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(3.0), "3");
        assert_eq!(fmt_sig(1.45), "1.45");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.3333333333");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(123456.789), "123456.789");
    }

    #[test]
    fn parse_inf() {
        assert_eq!(parse_extended("inf"), Some(f64::INFINITY));
        assert_eq!(parse_extended(" 2.5 "), Some(2.5));
        assert_eq!(parse_extended("x"), None);
    }
}
