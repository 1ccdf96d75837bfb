//! Float formatting shared by every emitted table.

/// `x` with 17 significant digits in C `%.17g` style: fixed notation for
/// decimal exponents in `-4..17`, scientific otherwise, trailing zeros dropped.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // Rounding to 17 digits first fixes the exponent, as %g does.
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific form has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

/// Optional float, empty when absent.
pub fn g17_opt(x: Option<f64>) -> String {
    x.map(g17).unwrap_or_default()
}

/// Point coordinates separated by single spaces.
pub fn point(x: &[f64]) -> String {
    x.iter().map(|&v| g17(v)).collect::<Vec<_>>().join(" ")
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
