//! Sweep rows and their CSV/JSON encodings.

use serde::Serialize;

pub const CSV_HEADER: [&str; 13] = [
    "strategy",
    "N",
    "k",
    "theta",
    "p",
    "probe",
    "closed_form_success",
    "numeric_success",
    "failure_prob",
    "error_prob",
    "abs_diff",
    "guessing_baseline",
    "degenerate",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub strategy: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: Option<usize>,
    pub theta: f64,
    pub p: Option<f64>,
    pub probe: Option<String>,
    pub closed_form_success: Option<f64>,
    pub numeric_success: f64,
    pub failure_prob: f64,
    pub error_prob: f64,
    pub abs_diff: Option<f64>,
    pub guessing_baseline: f64,
    pub degenerate: bool,
}

/// `printf("%.17g")`: 17 significant digits, trailing zeros dropped,
/// exponent form outside `1e-4 <= |x| < 1e17`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_g17).unwrap_or_default()
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for r in rows {
        let fields = [
            r.strategy.clone(),
            r.n.to_string(),
            r.k.map(|k| k.to_string()).unwrap_or_default(),
            fmt_g17(r.theta),
            opt_num(r.p),
            r.probe.clone().unwrap_or_default(),
            opt_num(r.closed_form_success),
            fmt_g17(r.numeric_success),
            fmt_g17(r.failure_prob),
            fmt_g17(r.error_prob),
            opt_num(r.abs_diff),
            fmt_g17(r.guessing_baseline),
            r.degenerate.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[Row]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(std::f64::consts::FRAC_PI_8), "0.39269908169872414");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(2.5e-17), "2.4999999999999999e-17");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(1e17), "1e+17");
        assert_eq!(fmt_g17(-0.25), "-0.25");
        assert_eq!(fmt_g17(0.0), "0");
    }

    #[test]
    fn round_trips() {
        for x in [0.8535533905932737, 1.0 / 3.0, 7.0e-13, 0.6294095225512604] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
