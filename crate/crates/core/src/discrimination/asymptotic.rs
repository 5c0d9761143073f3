//! Large-`N` expansions and the no-measurement baseline.

/// Which expansion [`asymptotic_success`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoticVariant {
    /// Entangled PGM success through order `1/N`.
    Entangled,
    /// Separable PGM success through order `1/N`.
    Separable,
    /// `N -> infinity` limit of the entangled PGM success.
    PgmLimit,
    /// `N -> infinity` limit of the unambiguous scheme's *failure* probability.
    UnambiguousLimit,
    /// `N -> infinity` limit of the null-added PGM success at prior `p`.
    NullLimit(f64),
}

impl AsymptoticVariant {
    pub fn label(self) -> &'static str {
        match self {
            AsymptoticVariant::Entangled => "entangled_expansion",
            AsymptoticVariant::Separable => "separable_expansion",
            AsymptoticVariant::PgmLimit => "pgm_limit",
            AsymptoticVariant::UnambiguousLimit => "unambiguous_limit",
            AsymptoticVariant::NullLimit(_) => "null_limit",
        }
    }
}

pub fn asymptotic_success(n: usize, theta: f64, variant: AsymptoticVariant) -> f64 {
    let nf = n as f64;
    let (s2, c2) = (2.0 * theta).sin_cos();
    let one_minus = 1.0 - c2;
    let leading = 0.5 * one_minus + s2.abs() / nf.sqrt() + 1.0 / nf;
    match variant {
        AsymptoticVariant::Entangled => leading - one_minus / nf,
        AsymptoticVariant::Separable => leading - 1.5 * one_minus / nf,
        AsymptoticVariant::PgmLimit => 0.5 * one_minus,
        AsymptoticVariant::UnambiguousLimit => 0.5 * (1.0 + c2),
        AsymptoticVariant::NullLimit(p) => 0.5 * (1.0 - p) * one_minus + p * p / (p + 0.5 * (1.0 - p) * (1.0 + c2)),
    }
}

/// Success of always naming the most probable hypothesis: `1/N`, or
/// `max(p, (1-p)/N)` with the no-interaction hypothesis at prior `p`.
pub fn guessing_baseline(n: usize, p: Option<f64>) -> f64 {
    let nf = n as f64;
    match p {
        None => 1.0 / nf,
        Some(p) => p.max((1.0 - p) / nf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn limits() {
        assert_abs_diff_eq!(asymptotic_success(10, FRAC_PI_4, AsymptoticVariant::PgmLimit), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            asymptotic_success(10, FRAC_PI_4, AsymptoticVariant::NullLimit(0.5)),
            0.5833333333333334,
            epsilon = 1e-15
        );
    }

    #[test]
    fn baselines() {
        assert_eq!(guessing_baseline(5, None), 0.2);
        assert_eq!(guessing_baseline(4, Some(0.5)), 0.5);
        assert_abs_diff_eq!(guessing_baseline(4, Some(0.1)), 0.225, epsilon = 1e-15);
    }
}
