//! `N`-detector strategies for probes whose outputs have one common pairwise
//! overlap: the balanced symmetric state and the uniform product state.

use nalgebra::DVector;

use super::{
    pgm_povm, pgm_success_circulant, pgm_success_from_gram, Discrimination, DiscriminationReport, Outcome, Parameters,
    Povm, PovmElement, Probabilities, Strategy,
};
use crate::error::{Error, Result};
use crate::linalg::{c, Ket, C64};
use crate::model::{
    build_probe, hypothesis_states, HypothesisEnsemble, PhaseChannel, ProbeKind, ProbeSpec, SiteOverlaps,
    MAX_FULL_SPACE_SITES,
};

/// Above [`MAX_FULL_SPACE_SITES`] results come from Gram-space evaluation,
/// which is capped here.
pub const MAX_GRAM_SITES: usize = 2048;

/// `r0 = <E_j|H>`, `r1 = r0 - <E_j|E_k>`, and the derived scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgmScalars {
    pub r0: f64,
    pub r1: f64,
    pub t: f64,
    /// `[p + (1-p) r0]^(-1/2)`, set by [`PgmScalars::with_null_prior`].
    pub d0: Option<f64>,
    /// `[(1-p) r1]^(-1/2)`, `None` when `(1-p) r1 = 0`.
    pub d1: Option<f64>,
}

impl PgmScalars {
    pub fn with_null_prior(mut self, p: f64) -> Self {
        self.d0 = Some((p + (1.0 - p) * self.r0).sqrt().recip());
        let w = (1.0 - p) * self.r1;
        self.d1 = (w > 0.0).then(|| w.sqrt().recip());
        self
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewDetectors { n, min: 2 });
    }
    if n > MAX_GRAM_SITES {
        return Err(Error::UnsupportedDetectorCount { n, min: 2, max: MAX_GRAM_SITES });
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability { name: "p", value: p });
    }
    Ok(())
}

pub fn pgm_symmetric_scalars(n: usize, theta: f64, kind: ProbeKind) -> Result<PgmScalars> {
    if n < 2 {
        return Err(Error::TooFewDetectors { n, min: 2 });
    }
    PhaseChannel::new(theta)?;
    let nf = n as f64;
    let cos2 = (2.0 * theta).cos();
    let (r0, r1) = match kind {
        ProbeKind::Entangled => {
            if n % 2 == 1 {
                return Err(Error::OddDetectorCount(n));
            }
            (0.5 * (1.0 + cos2), (1.0 - cos2) / (2.0 * (nf - 1.0)))
        }
        ProbeKind::Separable => (1.0 / nf + (nf - 1.0) / (2.0 * nf) * (1.0 + cos2), (1.0 - cos2) / (2.0 * nf)),
    };
    Ok(PgmScalars { r0, r1, t: (r1 / r0).sqrt(), d0: None, d1: None })
}

/// `(1/N)(sqrt r0 + (N-1) sqrt r1)^2` for the balanced symmetric probe.
pub fn pgm_entangled_closed(n: usize, theta: f64) -> Result<f64> {
    let s = pgm_symmetric_scalars(n, theta, ProbeKind::Entangled)?;
    let nf = n as f64;
    Ok((s.r0.sqrt() + (nf - 1.0) * s.r1.sqrt()).powi(2) / nf)
}

/// Uniform-product-probe PGM success, written out in `N` and `theta`.
pub fn separable_success_closed(n: usize, theta: f64) -> f64 {
    let nf = n as f64;
    let (s2, c2) = (2.0 * theta).sin_cos();
    let one_minus = 1.0 - c2;
    let first = 1.0 + (nf - 1.0) * (nf - 2.0) / (2.0 * nf) * one_minus;
    let second = (nf - 1.0) / nf.sqrt() * (s2 * s2 + one_minus * one_minus / nf).sqrt();
    (first + second) / nf
}

/// The `N = 2` specialization of [`separable_success_closed`].
pub fn separable_success_two_detector(theta: f64) -> f64 {
    let (s2, c2) = (2.0 * theta).sin_cos();
    let one_minus = 1.0 - c2;
    0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2 * (s2 * s2 + 0.5 * one_minus * one_minus).sqrt())
}

/// Inconclusive probability `(N r0 - 1)/(N - 1)` of the unambiguous scheme.
pub fn unambiguous_failure_closed(n: usize, theta: f64) -> Result<f64> {
    let s = pgm_symmetric_scalars(n, theta, ProbeKind::Entangled)?;
    let nf = n as f64;
    Ok((nf * s.r0 - 1.0) / (nf - 1.0))
}

/// `p^2 D0^2 + ((1-p)^2/N)(r0 D0 + (1-r0) D1)^2`; exactly 1 at `p = 1`.
pub fn pgm_null_closed(n: usize, theta: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if p == 1.0 {
        return Ok(1.0);
    }
    let s = pgm_symmetric_scalars(n, theta, ProbeKind::Entangled)?.with_null_prior(p);
    let d0 = s.d0.expect("set by with_null_prior");
    let d1 = s.d1.ok_or(Error::DegenerateTheta("r1 = 0 leaves D1 undefined"))?;
    let nf = n as f64;
    Ok(p * p * d0 * d0 + (1.0 - p).powi(2) / nf * (s.r0 * d0 + (1.0 - s.r0) * d1).powi(2))
}

fn mean(states: &[Ket]) -> DVector<C64> {
    let mut h = DVector::<C64>::zeros(states[0].dim());
    for s in states {
        h += s.vector();
    }
    h / c(states.len() as f64, 0.0)
}

/// `|e_j> = (|E_j> - |H>)/sqrt(N r1) + |H>/sqrt(N r0)` with `H` the mean of
/// the states.
pub fn symmetric_pgm_vectors(states: &[Ket], r0: f64, r1: f64) -> Vec<DVector<C64>> {
    let nf = states.len() as f64;
    let h = mean(states);
    let a = (nf * r1).sqrt().recip();
    let b = (nf * r0).sqrt().recip();
    states.iter().map(|e| (e.vector() - &h) * c(a, 0.0) + &h * c(b, 0.0)).collect()
}

fn uniform_priors(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn site_ensemble(n: usize, kind: ProbeKind, channel: &PhaseChannel) -> Result<HypothesisEnsemble> {
    let probe = build_probe(&kind.spec(n))?;
    hypothesis_states(&probe, channel, None)
}

fn symmetric_parameters(n: usize, theta: f64, kind: ProbeKind) -> Parameters {
    Parameters {
        n,
        k: (kind == ProbeKind::Entangled).then_some(n / 2),
        theta,
        p: None,
        probe: Some(kind),
        priors: uniform_priors(n),
    }
}

/// PGM on the `N` site hypotheses for the chosen probe family.
///
/// Up to [`MAX_FULL_SPACE_SITES`] detectors the POVM is built and evaluated
/// in the full space; above that the success is computed from the circulant
/// Gram matrix and no POVM is returned. Odd `N` with the entangled probe has
/// no closed form and uses the generic PGM.
pub fn pgm_symmetric(n: usize, theta: f64, kind: ProbeKind) -> Result<Discrimination> {
    check_n(n)?;
    let channel = PhaseChannel::new(theta)?;
    let params = symmetric_parameters(n, theta, kind);
    if theta == 0.0 {
        let report = DiscriminationReport::degenerate(Strategy::Pgm, params, 1.0 / n as f64);
        return Ok(Discrimination { report, povm: None });
    }
    let closed_form = kind == ProbeKind::Separable || n.is_multiple_of(2);
    let closed = match kind {
        ProbeKind::Entangled if closed_form => Some(pgm_entangled_closed(n, theta)?),
        ProbeKind::Entangled => None,
        ProbeKind::Separable => Some(separable_success_closed(n, theta)),
    };
    if n > MAX_FULL_SPACE_SITES {
        let overlaps = SiteOverlaps::for_probe(&kind.spec(n), &channel)?;
        let mut row = vec![overlaps.pair; n];
        row[0] = c(1.0, 0.0);
        let success = pgm_success_circulant(&row);
        let probs = Probabilities { success, failure: 0.0, error: 1.0 - success };
        let report = DiscriminationReport::new(Strategy::Pgm, params, closed, probs)
            .with_note("evaluated from the circulant Gram matrix");
        return Ok(Discrimination { report, povm: None });
    }
    let ensemble = site_ensemble(n, kind, &channel)?;
    let povm = if closed_form {
        let s = pgm_symmetric_scalars(n, theta, kind)?;
        let elements = symmetric_pgm_vectors(ensemble.states(), s.r0, s.r1)
            .into_iter()
            .map(|v| PovmElement::rank_one(v, 1.0))
            .collect();
        Povm::completed(ensemble.dim(), elements, (0..n).map(Outcome::Hypothesis).collect(), Outcome::Unassigned)?
    } else {
        pgm_povm(&ensemble)?
    };
    let probs = povm.probabilities(&ensemble)?;
    let mut report = DiscriminationReport::new(Strategy::Pgm, params, closed, probs);
    if !closed_form {
        report = report.with_note("odd N with the entangled probe: no closed form, generic PGM");
    }
    Ok(Discrimination { report, povm: Some(povm) })
}

/// `|ebar_j> = |e_j> + (t - 1)/sqrt(N r0) |H>`, zero-error with an
/// inconclusive complement.
pub fn unambiguous_symmetric(n: usize, theta: f64) -> Result<Discrimination> {
    check_n(n)?;
    if n % 2 == 1 {
        return Err(Error::OddDetectorCount(n));
    }
    let channel = PhaseChannel::new(theta)?;
    if theta == 0.0 {
        return Err(Error::DegenerateTheta("identical hypotheses admit no unambiguous measurement"));
    }
    let s = pgm_symmetric_scalars(n, theta, ProbeKind::Entangled)?;
    let nf = n as f64;
    const SLACK: f64 = 1e-12;
    if s.r0 > 1.0 + SLACK {
        return Err(Error::UnambiguousCondition(format!("1 >= r0 fails (r0 = {})", s.r0)));
    }
    if s.r0 < 1.0 / nf - SLACK {
        return Err(Error::UnambiguousCondition(format!("r0 > 1/N fails (r0 = {}, 1/N = {})", s.r0, 1.0 / nf)));
    }
    if s.r1 > 1.0 / nf + SLACK {
        return Err(Error::UnambiguousCondition(format!("1/N > r1 fails (r1 = {}, 1/N = {})", s.r1, 1.0 / nf)));
    }
    let closed_failure = unambiguous_failure_closed(n, theta)?;
    let params = symmetric_parameters(n, theta, ProbeKind::Entangled);
    let alpha = (nf * s.r1).sqrt().recip();
    let beta = s.t / (nf * s.r0).sqrt() - alpha;
    if n > MAX_FULL_SPACE_SITES {
        // ebar_j = alpha E_j + beta H and every row of the Gram matrix sums to
        // 1 + (N-1) g, so <E_k|ebar_j> takes one diagonal and one
        // off-diagonal value.
        let g = SiteOverlaps::for_probe(&ProbeSpec::balanced(n), &channel)?.pair;
        let row_mean = (c(1.0, 0.0) + g * (nf - 1.0)) / nf;
        let diag = c(alpha, 0.0) + row_mean * beta;
        let off = g * alpha + row_mean * beta;
        let success = diag.norm_sqr();
        let error = (nf - 1.0) * off.norm_sqr();
        let probs = Probabilities { success, failure: 1.0 - success - error, error };
        let report = DiscriminationReport::new(Strategy::Unambiguous, params, Some(1.0 - closed_failure), probs)
            .with_note("evaluated from Gram-matrix overlaps");
        return Ok(Discrimination { report, povm: None });
    }
    let ensemble = site_ensemble(n, ProbeKind::Entangled, &channel)?;
    let h = mean(ensemble.states());
    let elements = ensemble
        .states()
        .iter()
        .map(|e| PovmElement::rank_one(e.vector() * c(alpha, 0.0) + &h * c(beta, 0.0), 1.0))
        .collect();
    let povm = Povm::completed(ensemble.dim(), elements, (0..n).map(Outcome::Hypothesis).collect(), Outcome::Failure)?;
    let probs = povm.probabilities(&ensemble)?;
    let report = DiscriminationReport::new(Strategy::Unambiguous, params, Some(1.0 - closed_failure), probs);
    Ok(Discrimination { report, povm: Some(povm) })
}

/// PGM on `[E_0] ++ [E_1..E_N]` with priors `[p, (1-p)/N, ...]`, where
/// `E_0` is the untouched balanced symmetric probe.
pub fn pgm_with_null(n: usize, theta: f64, p: f64) -> Result<Discrimination> {
    check_n(n)?;
    if n % 2 == 1 {
        return Err(Error::OddDetectorCount(n));
    }
    let channel = PhaseChannel::new(theta)?;
    check_p(p)?;
    let nf = n as f64;
    let mut priors = vec![p];
    priors.extend(std::iter::repeat_n((1.0 - p) / nf, n));
    let params = Parameters { n, k: Some(n / 2), theta, p: Some(p), probe: Some(ProbeKind::Entangled), priors };
    if theta == 0.0 {
        let report = DiscriminationReport::degenerate(Strategy::PgmWithNull, params, p.max((1.0 - p) / nf));
        return Ok(Discrimination { report, povm: None });
    }
    if p == 1.0 {
        let mut report = DiscriminationReport::new(
            Strategy::PgmWithNull,
            params,
            Some(1.0),
            Probabilities { success: 1.0, failure: 0.0, error: 0.0 },
        )
        .with_note("p = 1: single effective hypothesis");
        report.degenerate = true;
        return Ok(Discrimination { report, povm: None });
    }
    let closed = pgm_null_closed(n, theta, p)?;
    if n > MAX_FULL_SPACE_SITES {
        let gram = SiteOverlaps::for_probe(&ProbeSpec::balanced(n), &channel)?.gram(true);
        let success = pgm_success_from_gram(&gram, &params.priors, None)?;
        let probs = Probabilities { success, failure: 0.0, error: 1.0 - success };
        let report = DiscriminationReport::new(Strategy::PgmWithNull, params, Some(closed), probs)
            .with_note("evaluated from the Gram matrix");
        return Ok(Discrimination { report, povm: None });
    }
    let probe = build_probe(&ProbeSpec::balanced(n))?;
    let ensemble = hypothesis_states(&probe, &channel, Some(p))?;
    let povm = pgm_povm(&ensemble)?;
    let probs = povm.probabilities(&ensemble)?;
    let h = mean(&ensemble.states()[1..]);
    let overlap = probe.vector().dotc(&h).norm() / h.norm();
    let report = DiscriminationReport::new(Strategy::PgmWithNull, params, Some(closed), probs)
        .with_note(format!("|<E0|H~>| = {overlap:.17e}"));
    Ok(Discrimination { report, povm: Some(povm) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn scalar_spot_values() {
        let s = pgm_symmetric_scalars(4, FRAC_PI_8, ProbeKind::Entangled).unwrap();
        assert_abs_diff_eq!(s.r0, 0.8535534, epsilon = 1e-7);
        assert_abs_diff_eq!(s.r1, 0.0488155, epsilon = 1e-7);
        let s = pgm_symmetric_scalars(2, FRAC_PI_4, ProbeKind::Separable).unwrap();
        assert_abs_diff_eq!(s.r0, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(s.r1, 0.25, epsilon = 1e-15);
        let s = pgm_symmetric_scalars(6, 0.0, ProbeKind::Entangled).unwrap();
        assert_eq!((s.r0, s.r1), (1.0, 0.0));
        assert_eq!(pgm_symmetric_scalars(5, 0.1, ProbeKind::Entangled), Err(Error::OddDetectorCount(5)));
    }

    #[test]
    fn closed_forms() {
        assert_abs_diff_eq!(pgm_entangled_closed(4, FRAC_PI_8).unwrap(), 0.6294095225512604, epsilon = 1e-13);
        assert_abs_diff_eq!(separable_success_closed(2, FRAC_PI_4), 0.9330127018922193, epsilon = 1e-13);
        for theta in [0.05, 0.3, 0.7] {
            assert_abs_diff_eq!(
                separable_success_closed(2, theta),
                separable_success_two_detector(theta),
                epsilon = 1e-15
            );
            for n in [2, 6, 10] {
                let nf = n as f64;
                assert_abs_diff_eq!(
                    unambiguous_failure_closed(n, theta).unwrap(),
                    1.0 - nf * (1.0 - (2.0 * theta).cos()) / (2.0 * (nf - 1.0)),
                    epsilon = 1e-14
                );
            }
        }
        assert_eq!(pgm_null_closed(4, 0.3, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn pgm_matches_closed_form_small_n() {
        for n in [2, 3, 4] {
            for kind in [ProbeKind::Entangled, ProbeKind::Separable] {
                let d = pgm_symmetric(n, 0.4, kind).unwrap();
                if let Some(diff) = d.report.abs_diff {
                    assert!(diff < 1e-10, "{n} {kind:?} {diff}");
                }
                let spec = d.povm.unwrap().spectrum().unwrap();
                assert!(spec.completeness_deviation < 1e-10);
            }
        }
        assert!(pgm_symmetric(3, 0.4, ProbeKind::Entangled).unwrap().report.closed_form_success.is_none());
    }

    #[test]
    fn degenerate_theta() {
        let d = pgm_symmetric(4, 0.0, ProbeKind::Entangled).unwrap();
        assert!(d.report.degenerate && d.povm.is_none());
        assert_eq!(d.report.numeric_success, 0.25);
        let d = pgm_with_null(4, 0.0, 0.1).unwrap();
        assert_abs_diff_eq!(d.report.numeric_success, 0.225, epsilon = 1e-15);
        assert!(unambiguous_symmetric(4, 0.0).is_err());
    }

    #[test]
    fn unambiguous_boundary() {
        let d = unambiguous_symmetric(2, FRAC_PI_4).unwrap();
        assert!(d.report.failure_prob.abs() < 1e-12);
        assert!(d.report.error_prob.abs() < 1e-12);
        assert_eq!(unambiguous_symmetric(3, 0.2).unwrap_err(), Error::OddDetectorCount(3));
    }

    #[test]
    fn null_small_n() {
        let d = pgm_with_null(4, FRAC_PI_8, 0.5).unwrap();
        assert_abs_diff_eq!(d.report.numeric_success, 0.4776905618661221, epsilon = 1e-10);
        assert!(d.report.abs_diff.unwrap() < 1e-10);
    }

    #[test]
    fn large_n_gram_routes() {
        let d = pgm_symmetric(40, 0.3, ProbeKind::Entangled).unwrap();
        assert!(d.report.abs_diff.unwrap() < 1e-10);
        let d = pgm_symmetric(40, 0.3, ProbeKind::Separable).unwrap();
        assert!(d.report.abs_diff.unwrap() < 1e-10);
        let d = unambiguous_symmetric(40, 0.3).unwrap();
        assert!(d.report.abs_diff.unwrap() < 1e-10);
        assert!(d.report.error_prob < 1e-12);
        let d = pgm_with_null(40, 0.3, 0.25).unwrap();
        assert!(d.report.abs_diff.unwrap() < 1e-10);
        assert!(pgm_symmetric(MAX_GRAM_SITES + 2, 0.3, ProbeKind::Entangled).is_err());
    }
}
