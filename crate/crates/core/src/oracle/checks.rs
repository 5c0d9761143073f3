use nalgebra::{DMatrix, DVector};

use super::{CheckParams, VerificationRecord};
use crate::discrimination::{
    separable_success_closed, symmetric_pgm_vectors, Outcome, Povm, Probabilities, GRAM_SUPPORT_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{c, inv_sqrt_on_support, trace_norm, DenseOperator, Ket, C64};
use crate::model::{build_probe, hypothesis_states, HypothesisEnsemble, PhaseChannel, ProbeSpec, MAX_FULL_SPACE_SITES};

/// Largest space on which the oracle materializes dense operators.
pub const DENSE_ORACLE_MAX_DIM: usize = 256;

const POSITIVITY_TOL: f64 = 1e-10;
const COMPLETENESS_TOL: f64 = 1e-10;

/// One positivity record per element and one completeness record.
///
/// Small spaces are checked on dense matrices; larger ones on the span of
/// the element vectors, where the spectral norm of `sum Pi - I` bounds every
/// entry of the full-space deviation.
pub fn validate_povm(povm: &Povm, dim: usize) -> Vec<VerificationRecord> {
    let params = CheckParams::default();
    if povm.dim() != dim {
        return vec![VerificationRecord::compare("povm_completeness", params, dim as f64, povm.dim() as f64, 0.0)
            .with_note("POVM acts on a different space")];
    }
    let (mins, deviation) = if dim <= DENSE_ORACLE_MAX_DIM {
        let dense = povm.to_dense();
        let mins: Vec<f64> = dense.iter().map(|d| d.min_eigenvalue().unwrap_or(f64::NEG_INFINITY)).collect();
        let mut total = DMatrix::<C64>::zeros(dim, dim);
        for d in &dense {
            total += d.matrix();
        }
        let identity = DMatrix::<C64>::identity(dim, dim);
        let dev = (total - identity).iter().map(|z| z.norm()).fold(0.0, f64::max);
        (mins, dev)
    } else {
        match povm.spectrum() {
            Ok(spec) => (spec.min_eigenvalues, spec.completeness_deviation),
            Err(_) => (vec![f64::NEG_INFINITY; povm.len()], f64::INFINITY),
        }
    };
    let mut records: Vec<VerificationRecord> = mins
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            // Negative part of the smallest eigenvalue, compared against 0.
            VerificationRecord::compare(format!("povm_positivity[{i}]"), params, 0.0, (-m).max(0.0), POSITIVITY_TOL)
        })
        .collect();
    records.push(VerificationRecord::compare("povm_completeness", params, 0.0, deviation, COMPLETENESS_TOL));
    records
}

/// Born-rule probabilities, formed as `<phi| (E |phi>)` per element.
pub fn numeric_probabilities(
    ensemble: &HypothesisEnsemble,
    povm: &Povm,
    outcome_map: &[Outcome],
) -> Result<Probabilities> {
    if outcome_map.len() != povm.len() {
        return Err(Error::LengthMismatch { expected: povm.len(), found: outcome_map.len() });
    }
    if ensemble.dim() != povm.dim() {
        return Err(Error::DimensionMismatch { expected: povm.dim(), found: ensemble.dim() });
    }
    let mut out = Probabilities { success: 0.0, failure: 0.0, error: 0.0 };
    for ((phi, &prior), &label) in ensemble.states().iter().zip(ensemble.priors()).zip(ensemble.labels()) {
        for (element, outcome) in povm.elements().iter().zip(outcome_map) {
            let mut image = phi.vector() * c(element.identity_coefficient(), 0.0);
            for (w, v) in element.terms() {
                image.axpy(v.dotc(phi.vector()) * *w, v, c(1.0, 0.0));
            }
            let q = prior * phi.vector().dotc(&image).re;
            match outcome {
                Outcome::Hypothesis(h) if *h == label => out.success += q,
                Outcome::Failure => out.failure += q,
                _ => out.error += q,
            }
        }
    }
    Ok(out)
}

fn same_label_sum(m: &DMatrix<C64>, labels: &[usize]) -> f64 {
    let mut total = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if labels[i] == labels[j] {
                total += m[(i, j)].norm_sqr();
            }
        }
    }
    total
}

fn weighted_columns(ensemble: &HypothesisEnsemble) -> DMatrix<C64> {
    let cols: Vec<DVector<C64>> =
        ensemble.states().iter().zip(ensemble.priors()).map(|(s, &p)| s.vector() * c(p.sqrt(), 0.0)).collect();
    DMatrix::from_columns(&cols)
}

/// PGM success with a dense `rho` and its pseudo-inverse square root.
pub fn pgm_success_dense(ensemble: &HypothesisEnsemble) -> Result<f64> {
    let dim = ensemble.dim();
    if dim > DENSE_ORACLE_MAX_DIM {
        return Err(Error::DimensionMismatch { expected: DENSE_ORACLE_MAX_DIM, found: dim });
    }
    let psi = weighted_columns(ensemble);
    let rho = DenseOperator::new(&psi * psi.adjoint())?.with_positive()?;
    let isq = inv_sqrt_on_support(&rho, GRAM_SUPPORT_TOL)?;
    let amplitudes = psi.adjoint() * isq.matrix() * &psi;
    Ok(same_label_sum(&amplitudes, ensemble.labels()))
}

/// PGM success from the polar factor of `Psi = [sqrt(p_j) phi_j]`: the PGM
/// vectors are the columns of `U V^dagger` from its thin SVD.
pub fn pgm_success_polar(ensemble: &HypothesisEnsemble) -> Result<f64> {
    let psi = weighted_columns(ensemble);
    let (rows, cols) = psi.shape();
    let m = faer::Mat::<faer::c64>::from_fn(rows, cols, |i, j| faer::c64::new(psi[(i, j)].re, psi[(i, j)].im));
    let svd = m.thin_svd().map_err(|_| Error::NoConvergence)?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let smax = (0..s.nrows()).map(|i| s[i].re).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..s.nrows()).filter(|&i| s[i].re > 1e-7 * smax).collect();
    let polar = DMatrix::<C64>::from_fn(rows, cols, |i, j| {
        keep.iter()
            .map(|&k| {
                let (a, b) = (u[(i, k)], v[(j, k)]);
                c(a.re, a.im) * c(b.re, -b.im)
            })
            .sum()
    });
    let amplitudes = psi.adjoint() * polar;
    Ok(same_label_sum(&amplitudes, ensemble.labels()))
}

/// Dense route where the space is small, polar route otherwise.
pub fn pgm_success_oracle(ensemble: &HypothesisEnsemble) -> Result<f64> {
    if ensemble.dim() <= DENSE_ORACLE_MAX_DIM {
        pgm_success_dense(ensemble)
    } else {
        pgm_success_polar(ensemble)
    }
}

/// Optimal success `(1 + ||p0 |a><a| - p1 |b><b| ||_1)/2` for two pure states.
pub fn helstrom_two_states(p0: f64, a: &Ket, b: &Ket) -> Result<f64> {
    let lambda = DenseOperator::new(
        a.vector() * a.vector().adjoint() * c(p0, 0.0) - b.vector() * b.vector().adjoint() * c(1.0 - p0, 0.0),
    )?;
    Ok(0.5 * (1.0 + trace_norm(&lambda)?))
}

/// Candidate readings of the two-line separable success display.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparableReading {
    /// Both lines summed inside the braces.
    Plus,
    /// The first line alone, braces closed after it.
    FirstLine,
    /// The second line alone.
    SecondLine,
}

impl SeparableReading {
    pub fn label(self) -> &'static str {
        match self {
            SeparableReading::Plus => "plus",
            SeparableReading::FirstLine => "first-line",
            SeparableReading::SecondLine => "second-line",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableResolution {
    /// Compares the `Plus` reading with the brute-force PGM.
    pub record: VerificationRecord,
    pub readings: [(SeparableReading, f64); 3],
    pub oracle: f64,
    pub matching: Vec<SeparableReading>,
}

const SEPARABLE_TOL: f64 = 1e-9;

/// Evaluates every reading of the separable display and the full-space PGM
/// success of the uniform product probe, and names the readings that agree.
pub fn resolve_separable_display(n: usize, theta: f64) -> Result<SeparableResolution> {
    if !(2..=MAX_FULL_SPACE_SITES).contains(&n) {
        return Err(Error::UnsupportedDetectorCount { n, min: 2, max: MAX_FULL_SPACE_SITES });
    }
    let channel = PhaseChannel::new(theta)?;
    if theta == 0.0 {
        return Err(Error::DegenerateTheta("separable display is compared only for theta != 0"));
    }
    let probe = build_probe(&ProbeSpec::Separable { n })?;
    let oracle = pgm_success_oracle(&hypothesis_states(&probe, &channel, None)?)?;
    let nf = n as f64;
    let (s2, c2) = (2.0 * theta).sin_cos();
    let first = 1.0 + (nf - 1.0) * (nf - 2.0) / (2.0 * nf) * (1.0 - c2);
    let second = (nf - 1.0) / nf.sqrt() * (s2 * s2 + (1.0 - c2).powi(2) / nf).sqrt();
    let readings = [
        (SeparableReading::Plus, separable_success_closed(n, theta)),
        (SeparableReading::FirstLine, first / nf),
        (SeparableReading::SecondLine, second / nf),
    ];
    let matching: Vec<SeparableReading> =
        readings.iter().filter(|(_, v)| (v - oracle).abs() <= SEPARABLE_TOL).map(|(r, _)| *r).collect();
    let names: Vec<&str> = matching.iter().map(|r| r.label()).collect();
    let note =
        if names.is_empty() { "no reading matches".to_string() } else { format!("matches: {}", names.join(", ")) };
    let record = VerificationRecord::compare(
        "resolve_separable_display",
        CheckParams::new(Some(n), None, Some(theta), None),
        oracle,
        readings[0].1,
        SEPARABLE_TOL,
    )
    .with_note(note);
    Ok(SeparableResolution { record, readings, oracle, matching })
}

/// Checks `|<E0|H~>| = 1` and `sum_j |<e_j|E0>|^2 = 1` in the full space,
/// with `r0`, `r1` read off the computed states rather than the closed form.
pub fn verify_null_state_relation(n: usize, theta: f64) -> Result<Vec<VerificationRecord>> {
    if n < 2 || n % 2 == 1 || n > MAX_FULL_SPACE_SITES {
        return Err(Error::UnsupportedDetectorCount { n, min: 2, max: MAX_FULL_SPACE_SITES });
    }
    let channel = PhaseChannel::new(theta)?;
    if theta == 0.0 {
        return Err(Error::DegenerateTheta("e_j is undefined when r1 = 0"));
    }
    let e0 = build_probe(&ProbeSpec::balanced(n))?;
    let sites = hypothesis_states(&e0, &channel, None)?;
    let states = sites.states();
    let mut h = DVector::<C64>::zeros(e0.dim());
    for s in states {
        h += s.vector();
    }
    h /= c(n as f64, 0.0);
    let r0 = h.norm_squared();
    let r1 = r0 - states[0].inner(&states[1]).re;
    let overlap = e0.vector().dotc(&h).norm() / r0.sqrt();
    let sum: f64 = symmetric_pgm_vectors(states, r0, r1).iter().map(|e| e.dotc(e0.vector()).norm_sqr()).sum();
    let printed_scalar = (c(1.0, 0.0) + C64::from_polar(1.0, -theta)).norm() / (2.0 * r0.sqrt());
    let params = CheckParams::new(Some(n), Some(n / 2), Some(theta), None);
    Ok(vec![
        VerificationRecord::compare("null_state_overlap", params, 1.0, overlap, 1e-10)
            .with_note(format!("printed scalar magnitude {printed_scalar:.10}")),
        VerificationRecord::compare("null_state_sum", params, 1.0, sum, 1e-9),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrimination::{min_error_two_detector, pgm_with_null, unambiguous_two_detector};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn projector_pair_validates() {
        let povm = min_error_two_detector(0.3).unwrap().povm.unwrap();
        assert!(validate_povm(&povm, 4).iter().all(VerificationRecord::passed));
        let povm = unambiguous_two_detector(FRAC_PI_8).unwrap().povm.unwrap();
        assert!(validate_povm(&povm, 4).iter().all(VerificationRecord::passed));
    }

    #[test]
    fn scaled_element_fails_completeness() {
        let mut povm = min_error_two_detector(0.3).unwrap().povm.unwrap();
        povm.elements_mut()[0] = povm.elements()[0].scaled(1.01);
        let recs = validate_povm(&povm, 4);
        assert!(recs.last().unwrap().failed());
        assert!(validate_povm(&povm, 8)[0].failed());
    }

    #[test]
    fn identity_povm_reports_prior() {
        let ens = HypothesisEnsemble::new(vec![Ket::basis(2, 0), Ket::basis(2, 1)], vec![0.3, 0.7], false).unwrap();
        let id = crate::discrimination::PovmElement::zero(2);
        let povm = Povm::completed(2, vec![id], vec![Outcome::Unassigned], Outcome::Hypothesis(1)).unwrap();
        let p = numeric_probabilities(&ens, &povm, &[Outcome::Unassigned, Outcome::Hypothesis(1)]).unwrap();
        assert_abs_diff_eq!(p.success, 0.7, epsilon = 1e-15);
        assert!(numeric_probabilities(&ens, &povm, &[Outcome::Failure]).is_err());
    }

    #[test]
    fn dense_and_polar_agree() {
        let probe = build_probe(&ProbeSpec::balanced(6)).unwrap();
        let ens = hypothesis_states(&probe, &PhaseChannel::new(0.3).unwrap(), Some(0.25)).unwrap();
        assert_abs_diff_eq!(pgm_success_dense(&ens).unwrap(), pgm_success_polar(&ens).unwrap(), epsilon = 1e-11);
        let d = pgm_with_null(6, 0.3, 0.25).unwrap();
        assert_abs_diff_eq!(d.report.numeric_success, pgm_success_polar(&ens).unwrap(), epsilon = 1e-11);
    }

    #[test]
    fn separable_plus_reading() {
        let r = resolve_separable_display(2, FRAC_PI_4).unwrap();
        assert!(r.record.passed());
        assert_abs_diff_eq!(r.oracle, 0.9330127018922193, epsilon = 1e-12);
        let r = resolve_separable_display(6, 0.5).unwrap();
        assert_eq!(r.matching, vec![SeparableReading::Plus]);
    }

    #[test]
    fn null_relation() {
        for (n, theta) in [(4, FRAC_PI_8), (2, FRAC_PI_4), (6, 0.2)] {
            let recs = verify_null_state_relation(n, theta).unwrap();
            assert!(recs.iter().all(VerificationRecord::passed), "{recs:?}");
        }
    }
}
