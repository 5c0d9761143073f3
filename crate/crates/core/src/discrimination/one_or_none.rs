//! Did either of two detectors interact? Binary test between the untouched
//! uniform product probe and the equal mixture of its two single-site images.

use nalgebra::DMatrix;

use super::{Discrimination, DiscriminationReport, Outcome, Parameters, Povm, PovmElement, Strategy};
use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eig, DenseOperator, Ket, C64};
use crate::model::{build_probe, HypothesisEnsemble, PhaseChannel, ProbeKind, ProbeSpec};

/// Finite-difference step for [`small_theta_sensitivity`].
pub const SLOPE_STEP: f64 = 1e-3;

fn check_p0(p0: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidProbability { name: "p0", value: p0 });
    }
    Ok(())
}

fn ensemble(p0: f64, channel: &PhaseChannel) -> Result<HypothesisEnsemble> {
    let probe = build_probe(&ProbeSpec::Separable { n: 2 })?;
    let phi1 = channel.apply(&probe, 1, 2)?;
    let phi2 = channel.apply(&probe, 2, 2)?;
    let p1 = 1.0 - p0;
    HypothesisEnsemble::with_labels(vec![probe, phi1, phi2], vec![p0, p1 / 2.0, p1 / 2.0], vec![0, 1, 1], false)
}

fn lambda_of(ens: &HypothesisEnsemble) -> Result<DenseOperator> {
    let mut m = DMatrix::<C64>::zeros(4, 4);
    for ((s, &p), &label) in ens.states().iter().zip(ens.priors()).zip(ens.labels()) {
        let sign = if label == 0 { 1.0 } else { -1.0 };
        m += s.vector() * s.vector().adjoint() * c(sign * p, 0.0);
    }
    DenseOperator::new(m)?.with_hermitian()
}

/// `p0 rho0 - p1 rho1` on the two-qubit space.
pub fn one_or_none_lambda(p0: f64, theta: f64) -> Result<DenseOperator> {
    check_p0(p0)?;
    let channel = PhaseChannel::new(theta)?;
    lambda_of(&ensemble(p0, &channel)?)
}

/// Trace norm of `p0 rho0 - p1 rho1` for the uniform product probe.
pub fn one_or_none_trace_norm_closed(p0: f64, theta: f64) -> f64 {
    let p1 = 1.0 - p0;
    let (s, co) = theta.sin_cos();
    let c2 = co * co;
    let disc = p1 * p1 * (1.0 + c2) * (1.0 + c2) + 4.0 * p0 * p0 + 4.0 * p0 * p1 * (1.0 - 3.0 * c2);
    0.5 * disc.max(0.0).sqrt() + 0.5 * p1 * s * s
}

pub fn one_or_none_success_closed(p0: f64, theta: f64) -> f64 {
    0.5 * (1.0 + one_or_none_trace_norm_closed(p0, theta))
}

/// Helstrom test: projector onto the positive part of `Lambda` decides
/// "none", its complement decides "one".
pub fn one_or_none(p0: f64, theta: f64) -> Result<Discrimination> {
    check_p0(p0)?;
    let channel = PhaseChannel::new(theta)?;
    let ens = ensemble(p0, &channel)?;
    let lambda = lambda_of(&ens)?;
    let eig = hermitian_eig(&lambda)?;
    let positive: Vec<Ket> =
        eig.eigenvalues.iter().zip(&eig.eigenvectors).filter(|(&l, _)| l > 0.0).map(|(_, v)| v.clone()).collect();
    let none = PovmElement::projector_onto(4, &positive);
    let povm = Povm::completed(4, vec![none], vec![Outcome::Hypothesis(0)], Outcome::Hypothesis(1))?;
    let probs = povm.probabilities(&ens)?;
    let norm: f64 = eig.eigenvalues.iter().map(|l| l.abs()).sum();
    let params = Parameters {
        n: 2,
        k: None,
        theta,
        p: Some(p0),
        probe: Some(ProbeKind::Separable),
        priors: ens.priors().to_vec(),
    };
    let report =
        DiscriminationReport::new(Strategy::OneOrNone, params, Some(one_or_none_success_closed(p0, theta)), probs)
            .with_note(format!("trace norm (eigenvalues) = {norm:.17e}"));
    Ok(Discrimination { report, povm: Some(povm) })
}

/// `dP_s/dtheta` at `theta -> 0+`. Richardson combination of the one-sided
/// differences over `h` and `2h` cancels the `theta^2` term of `P_s`.
pub fn small_theta_sensitivity(p0: f64) -> Result<f64> {
    check_p0(p0)?;
    let h = SLOPE_STEP;
    let base = one_or_none_success_closed(p0, 0.0);
    let d1 = (one_or_none_success_closed(p0, h) - base) / h;
    let d2 = (one_or_none_success_closed(p0, 2.0 * h) - base) / (2.0 * h);
    Ok(2.0 * d1 - d2)
}
