//! Which of two detectors interacted, using the entangled probe
//! `(|u+u-> + |u-u+>)/sqrt 2`.

use nalgebra::DVector;

use super::{Discrimination, DiscriminationReport, Outcome, Parameters, Povm, PovmElement, Strategy};
use crate::error::{Error, Result};
use crate::linalg::{c, Ket, C64};
use crate::model::{build_probe, hypothesis_states, PhaseChannel, ProbeSpec};

fn parameters(theta: f64) -> Parameters {
    Parameters { n: 2, k: Some(1), theta, p: None, probe: None, priors: vec![0.5, 0.5] }
}

/// `(|+-> - i|-+>)/sqrt 2` and `(|+-> + i|-+>)/sqrt 2`.
pub fn min_error_vectors() -> [Ket; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let make = |sign: f64| {
        Ket::from_normalized(vec![c(0.0, 0.0), c(s, 0.0), c(0.0, -sign * s), c(0.0, 0.0)])
            .expect("unit by construction")
    };
    [make(1.0), make(-1.0)]
}

/// Helstrom measurement for the two outputs. The projectors do not depend on
/// `theta`; only their labels swap with its sign.
pub fn min_error_two_detector(theta: f64) -> Result<Discrimination> {
    let channel = PhaseChannel::new(theta)?;
    let probe = build_probe(&ProbeSpec::TwoDetectorOptimal)?;
    let ensemble = hypothesis_states(&probe, &channel, None)?;
    let [v1, v2] = min_error_vectors();
    let (first, second) = if theta >= 0.0 { (v1, v2) } else { (v2, v1) };
    let povm = Povm::completed(
        4,
        vec![PovmElement::projector(&first), PovmElement::projector(&second)],
        vec![Outcome::Hypothesis(0), Outcome::Hypothesis(1)],
        Outcome::Unassigned,
    )?;
    let probs = povm.probabilities(&ensemble)?;
    let closed = 0.5 * (1.0 + (2.0 * theta).sin().abs());
    let report = DiscriminationReport::new(Strategy::MinErrorTwoDetector, parameters(theta), Some(closed), probs)
        .with_note("measurement projectors are independent of theta");
    Ok(Discrimination { report, povm: Some(povm) })
}

fn perp(state: &Ket) -> Ket {
    // Outputs live on span{|+->, |-+>}: rotate by 90 degrees there.
    let a = state.amplitudes();
    let v = DVector::from_vec(vec![C64::default(), -a[2].conj(), a[1].conj(), C64::default()]);
    Ket::from_vector(v).expect("nonzero on the two-string subspace")
}

/// Zero-error scheme with an inconclusive outcome.
pub fn unambiguous_two_detector(theta: f64) -> Result<Discrimination> {
    let channel = PhaseChannel::new(theta)?;
    if theta == 0.0 {
        return Err(Error::DegenerateTheta("identical hypotheses admit no unambiguous measurement"));
    }
    let probe = build_probe(&ProbeSpec::TwoDetectorOptimal)?;
    let ensemble = hypothesis_states(&probe, &channel, None)?;
    let states = ensemble.states();
    let d = 1.0 / (1.0 + (2.0 * theta).cos().abs());
    let pi1 = PovmElement::rank_one(perp(&states[1]).into_vector(), d);
    let pi2 = PovmElement::rank_one(perp(&states[0]).into_vector(), d);
    let povm =
        Povm::completed(4, vec![pi1, pi2], vec![Outcome::Hypothesis(0), Outcome::Hypothesis(1)], Outcome::Failure)?;
    let probs = povm.probabilities(&ensemble)?;
    let closed = 1.0 - (2.0 * theta).cos().abs();
    let report = DiscriminationReport::new(Strategy::UnambiguousTwoDetector, parameters(theta), Some(closed), probs);
    Ok(Discrimination { report, povm: Some(povm) })
}
