//! Measurement strategies and their success probabilities.
//!
//! Each strategy returns a [`Discrimination`]: a report carrying the
//! closed-form value next to the value obtained by evaluating the explicit
//! POVM with the Born rule, plus the POVM itself when one exists.

mod asymptotic;
mod one_or_none;
mod pgm;
mod povm;
mod symmetric;
mod two_detector;

pub use asymptotic::{asymptotic_success, guessing_baseline, AsymptoticVariant};
pub use one_or_none::{
    one_or_none, one_or_none_lambda, one_or_none_success_closed, one_or_none_trace_norm_closed,
    small_theta_sensitivity, SLOPE_STEP,
};
pub use pgm::{pgm_numeric, pgm_povm, pgm_success_circulant, pgm_success_from_gram, GRAM_SUPPORT_TOL};
pub use povm::{Outcome, Povm, PovmElement, PovmSpectrum, Probabilities};
pub use symmetric::{
    pgm_entangled_closed, pgm_null_closed, pgm_symmetric, pgm_symmetric_scalars, pgm_with_null,
    separable_success_closed, separable_success_two_detector, symmetric_pgm_vectors, unambiguous_failure_closed,
    unambiguous_symmetric, PgmScalars, MAX_GRAM_SITES,
};
pub use two_detector::{min_error_two_detector, min_error_vectors, unambiguous_two_detector};

use std::fmt;

use crate::model::ProbeKind;

/// Which construction produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    MinErrorTwoDetector,
    UnambiguousTwoDetector,
    OneOrNone,
    Pgm,
    Unambiguous,
    PgmWithNull,
    PgmNumeric,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::MinErrorTwoDetector,
        Strategy::UnambiguousTwoDetector,
        Strategy::OneOrNone,
        Strategy::Pgm,
        Strategy::Unambiguous,
        Strategy::PgmWithNull,
        Strategy::PgmNumeric,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::MinErrorTwoDetector => "min_error_2",
            Strategy::UnambiguousTwoDetector => "unambiguous_2",
            Strategy::OneOrNone => "one_or_none",
            Strategy::Pgm => "pgm",
            Strategy::Unambiguous => "unambiguous",
            Strategy::PgmWithNull => "pgm_null",
            Strategy::PgmNumeric => "pgm_numeric",
        }
    }

    /// True for schemes that never name a wrong hypothesis.
    pub fn is_unambiguous(self) -> bool {
        matches!(self, Strategy::UnambiguousTwoDetector | Strategy::Unambiguous)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL.into_iter().find(|st| st.label() == s).ok_or_else(|| {
            let known: Vec<_> = Strategy::ALL.iter().map(|s| s.label()).collect();
            format!("unknown strategy '{s}' (expected one of {})", known.join(", "))
        })
    }
}

/// Parameters a report was computed at.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    pub n: usize,
    /// Plus-excitation count of the probe, when it is a symmetric state.
    pub k: Option<usize>,
    pub theta: f64,
    /// Prior of the no-interaction hypothesis (`p0` or `p`), if present.
    pub p: Option<f64>,
    pub probe: Option<ProbeKind>,
    pub priors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationReport {
    pub strategy: Strategy,
    /// `None` where no closed form is known (odd `N` with the entangled probe).
    pub closed_form_success: Option<f64>,
    pub numeric_success: f64,
    pub failure_prob: f64,
    pub error_prob: f64,
    pub abs_diff: Option<f64>,
    pub parameters: Parameters,
    /// `theta = 0`: every hypothesis is the same state and the result is the
    /// best-prior guess with no POVM.
    pub degenerate: bool,
    pub notes: Vec<String>,
}

impl DiscriminationReport {
    pub(crate) fn new(
        strategy: Strategy,
        parameters: Parameters,
        closed_form_success: Option<f64>,
        probs: Probabilities,
    ) -> Self {
        Self {
            strategy,
            closed_form_success,
            numeric_success: probs.success,
            failure_prob: probs.failure,
            error_prob: probs.error,
            abs_diff: closed_form_success.map(|c| (c - probs.success).abs()),
            parameters,
            degenerate: false,
            notes: Vec::new(),
        }
    }

    pub(crate) fn degenerate(strategy: Strategy, parameters: Parameters, success: f64) -> Self {
        let mut r = Self::new(
            strategy,
            parameters,
            Some(success),
            Probabilities { success, failure: 0.0, error: 1.0 - success },
        );
        r.degenerate = true;
        r.notes.push("theta = 0: hypotheses coincide, result is the best-prior guess".into());
        r
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Closed form when available, numeric value otherwise.
    pub fn success(&self) -> f64 {
        self.closed_form_success.unwrap_or(self.numeric_success)
    }
}

/// A report and, unless degenerate or evaluated in Gram space, its POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrimination {
    pub report: DiscriminationReport,
    pub povm: Option<Povm>,
}
