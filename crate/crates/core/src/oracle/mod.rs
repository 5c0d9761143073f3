//! Brute-force verification: every probability the discrimination module
//! reports is recomputed here by a separate route, and disagreements come
//! back as failing records rather than errors.

mod checks;
mod search;
mod suite;

pub use checks::{
    helstrom_two_states, numeric_probabilities, pgm_success_dense, pgm_success_oracle, pgm_success_polar,
    resolve_separable_display, validate_povm, verify_null_state_relation, SeparableReading, SeparableResolution,
    DENSE_ORACLE_MAX_DIM,
};
pub use search::{probe_search, SearchObjective, SearchResult};
pub use suite::{run_verification_suite, Grid, Preset, Tolerances};

use std::cmp::Ordering;
use std::fmt;

/// Parameters a check ran at; absent fields do not apply.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CheckParams {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub theta: Option<f64>,
    pub p: Option<f64>,
}

impl CheckParams {
    pub fn new(n: Option<usize>, k: Option<usize>, theta: Option<f64>, p: Option<f64>) -> Self {
        Self { n, k, theta, p }
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        fn opt(a: Option<f64>, b: Option<f64>) -> Ordering {
            match (a, b) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                (a, b) => a.is_some().cmp(&b.is_some()),
            }
        }
        self.n.cmp(&other.n).then(self.k.cmp(&other.k)).then(opt(self.theta, other.theta)).then(opt(self.p, other.p))
    }
}

impl fmt::Display for CheckParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(n) = self.n {
            parts.push(format!("N={n}"));
        }
        if let Some(k) = self.k {
            parts.push(format!("k={k}"));
        }
        if let Some(t) = self.theta {
            parts.push(format!("theta={t}"));
        }
        if let Some(p) = self.p {
            parts.push(format!("p={p}"));
        }
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRecord {
    pub check_name: String,
    pub parameters: CheckParams,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub status: Status,
    pub note: Option<String>,
}

impl VerificationRecord {
    /// Passes iff `|expected - observed| <= tolerance`.
    pub fn compare(
        check_name: impl Into<String>,
        parameters: CheckParams,
        expected: f64,
        observed: f64,
        tolerance: f64,
    ) -> Self {
        let passed = (expected - observed).abs() <= tolerance;
        Self {
            check_name: check_name.into(),
            parameters,
            expected,
            observed,
            tolerance,
            status: if passed { Status::Pass } else { Status::Fail },
            note: None,
        }
    }

    pub fn skipped(check_name: impl Into<String>, parameters: CheckParams, reason: impl Into<String>) -> Self {
        Self {
            check_name: check_name.into(),
            parameters,
            expected: f64::NAN,
            observed: f64::NAN,
            tolerance: 0.0,
            status: Status::Skipped(reason.into()),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    pub(crate) fn sort_records(records: &mut [VerificationRecord]) {
        records.sort_by(|a, b| a.check_name.cmp(&b.check_name).then(a.parameters.cmp_key(&b.parameters)));
    }
}

impl fmt::Display for VerificationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            Status::Skipped(reason) => write!(f, "SKIP {} [{}] {}", self.check_name, self.parameters, reason),
            status => {
                let tag = if *status == Status::Pass { "PASS" } else { "FAIL" };
                write!(
                    f,
                    "{tag} {} [{}] expected={:.17e} observed={:.17e} tol={:e}",
                    self.check_name, self.parameters, self.expected, self.observed, self.tolerance
                )?;
                if let Some(note) = &self.note {
                    write!(f, " ({note})")?;
                }
                Ok(())
            }
        }
    }
}
