//! The closed-form-versus-oracle verification suite.

use std::f64::consts::FRAC_1_SQRT_2;

use super::checks::{
    numeric_probabilities, pgm_success_oracle, resolve_separable_display, validate_povm, verify_null_state_relation,
};
use super::{CheckParams, VerificationRecord};
use crate::discrimination::{
    min_error_two_detector, one_or_none, one_or_none_lambda, one_or_none_trace_norm_closed, pgm_entangled_closed,
    pgm_null_closed, pgm_symmetric, pgm_with_null, small_theta_sensitivity, unambiguous_symmetric,
    unambiguous_two_detector, Outcome, Povm,
};
use crate::error::Result;
use crate::linalg::trace_norm;
use crate::model::{build_probe, hypothesis_states, PhaseChannel, ProbeKind, ProbeSpec};

/// Parameter grid; every check runs at every applicable combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub thetas: Vec<f64>,
    pub ns: Vec<usize>,
    pub ps: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Quick,
    Default,
    Deep,
}

impl Preset {
    pub fn label(self) -> &'static str {
        match self {
            Preset::Quick => "quick",
            Preset::Default => "default",
            Preset::Deep => "deep",
        }
    }

    pub fn grid(self) -> Grid {
        let tenths = |hi: usize| (1..=hi).map(|i| i as f64 / 10.0).collect::<Vec<_>>();
        match self {
            Preset::Quick => Grid { thetas: vec![0.1, 0.4, 0.7], ns: vec![2, 3, 4, 6], ps: vec![0.0, 0.5] },
            Preset::Default => Grid { thetas: tenths(7), ns: vec![2, 4, 6, 8, 10], ps: vec![0.0, 0.25, 0.5, 0.9] },
            Preset::Deep => {
                let mut thetas = tenths(7);
                thetas.extend([0.05, std::f64::consts::FRAC_PI_8, std::f64::consts::FRAC_PI_4, -0.3]);
                Grid { thetas, ns: (2..=12).collect(), ps: vec![0.0, 0.1, 0.25, 0.5, 0.75, 0.9] }
            }
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Preset::Quick),
            "default" => Ok(Preset::Default),
            "deep" => Ok(Preset::Deep),
            other => Err(format!("unknown preset '{other}' (expected quick, default or deep)")),
        }
    }
}

/// Comparison tolerances by kind of check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Closed form against brute force.
    pub closed_form: f64,
    /// POVM positivity and completeness.
    pub structural: f64,
    /// Quantities that must vanish exactly (unambiguous error).
    pub exact_zero: f64,
    /// Finite-difference slopes.
    pub slope: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { closed_form: 1e-9, structural: 1e-10, exact_zero: 1e-12, slope: 1e-4 }
    }
}

impl Tolerances {
    /// Every tolerance set to `tol`.
    pub fn uniform(tol: f64) -> Self {
        Self { closed_form: tol, structural: tol, exact_zero: tol, slope: tol }
    }
}

fn attempt(
    out: &mut Vec<VerificationRecord>,
    name: &str,
    params: CheckParams,
    f: impl FnOnce() -> Result<Vec<VerificationRecord>>,
) {
    match f() {
        Ok(records) => out.extend(records),
        Err(e) => out
            .push(VerificationRecord::compare(name, params, 0.0, f64::INFINITY, 0.0).with_note(format!("error: {e}"))),
    }
}

fn povm_records(name: &str, params: CheckParams, povm: &Povm, tol: f64) -> Vec<VerificationRecord> {
    let records = validate_povm(povm, povm.dim());
    let (completeness, positivity): (Vec<_>, Vec<_>) =
        records.into_iter().partition(|r| r.check_name == "povm_completeness");
    let worst_negative = positivity.iter().map(|r| r.observed).fold(0.0, f64::max);
    let deviation = completeness.first().map_or(f64::INFINITY, |r| r.observed);
    vec![
        VerificationRecord::compare(format!("{name}_positivity"), params, 0.0, worst_negative, tol),
        VerificationRecord::compare(format!("{name}_completeness"), params, 0.0, deviation, tol),
    ]
}

fn two_detector_checks(out: &mut Vec<VerificationRecord>, theta: f64, tol: &Tolerances) {
    let params = CheckParams::new(Some(2), Some(1), Some(theta), None);
    attempt(out, "min_error_2", params, || {
        let d = min_error_two_detector(theta)?;
        let povm = d.povm.expect("min-error POVM");
        let probe = build_probe(&ProbeSpec::TwoDetectorOptimal)?;
        let ens = hypothesis_states(&probe, &PhaseChannel::new(theta)?, None)?;
        let given = numeric_probabilities(&ens, &povm, povm.outcomes())?;
        let swapped =
            numeric_probabilities(&ens, &povm, &[Outcome::Hypothesis(1), Outcome::Hypothesis(0), Outcome::Unassigned])?;
        let helstrom = super::checks::helstrom_two_states(0.5, &ens.states()[0], &ens.states()[1])?;
        let pgm = pgm_success_oracle(&ens)?;
        let mut recs = vec![
            VerificationRecord::compare(
                "min_error_2_success",
                params,
                d.report.success(),
                given.success,
                tol.closed_form,
            ),
            VerificationRecord::compare(
                "min_error_2_labeling",
                params,
                given.success.max(swapped.success),
                given.success,
                tol.closed_form,
            ),
            VerificationRecord::compare("min_error_2_helstrom", params, helstrom, given.success, tol.closed_form),
            VerificationRecord::compare("min_error_2_pgm_coincidence", params, helstrom, pgm, tol.closed_form),
        ];
        recs.extend(povm_records("min_error_2_povm", params, &povm, tol.structural));
        Ok(recs)
    });
    if theta == 0.0 {
        return;
    }
    attempt(out, "unambiguous_2", params, || {
        let d = unambiguous_two_detector(theta)?;
        let povm = d.povm.expect("unambiguous POVM");
        let probe = build_probe(&ProbeSpec::TwoDetectorOptimal)?;
        let ens = hypothesis_states(&probe, &PhaseChannel::new(theta)?, None)?;
        let p = numeric_probabilities(&ens, &povm, povm.outcomes())?;
        let fail_idx = povm.failure_index().expect("failure element");
        let phi1_fail = povm.elements()[fail_idx].expectation(ens.states()[0].vector());
        let mut recs = vec![
            VerificationRecord::compare(
                "unambiguous_2_success",
                params,
                d.report.success(),
                p.success,
                tol.closed_form,
            ),
            VerificationRecord::compare("unambiguous_2_error", params, 0.0, p.error, tol.exact_zero),
            VerificationRecord::compare(
                "unambiguous_2_failure_phi1",
                params,
                (2.0 * theta).cos().abs(),
                phi1_fail,
                tol.closed_form,
            ),
        ];
        recs.extend(povm_records("unambiguous_2_povm", params, &povm, tol.structural));
        Ok(recs)
    });
}

fn one_or_none_checks(out: &mut Vec<VerificationRecord>, theta: f64, p0: f64, tol: &Tolerances) {
    let params = CheckParams::new(Some(2), None, Some(theta), Some(p0));
    attempt(out, "one_or_none", params, || {
        let norm = trace_norm(&one_or_none_lambda(p0, theta)?)?;
        let d = one_or_none(p0, theta)?;
        let povm = d.povm.expect("Helstrom POVM");
        let probe = build_probe(&ProbeSpec::Separable { n: 2 })?;
        let channel = PhaseChannel::new(theta)?;
        let ens = crate::model::HypothesisEnsemble::with_labels(
            vec![probe.clone(), channel.apply(&probe, 1, 2)?, channel.apply(&probe, 2, 2)?],
            vec![p0, (1.0 - p0) / 2.0, (1.0 - p0) / 2.0],
            vec![0, 1, 1],
            false,
        )?;
        let p = numeric_probabilities(&ens, &povm, povm.outcomes())?;
        let mut recs = vec![
            VerificationRecord::compare(
                "one_or_none_trace_norm",
                params,
                one_or_none_trace_norm_closed(p0, theta),
                norm,
                tol.closed_form,
            ),
            VerificationRecord::compare("one_or_none_success", params, d.report.success(), p.success, tol.closed_form),
        ];
        recs.extend(povm_records("one_or_none_povm", params, &povm, tol.structural));
        Ok(recs)
    });
}

fn symmetric_checks(out: &mut Vec<VerificationRecord>, n: usize, theta: f64, tol: &Tolerances) {
    let channel = match PhaseChannel::new(theta) {
        Ok(ch) => ch,
        Err(_) => return,
    };
    let params = CheckParams::new(Some(n), Some(n / 2), Some(theta), None);
    attempt(out, "pgm_entangled", params, || {
        let ens = hypothesis_states(&build_probe(&ProbeKind::Entangled.spec(n))?, &channel, None)?;
        let oracle = pgm_success_oracle(&ens)?;
        let d = pgm_symmetric(n, theta, ProbeKind::Entangled)?;
        let mut recs = vec![VerificationRecord::compare(
            "pgm_entangled_numeric",
            params,
            oracle,
            d.report.numeric_success,
            tol.closed_form,
        )];
        recs.push(match d.report.closed_form_success {
            Some(closed) => VerificationRecord::compare("pgm_entangled", params, oracle, closed, tol.closed_form),
            None => {
                VerificationRecord::skipped("pgm_entangled", params, "odd N: no closed form for the entangled probe")
            }
        });
        if let Some(povm) = &d.povm {
            recs.extend(povm_records("pgm_entangled_povm", params, povm, tol.structural));
        }
        Ok(recs)
    });
    let sep_params = CheckParams::new(Some(n), None, Some(theta), None);
    attempt(out, "pgm_separable", sep_params, || {
        let resolution = resolve_separable_display(n, theta)?;
        let d = pgm_symmetric(n, theta, ProbeKind::Separable)?;
        let mut recs = vec![
            VerificationRecord::compare(
                "pgm_separable",
                sep_params,
                resolution.oracle,
                resolution.readings[0].1,
                tol.closed_form,
            )
            .with_note(resolution.record.note.clone().unwrap_or_default()),
            VerificationRecord::compare(
                "pgm_separable_numeric",
                sep_params,
                resolution.oracle,
                d.report.numeric_success,
                tol.closed_form,
            ),
        ];
        if let Some(povm) = &d.povm {
            recs.extend(povm_records("pgm_separable_povm", sep_params, povm, tol.structural));
        }
        Ok(recs)
    });
    if n % 2 == 1 {
        out.push(VerificationRecord::skipped("unambiguous_failure", params, "odd N: scheme defined for even N"));
        out.push(VerificationRecord::skipped("null_state_overlap", params, "odd N: scheme defined for even N"));
        return;
    }
    attempt(out, "unambiguous_failure", params, || {
        let d = unambiguous_symmetric(n, theta)?;
        let povm = d.povm.expect("full-space POVM");
        let ens = hypothesis_states(&build_probe(&ProbeSpec::balanced(n))?, &channel, None)?;
        let p = numeric_probabilities(&ens, &povm, povm.outcomes())?;
        let closed_failure = 1.0 - d.report.success();
        let mut recs = vec![
            VerificationRecord::compare("unambiguous_failure", params, closed_failure, p.failure, tol.closed_form),
            VerificationRecord::compare("unambiguous_error", params, 0.0, p.error, tol.exact_zero),
        ];
        recs.extend(povm_records("unambiguous_povm", params, &povm, tol.structural));
        Ok(recs)
    });
    attempt(out, "null_state_overlap", params, || {
        let mut recs = verify_null_state_relation(n, theta)?;
        for r in &mut recs {
            let t = if r.check_name == "null_state_overlap" { tol.structural } else { tol.closed_form };
            *r = VerificationRecord::compare(r.check_name.clone(), r.parameters, r.expected, r.observed, t)
                .with_note(r.note.clone().unwrap_or_default());
        }
        Ok(recs)
    });
}

fn null_checks(out: &mut Vec<VerificationRecord>, n: usize, theta: f64, p: f64, tol: &Tolerances) {
    if n % 2 == 1 {
        return;
    }
    let params = CheckParams::new(Some(n), Some(n / 2), Some(theta), Some(p));
    attempt(out, "pgm_null", params, || {
        let channel = PhaseChannel::new(theta)?;
        let ens = hypothesis_states(&build_probe(&ProbeSpec::balanced(n))?, &channel, Some(p))?;
        let oracle = pgm_success_oracle(&ens)?;
        let d = pgm_with_null(n, theta, p)?;
        let mut recs = vec![
            VerificationRecord::compare("pgm_null", params, oracle, d.report.success(), tol.closed_form),
            VerificationRecord::compare("pgm_null_numeric", params, oracle, d.report.numeric_success, tol.closed_form),
        ];
        if p == 0.0 {
            recs.push(VerificationRecord::compare(
                "pgm_null_reduces",
                params,
                pgm_entangled_closed(n, theta)?,
                pgm_null_closed(n, theta, 0.0)?,
                tol.closed_form,
            ));
        }
        if let Some(povm) = &d.povm {
            recs.extend(povm_records("pgm_null_povm", params, povm, tol.structural));
        }
        Ok(recs)
    });
}

/// Runs every closed-form-versus-oracle comparison over `grid`. Checks at
/// `theta = 0` are skipped; records are sorted by check name, then
/// parameters.
pub fn run_verification_suite(grid: &Grid, tol: &Tolerances) -> Vec<VerificationRecord> {
    let mut out = Vec::new();
    for &theta in &grid.thetas {
        let base = CheckParams::new(None, None, Some(theta), None);
        if theta == 0.0 {
            out.push(VerificationRecord::skipped("theta_grid", base, "theta = 0: hypotheses coincide"));
            continue;
        }
        two_detector_checks(&mut out, theta, tol);
        for &p0 in &grid.ps {
            one_or_none_checks(&mut out, theta, p0, tol);
        }
        for &n in &grid.ns {
            symmetric_checks(&mut out, n, theta, tol);
            for &p in &grid.ps {
                null_checks(&mut out, n, theta, p, tol);
            }
        }
    }
    attempt(&mut out, "small_theta_slope", CheckParams::new(None, None, None, Some(0.5)), || {
        Ok(vec![VerificationRecord::compare(
            "small_theta_slope",
            CheckParams::new(None, None, None, Some(0.5)),
            0.5 * FRAC_1_SQRT_2,
            small_theta_sensitivity(0.5)?,
            tol.slope,
        )])
    });
    VerificationRecord::sort_records(&mut out);
    out
}
