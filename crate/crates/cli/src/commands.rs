//! Subcommand implementations. Each returns the text to emit or a failure
//! carrying its exit code.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;

use rayon::prelude::*;
use sensornet::discrimination::{
    guessing_baseline, min_error_two_detector, one_or_none, pgm_numeric, pgm_symmetric, pgm_with_null,
    unambiguous_symmetric, unambiguous_two_detector, Discrimination, Strategy,
};
use sensornet::model::{build_probe, hypothesis_states, PhaseChannel, ProbeKind, ProbeSpec};
use sensornet::oracle::{probe_search, run_verification_suite, Preset, SearchObjective, Status, Tolerances};
use sensornet::{Error, DEFAULT_SEED};

use crate::config::{parse_bool, parse_int_list, parse_list, parse_number};
use crate::table::{fmt_g17, to_csv, to_json, Row};

pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

const DEFAULT_P: f64 = 0.5;
const DEFAULT_RESTARTS: usize = 200;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verify(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Verify(_) => EXIT_VERIFY,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

fn usage(field: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("invalid --{field}: {msg}"))
}

/// Merged flag/config values for one invocation.
#[derive(Debug, Default, Clone)]
pub struct Settings {
    pub values: BTreeMap<String, String>,
}

impl Settings {
    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn degrees(&self) -> Result<bool, Failure> {
        self.get("degrees").map(parse_bool).transpose().map_err(|e| usage("degrees", e)).map(|d| d.unwrap_or(false))
    }

    fn thetas(&self) -> Result<Vec<f64>, Failure> {
        let raw = self.get("theta").ok_or_else(|| usage("theta", "required"))?;
        let scale = if self.degrees()? { std::f64::consts::PI / 180.0 } else { 1.0 };
        let thetas: Vec<f64> = parse_list(raw).map_err(|e| usage("theta", e))?.into_iter().map(|t| t * scale).collect();
        for &t in &thetas {
            if t.is_nan() || t.abs() > FRAC_PI_4 + 1e-15 {
                return Err(usage("theta", format!("{t} outside [-pi/4, pi/4]")));
            }
        }
        Ok(thetas.into_iter().map(|t| t.clamp(-FRAC_PI_4, FRAC_PI_4)).collect())
    }

    fn ns(&self) -> Result<Vec<usize>, Failure> {
        let raw = self.get("n").ok_or_else(|| usage("n", "required"))?;
        let ns = parse_int_list(raw).map_err(|e| usage("n", e))?;
        if let Some(n) = ns.iter().find(|&&n| n < 2) {
            return Err(usage("n", format!("{n} is below 2")));
        }
        Ok(ns)
    }

    fn ps(&self) -> Result<Option<Vec<f64>>, Failure> {
        let Some(raw) = self.get("p") else { return Ok(None) };
        let ps = parse_list(raw).map_err(|e| usage("p", e))?;
        if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(usage("p", format!("{p} outside [0, 1]")));
        }
        Ok(Some(ps))
    }

    fn k(&self) -> Result<Option<usize>, Failure> {
        self.get("k")
            .map(|s| s.trim().parse::<usize>().map_err(|_| usage("k", format!("'{s}' is not a nonnegative integer"))))
            .transpose()
    }

    fn probe(&self) -> Result<ProbeKind, Failure> {
        self.get("probe").map(|s| s.parse().map_err(|e| usage("probe", e))).unwrap_or(Ok(ProbeKind::Entangled))
    }

    fn strategies(&self) -> Result<Vec<Strategy>, Failure> {
        let raw = self.get("strategy").ok_or_else(|| usage("strategy", "required"))?;
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<Strategy>().map_err(|e| usage("strategy", e)))
            .collect()
    }

    fn format(&self) -> Result<Format, Failure> {
        match self.get("format").unwrap_or("csv") {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(usage("format", format!("unknown format '{other}' (expected csv or json)"))),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, Failure> {
        self.get(key)
            .map(|s| s.trim().parse::<usize>().map_err(|_| usage(key, format!("'{s}' is not a nonnegative integer"))))
            .unwrap_or(Ok(default))
    }

    fn seed(&self) -> Result<u64, Failure> {
        self.get("seed")
            .map(|s| s.trim().parse::<u64>().map_err(|_| usage("seed", format!("'{s}' is not an unsigned integer"))))
            .unwrap_or(Ok(DEFAULT_SEED))
    }

    pub fn out(&self) -> Option<&str> {
        self.get("out")
    }
}

#[derive(Debug, Clone, Copy)]
enum Format {
    Csv,
    Json,
}

/// Names the flag a core error most plausibly came from.
fn field_of(e: &Error) -> &'static str {
    match e {
        Error::ThetaOutOfRange(_) | Error::DegenerateTheta(_) => "theta",
        Error::InvalidProbability { .. } | Error::InvalidPriors(_) => "p",
        Error::ExcitationOutOfRange { .. } => "k",
        Error::InvalidProbe(_) => "probe",
        Error::UnambiguousCondition(_) => "theta",
        Error::TooFewDetectors { .. } | Error::OddDetectorCount(_) | Error::UnsupportedDetectorCount { .. } => "n",
        Error::DimensionMismatch { .. } | Error::LengthMismatch { .. } => "n",
        Error::EmptyBudget => "restarts",
        _ => "parameters",
    }
}

fn core(e: Error) -> Failure {
    usage(field_of(&e), e)
}

#[derive(Debug, Clone, Copy)]
struct Point {
    strategy: Strategy,
    n: usize,
    theta: f64,
    p: Option<f64>,
}

fn takes_p(s: Strategy) -> bool {
    matches!(s, Strategy::OneOrNone | Strategy::PgmWithNull | Strategy::PgmNumeric)
}

fn two_only(s: Strategy) -> bool {
    matches!(s, Strategy::MinErrorTwoDetector | Strategy::UnambiguousTwoDetector | Strategy::OneOrNone)
}

fn evaluate(pt: Point, probe: ProbeKind, k: Option<usize>) -> Result<Row, Failure> {
    let Point { strategy, n, theta, p } = pt;
    if two_only(strategy) && n != 2 {
        return Err(usage("n", format!("strategy {strategy} is defined for N = 2 only, got {n}")));
    }
    let d: Discrimination = match strategy {
        Strategy::MinErrorTwoDetector => min_error_two_detector(theta),
        Strategy::UnambiguousTwoDetector => unambiguous_two_detector(theta),
        Strategy::OneOrNone => one_or_none(p.unwrap_or(DEFAULT_P), theta),
        Strategy::Pgm => pgm_symmetric(n, theta, probe),
        Strategy::Unambiguous => unambiguous_symmetric(n, theta),
        Strategy::PgmWithNull => pgm_with_null(n, theta, p.unwrap_or(DEFAULT_P)),
        Strategy::PgmNumeric => {
            let spec = match (probe, k) {
                (ProbeKind::Entangled, Some(k)) => ProbeSpec::Symmetric { n, k },
                _ => probe.spec(n),
            };
            let ket = build_probe(&spec).map_err(core)?;
            let channel = PhaseChannel::new(theta).map_err(core)?;
            let ens = hypothesis_states(&ket, &channel, p).map_err(core)?;
            pgm_numeric(&ens).map(|mut d| {
                d.report.parameters.theta = theta;
                d.report.parameters.probe = Some(probe);
                if let ProbeSpec::Symmetric { k, .. } = spec {
                    d.report.parameters.k = Some(k);
                }
                d
            })
        }
    }
    .map_err(core)?;
    let r = d.report;
    let row_p = r.parameters.p.or(if takes_p(strategy) { p } else { None });
    let baseline = match strategy {
        Strategy::OneOrNone => {
            let p0 = row_p.unwrap_or(DEFAULT_P);
            p0.max(1.0 - p0)
        }
        _ => {
            guessing_baseline(n, if r.parameters.p.is_some() && strategy != Strategy::OneOrNone { row_p } else { None })
        }
    };
    Ok(Row {
        strategy: strategy.label().to_string(),
        n,
        k: r.parameters.k,
        theta,
        p: row_p,
        probe: r.parameters.probe.map(|k| k.label().to_string()),
        closed_form_success: r.closed_form_success,
        numeric_success: r.numeric_success,
        failure_prob: r.failure_prob,
        error_prob: r.error_prob,
        abs_diff: r.abs_diff,
        guessing_baseline: baseline,
        degenerate: r.degenerate,
    })
}

fn row_order(a: &Row, b: &Row) -> Ordering {
    a.strategy.cmp(&b.strategy).then(a.n.cmp(&b.n)).then(a.theta.total_cmp(&b.theta)).then(match (a.p, b.p) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (x, y) => x.is_some().cmp(&y.is_some()),
    })
}

/// Every (strategy, N, theta, p) tuple, computed in parallel and emitted in
/// sorted order.
pub fn sweep(settings: &Settings, single: bool) -> Result<String, Failure> {
    let strategies = settings.strategies()?;
    let ns = settings.ns()?;
    let thetas = settings.thetas()?;
    let ps = settings.ps()?;
    let probe = settings.probe()?;
    let k = settings.k()?;
    let format = settings.format()?;
    if single
        && (strategies.len() != 1 || ns.len() != 1 || thetas.len() != 1 || ps.as_ref().is_some_and(|p| p.len() != 1))
    {
        return Err(Failure::Usage("report takes exactly one strategy, N, theta and p; use sweep for lists".into()));
    }
    let mut points = Vec::new();
    for &strategy in &strategies {
        for &n in &ns {
            for &theta in &thetas {
                match (&ps, takes_p(strategy)) {
                    (Some(ps), true) => points.extend(ps.iter().map(|&p| Point { strategy, n, theta, p: Some(p) })),
                    (None, true) if strategy != Strategy::PgmNumeric => {
                        points.push(Point { strategy, n, theta, p: Some(DEFAULT_P) })
                    }
                    _ => points.push(Point { strategy, n, theta, p: None }),
                }
            }
        }
    }
    let results: Vec<Result<Row, Failure>> = points.par_iter().map(|&pt| evaluate(pt, probe, k)).collect();
    let mut rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(row_order);
    rows.dedup();
    Ok(match format {
        Format::Csv => to_csv(&rows),
        Format::Json => to_json(&rows),
    })
}

pub fn verify(settings: &Settings) -> Result<String, Failure> {
    let preset: Preset = settings.get("preset").unwrap_or("default").parse().map_err(|e| usage("preset", e))?;
    let tol = match settings.get("tolerance") {
        Some(t) => {
            let t = parse_number(t).map_err(|e| usage("tolerance", e))?;
            if t.is_nan() || t < 0.0 {
                return Err(usage("tolerance", format!("{t} is negative")));
            }
            Tolerances::uniform(t)
        }
        None => Tolerances::default(),
    };
    let records = run_verification_suite(&preset.grid(), &tol);
    let mut out = String::new();
    let (mut passed, mut checked) = (0usize, 0usize);
    for r in &records {
        writeln!(out, "{r}").expect("write to string");
        match r.status {
            Status::Pass => {
                passed += 1;
                checked += 1;
            }
            Status::Fail => checked += 1,
            Status::Skipped(_) => {}
        }
    }
    writeln!(out, "PASS {passed}/{checked}").expect("write to string");
    if passed == checked {
        Ok(out)
    } else {
        Err(Failure::Verify(out))
    }
}

pub fn optimize(settings: &Settings) -> Result<String, Failure> {
    let ns = settings.ns()?;
    let thetas = settings.thetas()?;
    if ns.len() != 1 || thetas.len() != 1 {
        return Err(Failure::Usage("optimize takes a single N and theta".into()));
    }
    let (n, theta) = (ns[0], thetas[0]);
    let objective: SearchObjective =
        settings.get("objective").unwrap_or("min_overlap").parse().map_err(|e| usage("objective", e))?;
    let restarts = settings.usize_or("restarts", DEFAULT_RESTARTS)?;
    let seed = settings.seed()?;
    let res = probe_search(n, theta, objective, restarts, seed).map_err(core)?;
    let analytic = (n == 2).then(|| match objective {
        SearchObjective::WhichDetector => (2.0 * theta).cos().abs(),
        SearchObjective::OneOrNone => theta.cos().abs(),
    });
    let mut out = String::new();
    match settings.format()? {
        Format::Csv => {
            writeln!(out, "objective,N,theta,restarts,seed,value,analytic,best_restart").unwrap();
            writeln!(
                out,
                "{},{n},{},{restarts},{seed},{},{},{}",
                objective.label(),
                fmt_g17(theta),
                fmt_g17(res.overlap),
                analytic.map(fmt_g17).unwrap_or_default(),
                res.best_restart
            )
            .unwrap();
            writeln!(out, "index,re,im").unwrap();
            for (i, z) in res.coefficients.iter().enumerate() {
                writeln!(out, "{i},{},{}", fmt_g17(z.re + 0.0), fmt_g17(z.im + 0.0)).unwrap();
            }
        }
        Format::Json => {
            let coeffs: Vec<[f64; 2]> = res.coefficients.iter().map(|z| [z.re, z.im]).collect();
            let v = serde_json::json!({
                "objective": objective.label(),
                "N": n,
                "theta": theta,
                "restarts": restarts,
                "seed": seed,
                "value": res.overlap,
                "analytic": analytic,
                "best_restart": res.best_restart,
                "coefficients": coeffs,
            });
            out = serde_json::to_string_pretty(&v).expect("json");
            out.push('\n');
        }
    }
    if res.record.failed() {
        return Err(Failure::Verify(out));
    }
    Ok(out)
}
