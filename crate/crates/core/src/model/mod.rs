//! The detector network: phase channel, probe states and hypothesis ensembles.

mod probe;
mod triangle;

pub use probe::{build_probe, ProbeKind, ProbeSpec, MAX_FULL_SPACE_SITES};
pub use triangle::{minimize_two_detector_overlap, one_or_none_overlaps, TriangleCoefficients};

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{apply_site_phases, c, kron, DenseOperator, Ket, C64, STRUCTURE_TOL};

const THETA_SLACK: f64 = 1e-15;

/// Single-qubit interaction `U = diag(e^{i theta}, e^{-i theta})` in the
/// `{|u+>, |u->}` basis, with `|theta| <= pi/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseChannel {
    theta: f64,
}

impl PhaseChannel {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta.abs() > FRAC_PI_4 + THETA_SLACK {
            return Err(Error::ThetaOutOfRange(theta));
        }
        Ok(Self { theta })
    }

    /// An in-range angle describing the same channel up to a global phase,
    /// if one exists. Input outside the range is never rewritten silently;
    /// callers decide whether to use this.
    pub fn equivalent_in_range(theta: f64) -> Option<f64> {
        if !theta.is_finite() {
            return None;
        }
        // Only the relative eigenphase 2*theta (mod 2 pi) is physical.
        let mut rel = (2.0 * theta).rem_euclid(2.0 * PI);
        if rel > PI {
            rel -= 2.0 * PI;
        }
        let folded = rel / 2.0;
        (folded.abs() <= FRAC_PI_4 + THETA_SLACK).then_some(folded)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `[e^{i theta}, e^{-i theta}]`, the eigenvalues on `|u+>` and `|u->`.
    pub fn phases(&self) -> [C64; 2] {
        [C64::from_polar(1.0, self.theta), C64::from_polar(1.0, -self.theta)]
    }

    pub fn unitary(&self) -> DenseOperator {
        DenseOperator::from_diagonal(&self.phases()).with_unitary().expect("diagonal phases are unitary")
    }

    /// Dense `F_site = I^(site-1) (x) U (x) I^(n-site)`. Only for small `n`.
    pub fn site_operator(&self, site: usize, n_sites: usize) -> Result<DenseOperator> {
        if site == 0 || site > n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites });
        }
        let id = DenseOperator::identity(2);
        let u = self.unitary();
        let mut op = if site == 1 { u.clone() } else { id.clone() };
        for s in 2..=n_sites {
            op = kron(&op, if s == site { &u } else { &id });
        }
        Ok(op)
    }

    /// `F_site |state>`.
    pub fn apply(&self, state: &Ket, site: usize, n_sites: usize) -> Result<Ket> {
        let expected = 1usize << n_sites;
        if state.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: state.dim() });
        }
        if site == 0 || site > n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites });
        }
        let mut v = state.vector().clone();
        apply_site_phases(v.as_mut_slice(), self.phases(), site, n_sites);
        Ket::from_normalized(v.data.into())
    }
}

/// Candidate output states with priors.
///
/// Several states may share a hypothesis `label`, which turns that hypothesis
/// into a mixed state (the "one detector fired" hypothesis of the one-or-none
/// test). When `includes_null` is set, state 0 is the untouched probe.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisEnsemble {
    states: Vec<Ket>,
    priors: Vec<f64>,
    labels: Vec<usize>,
    includes_null: bool,
}

impl HypothesisEnsemble {
    pub fn new(states: Vec<Ket>, priors: Vec<f64>, includes_null: bool) -> Result<Self> {
        let labels = (0..states.len()).collect();
        Self::with_labels(states, priors, labels, includes_null)
    }

    pub fn uniform(states: Vec<Ket>) -> Result<Self> {
        let m = states.len();
        Self::new(states, vec![1.0 / m as f64; m], false)
    }

    pub fn with_labels(states: Vec<Ket>, priors: Vec<f64>, labels: Vec<usize>, includes_null: bool) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::LengthMismatch { expected: 1, found: 0 });
        }
        if priors.len() != states.len() {
            return Err(Error::LengthMismatch { expected: states.len(), found: priors.len() });
        }
        if labels.len() != states.len() {
            return Err(Error::LengthMismatch { expected: states.len(), found: labels.len() });
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        let sum: f64 = priors.iter().sum();
        if priors.iter().any(|&p| p.is_nan() || p < 0.0) || (sum - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::InvalidPriors(sum));
        }
        Ok(Self { states, priors, labels, includes_null })
    }

    pub fn states(&self) -> &[Ket] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn includes_null(&self) -> bool {
        self.includes_null
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Number of distinct hypothesis labels (`max label + 1`).
    pub fn num_hypotheses(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Prior probability of each hypothesis label.
    pub fn label_priors(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.num_hypotheses()];
        for (&l, &p) in self.labels.iter().zip(&self.priors) {
            out[l] += p;
        }
        out
    }
}

pub(crate) fn sites_of_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch { expected: dim.next_power_of_two().max(2), found: dim });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// `[probe] ++ [F_1 probe, ..., F_N probe]` with priors `[p, (1-p)/N, ...]`
/// when `null_prior = Some(p)`, otherwise the `N` site states with uniform
/// priors.
pub fn hypothesis_states(probe: &Ket, channel: &PhaseChannel, null_prior: Option<f64>) -> Result<HypothesisEnsemble> {
    let n = sites_of_dim(probe.dim())?;
    if let Some(p) = null_prior {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability { name: "null_prior", value: p });
        }
    }
    let mut states = Vec::with_capacity(n + 1);
    let mut priors = Vec::with_capacity(n + 1);
    let site_prior = match null_prior {
        Some(p) => {
            states.push(probe.clone());
            priors.push(p);
            (1.0 - p) / n as f64
        }
        None => 1.0 / n as f64,
    };
    for site in 1..=n {
        states.push(channel.apply(probe, site, n)?);
        priors.push(site_prior);
    }
    HypothesisEnsemble::new(states, priors, null_prior.is_some())
}

/// `<k;N| F_n^dagger F_m |k;N>` for `n != m`:
/// `1 - 2k(N-k)(1 - cos 2 theta) / (N(N-1))`.
pub fn symmetric_overlap_closed(n: usize, k: usize, theta: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    1.0 - 2.0 * kf * (nf - kf) * (1.0 - (2.0 * theta).cos()) / (nf * (nf - 1.0))
}

/// Overlaps of a permutation-invariant probe computed from one- and
/// two-site statistics of its `u+`/`u-` occupations, without building
/// `2^N`-dimensional vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteOverlaps {
    pub n: usize,
    /// `<psi| F_a |psi>`, the same for every site.
    pub single: C64,
    /// `<F_a psi | F_b psi>` for `a != b`.
    pub pair: C64,
}

impl SiteOverlaps {
    /// Supports `Symmetric` and `Separable` probes.
    pub fn for_probe(spec: &ProbeSpec, channel: &PhaseChannel) -> Result<Self> {
        let [ep, em] = channel.phases();
        match *spec {
            ProbeSpec::Symmetric { n, k } => {
                probe::check_symmetric(n, k)?;
                let (nf, kf) = (n as f64, k as f64);
                let pairs = nf * (nf - 1.0);
                let p_pp = kf * (kf - 1.0) / pairs;
                let p_pm = kf * (nf - kf) / pairs;
                let p_mm = (nf - kf) * (nf - kf - 1.0) / pairs;
                let single = ep * (kf / nf) + em * ((nf - kf) / nf);
                // conj(phase(s_a)) * phase(s_b), summed over the joint law of (s_a, s_b).
                let pair = c(p_pp + p_mm, 0.0) + ep.conj() * em * p_pm + em.conj() * ep * p_pm;
                Ok(Self { n, single, pair })
            }
            ProbeSpec::Separable { n } => {
                if n < 2 {
                    return Err(Error::TooFewDetectors { n, min: 2 });
                }
                let single = (ep + em) * 0.5;
                let pair = single.conj() * single;
                Ok(Self { n, single, pair })
            }
            _ => Err(Error::InvalidProbe("site statistics need a permutation-invariant probe family".into())),
        }
    }

    /// Gram matrix of `[probe?] ++ [F_1 probe, ..., F_N probe]`.
    pub fn gram(&self, include_null: bool) -> DMatrix<C64> {
        let off = usize::from(include_null);
        let m = self.n + off;
        DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                c(1.0, 0.0)
            } else if include_null && i == 0 {
                self.single
            } else if include_null && j == 0 {
                self.single.conj()
            } else {
                self.pair
            }
        })
    }
}
