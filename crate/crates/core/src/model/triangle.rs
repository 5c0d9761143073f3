//! Two-detector probe coefficients in the `|u+-> (x) |u+->` basis and the
//! search for the probe that makes the two output states most distinguishable.

use crate::error::{Error, Result};
use crate::linalg::{c, Ket, C64};
use crate::model::PhaseChannel;
use crate::sampling::{project_to_simplex, random_unit_vector, seeded_rng};

/// Amplitudes `c_{++}, c_{+-}, c_{-+}, c_{--}` of a two-qubit probe together
/// with `z = <psi| U (x) U^-1 |psi>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleCoefficients {
    pub c_pp: C64,
    pub c_pm: C64,
    pub c_mp: C64,
    pub c_mm: C64,
    theta: f64,
    z: C64,
}

impl TriangleCoefficients {
    /// Normalizes `[c_pp, c_pm, c_mp, c_mm]`.
    pub fn new(coefficients: [C64; 4], theta: f64) -> Result<Self> {
        let norm = coefficients.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let [c_pp, c_pm, c_mp, c_mm] = coefficients.map(|a| a / norm);
        let weights = [c_pp.norm_sqr(), c_pm.norm_sqr(), c_mp.norm_sqr(), c_mm.norm_sqr()];
        let z = overlap_from_weights(&weights, theta);
        Ok(Self { c_pp, c_pm, c_mp, c_mm, theta, z })
    }

    pub fn from_probe(probe: &Ket, theta: f64) -> Result<Self> {
        if probe.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: probe.dim() });
        }
        let a = probe.amplitudes();
        Self::new([a[0], a[1], a[2], a[3]], theta)
    }

    pub fn to_probe(&self) -> Ket {
        Ket::new(self.coefficients().to_vec()).expect("coefficients are normalized")
    }

    pub fn coefficients(&self) -> [C64; 4] {
        [self.c_pp, self.c_pm, self.c_mp, self.c_mm]
    }

    pub fn weights(&self) -> [f64; 4] {
        self.coefficients().map(|a| a.norm_sqr())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `|c_{+-}|^2 e^{2i theta} + (|c_{++}|^2 + |c_{--}|^2) + |c_{-+}|^2 e^{-2i theta}`.
    pub fn z(&self) -> C64 {
        self.z
    }

    /// Whether `z` lies in the closed triangle with vertices
    /// `e^{2i theta}, 1, e^{-2i theta}` (up to `tol`).
    pub fn z_in_triangle(&self, tol: f64) -> bool {
        let verts = [C64::from_polar(1.0, 2.0 * self.theta), c(1.0, 0.0), C64::from_polar(1.0, -2.0 * self.theta)];
        let cross = |o: C64, a: C64, b: C64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
        let signs =
            [cross(verts[0], verts[1], self.z), cross(verts[1], verts[2], self.z), cross(verts[2], verts[0], self.z)];
        let orientation = cross(verts[0], verts[1], verts[2]);
        if orientation.abs() < 1e-15 {
            // degenerate triangle (theta = 0): everything collapses onto 1
            return (self.z - c(1.0, 0.0)).norm() <= tol;
        }
        signs.iter().all(|&s| s * orientation.signum() >= -tol)
    }
}

fn vertex_phases(theta: f64) -> [C64; 4] {
    let one = c(1.0, 0.0);
    [one, C64::from_polar(1.0, 2.0 * theta), C64::from_polar(1.0, -2.0 * theta), one]
}

fn overlap_from_weights(w: &[f64; 4], theta: f64) -> C64 {
    vertex_phases(theta).iter().zip(w).map(|(a, &x)| a * x).sum()
}

const MAX_ITERS: usize = 2_000_000;

/// Minimizes `|z|` over normalized two-detector probes with seeded random
/// restarts.
///
/// `z` depends only on the squared moduli `|c|^2`, so each restart descends
/// by projected gradient over that simplex and keeps the phases of its random
/// starting vector. The best restart wins; ties go to the lowest index.
pub fn minimize_two_detector_overlap(
    channel: &PhaseChannel,
    restarts: usize,
    seed: u64,
) -> Result<TriangleCoefficients> {
    let theta = channel.theta();
    if theta == 0.0 {
        return Err(Error::DegenerateTheta("|z| = 1 for every probe"));
    }
    if restarts == 0 {
        return Err(Error::EmptyBudget);
    }
    let a = vertex_phases(theta);
    // f(w) = |sum_i w_i a_i|^2 is a convex quadratic with Hessian trace 2 * sum |a_i|^2 = 8.
    let step = 1.0 / 8.0;
    let mut rng = seeded_rng(seed);
    let mut best: Option<(f64, TriangleCoefficients)> = None;
    for _ in 0..restarts {
        let start = random_unit_vector(&mut rng, 4);
        let mut w: Vec<f64> = start.iter().map(|z| z.norm_sqr()).collect();
        for _ in 0..MAX_ITERS {
            let z: C64 = a.iter().zip(&w).map(|(ai, &x)| ai * x).sum();
            let trial: Vec<f64> = w.iter().zip(&a).map(|(&x, ai)| x - step * 2.0 * (z.conj() * ai).re).collect();
            let next = project_to_simplex(&trial);
            let moved = next.iter().zip(&w).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            w = next;
            if moved < 1e-17 {
                break;
            }
        }
        let coeffs: [C64; 4] = std::array::from_fn(|i| {
            let phase = if start[i].norm() > 0.0 { start[i] / start[i].norm() } else { c(1.0, 0.0) };
            phase * w[i].sqrt()
        });
        let candidate = TriangleCoefficients::new(coeffs, theta)?;
        let value = candidate.z().norm();
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, candidate));
        }
    }
    Ok(best.expect("restarts >= 1").1)
}

/// `(<psi|U (x) I|psi>, <psi|I (x) U|psi>)` for a two-detector probe.
pub fn one_or_none_overlaps(coefficients: &TriangleCoefficients, theta: f64) -> (C64, C64) {
    let [pp, pm, mp, mm] = coefficients.weights();
    let (ep, em) = (C64::from_polar(1.0, theta), C64::from_polar(1.0, -theta));
    ((pp + pm) * ep + (mp + mm) * em, (pp + mp) * ep + (pm + mm) * em)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn z_matches_expectation_of_u_tensor_u_inverse() {
        let theta = 0.31;
        let ch = PhaseChannel::new(theta).unwrap();
        let tc = TriangleCoefficients::new([c(0.3, 0.1), c(-0.5, 0.2), c(0.1, 0.7), c(0.2, -0.2)], theta).unwrap();
        let probe = tc.to_probe();
        let w = crate::linalg::kron(&ch.unitary(), &ch.unitary().adjoint());
        let z = w.expectation(&probe);
        assert_abs_diff_eq!((z - tc.z()).norm(), 0.0, epsilon = 1e-15);
        assert!(tc.z_in_triangle(1e-12));
    }

    #[test]
    fn optimizer_reproduces_entangled_structure() {
        for theta in [0.05, 0.2, FRAC_PI_8, 0.6, FRAC_PI_4, -0.3] {
            let ch = PhaseChannel::new(theta).unwrap();
            let tc = minimize_two_detector_overlap(&ch, 8, 11).unwrap();
            let want = (2.0 * theta).cos().abs();
            assert!((tc.z().norm() - want).abs() <= 1e-8, "theta {theta}: {} vs {want}", tc.z().norm());
            assert!(tc.c_pp.norm() <= 1e-5 && tc.c_mm.norm() <= 1e-5);
            assert!((tc.c_pm.norm() - tc.c_mp.norm()).abs() <= 1e-5);
            assert!(tc.z_in_triangle(1e-12));
        }
    }

    #[test]
    fn optimizer_spot_values() {
        let tc = minimize_two_detector_overlap(&PhaseChannel::new(FRAC_PI_4).unwrap(), 4, 1).unwrap();
        assert_abs_diff_eq!(tc.z().norm(), 0.0, epsilon = 1e-8);
        let tc = minimize_two_detector_overlap(&PhaseChannel::new(FRAC_PI_8).unwrap(), 4, 1).unwrap();
        assert_abs_diff_eq!(tc.z().norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-8);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let ch = PhaseChannel::new(0.4).unwrap();
        assert_eq!(
            minimize_two_detector_overlap(&ch, 5, 99).unwrap(),
            minimize_two_detector_overlap(&ch, 5, 99).unwrap()
        );
    }

    #[test]
    fn optimizer_rejects_bad_input() {
        assert!(matches!(
            minimize_two_detector_overlap(&PhaseChannel::new(0.0).unwrap(), 3, 0),
            Err(Error::DegenerateTheta(_))
        ));
        assert_eq!(minimize_two_detector_overlap(&PhaseChannel::new(0.1).unwrap(), 0, 0), Err(Error::EmptyBudget));
    }

    /// Dense grid over the simplex of squared moduli: the smallest |z| is
    /// attained on the chord between e^{+-2i theta}.
    #[test]
    fn grid_search_confirms_minimum() {
        let theta = FRAC_PI_8;
        let steps = 100;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps - i {
                for k in 0..=steps - i - j {
                    let w = [i, j, k, steps - i - j - k].map(|x| x as f64 / steps as f64);
                    best = best.min(overlap_from_weights(&w, theta).norm());
                }
            }
        }
        assert_abs_diff_eq!(best, FRAC_PI_4.cos(), epsilon = 1e-12);
    }

    #[test]
    fn one_or_none_overlap_values() {
        let theta = FRAC_PI_4;
        let uniform = TriangleCoefficients::new([c(0.5, 0.0); 4], theta).unwrap();
        let (a, b) = one_or_none_overlaps(&uniform, theta);
        assert_abs_diff_eq!(a.norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(b.norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);

        let pp =
            TriangleCoefficients::new([c(1.0, 0.0), C64::default(), C64::default(), C64::default()], theta).unwrap();
        let (a, b) = one_or_none_overlaps(&pp, theta);
        assert_abs_diff_eq!((a - C64::from_polar(1.0, theta)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((b - C64::from_polar(1.0, theta)).norm(), 0.0, epsilon = 1e-15);
    }

    /// Simplex grid at step 0.02: the larger of the two overlap magnitudes is
    /// never below its value at the uniform point.
    #[test]
    fn uniform_point_minimizes_one_or_none_overlap() {
        let theta = FRAC_PI_8;
        let uniform = TriangleCoefficients::new([c(0.5, 0.0); 4], theta).unwrap();
        let (a, b) = one_or_none_overlaps(&uniform, theta);
        let at_uniform = a.norm().max(b.norm());
        let steps = 50;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps - i {
                for k in 0..=steps - i - j {
                    let w = [i, j, k, steps - i - j - k].map(|x| (x as f64 / steps as f64).sqrt());
                    let tc = TriangleCoefficients::new(w.map(|x| c(x, 0.0)), theta).unwrap();
                    let (a, b) = one_or_none_overlaps(&tc, theta);
                    best = best.min(a.norm().max(b.norm()));
                }
            }
        }
        assert!(best >= at_uniform - 1e-12);
        assert_abs_diff_eq!(best, at_uniform, epsilon = 1e-12);
    }
}
