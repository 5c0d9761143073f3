use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, C64};

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20240601;

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the unit sphere of `C^dim` (normalized complex Gaussian).
pub(crate) fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c(re, im)
        });
        let n = v.norm();
        if n > 1e-300 {
            return v / c(n, 0.0);
        }
    }
}

/// Euclidean projection of `v` onto the probability simplex.
pub(crate) fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut shift = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            shift = t;
        }
    }
    v.iter().map(|&x| (x - shift).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vectors_are_normalized_and_reproducible() {
        let a = random_unit_vector(&mut seeded_rng(7), 5);
        let b = random_unit_vector(&mut seeded_rng(7), 5);
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simplex_projection() {
        let p = project_to_simplex(&[0.5, 0.2, 0.3]);
        assert_eq!(p, vec![0.5, 0.2, 0.3]);
        let p = project_to_simplex(&[2.0, 0.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = project_to_simplex(&[0.6, 0.6]);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }
}
