//! Pretty-good measurement `Pi_j = p_j rho^(-1/2) |phi_j><phi_j| rho^(-1/2)`
//! for arbitrary pure-state ensembles.

use nalgebra::{DMatrix, DVector};

use super::{Discrimination, DiscriminationReport, Outcome, Parameters, Povm, PovmElement, Strategy};
use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eig, inv_sqrt_on_support, orthonormal_basis, DenseOperator, C64};
use crate::model::{sites_of_dim, HypothesisEnsemble};

/// Eigenvalues of `rho` (or of the weighted Gram matrix) below this are
/// treated as outside the support.
pub const GRAM_SUPPORT_TOL: f64 = 1e-12;

/// PGM elements in the full space plus a never-firing complement.
///
/// `rho` is diagonalized on an orthonormal basis of the ensemble span, so the
/// eigenproblem has the size of the ensemble rather than of the space.
pub fn pgm_povm(ensemble: &HypothesisEnsemble) -> Result<Povm> {
    let dim = ensemble.dim();
    let weighted: Vec<DVector<C64>> =
        ensemble.states().iter().zip(ensemble.priors()).map(|(s, &p)| s.vector() * c(p.sqrt(), 0.0)).collect();
    let refs: Vec<&DVector<C64>> = weighted.iter().collect();
    let basis = orthonormal_basis(&refs, GRAM_SUPPORT_TOL);
    let r = basis.len();
    if r == 0 {
        return Err(Error::ZeroNorm);
    }
    let coords = DMatrix::from_fn(r, weighted.len(), |a, j| basis[a].dotc(&weighted[j]));
    let rho = DenseOperator::new(&coords * coords.adjoint())?;
    let isq = inv_sqrt_on_support(&rho, GRAM_SUPPORT_TOL)?;
    let mu = isq.matrix() * &coords;
    let mut elements = Vec::with_capacity(weighted.len());
    let mut outcomes = Vec::with_capacity(weighted.len());
    for (j, &label) in ensemble.labels().iter().enumerate() {
        let mut v = DVector::<C64>::zeros(dim);
        for (a, q) in basis.iter().enumerate() {
            v.axpy(mu[(a, j)], q, c(1.0, 0.0));
        }
        elements.push(PovmElement::rank_one(v, 1.0));
        outcomes.push(Outcome::Hypothesis(label));
    }
    Povm::completed(dim, elements, outcomes, Outcome::Unassigned)
}

/// PGM for an arbitrary ensemble, evaluated with the Born rule in the full
/// space. The report's `theta` is left at 0 since the ensemble does not
/// carry it; callers that know it overwrite `report.parameters`.
pub fn pgm_numeric(ensemble: &HypothesisEnsemble) -> Result<Discrimination> {
    let povm = pgm_povm(ensemble)?;
    let probs = povm.probabilities(ensemble)?;
    let vectors: Vec<&DVector<C64>> = ensemble.states().iter().map(|s| s.vector()).collect();
    let g = crate::linalg::gram_of_vectors(&vectors);
    let gram_success = pgm_success_from_gram(&g, ensemble.priors(), Some(ensemble.labels()))?;
    let params = Parameters {
        n: sites_of_dim(ensemble.dim()).unwrap_or(ensemble.len()),
        k: None,
        theta: 0.0,
        p: ensemble.includes_null().then(|| ensemble.priors()[0]),
        probe: None,
        priors: ensemble.priors().to_vec(),
    };
    let report = DiscriminationReport::new(Strategy::PgmNumeric, params, None, probs)
        .with_note(format!("gram-space success = {gram_success:.17e}"));
    Ok(Discrimination { report, povm: Some(povm) })
}

/// PGM success from the Gram matrix alone: with `G~_ij = sqrt(p_i p_j) G_ij`,
/// the probability that state `i` yields outcome `j` (times `p_i`) is
/// `|(G~^(1/2))_ij|^2`. `labels = None` means every state is its own
/// hypothesis.
pub fn pgm_success_from_gram(gram: &DMatrix<C64>, priors: &[f64], labels: Option<&[usize]>) -> Result<f64> {
    let m = gram.nrows();
    if gram.ncols() != m {
        return Err(Error::NotSquare { rows: m, cols: gram.ncols() });
    }
    if priors.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: priors.len() });
    }
    if let Some(l) = labels {
        if l.len() != m {
            return Err(Error::LengthMismatch { expected: m, found: l.len() });
        }
    }
    let weighted = DMatrix::from_fn(m, m, |i, j| gram[(i, j)] * (priors[i] * priors[j]).sqrt());
    let eig = hermitian_eig(&DenseOperator::new(weighted)?)?;
    if let Some(&min) = eig.eigenvalues.last() {
        if min < -GRAM_SUPPORT_TOL {
            return Err(Error::NotPositive(min));
        }
    }
    let root = eig.spectral_map(|x| if x > 0.0 { x.sqrt() } else { 0.0 });
    let root = root.matrix();
    let same = |i: usize, j: usize| labels.map_or(i == j, |l| l[i] == l[j]);
    let mut success = 0.0;
    for i in 0..m {
        for j in 0..m {
            if same(i, j) {
                success += root[(i, j)].norm_sqr();
            }
        }
    }
    Ok(success)
}

/// PGM success for `N` equiprobable states whose Gram matrix is circulant
/// with the given first row. Eigenvalues come from a discrete Fourier
/// transform of the row, so the cost is `O(N^2)` with no eigensolver.
pub fn pgm_success_circulant(first_row: &[C64]) -> f64 {
    let n = first_row.len();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let mut diag = 0.0;
    for m in 0..n {
        let mut lambda = C64::default();
        for (k, &g) in first_row.iter().enumerate() {
            let angle = 2.0 * std::f64::consts::PI * ((m * k) % n) as f64 / nf;
            lambda += g * C64::from_polar(1.0, angle);
        }
        diag += (lambda.re.max(0.0) / nf).sqrt();
    }
    diag /= nf;
    nf * diag * diag
}
