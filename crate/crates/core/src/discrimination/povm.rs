//! Measurement operators stored as `a I + sum_i w_i |v_i><v_i|`.
//!
//! Every POVM built here is a handful of rank-one effects plus the complement
//! `I - sum Pi_j`, so this form stays exact while never materializing a
//! `2^N x 2^N` matrix. Checks run on the span of all stored vectors, where
//! the operators act nontrivially; on its orthogonal complement each element
//! is just its identity coefficient.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eig, orthonormal_basis, DenseOperator, Ket, C64};
use crate::model::HypothesisEnsemble;

/// `identity * I + sum_i weight_i |v_i><v_i|` on a `dim`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    dim: usize,
    identity: f64,
    terms: Vec<(f64, DVector<C64>)>,
}

impl PovmElement {
    pub fn zero(dim: usize) -> Self {
        Self { dim, identity: 0.0, terms: Vec::new() }
    }

    /// `weight |v><v|` for an arbitrary (not necessarily unit) vector.
    pub fn rank_one(v: DVector<C64>, weight: f64) -> Self {
        Self { dim: v.len(), identity: 0.0, terms: vec![(weight, v)] }
    }

    pub fn projector(k: &Ket) -> Self {
        Self::rank_one(k.vector().clone(), 1.0)
    }

    /// Orthogonal projector onto the span of orthonormal `vectors`.
    pub fn projector_onto(dim: usize, vectors: &[Ket]) -> Self {
        Self { dim, identity: 0.0, terms: vectors.iter().map(|k| (1.0, k.vector().clone())).collect() }
    }

    /// `I - sum elements`.
    pub fn complement_of(dim: usize, elements: &[PovmElement]) -> Self {
        let identity = 1.0 - elements.iter().map(|e| e.identity).sum::<f64>();
        let terms = elements.iter().flat_map(|e| e.terms.iter().map(|(w, v)| (-w, v.clone()))).collect();
        Self { dim, identity, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.identity
    }

    pub fn terms(&self) -> &[(f64, DVector<C64>)] {
        &self.terms
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            identity: self.identity * s,
            terms: self.terms.iter().map(|(w, v)| (w * s, v.clone())).collect(),
        }
    }

    /// `<psi|E|psi>` for a raw vector.
    pub fn expectation(&self, psi: &DVector<C64>) -> f64 {
        let mut total = self.identity * psi.norm_squared();
        for (w, v) in &self.terms {
            total += w * v.dotc(psi).norm_sqr();
        }
        total
    }

    pub fn to_dense(&self) -> DenseOperator {
        let mut m = DMatrix::<C64>::identity(self.dim, self.dim) * c(self.identity, 0.0);
        for (w, v) in &self.terms {
            m += v * v.adjoint() * c(*w, 0.0);
        }
        DenseOperator::new(m).expect("square by construction")
    }

    /// Matrix of the element in the orthonormal `basis` (spanning all of its
    /// term vectors).
    fn compress(&self, basis: &[DVector<C64>]) -> DMatrix<C64> {
        let r = basis.len();
        let mut m = DMatrix::<C64>::identity(r, r) * c(self.identity, 0.0);
        for (w, v) in &self.terms {
            let coords = DVector::from_iterator(r, basis.iter().map(|q| q.dotc(v)));
            m += &coords * coords.adjoint() * c(*w, 0.0);
        }
        m
    }
}

/// What a POVM outcome reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Names hypothesis label `i`.
    Hypothesis(usize),
    /// Inconclusive result of an unambiguous scheme.
    Failure,
    /// Never fires under any hypothesis; counted as an error if it does.
    Unassigned,
}

/// Success, failure and error probabilities under a prior-weighted ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probabilities {
    pub success: f64,
    pub failure: f64,
    pub error: f64,
}

impl Probabilities {
    pub fn total(&self) -> f64 {
        self.success + self.failure + self.error
    }
}

/// A measurement together with the default meaning of each outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<PovmElement>,
    outcomes: Vec<Outcome>,
}

/// Structural summary of a POVM on the span of its term vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmSpectrum {
    /// Smallest eigenvalue of each element.
    pub min_eigenvalues: Vec<f64>,
    /// Spectral norm of `sum Pi_j - I`; bounds every entry of that matrix.
    pub completeness_deviation: f64,
}

impl Povm {
    pub fn new(dim: usize, elements: Vec<PovmElement>, outcomes: Vec<Outcome>) -> Result<Self> {
        if elements.len() != outcomes.len() {
            return Err(Error::LengthMismatch { expected: elements.len(), found: outcomes.len() });
        }
        if let Some(bad) = elements.iter().find(|e| e.dim != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim });
        }
        Ok(Self { dim, elements, outcomes })
    }

    /// Appends `I - sum elements` with outcome `complement`.
    pub fn completed(
        dim: usize,
        mut elements: Vec<PovmElement>,
        mut outcomes: Vec<Outcome>,
        complement: Outcome,
    ) -> Result<Self> {
        let rest = PovmElement::complement_of(dim, &elements);
        elements.push(rest);
        outcomes.push(complement);
        Self::new(dim, elements, outcomes)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn elements_mut(&mut self) -> &mut [PovmElement] {
        &mut self.elements
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn failure_index(&self) -> Option<usize> {
        self.outcomes.iter().position(|o| *o == Outcome::Failure)
    }

    /// Element spectra and completeness, computed on an orthonormal basis of
    /// the span of every term vector.
    pub fn spectrum(&self) -> Result<PovmSpectrum> {
        let vectors: Vec<&DVector<C64>> = self.elements.iter().flat_map(|e| e.terms.iter().map(|(_, v)| v)).collect();
        let basis = orthonormal_basis(&vectors, 1e-12);
        let r = basis.len();
        let outside = self.dim > r;
        let mut min_eigenvalues = Vec::with_capacity(self.elements.len());
        let mut sum = DMatrix::<C64>::zeros(r, r);
        for e in &self.elements {
            let m = e.compress(&basis);
            let mut min = if outside { e.identity } else { f64::INFINITY };
            if r > 0 {
                let op = DenseOperator::new(m.clone())?;
                let eig = hermitian_eig(&op)?;
                min = min.min(*eig.eigenvalues.last().expect("r > 0"));
            }
            min_eigenvalues.push(min);
            sum += m;
        }
        let mut dev = 0.0f64;
        if r > 0 {
            let diff = DenseOperator::new(sum - DMatrix::<C64>::identity(r, r))?;
            let eig = hermitian_eig(&diff)?;
            dev = eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
        }
        if outside {
            let id_sum: f64 = self.elements.iter().map(|e| e.identity).sum();
            dev = dev.max((id_sum - 1.0).abs());
        }
        Ok(PovmSpectrum { min_eigenvalues, completeness_deviation: dev })
    }

    pub fn to_dense(&self) -> Vec<DenseOperator> {
        self.elements.iter().map(PovmElement::to_dense).collect()
    }

    /// Born-rule probabilities with the POVM's own outcome map.
    pub fn probabilities(&self, ensemble: &HypothesisEnsemble) -> Result<Probabilities> {
        self.probabilities_with(ensemble, &self.outcomes)
    }

    /// Born-rule probabilities with an explicit outcome map.
    pub fn probabilities_with(&self, ensemble: &HypothesisEnsemble, outcomes: &[Outcome]) -> Result<Probabilities> {
        if outcomes.len() != self.elements.len() {
            return Err(Error::LengthMismatch { expected: self.elements.len(), found: outcomes.len() });
        }
        if ensemble.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: ensemble.dim() });
        }
        let mut p = Probabilities { success: 0.0, failure: 0.0, error: 0.0 };
        for ((state, &prior), &label) in ensemble.states().iter().zip(ensemble.priors()).zip(ensemble.labels()) {
            if prior == 0.0 {
                continue;
            }
            for (e, outcome) in self.elements.iter().zip(outcomes) {
                let q = prior * e.expectation(state.vector());
                match *outcome {
                    Outcome::Hypothesis(h) if h == label => p.success += q,
                    Outcome::Failure => p.failure += q,
                    _ => p.error += q,
                }
            }
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn basis_povm() -> Povm {
        let e0 = PovmElement::projector(&Ket::basis(3, 0));
        let e1 = PovmElement::projector(&Ket::basis(3, 1));
        Povm::completed(3, vec![e0, e1], vec![Outcome::Hypothesis(0), Outcome::Hypothesis(1)], Outcome::Failure)
            .unwrap()
    }

    #[test]
    fn complement_completes() {
        let povm = basis_povm();
        let spec = povm.spectrum().unwrap();
        assert!(spec.completeness_deviation < 1e-15);
        for m in spec.min_eigenvalues {
            assert!(m >= -1e-15);
        }
        let dense: Vec<_> = povm.to_dense();
        let total = dense.iter().skip(1).fold(dense[0].clone(), |acc, d| acc.add(d).unwrap());
        assert!(total.max_abs_diff(&DenseOperator::identity(3)) < 1e-15);
        assert_eq!(povm.failure_index(), Some(2));
    }

    #[test]
    fn scaled_element_breaks_completeness() {
        let mut povm = basis_povm();
        povm.elements_mut()[0] = povm.elements()[0].scaled(1.01);
        assert!((povm.spectrum().unwrap().completeness_deviation - 0.01).abs() < 1e-12);
    }

    #[test]
    fn negative_element_detected() {
        let v = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let povm =
            Povm::completed(2, vec![PovmElement::rank_one(v, 0.9)], vec![Outcome::Hypothesis(0)], Outcome::Failure)
                .unwrap();
        let spec = povm.spectrum().unwrap();
        assert_abs_diff_eq!(spec.min_eigenvalues[1], 1.0 - 1.8, epsilon = 1e-14);
    }

    #[test]
    fn born_rule_bookkeeping() {
        let povm = basis_povm();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mixed = Ket::new(vec![c(s, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let ens = HypothesisEnsemble::new(vec![Ket::basis(3, 0), mixed], vec![0.5, 0.5], false).unwrap();
        let p = povm.probabilities(&ens).unwrap();
        assert_abs_diff_eq!(p.success, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.failure, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p.error, 0.25, epsilon = 1e-15);
        assert!(povm.probabilities_with(&ens, &[Outcome::Failure]).is_err());
    }
}
