//! Dense complex linear algebra used throughout the crate.
//!
//! States are [`Ket`]s (unit vectors) and operators are [`DenseOperator`]s
//! carrying verified structural flags. Each qubit's computational basis is the
//! eigenbasis `{|u+>, |u->}` of the phase unitary, with index 0 for `|u+>`;
//! site 1 is the most significant tensor factor.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for structural flags (hermitian, unitary, normalized).
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Tolerance for spectral comparisons.
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Lowest eigenvalue still accepted as positive.
pub const POSITIVITY_SLACK: f64 = -1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A unit vector in a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: DVector<C64>,
}

impl Ket {
    /// Normalizes `amplitudes` into a ket.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amplitudes))
    }

    pub fn from_vector(v: DVector<C64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let norm = v.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { amplitudes: v / c(norm, 0.0) })
    }

    /// Wraps amplitudes that must already have unit norm.
    pub fn from_normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if v.is_empty() || (norm - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes: v })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = DVector::zeros(dim);
        v[index] = c(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amplitudes.as_slice()
    }

    pub fn vector(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_vector(self) -> DVector<C64> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> DenseOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DenseOperator { matrix: m, flags: OpFlags { hermitian: true, unitary: false, positive: true } }
    }
}

/// Structural properties that have been checked on an operator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpFlags {
    pub hermitian: bool,
    pub unitary: bool,
    pub positive: bool,
}

/// A square complex matrix with verified structural flags.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<C64>,
    flags: OpFlags,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        Ok(Self { matrix, flags: OpFlags::default() })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim), flags: OpFlags { hermitian: true, unitary: true, positive: true } }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: DMatrix::zeros(dim, dim), flags: OpFlags { hermitian: true, unitary: false, positive: true } }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let matrix = DMatrix::from_diagonal(&DVector::from_row_slice(diag));
        Self { matrix, flags: OpFlags::default() }
    }

    /// `|a><b|`.
    pub fn outer(a: &DVector<C64>, b: &DVector<C64>) -> Self {
        Self { matrix: a * b.adjoint(), flags: OpFlags::default() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn flags(&self) -> OpFlags {
        self.flags
    }

    pub fn is_hermitian(&self) -> bool {
        self.flags.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.flags.unitary
    }

    pub fn is_positive(&self) -> bool {
        self.flags.positive
    }

    /// Largest entry of `|A - A^dagger|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entry of `|A^dagger A - I|`.
    pub fn unitary_deviation(&self) -> f64 {
        let n = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<C64>::identity(n, n);
        (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Checks and records the hermitian flag.
    pub fn with_hermitian(mut self) -> Result<Self> {
        let dev = self.hermitian_deviation();
        if dev > STRUCTURE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        self.flags.hermitian = true;
        Ok(self)
    }

    pub fn with_unitary(mut self) -> Result<Self> {
        let dev = self.unitary_deviation();
        if dev > STRUCTURE_TOL {
            return Err(Error::NotUnitary(dev));
        }
        self.flags.unitary = true;
        Ok(self)
    }

    /// Checks hermiticity and that the smallest eigenvalue is at least
    /// [`POSITIVITY_SLACK`].
    pub fn with_positive(self) -> Result<Self> {
        let mut op = self.with_hermitian()?;
        let min = op.min_eigenvalue()?;
        if min < POSITIVITY_SLACK {
            return Err(Error::NotPositive(min));
        }
        op.flags.positive = true;
        Ok(op)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = hermitian_eig(self)?;
        Ok(eig.eigenvalues.last().copied().unwrap_or(0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), flags: self.flags }
    }

    /// `A |v>` on a raw vector.
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    /// `<psi| A |psi>`.
    pub fn expectation(&self, psi: &Ket) -> C64 {
        psi.vector().dotc(&(&self.matrix * psi.vector()))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut flags = OpFlags { hermitian: self.flags.hermitian, ..OpFlags::default() };
        flags.positive = self.flags.positive && s >= 0.0;
        Self { matrix: &self.matrix * c(s, 0.0), flags }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let flags = OpFlags {
            hermitian: self.flags.hermitian && other.flags.hermitian,
            unitary: false,
            positive: self.flags.positive && other.flags.positive,
        };
        Ok(Self { matrix: &self.matrix + &other.matrix, flags })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let flags = OpFlags { hermitian: self.flags.hermitian && other.flags.hermitian, ..OpFlags::default() };
        Ok(Self { matrix: &self.matrix - &other.matrix, flags })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let flags = OpFlags { unitary: self.flags.unitary && other.flags.unitary, ..OpFlags::default() };
        Ok(Self { matrix: &self.matrix * &other.matrix, flags })
    }

    /// Largest entry of `|A - B|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Ket>,
}

impl EigenDecomposition {
    /// `sum_i f(lambda_i) |v_i><v_i|`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> DenseOperator {
        let dim = self.eigenvectors.first().map_or(0, Ket::dim);
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for (&lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(lambda);
            if w != 0.0 {
                m += v.vector() * v.vector().adjoint() * c(w, 0.0);
            }
        }
        DenseOperator { matrix: m, flags: OpFlags { hermitian: true, ..OpFlags::default() } }
    }

    pub fn reconstruct(&self) -> DenseOperator {
        self.spectral_map(|x| x)
    }
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    let flags = OpFlags {
        hermitian: a.flags.hermitian && b.flags.hermitian,
        unitary: a.flags.unitary && b.flags.unitary,
        positive: a.flags.positive && b.flags.positive,
    };
    DenseOperator { matrix: a.matrix.kronecker(&b.matrix), flags }
}

/// Applies the 2x2 matrix `u` to qubit `site` (1-based, site 1 most
/// significant) of a raw `n_sites`-qubit amplitude vector in place.
pub(crate) fn apply_site_in_place(amps: &mut [C64], u: &[[C64; 2]; 2], site: usize, n_sites: usize) {
    let stride = 1usize << (n_sites - site);
    let block = stride << 1;
    for base in (0..amps.len()).step_by(block) {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = u[0][0] * a0 + u[0][1] * a1;
            amps[i + stride] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

/// Multiplies each basis amplitude by `phase(bit)` of its `site` qubit.
pub(crate) fn apply_site_phases(amps: &mut [C64], phases: [C64; 2], site: usize, n_sites: usize) {
    let shift = n_sites - site;
    for (idx, a) in amps.iter_mut().enumerate() {
        *a *= phases[(idx >> shift) & 1];
    }
}

fn as_2x2(u: &DenseOperator) -> Result<[[C64; 2]; 2]> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: u.dim() });
    }
    let m = u.matrix();
    Ok([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
}

/// Returns `F_site |state>` where `F_site = I^(site-1) (x) u (x) I^(n_sites-site)`,
/// without building the full operator.
pub fn apply_site_unitary(state: &Ket, u: &DenseOperator, site: usize, n_sites: usize) -> Result<Ket> {
    let expected = 1usize
        .checked_shl(n_sites as u32)
        .filter(|_| n_sites < usize::BITS as usize)
        .ok_or(Error::DimensionMismatch { expected: usize::MAX, found: state.dim() })?;
    if state.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: state.dim() });
    }
    if site == 0 || site > n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    let u2 = as_2x2(u)?;
    let dev = u.unitary_deviation();
    if dev > STRUCTURE_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let mut amps = state.vector().clone();
    apply_site_in_place(amps.as_mut_slice(), &u2, site, n_sites);
    Ok(Ket { amplitudes: amps })
}

/// Spectral decomposition of a Hermitian operator, eigenvalues descending.
pub fn hermitian_eig(a: &DenseOperator) -> Result<EigenDecomposition> {
    let dev = a.hermitian_deviation();
    if dev > STRUCTURE_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = a.dim();
    let m = a.matrix();
    let sym = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| {
        let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        faer::c64::new(z.re, z.im)
    });
    let eig = sym.self_adjoint_eigen(faer::Side::Lower).map_err(|_| Error::NoConvergence)?;
    let (values, vectors) = (eig.S().column_vector(), eig.U());
    if (0..n).any(|i| !values[i].re.is_finite()) {
        return Err(Error::NoConvergence);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].re.total_cmp(&values[i].re));
    let eigenvalues = order.iter().map(|&i| values[i].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| Ket::from_vector(DVector::from_fn(n, |r, _| c(vectors[(r, i)].re, vectors[(r, i)].im))))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

/// `||A||_1 = sum_i |lambda_i|` for Hermitian `A`.
pub fn trace_norm(a: &DenseOperator) -> Result<f64> {
    Ok(hermitian_eig(a)?.eigenvalues.iter().map(|x| x.abs()).sum())
}

/// Pseudo-inverse square root: eigenvalues `>= tol` map to `lambda^(-1/2)`,
/// the rest to zero.
pub fn inv_sqrt_on_support(rho: &DenseOperator, tol: f64) -> Result<DenseOperator> {
    let eig = hermitian_eig(rho)?;
    if let Some(&min) = eig.eigenvalues.last() {
        if min < -tol {
            return Err(Error::NotPositive(min));
        }
    }
    let mut out = eig.spectral_map(|x| if x >= tol { x.sqrt().recip() } else { 0.0 });
    out.flags.positive = true;
    Ok(out)
}

/// Gram matrix `G_jk = <s_j|s_k>`.
pub fn gram(states: &[Ket]) -> Result<DenseOperator> {
    let dim = states.first().map_or(0, Ket::dim);
    if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    let vectors: Vec<&DVector<C64>> = states.iter().map(Ket::vector).collect();
    let g = gram_of_vectors(&vectors);
    DenseOperator::new(g)?.with_positive()
}

/// `G_jk = <v_j|v_k>` for raw vectors of equal length.
pub(crate) fn gram_of_vectors(vectors: &[&DVector<C64>]) -> DMatrix<C64> {
    let m = vectors.len();
    let mut g = DMatrix::<C64>::zeros(m, m);
    for j in 0..m {
        for k in j..m {
            let z = vectors[j].dotc(vectors[k]);
            g[(j, k)] = z;
            g[(k, j)] = z.conj();
        }
    }
    g
}

/// Orthonormal basis of `span(vectors)` by modified Gram-Schmidt with one
/// reorthogonalization pass. Residuals below `tol` (relative to the input
/// norm) are treated as linearly dependent and dropped.
pub(crate) fn orthonormal_basis(vectors: &[&DVector<C64>], tol: f64) -> Vec<DVector<C64>> {
    let mut basis: Vec<DVector<C64>> = Vec::new();
    for v in vectors {
        let scale = v.norm();
        if scale == 0.0 {
            continue;
        }
        let mut r = (*v).clone();
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&r);
                r.axpy(-proj, q, c(1.0, 0.0));
            }
        }
        let n = r.norm();
        if n > tol * scale {
            basis.push(r / c(n, 0.0));
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn herm(entries: &[[f64; 3]]) -> DenseOperator {
        let n = entries.len();
        DenseOperator::new(DMatrix::from_fn(n, n, |i, j| c(entries[i][j], 0.0))).unwrap().with_hermitian().unwrap()
    }

    #[test]
    fn ket_normalizes_and_rejects_zero() {
        let k = Ket::new(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert_abs_diff_eq!(k.vector().norm(), 1.0, epsilon = 1e-15);
        assert_eq!(Ket::new(vec![C64::default(); 3]), Err(Error::ZeroNorm));
        assert!(Ket::from_normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn identity_kron_identity() {
        let i4 = kron(&DenseOperator::identity(2), &DenseOperator::identity(2));
        assert_eq!(i4.matrix(), &DMatrix::<C64>::identity(4, 4));
        assert!(i4.is_unitary() && i4.is_hermitian());
    }

    #[test]
    fn phase_kron_identity_spectrum() {
        let t = std::f64::consts::FRAC_PI_4;
        let u =
            DenseOperator::from_diagonal(&[C64::from_polar(1.0, t), C64::from_polar(1.0, -t)]).with_unitary().unwrap();
        let big = kron(&u, &DenseOperator::identity(2));
        assert!(big.is_unitary());
        let diag: Vec<C64> = (0..4).map(|i| big.matrix()[(i, i)]).collect();
        let plus = diag.iter().filter(|z| (**z - C64::from_polar(1.0, t)).norm() < 1e-15).count();
        let minus = diag.iter().filter(|z| (**z - C64::from_polar(1.0, -t)).norm() < 1e-15).count();
        assert_eq!((plus, minus), (2, 2));
    }

    #[test]
    fn site_unitary_identity_and_diagonal() {
        let psi = Ket::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let same = apply_site_unitary(&psi, &DenseOperator::identity(2), 1, 2).unwrap();
        assert_eq!(same, psi);

        let theta = 0.3;
        let u = DenseOperator::from_diagonal(&[C64::from_polar(1.0, theta), C64::from_polar(1.0, -theta)]);
        let out = apply_site_unitary(&psi, &u, 1, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!((out.amplitudes()[1] - C64::from_polar(s, theta)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((out.amplitudes()[2] - C64::from_polar(s, -theta)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn site_unitary_errors() {
        let psi = Ket::basis(4, 0);
        let id = DenseOperator::identity(2);
        assert_eq!(apply_site_unitary(&psi, &id, 3, 2), Err(Error::SiteOutOfRange { site: 3, n_sites: 2 }));
        assert_eq!(apply_site_unitary(&psi, &id, 0, 2), Err(Error::SiteOutOfRange { site: 0, n_sites: 2 }));
        assert!(matches!(apply_site_unitary(&psi, &id, 1, 3), Err(Error::DimensionMismatch { expected: 8, found: 4 })));
        let not_unitary = DenseOperator::identity(2).scale(2.0);
        assert!(matches!(apply_site_unitary(&psi, &not_unitary, 1, 2), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn eig_of_diagonal_is_sorted() {
        let eig = hermitian_eig(&herm(&[[1.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, -2.0]])).unwrap();
        assert_eq!(eig.eigenvalues.len(), 3);
        for (got, want) in eig.eigenvalues.iter().zip([3.0, 1.0, -2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a =
            DenseOperator::new(DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]))
                .unwrap();
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian(_))));
        assert!(matches!(trace_norm(&a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn trace_norm_simple_cases() {
        assert_abs_diff_eq!(trace_norm(&DenseOperator::identity(2)).unwrap(), 2.0, epsilon = 1e-14);
        let k = Ket::new(vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(trace_norm(&k.projector()).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn inv_sqrt_restricts_to_support() {
        let i3 = DenseOperator::identity(3);
        assert!(inv_sqrt_on_support(&i3, 1e-12).unwrap().max_abs_diff(&i3) < 1e-14);

        let rho = DenseOperator::from_diagonal(&[c(4.0, 0.0), c(0.0, 0.0)]).with_positive().unwrap();
        let out = inv_sqrt_on_support(&rho, 1e-12).unwrap();
        let want = DenseOperator::from_diagonal(&[c(0.5, 0.0), c(0.0, 0.0)]);
        assert!(out.max_abs_diff(&want) < 1e-14);

        let neg = DenseOperator::from_diagonal(&[c(1.0, 0.0), c(-0.1, 0.0)]);
        assert!(matches!(inv_sqrt_on_support(&neg, 1e-12), Err(Error::NotPositive(_))));
    }

    #[test]
    fn gram_of_orthonormal_and_repeated_states() {
        let basis: Vec<Ket> = (0..3).map(|i| Ket::basis(3, i)).collect();
        assert!(gram(&basis).unwrap().max_abs_diff(&DenseOperator::identity(3)) < 1e-15);

        let k = Ket::new(vec![c(1.0, 1.0), c(0.5, -2.0)]).unwrap();
        let g = gram(&[k.clone(), k]).unwrap();
        for z in g.matrix().iter() {
            assert_abs_diff_eq!((*z - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        }
        assert!(matches!(gram(&[Ket::basis(2, 0), Ket::basis(3, 0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn orthonormal_basis_drops_dependent_vectors() {
        let a = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let b = DVector::from_vec(vec![c(0.0, 2.0), c(0.0, 2.0), c(0.0, 0.0)]);
        let d = DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let q = orthonormal_basis(&[&a, &b, &d], 1e-12);
        assert_eq!(q.len(), 2);
        assert_abs_diff_eq!(q[0].dotc(&q[1]).norm(), 0.0, epsilon = 1e-15);
    }
}
