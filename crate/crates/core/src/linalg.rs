//! Dense complex linear algebra over labelled finite-dimensional Hilbert spaces.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrinityError};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// A tensor-product Hilbert space with named factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpace {
    pub label: String,
    pub factors: Vec<(String, usize)>,
}

impl HilbertSpace {
    pub fn new(label: impl Into<String>, dim: usize) -> Result<Self> {
        let label = label.into();
        if dim == 0 {
            return Err(TrinityError::InvalidSpace(format!("`{label}` has dimension 0")));
        }
        Ok(Self { factors: vec![(label.clone(), dim)], label })
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| *d).product()
    }

    /// Product space `self ⊗ other`; factor labels must be disjoint.
    pub fn product(&self, other: &HilbertSpace) -> Result<Self> {
        for (l, _) in &other.factors {
            if self.factors.iter().any(|(m, _)| m == l) {
                return Err(TrinityError::LabelCollision(l.clone()));
            }
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Ok(Self { label: format!("{}⊗{}", self.label, other.label), factors })
    }
}

/// A dense operator acting on a labelled space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub space: HilbertSpace,
    pub matrix: CMat,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: CMat) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(TrinityError::DimensionMismatch { expected: d, got: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self { space, matrix: CMat::identity(d, d) }
    }

    pub fn from_real_diagonal(space: HilbertSpace, diag: &[f64]) -> Result<Self> {
        let m = CMat::from_diagonal(&CVec::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0))));
        Self::new(space, m)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    /// Checks Hermiticity to `1e-10·max(1, ‖h‖)`.
    pub fn require_hermitian(&self) -> Result<()> {
        require_hermitian(&self.matrix)
    }
}

/// A kinematical state vector; normalization is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub space: HilbertSpace,
    pub amplitudes: CVec,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amplitudes: CVec) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(TrinityError::DimensionMismatch { expected: space.dim(), got: amplitudes.len() });
        }
        Ok(Self { space, amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
    pub degeneracy_blocks: Vec<Range<usize>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> CMat {
        self.function(|x| Complex64::new(x, 0.0))
    }

    /// `f(H) = V f(Λ) V†`.
    pub fn function(&self, f: impl Fn(f64) -> Complex64) -> CMat {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let c = f(lam);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= c;
            }
        }
        &scaled * v.adjoint()
    }

    /// `e^{-iHt}`.
    pub fn evolve(&self, t: f64) -> CMat {
        self.function(|x| cis(-x * t))
    }

    /// Projector onto the eigenvectors whose eigenvalue satisfies `pred`.
    pub fn projector_where(&self, pred: impl Fn(f64) -> bool) -> CMat {
        self.function(|x| if pred(x) { ONE } else { ZERO })
    }
}

pub fn frobenius(m: &CMat) -> f64 {
    m.norm()
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

fn require_hermitian(m: &CMat) -> Result<()> {
    let defect = hermiticity_defect(m);
    let tol = 1e-10 * m.norm().max(1.0);
    if defect > tol {
        return Err(TrinityError::NonHermitian { defect, tol });
    }
    Ok(())
}

/// Kronecker product of raw matrices.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// `A ⊗ B` on the product space.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    let space = a.space.product(&b.space)?;
    Ok(Operator { space, matrix: kron(&a.matrix, &b.matrix) })
}

/// Default degeneracy tolerance `1e-9·max(1, ‖H‖)`.
pub fn default_tol_eig(m: &CMat) -> f64 {
    1e-9 * m.norm().max(1.0)
}

/// Hermitian eigendecomposition of an operator.
pub fn eig(h: &Operator) -> Result<SpectralDecomposition> {
    eig_matrix(&h.matrix, default_tol_eig(&h.matrix))
}

/// Hermitian eigendecomposition of a raw matrix with degeneracy tolerance `tol_eig`.
///
/// Eigenvalues are ascending. Each eigenvector is rephased so that its first
/// component of largest modulus is real and positive.
pub fn eig_matrix(m: &CMat, tol_eig: f64) -> Result<SpectralDecomposition> {
    require_hermitian(m)?;
    let n = m.nrows();
    let herm = (m + m.adjoint()).scale(0.5);
    let se = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = se.eigenvectors.column(src);
        let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = col.iter().position(|z| z.norm() >= max * (1.0 - 1e-12)).unwrap_or(0);
        let phase = if col[pivot].norm() > 0.0 { col[pivot].conj() / col[pivot].norm() } else { ONE };
        for i in 0..n {
            vecs[(i, dst)] = col[i] * phase;
        }
    }
    let degeneracy_blocks = group_blocks(&eigenvalues, tol_eig);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors: vecs, degeneracy_blocks })
}

/// Groups ascending values into runs whose consecutive gaps are `≤ tol`.
pub fn group_blocks(sorted: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || (sorted[i] - sorted[i - 1]).abs() > tol {
            if i > start {
                blocks.push(start..i);
            }
            start = i;
        }
    }
    blocks
}

/// `e^{-iht}` via the spectral decomposition.
pub fn evolve(h: &Operator, t: f64) -> Result<Operator> {
    let sd = eig(h)?;
    Ok(Operator { space: h.space.clone(), matrix: sd.evolve(t) })
}

/// Orthogonal projector onto the eigenvectors of `h` with `|λ| ≤ tol_zero`.
pub fn kernel_projector(h: &Operator, tol_zero: f64) -> Result<Operator> {
    let sd = eig(h)?;
    Ok(Operator { space: h.space.clone(), matrix: sd.projector_where(|x| x.abs() <= tol_zero) })
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// `P X P`.
pub fn sandwich(p: &CMat, x: &CMat) -> CMat {
    p * x * p
}

pub fn outer(a: &CVec, b: &CVec) -> CMat {
    a * b.adjoint()
}

pub fn inner(a: &CVec, b: &CVec) -> Complex64 {
    a.dotc(b)
}

/// Reduced density matrix of a bipartite pure state `ψ ∈ 𝓗_1 ⊗ 𝓗_2` (row-major index `i·d2 + j`).
pub fn reduced_density(psi: &CVec, d1: usize, d2: usize, keep_first: bool) -> CMat {
    assert_eq!(psi.len(), d1 * d2);
    let m = CMat::from_fn(d1, d2, |i, j| psi[i * d2 + j]);
    if keep_first {
        &m * m.adjoint()
    } else {
        (m.adjoint() * &m).transpose()
    }
}

/// Partial trace of a bipartite density matrix over one factor.
pub fn partial_trace(rho: &CMat, d1: usize, d2: usize, keep_first: bool) -> CMat {
    assert_eq!(rho.nrows(), d1 * d2);
    if keep_first {
        CMat::from_fn(d1, d1, |i, k| (0..d2).map(|j| rho[(i * d2 + j, k * d2 + j)]).sum())
    } else {
        CMat::from_fn(d2, d2, |j, l| (0..d1).map(|i| rho[(i * d2 + j, i * d2 + l)]).sum())
    }
}

/// Schmidt coefficients (singular values, descending) of a bipartite vector.
pub fn schmidt_coefficients(psi: &CVec, d1: usize, d2: usize) -> Vec<f64> {
    let m = CMat::from_fn(d1, d2, |i, j| psi[i * d2 + j]);
    let mut s: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of Schmidt coefficients above `rel_tol·s_max`.
pub fn schmidt_rank(psi: &CVec, d1: usize, d2: usize, rel_tol: f64) -> usize {
    let s = schmidt_coefficients(psi, d1, d2);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Square root of a positive semidefinite Hermitian matrix (negative eigenvalues clamped).
pub fn sqrt_psd(m: &CMat) -> Result<CMat> {
    let sd = eig_matrix(m, default_tol_eig(m))?;
    Ok(sd.function(|x| Complex64::new(x.max(0.0).sqrt(), 0.0)))
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
///
/// Eigenvalues of `√ρ σ √ρ` at round-off level are dropped before the square
/// root, which would otherwise inflate them to `~1e-8`.
pub fn fidelity(rho: &CMat, sigma: &CMat) -> Result<f64> {
    let r = sqrt_psd(rho)?;
    let inner = &r * sigma * &r;
    let inner = (&inner + inner.adjoint()).scale(0.5);
    let sd = eig_matrix(&inner, default_tol_eig(&inner))?;
    let top = sd.eigenvalues.iter().fold(0.0_f64, |m, &x| m.max(x));
    let floor = 1e-14 * top.max(f64::MIN_POSITIVE);
    let tr: f64 = sd.eigenvalues.iter().filter(|&&x| x > floor).map(|x| x.sqrt()).sum();
    Ok((tr * tr).min(1.0))
}

pub fn real_diag(values: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0))))
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMat {
    real_diag(&[1.0, -1.0])
}
