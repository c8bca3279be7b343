//! Kinematical space `𝓗_C ⊗ 𝓗_S`, the Hamiltonian constraint
//! `Ĉ_H = Ĥ_C ⊗ I + I ⊗ Ĥ_S`, and the physical Hilbert space.
//!
//! The rigging map is realized as the orthogonal projector onto the kernel of
//! `Ĉ_H`. Because the clock is non-degenerate and diagonal, that kernel is
//! spanned by the product vectors `|ε = -E⟩ ⊗ |E⟩` over matched pairs, so the
//! projector is assembled directly from the matching instead of from a
//! numerical eigendecomposition of `Ĉ_H`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use rand::Rng;

use crate::clock::{ClockSystem, Group};
use crate::error::{Result, TrinityError};
use crate::linalg::{
    self, cis, kron, CMat, CVec, HilbertSpace, Operator, SpectralDecomposition, StateVector, ONE, ZERO,
};
use crate::quadrature::periodic_nodes;

/// System Hamiltonian plus labels of its preferred ("position") basis.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub hamiltonian: Operator,
    pub basis_labels: Vec<String>,
}

impl SystemSpec {
    pub fn new(h: CMat) -> Result<Self> {
        Self::labeled(h, "S")
    }

    pub fn labeled(h: CMat, label: &str) -> Result<Self> {
        let space = HilbertSpace::new(label, h.nrows())?;
        let hamiltonian = Operator::new(space, h)?;
        hamiltonian.require_hermitian()?;
        let basis_labels = (0..hamiltonian.dim()).map(|i| i.to_string()).collect();
        Ok(Self { hamiltonian, basis_labels })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }
}

/// A clock energy matched to a system energy eigenvector: `ε_clock = -E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub clock_index: usize,
    pub system_index: usize,
    pub energy: f64,
}

/// Default tolerances for matching energies and detecting kernel vectors.
pub const TOL_MATCH: f64 = 1e-9;
pub const TOL_ZERO: f64 = 1e-9;

/// Clock + system with the Hamiltonian constraint and its physical projector.
#[derive(Debug, Clone)]
pub struct ConstraintModel {
    pub clock: ClockSystem,
    pub system: SystemSpec,
    pub tol_match: f64,
    pub tol_zero: f64,
    system_eig: SpectralDecomposition,
    space: HilbertSpace,
    constraint: CMat,
    energy_basis: CMat,
    constraint_energies: Vec<f64>,
    block_labels: Vec<usize>,
    matched: Vec<MatchedPair>,
    sigma_sc: Vec<f64>,
    p_phys: CMat,
    pi_sc: CMat,
    fingerprint: u64,
}

/// Builds the constraint model. An empty matched spectrum is not an error
/// here; operations that need physical states report
/// [`TrinityError::EmptyPhysicalSpace`].
pub fn build_model(clock: ClockSystem, system: SystemSpec, tol_match: f64) -> Result<ConstraintModel> {
    let space = clock.space().product(&system.hamiltonian.space)?;
    let hs = &system.hamiltonian.matrix;
    let system_eig = linalg::eig_matrix(hs, linalg::default_tol_eig(hs))?;
    let (dc, ds) = (clock.dim(), system.dim());
    let constraint = kron(&clock.hamiltonian().matrix, &CMat::identity(ds, ds)) + kron(&CMat::identity(dc, dc), hs);
    let energy_basis = kron(&CMat::identity(dc, dc), &system_eig.eigenvectors);

    let mut constraint_energies = Vec::with_capacity(dc * ds);
    for j in 0..dc {
        for k in 0..ds {
            constraint_energies.push(clock.energies()[j] + system_eig.eigenvalues[k]);
        }
    }
    let block_labels = label_blocks(&constraint_energies, tol_match);

    let mut matched = Vec::new();
    for k in 0..ds {
        let e = system_eig.eigenvalues[k];
        if let Some(j) = clock.index_of(-e, tol_match) {
            matched.push(MatchedPair { clock_index: j, system_index: k, energy: e });
        }
    }
    let mut sigma_sc: Vec<f64> = Vec::new();
    for m in &matched {
        if !sigma_sc.iter().any(|&x| (x - m.energy).abs() <= tol_match) {
            sigma_sc.push(m.energy);
        }
    }

    let mut p_phys = CMat::zeros(dc * ds, dc * ds);
    let mut pi_sc = CMat::zeros(ds, ds);
    for m in &matched {
        let v = system_eig.eigenvectors.column(m.system_index).into_owned();
        let proj = linalg::outer(&v, &v);
        pi_sc += &proj;
        let mut e = CVec::zeros(dc);
        e[m.clock_index] = ONE;
        p_phys += kron(&linalg::outer(&e, &e), &proj);
    }

    let mut hasher = DefaultHasher::new();
    (dc, ds).hash(&mut hasher);
    for z in constraint.iter() {
        z.re.to_bits().hash(&mut hasher);
        z.im.to_bits().hash(&mut hasher);
    }
    for g in clock.phases() {
        g.to_bits().hash(&mut hasher);
    }
    let fingerprint = hasher.finish();

    Ok(ConstraintModel {
        clock,
        system,
        tol_match,
        tol_zero: TOL_ZERO,
        system_eig,
        space,
        constraint,
        energy_basis,
        constraint_energies,
        block_labels,
        matched,
        sigma_sc,
        p_phys,
        pi_sc,
        fingerprint,
    })
}

/// Assigns a block id to every value; values within `tol` of a neighbour share a block.
fn label_blocks(values: &[f64], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut labels = vec![0; values.len()];
    let mut block = 0;
    for w in 0..order.len() {
        if w > 0 && (values[order[w]] - values[order[w - 1]]).abs() > tol {
            block += 1;
        }
        labels[order[w]] = block;
    }
    labels
}

impl ConstraintModel {
    pub fn clock_dim(&self) -> usize {
        self.clock.dim()
    }

    pub fn system_dim(&self) -> usize {
        self.system.dim()
    }

    pub fn kin_dim(&self) -> usize {
        self.clock.dim() * self.system.dim()
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// `Ĉ_H` on the kinematical space (clock-major ordering).
    pub fn constraint(&self) -> &CMat {
        &self.constraint
    }

    pub fn constraint_operator(&self) -> Operator {
        Operator { space: self.space.clone(), matrix: self.constraint.clone() }
    }

    pub fn system_hamiltonian(&self) -> &CMat {
        &self.system.hamiltonian.matrix
    }

    pub fn system_eig(&self) -> &SpectralDecomposition {
        &self.system_eig
    }

    /// `I_C ⊗ V_S`: columns are the product energy eigenvectors.
    pub fn energy_basis(&self) -> &CMat {
        &self.energy_basis
    }

    /// Eigenvalue of `Ĉ_H` on each product energy eigenvector.
    pub fn constraint_energies(&self) -> &[f64] {
        &self.constraint_energies
    }

    pub fn block_labels(&self) -> &[usize] {
        &self.block_labels
    }

    pub fn matched_pairs(&self) -> &[MatchedPair] {
        &self.matched
    }

    /// `σ_SC = spec(Ĥ_S) ∩ spec(-Ĥ_C)`, ascending.
    pub fn sigma_sc(&self) -> &[f64] {
        &self.sigma_sc
    }

    pub fn physical_projector(&self) -> &CMat {
        &self.p_phys
    }

    /// `Π_σSC` on `𝓗_S`.
    pub fn system_projector(&self) -> &CMat {
        &self.pi_sc
    }

    pub fn physical_rank(&self) -> usize {
        self.matched.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matched.is_empty()
    }

    pub fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(TrinityError::EmptyPhysicalSpace)
        } else {
            Ok(())
        }
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// `U_S(τ) = e^{-iĤ_S τ}`.
    pub fn system_evolution(&self, tau: f64) -> CMat {
        self.system_eig.evolve(tau)
    }

    /// `U_CS(s) = e^{-iĈ_H s}`.
    pub fn constraint_evolution(&self, s: f64) -> CMat {
        let w = &self.energy_basis;
        let d = CMat::from_diagonal(&CVec::from_iterator(self.kin_dim(), self.constraint_energies.iter().map(|&e| cis(-e * s))));
        w * d * w.adjoint()
    }

    /// `|t⟩ ⊗ φ`.
    pub fn clock_product(&self, t: f64, phi: &CVec) -> CVec {
        linalg::kron_vec(&self.clock.state(t), phi)
    }

    /// Orthonormal basis of the physical space: `|ε = -E⟩ ⊗ |E⟩` per matched pair.
    pub fn kernel_basis(&self) -> Vec<CVec> {
        self.matched
            .iter()
            .map(|m| {
                let mut e = CVec::zeros(self.clock_dim());
                e[m.clock_index] = ONE;
                linalg::kron_vec(&e, &self.system_eig.eigenvectors.column(m.system_index).into_owned())
            })
            .collect()
    }

    /// `Σ_m c_m |ε_m⟩|E_m⟩` for coefficients over the matched pairs.
    pub fn physical_from_coefficients(&self, coeffs: &[Complex64]) -> Result<PhysicalState> {
        if coeffs.len() != self.physical_rank() {
            return Err(TrinityError::DimensionMismatch { expected: self.physical_rank(), got: coeffs.len() });
        }
        let mut v = CVec::zeros(self.kin_dim());
        for (c, b) in coeffs.iter().zip(self.kernel_basis()) {
            v += b * *c;
        }
        PhysicalState::new(self, v)
    }

    /// Random normalized physical state with complex Gaussian-ish coefficients.
    pub fn random_physical_state(&self, rng: &mut impl Rng) -> Result<PhysicalState> {
        self.require_nonempty()?;
        let coeffs: Vec<Complex64> =
            (0..self.physical_rank()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let coeffs: Vec<Complex64> = coeffs.iter().map(|c| c / norm).collect();
        self.physical_from_coefficients(&coeffs)
    }

    /// Brute-force kernel projector of `Ĉ_H` from its eigendecomposition.
    pub fn brute_force_projector(&self) -> Result<CMat> {
        Ok(linalg::kernel_projector(&self.constraint_operator(), self.tol_zero)?.matrix)
    }

    /// Integer frequencies `(ω_x - ω_y) t_max / 2π` of the constraint spectrum,
    /// if every difference is an integer (to `1e-9`) on a compact clock.
    pub fn commensurate_frequency_bound(&self) -> Option<(f64, usize)> {
        let Group::Circle { t_max, .. } = self.clock.group() else {
            return None;
        };
        let w = &self.constraint_energies;
        let scale = t_max / (2.0 * std::f64::consts::PI);
        let base = w[0] * scale;
        let mut max = 0i64;
        for &x in w {
            let r = x * scale - base;
            if (r - r.round()).abs() > 1e-9 {
                return None;
            }
            max = max.max(r.round() as i64);
        }
        let min = w.iter().map(|&x| (x * scale - base).round() as i64).min().unwrap_or(0);
        Some((t_max, (max - min) as usize))
    }
}

/// A kinematical vector lying in the kernel of `Ĉ_H`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalState {
    pub vector: CVec,
    model: u64,
}

impl PhysicalState {
    /// Validates that `v` is annihilated by the constraint.
    pub fn new(model: &ConstraintModel, v: CVec) -> Result<Self> {
        if v.len() != model.kin_dim() {
            return Err(TrinityError::DimensionMismatch { expected: model.kin_dim(), got: v.len() });
        }
        let scale = v.norm().max(1e-300);
        let leak = (&v - model.physical_projector() * &v).norm();
        let residual = (model.constraint() * &v).norm();
        if leak > 1e-10 * scale.max(1.0) || residual > model.tol_zero * scale.max(1.0) {
            return Err(TrinityError::NotPhysical(leak.max(residual)));
        }
        Ok(Self { vector: v, model: model.fingerprint() })
    }

    pub(crate) fn trusted(model: &ConstraintModel, v: CVec) -> Self {
        Self { vector: v, model: model.fingerprint() }
    }

    pub fn check_model(&self, model: &ConstraintModel) -> Result<()> {
        if self.model == model.fingerprint() {
            Ok(())
        } else {
            Err(TrinityError::ModelMismatch)
        }
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        Self { vector: &self.vector * lambda, model: self.model }
    }

    pub fn as_state_vector(&self, model: &ConstraintModel) -> StateVector {
        StateVector { space: model.space().clone(), amplitudes: self.vector.clone() }
    }
}

/// `δ(Ĉ_H) ψ_kin`, realized as `P_phys ψ_kin`.
pub fn group_average(model: &ConstraintModel, psi_kin: &CVec) -> Result<PhysicalState> {
    model.require_nonempty()?;
    if psi_kin.len() != model.kin_dim() {
        return Err(TrinityError::DimensionMismatch { expected: model.kin_dim(), got: psi_kin.len() });
    }
    Ok(PhysicalState::trusted(model, model.physical_projector() * psi_kin))
}

/// `(1/t_max) Σ_q e^{is_q Ĉ_H} ψ_kin` with a uniform rule that is exact for
/// commensurate constraint spectra. `None` when the spectrum is not
/// commensurate with the clock period.
pub fn group_average_quadrature(model: &ConstraintModel, psi_kin: &CVec) -> Option<CVec> {
    let (t_max, span) = model.commensurate_frequency_bound()?;
    let n = 2 * span + 1;
    let mut acc = CVec::zeros(model.kin_dim());
    for s in periodic_nodes(0.0, t_max, n) {
        acc += model.constraint_evolution(-s) * psi_kin;
    }
    Some(acc / Complex64::new(n as f64, 0.0))
}

/// `⟨φ|ψ⟩_phys = ⟨φ_kin| P_phys |ψ_kin⟩` for arbitrary kinematical representatives.
pub fn physical_inner_kin(model: &ConstraintModel, phi_kin: &CVec, psi_kin: &CVec) -> Complex64 {
    phi_kin.dotc(&(model.physical_projector() * psi_kin))
}

pub fn physical_inner(model: &ConstraintModel, phi: &PhysicalState, psi: &PhysicalState) -> Result<Complex64> {
    phi.check_model(model)?;
    psi.check_model(model)?;
    Ok(physical_inner_kin(model, &phi.vector, &psi.vector))
}

/// `Π_σSC` as an operator on `𝓗_S`.
pub fn system_projector(model: &ConstraintModel) -> Operator {
    Operator { space: model.system.hamiltonian.space.clone(), matrix: model.system_projector().clone() }
}

/// `‖μ ∮ dt χ*(t) U_S(t) - Π_σSC‖` with `χ(t) = Σ_j e^{iε_j t}`, integrated exactly.
pub fn system_projector_integral_defect(model: &ConstraintModel) -> f64 {
    let sd = model.system_eig();
    let coeffs: Vec<Complex64> = sd
        .eigenvalues
        .iter()
        .map(|&e| model.clock.energies().iter().map(|&eps| model.clock.group_integral(-(eps + e))).sum())
        .collect();
    let mut m = CMat::zeros(model.system_dim(), model.system_dim());
    for (k, c) in coeffs.iter().enumerate() {
        let v = sd.eigenvectors.column(k).into_owned();
        m += linalg::outer(&v, &v) * *c;
    }
    (m - model.system_projector()).norm()
}

/// Largest `‖U_CS(s) ψ - ψ‖` over the sampled gauge parameters.
pub fn gauge_defect(model: &ConstraintModel, psi: &PhysicalState, samples: &[f64]) -> f64 {
    samples.iter().map(|&s| (model.constraint_evolution(s) * &psi.vector - &psi.vector).norm()).fold(0.0, f64::max)
}

/// Helper used by presets and tests: a single clock/system basis product vector.
pub fn product_basis(model: &ConstraintModel, clock_index: usize, system: &CVec) -> CVec {
    let mut e = CVec::from_element(model.clock_dim(), ZERO);
    e[clock_index] = ONE;
    linalg::kron_vec(&e, system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::{build_clock, ClockSpec};
    use crate::linalg::{pauli_x, real_diag};

    fn m1() -> ConstraintModel {
        let c = build_clock(ClockSpec::compact_integers(0, 3)).unwrap();
        build_model(c, SystemSpec::new(real_diag(&[-1.0, -2.0])).unwrap(), TOL_MATCH).unwrap()
    }

    fn m2() -> ConstraintModel {
        let c = build_clock(ClockSpec::compact_integers(-2, 2)).unwrap();
        build_model(c, SystemSpec::new(pauli_x()).unwrap(), TOL_MATCH).unwrap()
    }

    fn e(n: usize, i: usize) -> CVec {
        let mut v = CVec::zeros(n);
        v[i] = ONE;
        v
    }

    #[test]
    fn matched_spectra_of_presets() {
        let m = m1();
        assert_eq!(m.sigma_sc().len(), 2);
        assert!(m.sigma_sc().iter().any(|&x| (x + 2.0).abs() < 1e-12));
        assert!(m.sigma_sc().iter().any(|&x| (x + 1.0).abs() < 1e-12));
        assert_eq!(m.physical_rank(), 2);
        assert!((m.brute_force_projector().unwrap() - m.physical_projector()).norm() < 1e-12);
        assert!((m.system_projector() - CMat::identity(2, 2)).norm() < 1e-12);

        let m = m2();
        assert_eq!(m.physical_rank(), 2);
        assert!((m.system_projector() - CMat::identity(2, 2)).norm() < 1e-12);
        assert!((m.brute_force_projector().unwrap() - m.physical_projector()).norm() < 1e-12);
    }

    #[test]
    fn unmatched_system_gives_empty_space() {
        let c = build_clock(ClockSpec::compact_integers(0, 3)).unwrap();
        let m = build_model(c, SystemSpec::new(real_diag(&[5.0])).unwrap(), TOL_MATCH).unwrap();
        assert!(m.is_empty());
        assert_eq!(m.physical_projector().norm(), 0.0);
        assert_eq!(m.system_projector().norm(), 0.0);
        assert!(matches!(group_average(&m, &CVec::zeros(4)), Err(TrinityError::EmptyPhysicalSpace)));
    }

    #[test]
    fn projector_commutes_with_constraint() {
        for m in [m1(), m2()] {
            let p = m.physical_projector();
            assert!(linalg::commutator(m.constraint(), p).norm() <= 1e-12);
            assert!((p * p - p).norm() <= 1e-12);
        }
    }

    #[test]
    fn group_average_examples() {
        let m = m1();
        // system energy basis of diag(-1,-2) is the computational basis: E=-1 is index 0
        let sys = e(2, 0);
        let in_kernel = product_basis(&m, 1, &sys);
        let out = group_average(&m, &in_kernel).unwrap();
        assert!((&out.vector - &in_kernel).norm() < 1e-14);
        let outside = product_basis(&m, 0, &sys);
        assert!(group_average(&m, &outside).unwrap().vector.norm() < 1e-14);
        let mixed = &in_kernel + &outside;
        assert!((group_average(&m, &mixed).unwrap().vector - &in_kernel).norm() < 1e-14);
    }

    #[test]
    fn projector_equals_group_average_quadrature() {
        for m in [m1(), m2()] {
            for i in 0..m.kin_dim() {
                let v = e(m.kin_dim(), i);
                let q = group_average_quadrature(&m, &v).unwrap();
                assert!((q - m.physical_projector() * &v).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn physical_inner_examples() {
        let m = m1();
        let psi = m.physical_from_coefficients(&[Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]).unwrap();
        assert!((physical_inner(&m, &psi, &psi).unwrap() - ONE).norm() < 1e-14);
        let b = m.kernel_basis();
        let (x, y) = (PhysicalState::new(&m, b[0].clone()).unwrap(), PhysicalState::new(&m, b[1].clone()).unwrap());
        assert!(physical_inner(&m, &x, &y).unwrap().norm() < 1e-15);
        // representative independence: add off-kernel junk
        let junk = product_basis(&m, 3, &e(2, 1));
        let v = physical_inner_kin(&m, &(&psi.vector + &junk), &(&psi.vector + &junk * Complex64::new(0.0, 2.0)));
        assert!((v - ONE).norm() < 1e-12);
        let other = m2();
        let z = other.random_physical_state(&mut rand_chacha::ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(physical_inner(&m, &psi, &z), Err(TrinityError::ModelMismatch));
    }

    use rand::SeedableRng;

    #[test]
    fn physical_states_are_gauge_invariant() {
        let m = m2();
        let psi = m.random_physical_state(&mut rand_chacha::ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert!(gauge_defect(&m, &psi, &[0.3, 1.7, -4.2]) <= 1e-10);
        assert!(PhysicalState::new(&m, e(10, 0)).is_err());
    }

    #[test]
    fn system_projector_time_integral() {
        assert!(system_projector_integral_defect(&m1()) < 1e-12);
        assert!(system_projector_integral_defect(&m2()) < 1e-12);
    }
}
