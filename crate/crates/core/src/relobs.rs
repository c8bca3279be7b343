//! Relational Dirac observables `F̂_{f,T}(τ) = 𝒢(|τ⟩⟨τ| ⊗ f)` and their algebra.
//!
//! The G-twirl `𝒢` is the average over the one-parameter group generated by
//! `Ĉ_H`. Its primary form is block dephasing over the eigenvalue blocks of
//! `Ĉ_H`; a uniform time quadrature over the clock period is available as an
//! independent path whenever the constraint spectrum is commensurate.

use num_complex::Complex64;

use crate::constraint::ConstraintModel;
use crate::error::{Result, TrinityError};
use crate::linalg::{self, commutator, kron, CMat};
use crate::quadrature::periodic_nodes;
use crate::reductions::{heisenberg_operator, TrivializationContext};

/// `F̂_{f,T}(τ)` together with the inputs that produced it.
#[derive(Debug, Clone)]
pub struct RelationalObservable {
    pub f_s: CMat,
    pub tau: f64,
    pub matrix: CMat,
}

/// `𝒢(A) = Σ_ω P_ω A P_ω` over the eigenvalue blocks of `Ĉ_H`.
pub fn gtwirl(model: &ConstraintModel, a: &CMat) -> CMat {
    let w = model.energy_basis();
    let mut t = w.adjoint() * a * w;
    let labels = model.block_labels();
    for x in 0..t.nrows() {
        for y in 0..t.ncols() {
            if labels[x] != labels[y] {
                t[(x, y)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    w * t * w.adjoint()
}

/// `(1/t_max) ∮ U_CS(t) A U_CS†(t) dt` with a rule exact for commensurate spectra.
pub fn gtwirl_quadrature(model: &ConstraintModel, a: &CMat) -> Option<CMat> {
    let (t_max, span) = model.commensurate_frequency_bound()?;
    let n = 2 * span + 1;
    let mut acc = CMat::zeros(a.nrows(), a.ncols());
    for t in periodic_nodes(0.0, t_max, n) {
        let u = model.constraint_evolution(t);
        acc += &u * a * u.adjoint();
    }
    Some(acc / Complex64::new(n as f64, 0.0))
}

fn check_system_operator(model: &ConstraintModel, f: &CMat) -> Result<()> {
    let d = model.system_dim();
    if f.nrows() != d || f.ncols() != d {
        return Err(TrinityError::DimensionMismatch { expected: d, got: f.nrows().max(f.ncols()) });
    }
    Ok(())
}

/// `|τ⟩⟨τ| ⊗ f` on the kinematical space.
pub fn clock_dressed(model: &ConstraintModel, f: &CMat, tau: f64) -> CMat {
    let s = model.clock.state(tau);
    kron(&linalg::outer(&s, &s), f)
}

pub fn relational_observable(model: &ConstraintModel, f: &CMat, tau: f64) -> Result<RelationalObservable> {
    check_system_operator(model, f)?;
    let matrix = gtwirl(model, &clock_dressed(model, f, tau));
    Ok(RelationalObservable { f_s: f.clone(), tau, matrix })
}

/// `‖[Ĉ_H, O]‖`.
pub fn strong_dirac_defect(model: &ConstraintModel, o: &CMat) -> f64 {
    commutator(model.constraint(), o).norm()
}

/// `‖(O1 - O2) P_phys‖`; zero exactly when `O1 ≈ O2` on physical states.
pub fn weak_defect(model: &ConstraintModel, o1: &CMat, o2: &CMat) -> f64 {
    ((o1 - o2) * model.physical_projector()).norm()
}

/// `‖Π f Π - f‖`.
pub fn projection_defect(model: &ConstraintModel, f: &CMat) -> f64 {
    let p = model.system_projector();
    (p * f * p - f).norm()
}

pub fn require_projected(model: &ConstraintModel, f: &CMat) -> Result<()> {
    check_system_operator(model, f)?;
    let d = projection_defect(model, f);
    if d > 1e-9 * f.norm().max(1.0) {
        return Err(TrinityError::UnprojectedOperator(d));
    }
    Ok(())
}

/// `Π f Π`.
pub fn project(model: &ConstraintModel, f: &CMat) -> CMat {
    let p = model.system_projector();
    p * f * p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomomorphismDefects {
    /// `‖(F̂_{f+gh} - F̂_f - F̂_g F̂_h) P‖`.
    pub add_mul: f64,
    /// `‖([F̂_f, F̂_g] - F̂_{[f,g]}) P‖`.
    pub commutator: f64,
}

pub fn homomorphism_defects(model: &ConstraintModel, f: &CMat, g: &CMat, h: &CMat, tau: f64) -> Result<HomomorphismDefects> {
    for x in [f, g, h] {
        require_projected(model, x)?;
    }
    let ff = relational_observable(model, f, tau)?.matrix;
    let fg = relational_observable(model, g, tau)?.matrix;
    let fh = relational_observable(model, h, tau)?.matrix;
    let combined = relational_observable(model, &(f + g * h), tau)?.matrix;
    let add_mul = weak_defect(model, &combined, &(&ff + &fg * &fh));
    let fc = relational_observable(model, &commutator(f, g), tau)?.matrix;
    let comm = weak_defect(model, &commutator(&ff, &fg), &fc);
    Ok(HomomorphismDefects { add_mul, commutator: comm })
}

/// `max ‖(𝒯 [F̂_f, F̂_g] 𝒯⁻¹ - I_C ⊗ [f(τ), g(τ)]) ψ'‖` over the trivialized
/// physical basis `ψ' = 𝒯 ψ_phys`.
pub fn trivialized_commutator_check(model: &ConstraintModel, ctx: &TrivializationContext, f: &CMat, g: &CMat, tau: f64) -> Result<f64> {
    require_projected(model, f)?;
    require_projected(model, g)?;
    let ff = relational_observable(model, f, tau)?.matrix;
    let fg = relational_observable(model, g, tau)?.matrix;
    let lhs = ctx.forward() * commutator(&ff, &fg) * ctx.inverse();
    let fh = heisenberg_operator(model, f, tau);
    let gh = heisenberg_operator(model, g, tau);
    let dc = model.clock_dim();
    let rhs = kron(&CMat::identity(dc, dc), &commutator(&fh, &gh));
    let diff = lhs - rhs;
    Ok(model.kernel_basis().iter().map(|b| (&diff * (ctx.forward() * b)).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{product_basis, PhysicalState};
    use crate::linalg::{pauli_x, pauli_y, pauli_z, CVec, ONE};
    use crate::presets;
    use crate::reductions::{pw_reduce, trivialize_default};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        CMat::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn twirl_fixed_points() {
        let m = presets::m1();
        let id = CMat::identity(8, 8);
        assert!((gtwirl(&m, &id) - &id).norm() < 1e-13);
        let c = m.constraint().clone();
        assert!((gtwirl(&m, &c) - &c).norm() < 1e-13);
    }

    #[test]
    fn twirl_kills_block_off_diagonal() {
        let m = presets::m1();
        let sys = {
            let mut v = CVec::zeros(2);
            v[0] = ONE;
            v
        };
        let a = product_basis(&m, 0, &sys);
        let b = product_basis(&m, 1, &sys);
        let op = linalg::outer(&a, &b);
        assert!(gtwirl(&m, &op).norm() < 1e-14);
    }

    #[test]
    fn twirl_paths_agree_on_random_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in [presets::m1(), presets::m2()] {
            let a = random_matrix(m.kin_dim(), &mut rng);
            let q = gtwirl_quadrature(&m, &a).unwrap();
            assert!((q - gtwirl(&m, &a)).norm() <= 1e-10);
        }
    }

    #[test]
    fn relational_observables_are_strong_dirac_observables() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = presets::m2();
        for tau in [0.0, 0.4, 2.9] {
            let f = random_matrix(2, &mut rng);
            let f = (&f + f.adjoint()) * Complex64::new(0.5, 0.0);
            let o = relational_observable(&m, &f, tau).unwrap().matrix;
            assert!(strong_dirac_defect(&m, &o) <= 1e-10);
            assert!(linalg::hermiticity_defect(&o) <= 1e-12);
        }
        let zero = relational_observable(&m, &CMat::zeros(2, 2), 0.3).unwrap().matrix;
        assert_eq!(zero.norm(), 0.0);
    }

    #[test]
    fn identity_observable_acts_as_identity_on_physical_states() {
        let m = presets::m1();
        let f = relational_observable(&m, &CMat::identity(2, 2), 1.1).unwrap().matrix;
        let psi = m.random_physical_state(&mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert!((&f * &psi.vector - &psi.vector).norm() <= 1e-10);
    }

    #[test]
    fn expectation_matches_conditional_state() {
        let m = presets::m2();
        let psi = m.random_physical_state(&mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let mut proj = CMat::zeros(2, 2);
        proj[(0, 0)] = ONE;
        let f = relational_observable(&m, &proj, 0.0).unwrap().matrix;
        let lhs = psi.vector.dotc(&(&f * &psi.vector));
        let s = pw_reduce(&m, 0.0, &psi).unwrap().vector;
        let rhs = s.dotc(&(&proj * &s));
        assert!((lhs - rhs).norm() <= 1e-10);
    }

    #[test]
    fn weak_equivalence_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = presets::m1();
        let a = random_matrix(8, &mut rng);
        assert_eq!(weak_defect(&m, &a, &a), 0.0);
        let f = random_matrix(2, &mut rng);
        let o1 = relational_observable(&m, &f, 0.5).unwrap().matrix;
        let o2 = relational_observable(&m, &project(&m, &f), 0.5).unwrap().matrix;
        assert!(weak_defect(&m, &o1, &o2) <= 1e-10);
        let off = (CMat::identity(8, 8) - m.physical_projector()) * a;
        assert!(weak_defect(&m, &off, &CMat::zeros(8, 8)) >= 0.0);
        let off_right = &off.adjoint() * (CMat::identity(8, 8) - m.physical_projector());
        assert!(weak_defect(&m, &off_right, &CMat::zeros(8, 8)) < 1e-14);
    }

    #[test]
    fn homomorphism_on_paulis() {
        let m = presets::m2();
        let d = homomorphism_defects(&m, &pauli_z(), &pauli_x(), &pauli_y(), 0.7).unwrap();
        assert!(d.add_mul <= 1e-9 && d.commutator <= 1e-9, "{d:?}");
        let id = CMat::identity(2, 2);
        let d = homomorphism_defects(&m, &id, &id, &id, 0.0).unwrap();
        assert!(d.add_mul <= 1e-12 && d.commutator <= 1e-12);
        let d = homomorphism_defects(&m, &pauli_z(), &CMat::zeros(2, 2), &pauli_x(), 1.0).unwrap();
        assert!(d.add_mul <= 1e-12);
    }

    #[test]
    fn trivialized_commutators() {
        let m = presets::m2();
        let ctx = trivialize_default(&m).unwrap();
        let d = trivialized_commutator_check(&m, &ctx, &pauli_x(), &pauli_z(), 0.4).unwrap();
        assert!(d <= 1e-9, "{d}");
        let d = trivialized_commutator_check(&m, &ctx, &CMat::identity(2, 2), &pauli_z(), 0.4).unwrap();
        assert!(d <= 1e-12);
        let d = trivialized_commutator_check(&m, &ctx, &pauli_x(), &pauli_x(), 1.3).unwrap();
        assert!(d <= 1e-12);
    }

    #[test]
    fn unprojected_inputs_are_rejected() {
        let c = crate::clock::build_clock(crate::clock::ClockSpec::compact_integers(0, 3)).unwrap();
        let m = crate::constraint::build_model(c, crate::constraint::SystemSpec::new(linalg::real_diag(&[-1.0, 7.0])).unwrap(), 1e-9).unwrap();
        let e = homomorphism_defects(&m, &pauli_x(), &pauli_x(), &pauli_x(), 0.0).unwrap_err();
        assert!(matches!(e, TrinityError::UnprojectedOperator(_)));
        let _ = PhysicalState::new(&m, m.kernel_basis()[0].clone()).unwrap();
    }
}
