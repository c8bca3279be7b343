//! Property tests over randomly generated clocks, systems and states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trinity_core::clock::{build_clock, resolution_defect, state_covariance_defect, ClockSpec, PhaseFunction};
use trinity_core::constraint::{build_model, physical_inner, ConstraintModel, SystemSpec, TOL_MATCH};
use trinity_core::framechange::{reduce_coefficients, tfc_state, Frame, Perspective};
use trinity_core::linalg::{fidelity, pauli_x, pauli_y, real_diag, CMat};
use trinity_core::probability::{prob_one_time, prob_one_time_reduced, EffectSpec};
use trinity_core::reductions::{pw_inner, pw_inverse, pw_reduce};
use trinity_core::relobs::{homomorphism_defects, project};

type C = Complex64;

fn rotation(theta: f64, phi: f64) -> CMat {
    let axis = pauli_x().scale(phi.cos()) + pauli_y().scale(phi.sin());
    (axis * C::new(0.0, -theta)).exp()
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    DMatrix::from_fn(d, d, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

prop_compose! {
    fn clock_spec()(lo in -4i64..=0, n in 3i64..=7, g1 in -1.0..1.0f64, g2 in -0.3..0.3f64) -> ClockSpec {
        ClockSpec::compact_integers(lo, lo + n - 1).with_phase_function(PhaseFunction::polynomial(vec![0.0, g1, g2]))
    }
}

prop_compose! {
    fn model()(spec in clock_spec(), e0 in -2i64..=2, e1 in -2i64..=2, theta in 0.0..3.0f64, phi in 0.0..6.2f64) -> ConstraintModel {
        let r = rotation(theta, phi);
        let h = &r * real_diag(&[e0 as f64, e1 as f64]) * r.adjoint();
        build_model(build_clock(spec).unwrap(), SystemSpec::new(h).unwrap(), TOL_MATCH).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn clock_states_resolve_identity_and_covary(spec in clock_spec(), t in -5.0..5.0f64) {
        let c = build_clock(spec).unwrap();
        prop_assert!(resolution_defect(&c) < 1e-9);
        prop_assert!(state_covariance_defect(&c, &[t, -0.5 * t, 1.7]) < 1e-9);
    }

    #[test]
    fn physical_projector_is_orthogonal_kernel_projector(m in model()) {
        let p = m.physical_projector();
        prop_assert!((p * p - p).norm() < 1e-9);
        prop_assert!((p - p.adjoint()).norm() < 1e-9);
        prop_assert!((m.constraint() * p).norm() < 1e-9);
    }

    #[test]
    fn page_wootters_reduction_inverts_and_preserves_inner_product(m in model(), tau in -4.0..4.0f64, seed in any::<u64>()) {
        prop_assume!(!m.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = m.random_physical_state(&mut rng).unwrap();
        let phi = m.random_physical_state(&mut rng).unwrap();
        let back = pw_inverse(&m, tau, &pw_reduce(&m, tau, &psi).unwrap().vector).unwrap();
        prop_assert!((&back.vector - &psi.vector).norm() < 1e-9);
        let reduced = pw_inner(&m, tau, &phi, &psi).unwrap();
        let physical = physical_inner(&m, &phi, &psi).unwrap();
        prop_assert!((reduced - physical).norm() < 1e-9);
    }

    #[test]
    fn relational_observables_form_a_weak_homomorphism(m in model(), tau in -4.0..4.0f64, seed in any::<u64>()) {
        prop_assume!(!m.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [f, g, h] = [(); 3].map(|_| project(&m, &random_matrix(&mut rng, 2)));
        let d = homomorphism_defects(&m, &f, &g, &h, tau).unwrap();
        prop_assert!(d.add_mul < 1e-8 && d.commutator < 1e-8, "{d:?}");
    }

    #[test]
    fn one_time_probability_is_path_and_scale_independent(
        m in model(), tau in -4.0..4.0f64, seed in any::<u64>(), lambda_re in 0.1..3.0f64, lambda_im in -3.0..3.0f64,
    ) {
        prop_assume!(!m.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = m.random_physical_state(&mut rng).unwrap();
        let r = rotation(rng.gen_range(0.0..3.0), rng.gen_range(0.0..6.2));
        let e = &r * real_diag(&[rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]) * r.adjoint();
        let effect = EffectSpec::system(&m, e, "e").unwrap();
        let (Ok(p), Ok(q)) = (prob_one_time(&m, &psi, tau, &effect), prob_one_time_reduced(&m, &psi, tau, &effect)) else {
            return Ok(());
        };
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        prop_assert!((p - q).abs() < 1e-9);
        let scaled = psi.scaled(C::new(lambda_re, lambda_im));
        prop_assert!((prob_one_time(&m, &scaled, tau, &effect).unwrap() - p).abs() < 1e-9);
    }

    #[test]
    fn frame_change_round_trip_is_identity(tau_a in -4.0..4.0f64, tau_b in -4.0..4.0f64, seed in any::<u64>()) {
        let m = trinity_core::presets::three_frame();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = m.random_coefficients(&mut rng).unwrap();
        let a = Perspective::schrodinger(Frame::A, tau_a);
        let b = Perspective::schrodinger(Frame::B, tau_b);
        let psi = reduce_coefficients(&m, a, &coeffs).unwrap();
        let there = tfc_state(&m, a, b, &psi).unwrap().vector;
        prop_assert!((there.norm() - psi.norm()).abs() < 1e-9);
        let back = tfc_state(&m, b, a, &there).unwrap().vector;
        prop_assert!((back - psi).norm() < 1e-9);
    }

    #[test]
    fn qubit_fidelity_matches_closed_form(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut density = || {
            let a = random_matrix(&mut rng, 2);
            let rho = &a * a.adjoint();
            let tr = rho.trace();
            rho / tr
        };
        let (rho, sigma) = (density(), density());
        let det = |m: &CMat| m.determinant().re;
        let closed = (&rho * &sigma).trace().re + 2.0 * (det(&rho) * det(&sigma)).max(0.0).sqrt();
        let f = fidelity(&rho, &sigma).unwrap();
        prop_assert!((f - closed).abs() < 1e-9);
        prop_assert!((f - fidelity(&sigma, &rho).unwrap()).abs() < 1e-9);
    }
}
