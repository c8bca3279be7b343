//! Gauge-invariant conditional probabilities: the one-time Page–Wootters
//! Born rule, the two-time probability built from relational projectors and
//! its reduction to the standard propagator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constraint::{ConstraintModel, PhysicalState};
use crate::error::{Result, TrinityError};
use crate::exec::{self, Strategy};
use crate::linalg::{self, kron, CMat, CVec, ONE};
use crate::reductions::{pw_inverse, pw_reduce, pw_reduce_matrix};
use crate::relobs::{relational_observable, require_projected};
use crate::report::{max_defect, CheckRow, Report};

/// A positive contraction on the system, e.g. a spectral projector.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectSpec {
    pub target: String,
    pub operator: CMat,
    pub label: String,
}

impl EffectSpec {
    /// Validates `0 ≤ e ≤ I` to `1e-12`.
    pub fn new(target: impl Into<String>, operator: CMat, label: impl Into<String>) -> Result<Self> {
        let sd = linalg::eig_matrix(&operator, 1e-12)?;
        let min = sd.eigenvalues.first().copied().unwrap_or(0.0);
        let max = sd.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -1e-12 || max > 1.0 + 1e-12 {
            return Err(TrinityError::InvalidEffect { min, max });
        }
        Ok(Self { target: target.into(), operator, label: label.into() })
    }

    /// Effect on the system of `model`.
    pub fn system(model: &ConstraintModel, operator: CMat, label: impl Into<String>) -> Result<Self> {
        Self::new(model.system.hamiltonian.space.label.clone(), operator, label)
    }

    /// `|v⟩⟨v|` for a unit vector `v`.
    pub fn rank_one(model: &ConstraintModel, v: &CVec, label: impl Into<String>) -> Result<Self> {
        let n = v.norm();
        let u = v / Complex64::new(n, 0.0);
        Self::system(model, linalg::outer(&u, &u), label)
    }

    fn check(&self, model: &ConstraintModel) -> Result<()> {
        if self.target != model.system.hamiltonian.space.label {
            return Err(TrinityError::ModelMismatch);
        }
        if self.operator.nrows() != model.system_dim() {
            return Err(TrinityError::DimensionMismatch { expected: model.system_dim(), got: self.operator.nrows() });
        }
        Ok(())
    }
}

fn floor(psi: &PhysicalState) -> f64 {
    1e-12 * psi.vector.norm_squared()
}

/// `⟨ψ|e_T(τ) ⊗ e|ψ⟩_kin / ⟨ψ|e_T(τ) ⊗ I|ψ⟩_kin` with `e_T(τ) = |τ⟩⟨τ|`.
pub fn prob_one_time(model: &ConstraintModel, psi: &PhysicalState, tau: f64, e: &EffectSpec) -> Result<f64> {
    psi.check_model(model)?;
    e.check(model)?;
    let s = model.clock.state(tau);
    let clock_effect = linalg::outer(&s, &s);
    let ds = model.system_dim();
    let num = psi.vector.dotc(&(kron(&clock_effect, &e.operator) * &psi.vector)).re;
    let den = psi.vector.dotc(&(kron(&clock_effect, &CMat::identity(ds, ds)) * &psi.vector)).re;
    if den <= floor(psi) {
        return Err(TrinityError::DegenerateConditioning { stage: 0, weight: den });
    }
    Ok(num / den)
}

/// `⟨ψ_S(τ)|e|ψ_S(τ)⟩ / ⟨ψ_S(τ)|ψ_S(τ)⟩` from the conditional state.
pub fn prob_one_time_reduced(model: &ConstraintModel, psi: &PhysicalState, tau: f64, e: &EffectSpec) -> Result<f64> {
    e.check(model)?;
    let r = pw_reduce(model, tau, psi)?.vector;
    let den = r.norm_squared();
    if den <= floor(psi) {
        return Err(TrinityError::DegenerateConditioning { stage: 0, weight: den });
    }
    Ok(r.dotc(&(&e.operator * &r)).re / den)
}

/// The two-time probability along its three computational paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoTime {
    /// Relational observables in the physical inner product (primary value).
    pub value: f64,
    /// Kinematical form with `δ(Ĉ_H)` between the clock-dressed projectors.
    pub dolby: f64,
    /// Reduced form `⟨ψ_S|Π_A U†Π_B U Π_A|ψ_S⟩ / ⟨ψ_S|Π_A|ψ_S⟩`.
    pub reduced: f64,
}

impl TwoTime {
    pub fn path_defect(&self) -> f64 {
        (self.value - self.dolby).abs().max((self.value - self.reduced).abs()).max((self.dolby - self.reduced).abs())
    }
}

fn require_system_effect(model: &ConstraintModel, e: &EffectSpec) -> Result<()> {
    e.check(model)?;
    require_projected(model, &e.operator)
}

/// Probability of `Π_B` at `τ'` given `Π_A` at `τ`.
pub fn prob_two_time(model: &ConstraintModel, psi: &PhysicalState, pa: &EffectSpec, tau: f64, pb: &EffectSpec, tau_prime: f64) -> Result<TwoTime> {
    psi.check_model(model)?;
    require_system_effect(model, pa)?;
    require_system_effect(model, pb)?;
    let v = &psi.vector;
    let fa = relational_observable(model, &pa.operator, tau)?.matrix;
    let fb = relational_observable(model, &pb.operator, tau_prime)?.matrix;
    let fa_psi = &fa * v;
    let den = v.dotc(&fa_psi).re;
    if den <= floor(psi) {
        return Err(TrinityError::DegenerateConditioning { stage: 0, weight: den });
    }
    let value = fa_psi.dotc(&(&fb * &fa_psi)).re / den;

    let dressed = |e: &CMat, t: f64| {
        let s = model.clock.state(t);
        kron(&linalg::outer(&s, &s), e)
    };
    let xa = dressed(&pa.operator, tau);
    let xb = dressed(&pb.operator, tau_prime);
    let p = model.physical_projector();
    let xa_psi = &xa * v;
    let dolby = xa_psi.dotc(&(p * &xb * p * &xa_psi)).re / v.dotc(&xa_psi).re;

    let r = pw_reduce(model, tau, psi)?.vector;
    let u = model.system_evolution(tau_prime - tau);
    let a_r = &pa.operator * &r;
    let evolved = &u * &a_r;
    let reduced = evolved.dotc(&(&pb.operator * &evolved)).re / r.dotc(&a_r).re;
    Ok(TwoTime { value, dolby, reduced })
}

/// Normalized `Π_σSC |q⟩` for a position-basis index `q`.
pub fn position_state(model: &ConstraintModel, q: usize) -> Result<CVec> {
    let ds = model.system_dim();
    if q >= ds {
        return Err(TrinityError::DimensionMismatch { expected: ds, got: q + 1 });
    }
    let v = model.system_projector().column(q).into_owned();
    let n = v.norm();
    if n <= 1e-12 {
        return Err(TrinityError::DegenerateConditioning { stage: 0, weight: n * n });
    }
    Ok(v / Complex64::new(n, 0.0))
}

/// Transition probability `q → q'` between clock readings `τ` and `τ'`,
/// computed as a two-time probability on `δ(Ĉ_H)(|τ⟩ ⊗ Π|q⟩)`.
pub fn propagator(model: &ConstraintModel, q: usize, tau: f64, q_prime: usize, tau_prime: f64) -> Result<TwoTime> {
    let vq = position_state(model, q)?;
    let vq2 = position_state(model, q_prime)?;
    let psi = pw_inverse(model, tau, &vq)?;
    let pa = EffectSpec::rank_one(model, &vq, format!("q={q}"))?;
    let pb = EffectSpec::rank_one(model, &vq2, format!("q={q_prime}"))?;
    prob_two_time(model, &psi, &pa, tau, &pb, tau_prime)
}

/// `|⟨q'|U_S(τ'-τ)|q⟩|²` on the projected position states.
pub fn propagator_oracle(model: &ConstraintModel, q: usize, tau: f64, q_prime: usize, tau_prime: f64) -> Result<f64> {
    let a = position_state(model, q)?;
    let b = position_state(model, q_prime)?;
    Ok(b.dotc(&(model.system_evolution(tau_prime - tau) * a)).norm_sqr())
}

/// Both evaluations of an n-time conditional probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NTime {
    pub value: f64,
    pub reduced: f64,
}

/// `⟨ψ|F₁⋯F_{n-1} F_n F_{n-1}⋯F₁|ψ⟩ / ⟨ψ|F₁⋯F_{n-1}⋯F₁|ψ⟩` over `[(Π_i, τ_i)]`.
///
/// `DegenerateConditioning` carries the index of the conditioning event whose
/// nested weight vanishes.
pub fn prob_n_time(model: &ConstraintModel, psi: &PhysicalState, events: &[(EffectSpec, f64)]) -> Result<NTime> {
    psi.check_model(model)?;
    if events.is_empty() {
        return Err(TrinityError::Config("at least one event is required".into()));
    }
    for (e, _) in events {
        require_system_effect(model, e)?;
    }
    let f: Vec<CMat> = events.iter().map(|(e, t)| relational_observable(model, &e.operator, *t).map(|r| r.matrix)).collect::<Result<_>>()?;
    let r0 = pw_reduce(model, events[0].1, psi)?.vector;
    let nested = |upto: usize, outer: &dyn Fn(usize) -> CMat, v: &CVec| -> Complex64 {
        // ⟨v|O_0 ⋯ O_{upto-1} O_upto O_{upto-1} ⋯ O_0|v⟩
        let mut right = v.clone();
        for i in 0..upto {
            right = outer(i) * right;
        }
        let mid = outer(upto) * &right;
        right.dotc(&mid)
    };
    let phys_op = |i: usize| f[i].clone();
    // reduced chain in the Schrödinger picture at τ_1, moved to each τ_i by U_S
    let red_op = |i: usize| {
        let u = model.system_evolution(events[i].1 - events[0].1);
        u.adjoint() * &events[i].0.operator * u
    };
    let mut value = 1.0;
    let mut reduced = 1.0;
    let n = events.len();
    let mut den_phys = psi.vector.norm_squared();
    let mut den_red = r0.norm_squared();
    if den_red <= floor(psi) {
        return Err(TrinityError::DegenerateConditioning { stage: 0, weight: den_red });
    }
    for k in 0..n {
        let num_phys = nested(k, &phys_op, &psi.vector).re;
        let num_red = nested(k, &red_op, &r0).re;
        if k == n - 1 {
            value = num_phys / den_phys;
            reduced = num_red / den_red;
        } else {
            if num_phys <= floor(psi) {
                return Err(TrinityError::DegenerateConditioning { stage: k, weight: num_phys });
            }
            den_phys = num_phys;
            den_red = num_red;
        }
    }
    Ok(NTime { value, reduced })
}

/// One row of a propagator table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagatorRow {
    pub tau: f64,
    pub tau_prime: f64,
    pub value: f64,
    pub oracle: f64,
    pub path_defect: f64,
}

pub fn propagator_table(model: &ConstraintModel, q: usize, q_prime: usize, tau: f64, deltas: &[f64], strategy: Strategy) -> Result<Vec<PropagatorRow>> {
    exec::map(strategy, deltas, |&d| {
        let p = propagator(model, q, tau, q_prime, tau + d)?;
        Ok(PropagatorRow { tau, tau_prime: tau + d, value: p.value, oracle: propagator_oracle(model, q, tau, q_prime, tau + d)?, path_defect: p.path_defect() })
    })
    .into_iter()
    .collect()
}

/// `n` uniformly spaced delays in `[0, π)`.
pub fn default_delays(n: usize) -> Vec<f64> {
    (0..n).map(|k| std::f64::consts::PI * k as f64 / n as f64).collect()
}

/// Rank-one projectors onto an orthonormal basis of `range(Π_σSC)`.
fn complete_family(model: &ConstraintModel, rng: &mut impl Rng) -> Result<Vec<EffectSpec>> {
    let ds = model.system_dim();
    let m = CMat::from_fn(ds, ds, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let pi = model.system_projector();
    let h = pi * (&m + m.adjoint()) * pi;
    let sd = linalg::eig_matrix(&h, 1e-12)?;
    (0..ds)
        .map(|k| sd.eigenvectors.column(k).into_owned())
        .filter(|v| (pi * v).norm() > 0.5)
        .map(|v| EffectSpec::rank_one(model, &(pi * v), "basis"))
        .collect()
}

/// Probability checks on a single-clock model.
pub fn probability_report(model: &ConstraintModel, seed: u64, taus: &[f64], strategy: Strategy) -> Result<Report> {
    model.require_nonempty()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let psi = model.random_physical_state(&mut rng)?;
    let ds = model.system_dim();
    let pi = model.system_projector().clone();
    let family = complete_family(model, &mut rng)?;
    let pa = family[0].clone();
    let pb = family[family.len() - 1].clone();
    let taus: Vec<f64> = if taus.is_empty() { vec![0.0, 0.5, 1.7] } else { taus.to_vec() };
    let mut report = Report::new();

    let one = exec::map(strategy, &taus, |&t| -> Result<(f64, f64, f64)> {
        let mut cross: f64 = 0.0;
        for e in &family {
            cross = cross.max((prob_one_time(model, &psi, t, e)? - prob_one_time_reduced(model, &psi, t, e)?).abs());
        }
        let id = prob_one_time(model, &psi, t, &EffectSpec::system(model, pi.clone(), "identity")?)?;
        let zero = prob_one_time(model, &psi, t, &EffectSpec::system(model, CMat::zeros(ds, ds), "zero")?)?;
        Ok((cross, (id - 1.0).abs(), zero.abs()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    report.check("one-time-conditional-state", "Born rule on the clock-conditioned state equals the conditional-state form", max_defect(one.iter().map(|x| x.0)), 1e-10);
    report.check("one-time-trivial-effects", "identity effect gives 1 and zero effect gives 0", max_defect(one.iter().flat_map(|x| [x.1, x.2])), 1e-10);

    let pairs: Vec<(f64, f64)> = taus.iter().flat_map(|&a| taus.iter().map(move |&b| (a, b))).collect();
    let two = exec::map(strategy, &pairs, |&(t, t2)| -> Result<(f64, f64, f64)> {
        let p = prob_two_time(model, &psi, &pa, t, &pb, t2)?;
        let mut sum = 0.0;
        let mut range: f64 = 0.0;
        for e in &family {
            let v = prob_two_time(model, &psi, &pa, t, e, t2)?.value;
            sum += v;
            range = range.max((-v - 1e-12).max(v - 1.0 - 1e-12).max(0.0));
        }
        Ok((p.path_defect(), (sum - 1.0).abs(), range))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    report.check("two-time-path-agreement", "relational-observable, Dolby and reduced two-time forms agree", max_defect(two.iter().map(|x| x.0)), 1e-9);
    report.check("two-time-completeness", "two-time probabilities over a complete family sum to 1", max_defect(two.iter().map(|x| x.1)), 1e-9);
    report.check("probability-range", "probabilities lie in [0, 1]", max_defect(two.iter().map(|x| x.2)), 0.0);

    let (t, t2) = (taus[0], taus[taus.len() - 1]);
    let base_one = prob_one_time(model, &psi, t, &pa)?;
    let base_two = prob_two_time(model, &psi, &pa, t, &pb, t2)?.value;
    let mut gauge: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..10 {
        let s = -3.0 + 0.77 * i as f64;
        let shifted = PhysicalState::new(model, model.constraint_evolution(s) * &psi.vector)?;
        gauge = gauge.max((prob_one_time(model, &shifted, t, &pa)? - base_one).abs());
        gauge = gauge.max((prob_two_time(model, &shifted, &pa, t, &pb, t2)?.value - base_two).abs());
        let lambda = Complex64::from_polar(0.2 + 0.9 * i as f64, 0.61 * i as f64);
        let scaled = psi.scaled(lambda);
        scale = scale.max((prob_one_time(model, &scaled, t, &pa)? - base_one).abs());
        scale = scale.max((prob_two_time(model, &scaled, &pa, t, &pb, t2)?.value - base_two).abs());
    }
    report.check("probability-gauge-invariance", "probabilities are unchanged by U_CS(s)", gauge, 1e-12);
    report.check("probability-scale-invariance", "probabilities are unchanged by ψ → λψ", scale, 1e-12);

    let deltas = default_delays(50);
    let mut prop_defect: f64 = 0.0;
    let mut prop_paths: f64 = 0.0;
    let mut unitarity: f64 = 0.0;
    let positions: Vec<usize> = (0..ds).filter(|&q| position_state(model, q).is_ok()).collect();
    let full = (&pi - CMat::identity(ds, ds)).norm() <= 1e-12;
    for &q in &positions {
        let rows = exec::map(strategy, &positions, |&q2| propagator_table(model, q, q2, t, &deltas, Strategy::Sequential)).into_iter().collect::<Result<Vec<_>>>()?;
        for row in rows.iter().flatten() {
            prop_defect = prop_defect.max((row.value - row.oracle).abs());
            prop_paths = prop_paths.max(row.path_defect);
        }
        for k in 0..deltas.len() {
            unitarity = unitarity.max((rows.iter().map(|r| r[k].value).sum::<f64>() - 1.0).abs());
        }
    }
    report.check("propagator", "two-time probability on position projectors equals |⟨q'|U_S|q⟩|²", prop_defect.max(prop_paths), 1e-9);
    if full {
        report.check("propagator-unitarity", "transition probabilities out of each q sum to 1", unitarity, 1e-9);
    } else {
        report.push(CheckRow::skipped("propagator-unitarity", "transition probabilities out of each q sum to 1", "Π_σSC is not the identity"));
    }

    // A full-rank middle effect and generic offsets keep every conditioning weight positive.
    let mid = EffectSpec::system(model, pi.scale(0.3) + pb.operator.scale(0.7), "mixed")?;
    let events = vec![(pa.clone(), t), (mid, t + 0.37), (pa.clone(), t + 1.13)];
    let three = prob_n_time(model, &psi, &events)?;
    let two = prob_n_time(model, &psi, &events[..2])?;
    let direct = prob_two_time(model, &psi, &pa, events[0].1, &events[1].0, events[1].1)?.value;
    report.check("n-time-paths", "nested relational and reduced n-time chains agree", (three.value - three.reduced).abs().max((two.value - direct).abs()), 1e-9);
    Ok(report)
}

/// `δ(Ĉ_H)(|τ⟩ ⊗ φ)` scaled so that its conditional state at `τ` has unit norm.
pub fn conditioned_state(model: &ConstraintModel, tau: f64, phi: &CVec) -> Result<PhysicalState> {
    let psi = pw_inverse(model, tau, phi)?;
    let n = (pw_reduce_matrix(model, tau) * &psi.vector).norm();
    if n <= 1e-12 {
        return Err(TrinityError::DegenerateConditioning { stage: 0, weight: n * n });
    }
    Ok(psi.scaled(ONE / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::presets;
    use std::f64::consts::PI;

    fn ket(i: usize) -> CVec {
        CVec::from_fn(2, |k, _| if k == i { ONE } else { ZERO })
    }

    #[test]
    fn one_time_examples() {
        let m = presets::m2();
        let psi = conditioned_state(&m, 0.0, &ket(0)).unwrap();
        let e0 = EffectSpec::rank_one(&m, &ket(0), "0").unwrap();
        for tau in [0.0, 0.3, 1.0, 2.5] {
            let p = prob_one_time(&m, &psi, tau, &e0).unwrap();
            assert!((p - tau.cos().powi(2)).abs() < 1e-10);
            assert!((p - prob_one_time_reduced(&m, &psi, tau, &e0).unwrap()).abs() < 1e-10);
        }
        let id = EffectSpec::system(&m, CMat::identity(2, 2), "I").unwrap();
        assert!((prob_one_time(&m, &psi, 0.4, &id).unwrap() - 1.0).abs() < 1e-12);
        let zero = EffectSpec::system(&m, CMat::zeros(2, 2), "0").unwrap();
        assert_eq!(prob_one_time(&m, &psi, 0.4, &zero).unwrap(), 0.0);
    }

    #[test]
    fn invalid_effects_are_rejected() {
        let m = presets::m2();
        assert!(matches!(EffectSpec::system(&m, CMat::identity(2, 2) * Complex64::new(2.0, 0.0), "x"), Err(TrinityError::InvalidEffect { .. })));
        assert!(matches!(EffectSpec::system(&m, -CMat::identity(2, 2), "x"), Err(TrinityError::InvalidEffect { .. })));
    }

    #[test]
    fn two_time_examples() {
        let m = presets::m2();
        let psi = conditioned_state(&m, 0.0, &ket(0)).unwrap();
        let pa = EffectSpec::rank_one(&m, &ket(0), "0").unwrap();
        let pb = EffectSpec::rank_one(&m, &ket(1), "1").unwrap();
        let p = prob_two_time(&m, &psi, &pa, 0.0, &pb, PI / 2.0).unwrap();
        assert!((p.value - 1.0).abs() < 1e-9 && p.path_defect() < 1e-9);
        let p = prob_two_time(&m, &psi, &pa, 0.0, &pb, PI / 6.0).unwrap();
        assert!((p.value - 0.25).abs() < 1e-9 && p.path_defect() < 1e-9);
        let p = prob_two_time(&m, &psi, &pa, 0.7, &pb, 0.7).unwrap();
        assert!(p.value.abs() < 1e-9);
    }

    #[test]
    fn degenerate_conditioning_is_an_error() {
        let m = presets::m2();
        let psi = conditioned_state(&m, 0.0, &ket(0)).unwrap();
        let pb = EffectSpec::rank_one(&m, &ket(1), "1").unwrap();
        let pa = EffectSpec::rank_one(&m, &ket(0), "0").unwrap();
        assert!(matches!(prob_two_time(&m, &psi, &pb, 0.0, &pa, 1.0), Err(TrinityError::DegenerateConditioning { stage: 0, .. })));
        let events = vec![(pa.clone(), 0.0), (pb.clone(), 0.0), (pa, 1.0)];
        assert!(matches!(prob_n_time(&m, &psi, &events), Err(TrinityError::DegenerateConditioning { stage: 1, .. })));
    }

    #[test]
    fn propagator_examples() {
        let m = presets::m2();
        for d in [0.0, 0.4, 1.3] {
            let p = propagator(&m, 0, 0.2, 1, 0.2 + d).unwrap();
            assert!((p.value - d.sin().powi(2)).abs() < 1e-9);
            let total: f64 = (0..2).map(|q| propagator(&m, 0, 0.2, q, 0.2 + d).unwrap().value).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
        assert!((propagator(&m, 1, 0.5, 1, 0.5).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_time_chain() {
        let m = presets::m2();
        let psi = conditioned_state(&m, 0.0, &ket(0)).unwrap();
        let p0 = EffectSpec::rank_one(&m, &ket(0), "0").unwrap();
        let p1 = EffectSpec::rank_one(&m, &ket(1), "1").unwrap();
        let events = vec![(p0.clone(), 0.0), (p1, PI / 4.0), (p0.clone(), PI / 2.0)];
        let r = prob_n_time(&m, &psi, &events).unwrap();
        // |1⟩ evolved by π/4 under σ_x reaches |0⟩ with probability sin²(π/4)
        assert!((r.value - 0.5).abs() < 1e-9);
        assert!((r.value - r.reduced).abs() < 1e-9);
        let one = prob_n_time(&m, &psi, &[(p0.clone(), 0.6)]).unwrap();
        assert!((one.value - prob_one_time(&m, &psi, 0.6, &p0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn report_passes_on_presets() {
        for m in [presets::m1(), presets::m2()] {
            let r = probability_report(&m, 7, &[], Strategy::Parallel).unwrap();
            for row in &r.rows {
                assert!(row.pass, "{row:?}");
            }
        }
    }
}
