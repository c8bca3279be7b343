//! Page–Wootters reduction, trivialization and symmetry reduction, the
//! encodings back into Dirac observables, and the suite that checks all
//! three descriptions against each other.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constraint::{
    gauge_defect, group_average_quadrature, physical_inner, system_projector_integral_defect, ConstraintModel, PhysicalState,
};
use crate::error::{Result, TrinityError};
use crate::exec::{self, Strategy};
use crate::linalg::{self, cis, kron, CMat, CVec};
use crate::relobs::{
    clock_dressed, gtwirl, gtwirl_quadrature, homomorphism_defects, project, projection_defect, relational_observable,
    require_projected, strong_dirac_defect, trivialized_commutator_check, weak_defect,
};
use crate::report::{max_defect, CheckRow, Report};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Picture {
    Schrodinger(f64),
    Heisenberg,
}

/// A system state in one of the reduced pictures.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub picture: Picture,
    pub vector: CVec,
}

/// `R_S(τ) = ⟨τ| ⊗ I_S` as a `d_S × d_kin` matrix.
pub fn pw_reduce_matrix(model: &ConstraintModel, tau: f64) -> CMat {
    let s = model.clock.state(tau);
    let row = CMat::from_fn(1, s.len(), |_, j| s[j].conj());
    kron(&row, &CMat::identity(model.system_dim(), model.system_dim()))
}

/// `R_S⁻¹(τ) = δ(Ĉ_H)(|τ⟩ ⊗ I_S)` as a `d_kin × d_S` matrix.
pub fn pw_inverse_matrix(model: &ConstraintModel, tau: f64) -> CMat {
    let s = model.clock.state(tau);
    let col = CMat::from_fn(s.len(), 1, |j, _| s[j]);
    model.physical_projector() * kron(&col, &CMat::identity(model.system_dim(), model.system_dim()))
}

/// Conditional state `ψ_S(τ) = (⟨τ| ⊗ I) ψ_phys`.
pub fn pw_reduce(model: &ConstraintModel, tau: f64, psi: &PhysicalState) -> Result<ReducedState> {
    psi.check_model(model)?;
    model.require_nonempty()?;
    Ok(ReducedState { picture: Picture::Schrodinger(tau), vector: pw_reduce_matrix(model, tau) * &psi.vector })
}

fn check_system_vector(model: &ConstraintModel, phi: &CVec) -> Result<()> {
    if phi.len() != model.system_dim() {
        return Err(TrinityError::DimensionMismatch { expected: model.system_dim(), got: phi.len() });
    }
    Ok(())
}

/// `δ(Ĉ_H)(|τ⟩ ⊗ φ)`; components of `φ` outside `σ_SC` are annihilated.
pub fn pw_inverse(model: &ConstraintModel, tau: f64, phi: &CVec) -> Result<PhysicalState> {
    check_system_vector(model, phi)?;
    Ok(PhysicalState::trusted(model, model.physical_projector() * model.clock_product(tau, phi)))
}

/// `⟨φ| (|τ⟩⟨τ| ⊗ I) |ψ⟩_kin`.
pub fn pw_inner(model: &ConstraintModel, tau: f64, phi: &PhysicalState, psi: &PhysicalState) -> Result<Complex64> {
    let a = pw_reduce(model, tau, phi)?;
    let b = pw_reduce(model, tau, psi)?;
    Ok(a.vector.dotc(&b.vector))
}

/// `f(τ) = U_S†(τ) f U_S(τ)`.
pub fn heisenberg_operator(model: &ConstraintModel, f: &CMat, tau: f64) -> CMat {
    let u = model.system_evolution(tau);
    u.adjoint() * f * u
}

/// Trivialization `𝒯_T = μ ∮ |t⟩⟨t| ⊗ e^{it(Ĥ_S + ε*)}` and its inverse.
#[derive(Debug, Clone)]
pub struct TrivializationContext {
    pub eps_star: f64,
    pub star_index: usize,
    forward: CMat,
    inverse: CMat,
}

impl TrivializationContext {
    pub fn forward(&self) -> &CMat {
        &self.forward
    }

    /// `𝒯_T⁻¹ = μ ∮ |t⟩⟨t| ⊗ e^{-it(Ĥ_S + ε*)}`.
    pub fn inverse(&self) -> &CMat {
        &self.inverse
    }

    pub fn apply(&self, psi: &PhysicalState) -> CVec {
        &self.forward * &psi.vector
    }
}

/// Smallest clock energy taking part in a matched pair.
pub fn default_eps_star(model: &ConstraintModel) -> Result<f64> {
    model
        .matched_pairs()
        .iter()
        .map(|m| model.clock.energies()[m.clock_index])
        .min_by(|a, b| a.total_cmp(b))
        .ok_or(TrinityError::EmptyPhysicalSpace)
}

fn trivialization_matrix(model: &ConstraintModel, eps_star: f64, sign: f64) -> CMat {
    let (dc, ds) = (model.clock_dim(), model.system_dim());
    let e = model.clock.energies();
    let g = model.clock.phases();
    let es = &model.system_eig().eigenvalues;
    let mut t = CMat::zeros(dc * ds, dc * ds);
    for k in 0..ds {
        for j in 0..dc {
            for l in 0..dc {
                let omega = sign * (es[k] + eps_star) - e[j] + e[l];
                t[(j * ds + k, l * ds + k)] = cis(g[j] - g[l]) * model.clock.group_integral(omega);
            }
        }
    }
    let w = model.energy_basis();
    w * t * w.adjoint()
}

pub fn trivialize(model: &ConstraintModel, eps_star: f64) -> Result<TrivializationContext> {
    let star_index = model.clock.index_of(eps_star, model.tol_match).ok_or(TrinityError::EnergyNotInClockSpectrum(eps_star))?;
    let eps_star = model.clock.energies()[star_index];
    Ok(TrivializationContext {
        eps_star,
        star_index,
        forward: trivialization_matrix(model, eps_star, 1.0),
        inverse: trivialization_matrix(model, eps_star, -1.0),
    })
}

pub fn trivialize_default(model: &ConstraintModel) -> Result<TrivializationContext> {
    trivialize(model, default_eps_star(model)?)
}

/// `‖(𝒯⁻¹𝒯 - I) P_phys‖`.
pub fn trivialization_inverse_defect(model: &ConstraintModel, ctx: &TrivializationContext) -> f64 {
    let p = model.physical_projector();
    (ctx.inverse() * ctx.forward() * p - p).norm()
}

/// `‖(𝒯 Ĉ_H 𝒯⁻¹ - (Ĥ_C - ε*) ⊗ I) P'‖` with `P' = 𝒯 P_phys 𝒯⁻¹`.
pub fn trivialization_conjugation_defect(model: &ConstraintModel, ctx: &TrivializationContext) -> f64 {
    let (dc, ds) = (model.clock_dim(), model.system_dim());
    let shifted = &model.clock.hamiltonian().matrix - CMat::identity(dc, dc) * Complex64::new(ctx.eps_star, 0.0);
    let target = kron(&shifted, &CMat::identity(ds, ds));
    let p_triv = ctx.forward() * model.physical_projector() * ctx.inverse();
    ((ctx.forward() * model.constraint() * ctx.inverse() - target) * p_triv).norm()
}

/// Largest ratio `s₂/s₁` of Schmidt coefficients of `𝒯 ψ` over the physical basis and `extra` states.
pub fn trivialized_product_defect(model: &ConstraintModel, ctx: &TrivializationContext, extra: &[&PhysicalState]) -> f64 {
    let (dc, ds) = (model.clock_dim(), model.system_dim());
    let mut states: Vec<CVec> = model.kernel_basis();
    states.extend(extra.iter().map(|p| p.vector.clone()));
    max_defect(states.iter().map(|v| {
        let s = linalg::schmidt_coefficients(&(ctx.forward() * v), dc, ds);
        if s.len() < 2 || s[0] == 0.0 {
            0.0
        } else {
            s[1] / s[0]
        }
    }))
}

/// `R_H = e^{-iε*τ} (⟨τ| ⊗ I) 𝒯_T`, evaluated at clock reading `τ`.
pub fn sym_reduce_matrix(model: &ConstraintModel, ctx: &TrivializationContext, tau: f64) -> CMat {
    pw_reduce_matrix(model, tau) * ctx.forward() * cis(-ctx.eps_star * tau)
}

/// `R_H⁻¹ = 𝒯_T⁻¹ (e^{ig(ε*)} |ε*⟩ ⊗ I)`.
pub fn sym_inverse_matrix(model: &ConstraintModel, ctx: &TrivializationContext) -> CMat {
    let dc = model.clock_dim();
    let ds = model.system_dim();
    let col = CMat::from_fn(dc, 1, |j, _| if j == ctx.star_index { cis(model.clock.phases()[j]) } else { Complex64::new(0.0, 0.0) });
    ctx.inverse() * kron(&col, &CMat::identity(ds, ds))
}

/// `⟨τ| ⊗ U_S†(τ)`, equal to `R_H` on physical states.
pub fn sym_reduce_alt_matrix(model: &ConstraintModel, tau: f64) -> CMat {
    let s = model.clock.state(tau);
    let row = CMat::from_fn(1, s.len(), |_, j| s[j].conj());
    kron(&row, &model.system_evolution(tau).adjoint())
}

/// Heisenberg-picture state `R_H ψ_phys`.
pub fn sym_reduce(model: &ConstraintModel, ctx: &TrivializationContext, psi: &PhysicalState) -> Result<ReducedState> {
    psi.check_model(model)?;
    model.require_nonempty()?;
    Ok(ReducedState { picture: Picture::Heisenberg, vector: sym_reduce_matrix(model, ctx, 0.0) * &psi.vector })
}

pub fn sym_inverse(model: &ConstraintModel, ctx: &TrivializationContext, phi: &CVec) -> Result<PhysicalState> {
    check_system_vector(model, phi)?;
    Ok(PhysicalState::trusted(model, sym_inverse_matrix(model, ctx) * phi))
}

/// `E_S^τ(f) = δ(Ĉ_H)(|τ⟩⟨τ| ⊗ f) δ(Ĉ_H)`.
pub fn encode_s(model: &ConstraintModel, f: &CMat, tau: f64) -> Result<CMat> {
    require_projected(model, f)?;
    let p = model.physical_projector();
    Ok(p * clock_dressed(model, f, tau) * p)
}

/// `E_H(f_H) = R_H⁻¹ f_H R_H` restricted to physical states.
pub fn encode_h(model: &ConstraintModel, ctx: &TrivializationContext, f_heis: &CMat) -> Result<CMat> {
    require_projected(model, f_heis)?;
    Ok(sym_inverse_matrix(model, ctx) * f_heis * sym_reduce_matrix(model, ctx, 0.0) * model.physical_projector())
}

/// Finite-difference check of `i dψ_S/dτ = Ĥ_S ψ_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualFit {
    pub deltas: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Least-squares slope of `log residual` against `log δ`.
    pub slope: f64,
    /// Residual of the Richardson-extrapolated derivative at the largest `δ`.
    pub richardson: f64,
}

pub fn schrodinger_residual(model: &ConstraintModel, psi: &PhysicalState, tau: f64, deltas: &[f64]) -> Result<ResidualFit> {
    let state = |t: f64| pw_reduce(model, t, psi).map(|r| r.vector);
    let center = state(tau)?;
    let rhs = model.system_hamiltonian() * &center * Complex64::new(0.0, 1.0);
    let deriv = |d: f64| -> Result<CVec> { Ok((state(tau + d)? - state(tau - d)?) / Complex64::new(2.0 * d, 0.0)) };
    let mut residuals = Vec::with_capacity(deltas.len());
    for &d in deltas {
        residuals.push((deriv(d)? + &rhs).norm());
    }
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let dmax = deltas.iter().copied().fold(0.0, f64::max);
    let rich = (deriv(0.5 * dmax)? * Complex64::new(4.0, 0.0) - deriv(dmax)?) / Complex64::new(3.0, 0.0);
    Ok(ResidualFit { deltas: deltas.to_vec(), residuals, slope: sxy / sxx, richardson: (rich + rhs).norm() })
}

/// Five logarithmically spaced steps from `1e-2` to `1e-4`.
pub fn default_residual_deltas() -> Vec<f64> {
    (0..5).map(|k| 10f64.powf(-2.0 - 0.5 * k as f64)).collect()
}

/// `24` uniform clock readings over one period of the clock group.
pub fn default_tau_grid(model: &ConstraintModel) -> Vec<f64> {
    let (a, b) = model.clock.group().bounds();
    let n = 24;
    (0..n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

fn spectrum_defect(model: &ConstraintModel) -> Result<f64> {
    // eigenvalues of Π Ĥ_S Π restricted to range(Π) against σ_SC with multiplicity
    let pi = model.system_projector();
    let h = pi * model.system_hamiltonian() * pi;
    let sd = linalg::eig_matrix(&h, linalg::default_tol_eig(&h))?;
    let vals: Vec<f64> = sd
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let v = sd.eigenvectors.column(*k).into_owned();
            (pi * &v).norm() > 0.5
        })
        .map(|(_, &x)| x)
        .collect();
    let mut expected: Vec<f64> = model.matched_pairs().iter().map(|m| m.energy).collect();
    expected.sort_by(f64::total_cmp);
    if vals.len() != expected.len() {
        return Ok(f64::INFINITY);
    }
    Ok(max_defect(vals.iter().zip(&expected).map(|(a, b)| (a - b).abs())))
}

/// Defects measured at one clock reading, for all observables.
#[derive(Debug, Default, Clone)]
struct TauDefects {
    strong_dirac: f64,
    twirl_paths: Option<f64>,
    hermiticity: f64,
    weak_class: f64,
    hom_add_mul: f64,
    hom_commutator: f64,
    s_encode: f64,
    s_reduce: f64,
    s_expectations: f64,
    h_encode: f64,
    h_expectations: f64,
    trivialized_obs: f64,
    trivialized_comm: f64,
    pw_inner: f64,
    pw_round_trip: f64,
    pw_reverse: f64,
    rh_tau_independence: f64,
    rh_alt: f64,
    rs_from_rh: f64,
}

/// Runs the full cross-picture suite on `observables` over `taus`.
///
/// Observables need not be projected: the weak-equivalence row uses the raw input
/// and every other identity uses `Π f Π`.
pub fn verify_trinity(model: &ConstraintModel, observables: &[CMat], taus: &[f64], seed: u64, strategy: Strategy) -> Result<Report> {
    let mut report = Report::new();
    if observables.is_empty() {
        return Ok(report);
    }
    model.require_nonempty()?;
    for f in observables {
        if f.nrows() != model.system_dim() || f.ncols() != model.system_dim() {
            return Err(TrinityError::DimensionMismatch { expected: model.system_dim(), got: f.nrows() });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = model.random_physical_state(&mut rng)?;
    let psi = model.random_physical_state(&mut rng)?;
    let ctx = trivialize_default(model)?;
    let p = model.physical_projector();
    let pi = model.system_projector();
    let projected: Vec<CMat> = observables.iter().map(|f| project(model, f)).collect();
    let phys_inner = physical_inner(model, &phi, &psi)?;
    let rh0 = sym_reduce_matrix(model, &ctx, 0.0) * p;
    let rh_inv = sym_inverse_matrix(model, &ctx);
    let phi_h = &rh0 * &phi.vector;
    let psi_h = &rh0 * &psi.vector;
    let triv_basis: Vec<CVec> = model.kernel_basis().iter().map(|b| ctx.forward() * b).collect();
    let dc = model.clock_dim();

    let per_tau: Vec<Result<TauDefects>> = exec::map(strategy, taus, |&tau| {
        let mut d = TauDefects::default();
        let rs = pw_reduce_matrix(model, tau);
        let rs_inv = pw_inverse_matrix(model, tau);
        let phi_s = &rs * &phi.vector;
        let psi_s = &rs * &psi.vector;
        let mut twirl = Some(0.0f64);
        for (f, fp) in observables.iter().zip(&projected) {
            let raw = relational_observable(model, f, tau)?.matrix;
            let big = relational_observable(model, fp, tau)?.matrix;
            d.strong_dirac = d.strong_dirac.max(strong_dirac_defect(model, &raw));
            if let (Some(acc), Some(q)) = (twirl, gtwirl_quadrature(model, &clock_dressed(model, f, tau))) {
                twirl = Some(acc.max((q - gtwirl(model, &clock_dressed(model, f, tau))).norm()));
            } else {
                twirl = None;
            }
            if linalg::hermiticity_defect(f) <= 1e-12 {
                d.hermiticity = d.hermiticity.max(linalg::hermiticity_defect(&raw));
            }
            d.weak_class = d.weak_class.max(weak_defect(model, &raw, &big));
            d.s_encode = d.s_encode.max(weak_defect(model, &encode_s(model, fp, tau)?, &big));
            d.s_reduce = d.s_reduce.max((&rs * &big * &rs_inv - fp).norm());
            let dirac = phi.vector.dotc(&(&big * &psi.vector));
            let reduced = phi_s.dotc(&(fp * &psi_s));
            let pw_form = phi.vector.dotc(&(clock_dressed(model, fp, tau) * &psi.vector));
            d.s_expectations = d.s_expectations.max((dirac - reduced).norm()).max((dirac - pw_form).norm());
            let fh = heisenberg_operator(model, fp, tau);
            d.h_encode = d.h_encode.max(weak_defect(model, &encode_h(model, &ctx, &fh)?, &big));
            d.h_expectations = d.h_expectations.max((dirac - phi_h.dotc(&(&fh * &psi_h))).norm());
            let triv = ctx.forward() * &big * ctx.inverse() - kron(&CMat::identity(dc, dc), &fh);
            d.trivialized_obs = d.trivialized_obs.max(max_defect(triv_basis.iter().map(|v| (&triv * v).norm())));
        }
        d.twirl_paths = twirl;
        let n = projected.len();
        for i in 0..n {
            let (f, g, h) = (&projected[i], &projected[(i + 1) % n], &projected[(i + 2) % n]);
            let hd = homomorphism_defects(model, f, g, h, tau)?;
            d.hom_add_mul = d.hom_add_mul.max(hd.add_mul);
            d.hom_commutator = d.hom_commutator.max(hd.commutator);
            d.trivialized_comm = d.trivialized_comm.max(trivialized_commutator_check(model, &ctx, f, g, tau)?);
        }
        d.pw_inner = (phi_s.dotc(&psi_s) - phys_inner).norm();
        d.pw_round_trip = (&rs_inv * &rs * p - p).norm();
        d.pw_reverse = (&rs * &rs_inv - pi).norm();
        let rh = sym_reduce_matrix(model, &ctx, tau) * p;
        d.rh_tau_independence = (&rh - &rh0).norm();
        d.rh_alt = (&rh - sym_reduce_alt_matrix(model, tau) * p).norm();
        d.rs_from_rh = (&rs * p - model.system_evolution(tau) * &rh0).norm();
        Ok(d)
    });
    let per_tau: Vec<TauDefects> = per_tau.into_iter().collect::<Result<_>>()?;
    let agg = |f: fn(&TauDefects) -> f64| max_defect(per_tau.iter().map(f));

    report.check("strong-dirac-observable", "relational observable commutes with the constraint", agg(|d| d.strong_dirac), 1e-10);
    if per_tau.iter().all(|d| d.twirl_paths.is_some()) {
        report.check("twirl-dephasing-vs-quadrature", "G-twirl as block dephasing equals the group average", agg(|d| d.twirl_paths.unwrap_or(0.0)), 1e-10);
    } else {
        report.push(CheckRow::skipped("twirl-dephasing-vs-quadrature", "G-twirl as block dephasing equals the group average", "constraint spectrum not commensurate with the clock period"));
    }
    report.check("hermiticity-transfer", "Hermitian f gives a Hermitian relational observable", agg(|d| d.hermiticity), 1e-12);
    report.check("weak-equivalence-class", "F_f and F_{ΠfΠ} agree on physical states", agg(|d| d.weak_class), 1e-9);
    report.check("homomorphism-add-mul", "f + g·h maps to F_f + F_g·F_h weakly", agg(|d| d.hom_add_mul), 1e-9);
    report.check("homomorphism-commutator", "[f, g] maps to [F_f, F_g] weakly", agg(|d| d.hom_commutator), 1e-9);
    report.check("schrodinger-encoding", "Schrodinger-picture encoding equals the relational observable", agg(|d| d.s_encode), 1e-9);
    report.check("schrodinger-reduction", "R_S F R_S^-1 = ΠfΠ", agg(|d| d.s_reduce), 1e-9);
    report.check("schrodinger-expectations", "Dirac, conditional-state and PW expectation values coincide", agg(|d| d.s_expectations), 1e-9);
    report.check("heisenberg-encoding", "Heisenberg-picture encoding equals the relational observable", agg(|d| d.h_encode), 1e-9);
    report.check("heisenberg-expectations", "Dirac and Heisenberg expectation values coincide", agg(|d| d.h_expectations), 1e-9);
    report.check("trivialized-observable", "trivialized relational observable is I_C ⊗ f(τ)", agg(|d| d.trivialized_obs), 1e-9);
    report.check("trivialized-commutator", "trivialized commutator is I_C ⊗ [f(τ), g(τ)]", agg(|d| d.trivialized_comm), 1e-9);
    report.check("pw-inner-product", "PW inner product equals the physical inner product", agg(|d| d.pw_inner), 1e-10);
    report.check("pw-round-trip", "R_S^-1 R_S = identity on physical states", agg(|d| d.pw_round_trip), 1e-10);
    report.check("pw-reverse-round-trip", "R_S R_S^-1 = Π_σSC", agg(|d| d.pw_reverse), 1e-10);
    report.check("trivialization-left-inverse", "T^-1 T = identity on physical states", trivialization_inverse_defect(model, &ctx), 1e-10);
    report.check("trivialization-constraint", "T C_H T^-1 = (H_C - ε*) ⊗ I on trivialized states", trivialization_conjugation_defect(model, &ctx), 1e-9);
    report.check("trivialization-product-form", "trivialized physical states have Schmidt rank one", trivialized_product_defect(model, &ctx, &[&phi, &psi]), 1e-9);
    report.check("heisenberg-round-trip", "R_H^-1 R_H = identity on physical states", (&rh_inv * &rh0 - p).norm(), 1e-10);
    report.check("heisenberg-reverse-round-trip", "R_H R_H^-1 = Π_σSC", (sym_reduce_matrix(model, &ctx, 0.0) * &rh_inv - pi).norm(), 1e-10);
    report.check("heisenberg-tau-independence", "R_H does not depend on the clock reading", agg(|d| d.rh_tau_independence), 1e-10);
    report.check("heisenberg-alternate-form", "R_H = ⟨τ| ⊗ U_S†(τ) on physical states", agg(|d| d.rh_alt), 1e-10);
    report.check("schrodinger-from-heisenberg", "R_S(τ) = U_S(τ) R_H on physical states", agg(|d| d.rs_from_rh), 1e-10);
    report.check("heisenberg-isometry", "R_H preserves the physical inner product", (phi_h.dotc(&psi_h) - phys_inner).norm(), 1e-10);
    let ham = model.system_hamiltonian();
    let expect_h = (phi_h.dotc(&(project(model, ham) * &psi_h))
        - phi.vector.dotc(&(relational_observable(model, &project(model, ham), 0.0)?.matrix * &psi.vector)))
    .norm();
    report.check("reduced-spectrum", "spec of the reduced Hamiltonian equals σ_SC", spectrum_defect(model)?.max(expect_h), 1e-9);
    let fit = schrodinger_residual(model, &psi, taus.first().copied().unwrap_or(0.0), &default_residual_deltas())?;
    report.push(
        CheckRow::new("schrodinger-residual-order", "conditional state obeys the Schrodinger equation (δ² convergence)", (fit.slope - 2.0).abs(), 0.1)
            .with_note(format!("slope {:.4}, richardson residual {:.3e}", fit.slope, fit.richardson)),
    );
    Ok(report)
}

/// Model-level checks on the constraint and its physical projector.
pub fn constraint_checks(model: &ConstraintModel, seed: u64) -> Result<Report> {
    let mut report = Report::new();
    let brute = model.brute_force_projector()?;
    let rank_gap = (linalg::eig_matrix(&brute, 1e-9)?.eigenvalues.iter().filter(|&&x| x > 0.5).count() as f64 - model.physical_rank() as f64).abs();
    report.check("kernel-projector", "structural projector equals the kernel projector of C_H", (brute - model.physical_projector()).norm() + rank_gap, 1e-10);
    let p = model.physical_projector();
    report.check("kernel-projector-commutes", "[C_H, P_phys] = 0", linalg::commutator(model.constraint(), p).norm(), 1e-12);
    let n = model.kin_dim();
    let basis_defect = (0..n)
        .map(|i| {
            let mut v = CVec::zeros(n);
            v[i] = Complex64::new(1.0, 0.0);
            group_average_quadrature(model, &v).map(|q| (q - p * &v).norm())
        })
        .collect::<Option<Vec<f64>>>();
    match basis_defect {
        Some(v) => {
            report.check("group-average-quadrature", "uniform group average equals P_phys", max_defect(v), 1e-10);
        }
        None => report.push(CheckRow::skipped("group-average-quadrature", "uniform group average equals P_phys", "constraint spectrum not commensurate with the clock period")),
    }
    if model.is_empty() {
        report.push(CheckRow::skipped("gauge-invariance", "physical states are invariant under U_CS(s)", "empty physical space"));
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        let psi = model.random_physical_state(&mut rng)?;
        report.check("gauge-invariance", "physical states are invariant under U_CS(s)", gauge_defect(model, &psi, &[0.3, 1.1, -2.4, 5.9]), 1e-10);
    }
    report.check("system-projector-integral", "μ∮χ*(t)U_S(t)dt = Π_σSC", system_projector_integral_defect(model), 1e-10);
    let pi = model.system_projector();
    report.check("system-projector-idempotent", "Π_σSC² = Π_σSC", (pi * pi - pi).norm(), 1e-12);
    report.check("projected-hamiltonian", "Π H_S Π = H_S Π", projection_defect(model, &(model.system_hamiltonian() * pi)), 1e-10);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, pauli_y, pauli_z, real_diag, ONE};
    use crate::presets;

    #[test]
    fn pw_reduce_examples() {
        let m = presets::m1();
        // |ε=1⟩|E=-1⟩: ⟨τ|ε=1⟩ = e^{iτ}
        let psi = m.physical_from_coefficients(&[ONE, Complex64::new(0.0, 0.0)]).unwrap();
        let b = m.kernel_basis();
        let which = if (b[0].clone() - &psi.vector).norm() < 1e-14 { 0 } else { 1 };
        let e_minus1 = m.matched_pairs()[which].system_index;
        let tau = 0.7;
        let r = pw_reduce(&m, tau, &psi).unwrap().vector;
        let sys_vec = m.system_eig().eigenvectors.column(e_minus1).into_owned();
        let amp = sys_vec.dotc(&r);
        let energy = m.matched_pairs()[which].energy;
        assert!((amp - cis(-energy * tau)).norm() < 1e-14);
        let r0 = pw_reduce(&m, 0.0, &psi).unwrap().vector;
        assert!((sys_vec.dotc(&r0) - ONE).norm() < 1e-14);
    }

    #[test]
    fn pw_norm_and_round_trips() {
        let m = presets::m1();
        let psi = m.random_physical_state(&mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let norm = physical_inner(&m, &psi, &psi).unwrap();
        for tau in [0.0, 1.0, 4.4] {
            let r = pw_reduce(&m, tau, &psi).unwrap();
            assert!((r.vector.norm_squared() - norm.re).abs() < 1e-12);
            let back = pw_inverse(&m, tau, &r.vector).unwrap();
            assert!((back.vector - &psi.vector).norm() <= 1e-10);
        }
        let c = crate::clock::build_clock(presets::m1_clock()).unwrap();
        let m = crate::constraint::build_model(c, crate::constraint::SystemSpec::new(real_diag(&[-1.0, 9.0])).unwrap(), 1e-9).unwrap();
        let outside = CVec::from_vec(vec![Complex64::new(0.0, 0.0), ONE]);
        assert!(pw_inverse(&m, 0.3, &outside).unwrap().vector.norm() < 1e-15);
    }

    #[test]
    fn pw_inverse_of_lowest_state() {
        let m = presets::m1();
        let phi = CVec::from_vec(vec![ONE, Complex64::new(0.0, 0.0)]);
        let out = pw_inverse(&m, 0.0, &phi).unwrap().vector;
        let mut expect = CVec::zeros(8);
        expect[2] = ONE; // clock index 1 (ε=1), system index 0
        assert!((out - expect).norm() < 1e-14);
    }

    #[test]
    fn trivialization_examples() {
        let m = presets::m1();
        let ctx = trivialize(&m, 1.0).unwrap();
        let mut v = CVec::zeros(8);
        v[2] = ONE;
        let psi = PhysicalState::new(&m, v.clone()).unwrap();
        assert!((ctx.apply(&psi) - v).norm() < 1e-12);
        let ent = m.physical_from_coefficients(&[Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]).unwrap();
        assert_eq!(linalg::schmidt_rank(&ent.vector, 4, 2, 1e-9), 2);
        assert_eq!(linalg::schmidt_rank(&ctx.apply(&ent), 4, 2, 1e-9), 1);
        assert!(trivialization_inverse_defect(&m, &ctx) <= 1e-10);
        assert!(matches!(trivialize(&m, 0.5), Err(TrinityError::EnergyNotInClockSpectrum(_))));
        assert_eq!(default_eps_star(&m).unwrap(), 1.0);
        assert_eq!(default_eps_star(&presets::m2()).unwrap(), -1.0);
    }

    #[test]
    fn heisenberg_state_is_kernel_coefficients() {
        let m = presets::m1();
        let ctx = trivialize_default(&m).unwrap();
        let c = [Complex64::new(0.3, 0.1), Complex64::new(-0.5, 0.8)];
        let psi = m.physical_from_coefficients(&c).unwrap();
        let h = sym_reduce(&m, &ctx, &psi).unwrap().vector;
        for (k, pair) in m.matched_pairs().iter().enumerate() {
            let v = m.system_eig().eigenvectors.column(pair.system_index).into_owned();
            assert!((v.dotc(&h) - c[k]).norm() < 1e-12);
        }
        for tau in [0.4, 3.0] {
            let at = sym_reduce_matrix(&m, &ctx, tau) * &psi.vector;
            assert!((at - &h).norm() <= 1e-10);
        }
        let back = sym_inverse(&m, &ctx, &h).unwrap();
        assert!((back.vector - &psi.vector).norm() <= 1e-10);
    }

    #[test]
    fn encodings_match_relational_observables() {
        let m = presets::m2();
        let ctx = trivialize_default(&m).unwrap();
        let tau = 0.3;
        let f = pauli_z();
        let big = relational_observable(&m, &f, tau).unwrap().matrix;
        assert!(weak_defect(&m, &encode_s(&m, &f, tau).unwrap(), &big) <= 1e-9);
        let fh = heisenberg_operator(&m, &f, tau);
        assert!(weak_defect(&m, &encode_h(&m, &ctx, &fh).unwrap(), &big) <= 1e-9);
    }

    #[test]
    fn trinity_suite_passes_on_presets() {
        let obs_m1 = vec![CMat::identity(2, 2), real_diag(&[1.0, -1.0]), pauli_x()];
        let m = presets::m1();
        let r = verify_trinity(&m, &obs_m1, &[0.0, std::f64::consts::PI / 3.0, std::f64::consts::PI], 1, Strategy::Sequential).unwrap();
        for row in &r.rows {
            assert!(row.pass, "{row:?}");
        }
        let m = presets::m2();
        let obs = vec![pauli_x(), pauli_y(), pauli_z()];
        let taus: Vec<f64> = (0..20).map(|k| 0.31 * k as f64).collect();
        let r = verify_trinity(&m, &obs, &taus, 2, Strategy::Parallel).unwrap();
        for row in &r.rows {
            assert!(row.pass, "{row:?}");
        }
        assert!(verify_trinity(&m, &[], &taus, 2, Strategy::Parallel).unwrap().rows.is_empty());
    }

    #[test]
    fn constraint_checks_pass_on_presets() {
        for m in [presets::m1(), presets::m2()] {
            let r = constraint_checks(&m, 0).unwrap();
            assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn schrodinger_residual_is_second_order() {
        let m = presets::m1();
        let psi = m.random_physical_state(&mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let fit = schrodinger_residual(&m, &psi, 0.4, &default_residual_deltas()).unwrap();
        assert!((fit.slope - 2.0).abs() <= 0.1, "{fit:?}");
        assert!(fit.richardson < fit.residuals[0]);
    }
}
