//! Covariant clock POVMs built from a non-degenerate clock Hamiltonian.
//!
//! Clock states are `|t⟩ = Σ_j e^{ig(ε_j)} e^{-iε_j t} |ε_j⟩`, stored in the
//! energy eigenbasis. Two regimes are supported:
//!
//! * `Compact`: every energy satisfies `ε_j t_max = 2π n_j + φ`, the group is the
//!   circle `[0, t_max)` and `μ = 1/t_max`.
//! * `ContinuumApprox`: a uniform energy grid of spacing `Δε` standing in for a
//!   continuous spectrum. The measure constant is `μ = 1/2π`; time integrals run
//!   over a window `[-T_win, T_win]` and carry the grid weight, so the measure
//!   applied to `dt` is `μ·Δε`. The default window is one full recurrence
//!   period `2π/Δε`, on which the resolution of the identity is exact.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrinityError};
use crate::exec::{self, Strategy};
use crate::linalg::{cis, commutator, CMat, CVec, HilbertSpace, Operator, StateVector, I, ONE};
use crate::quadrature::{exp_integral, moment_integral};
use crate::report::{max_defect, CheckRow, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Compact,
    ContinuumApprox,
}

/// Polynomial phase function `g(ε) = Σ_k c_k ε^k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseFunction {
    pub coeffs: Vec<f64>,
}

impl PhaseFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn eval(&self, e: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * e + c)
    }

    pub fn derivative(&self) -> Self {
        Self { coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect() }
    }
}

/// Serializable description of a clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClockSpec {
    pub regime: Regime,
    pub energies: Vec<f64>,
    /// Period of the clock group (Compact only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Global phase `φ` in `U_C(t_max) = e^{iφ}` (Compact only); inferred from the lowest energy when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    /// Half-width `T_win` of the time window (ContinuumApprox only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    /// Trapezoid step used by sampled diagnostics (ContinuumApprox only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "phase_is_zero")]
    pub g: PhaseFunction,
}

fn phase_is_zero(g: &PhaseFunction) -> bool {
    g.coeffs.iter().all(|&c| c == 0.0)
}

impl ClockSpec {
    pub fn compact(energies: Vec<f64>, t_max: f64) -> Self {
        Self { regime: Regime::Compact, energies, t_max: Some(t_max), phase: None, window: None, dt: None, g: PhaseFunction::zero() }
    }

    /// Integer energies `lo, lo+1, …, hi` on the circle of length `2π`.
    pub fn compact_integers(lo: i64, hi: i64) -> Self {
        Self::compact((lo..=hi).map(|e| e as f64).collect(), 2.0 * PI)
    }

    pub fn continuum(energies: Vec<f64>) -> Self {
        Self { regime: Regime::ContinuumApprox, energies, t_max: None, phase: None, window: None, dt: None, g: PhaseFunction::zero() }
    }

    /// Uniform grid `e0, e0+Δε, …` with `n` points.
    pub fn continuum_grid(e0: f64, spacing: f64, n: usize) -> Self {
        Self::continuum((0..n).map(|k| e0 + spacing * k as f64).collect())
    }

    pub fn with_phase_function(mut self, g: PhaseFunction) -> Self {
        self.g = g;
        self
    }
}

/// The clock group as an integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Group {
    Circle { t_max: f64, phi: f64 },
    Window { half_width: f64, dt: f64, spacing: f64 },
}

impl Group {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Group::Circle { t_max, .. } => (0.0, t_max),
            Group::Window { half_width, .. } => (-half_width, half_width),
        }
    }

    pub fn length(&self) -> f64 {
        let (a, b) = self.bounds();
        b - a
    }

    /// Recurrence period of the clock states.
    pub fn period(&self) -> f64 {
        match *self {
            Group::Circle { t_max, .. } => t_max,
            Group::Window { spacing, .. } => 2.0 * PI / spacing,
        }
    }
}

/// A clock Hamiltonian together with its covariant time observable.
#[derive(Debug, Clone)]
pub struct ClockSystem {
    pub spec: ClockSpec,
    energies: Vec<f64>,
    phases: Vec<f64>,
    mu: f64,
    measure: f64,
    group: Group,
    hamiltonian: Operator,
}

const COMPACT_TOL: f64 = 1e-9;

/// Validates `spec` and builds the clock.
pub fn build_clock(spec: ClockSpec) -> Result<ClockSystem> {
    build_clock_labeled(spec, "C")
}

pub fn build_clock_labeled(spec: ClockSpec, label: &str) -> Result<ClockSystem> {
    let e = &spec.energies;
    if e.is_empty() {
        return Err(TrinityError::InvalidSpace("clock has no energies".into()));
    }
    for j in 1..e.len() {
        if !(e[j] > e[j - 1]) {
            return Err(TrinityError::DegenerateClock(j));
        }
    }
    let (group, mu, measure) = match spec.regime {
        Regime::Compact => {
            let t_max = spec.t_max.ok_or_else(|| TrinityError::Config("compact clock requires t_max".into()))?;
            if !(t_max > 0.0) {
                return Err(TrinityError::Config("t_max must be positive".into()));
            }
            let phi = spec.phase.unwrap_or_else(|| (e[0] * t_max).rem_euclid(2.0 * PI));
            for &x in e {
                let r = (x * t_max - phi) / (2.0 * PI);
                let residual = (r - r.round()).abs() * 2.0 * PI;
                if residual > COMPACT_TOL {
                    return Err(TrinityError::CompactnessViolated { energy: x, t_max, residual });
                }
            }
            (Group::Circle { t_max, phi }, 1.0 / t_max, 1.0 / t_max)
        }
        Regime::ContinuumApprox => {
            if e.len() < 2 {
                return Err(TrinityError::InvalidSpace("continuum grid needs at least two energies".into()));
            }
            let spacing = e[1] - e[0];
            for j in 2..e.len() {
                if ((e[j] - e[j - 1]) - spacing).abs() > 1e-9 * spacing.max(1.0) {
                    return Err(TrinityError::NonUniformGrid(j));
                }
            }
            let half_width = spec.window.unwrap_or(PI / spacing);
            if !(half_width > 0.0) {
                return Err(TrinityError::Config("window must be positive".into()));
            }
            let dt = spec.dt.unwrap_or(2.0 * PI / spacing / (4 * e.len()) as f64);
            (Group::Window { half_width, dt, spacing }, 1.0 / (2.0 * PI), spacing / (2.0 * PI))
        }
    };
    let phases = e.iter().map(|&x| spec.g.eval(x)).collect();
    let space = HilbertSpace::new(label, e.len())?;
    let hamiltonian = Operator::from_real_diagonal(space, e)?;
    Ok(ClockSystem { energies: e.clone(), phases, mu, measure, group, hamiltonian, spec })
}

impl ClockSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `g(ε_j)` for every energy.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn regime(&self) -> Regime {
        self.spec.regime
    }

    /// Measure constant `μ` (`1/t_max` or `1/2π`).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Measure multiplying `dt` in time integrals.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.hamiltonian.space
    }

    /// Index of an energy within `tol`.
    pub fn index_of(&self, energy: f64, tol: f64) -> Option<usize> {
        self.energies.iter().position(|&e| (e - energy).abs() <= tol)
    }

    /// `⟨ε_j|t⟩ = e^{ig(ε_j)} e^{-iε_j t}`.
    #[inline]
    pub fn amplitude(&self, j: usize, t: f64) -> Complex64 {
        cis(self.phases[j] - self.energies[j] * t)
    }

    pub fn state(&self, t: f64) -> CVec {
        CVec::from_iterator(self.dim(), (0..self.dim()).map(|j| self.amplitude(j, t)))
    }

    /// `μ_eff ∫_G e^{iωt} dt`, exact.
    pub fn group_integral(&self, omega: f64) -> Complex64 {
        let (a, b) = self.group.bounds();
        exp_integral(omega, a, b) * self.measure
    }

    /// Time-integral kernel `μ_eff ∫_a^b tⁿ |t⟩⟨t| dt`; entries depend on `ε_j - ε_k` only up to the `g` phases.
    fn weighted_projector_integral(&self, n: u32, a: f64, b: f64) -> CMat {
        let d = self.dim();
        let integral = |j: usize, k: usize| moment_integral(n, -(self.energies[j] - self.energies[k]), a, b);
        let kernel: Vec<Complex64> = match self.regime() {
            // uniform grid: integrals depend on j - k only
            Regime::ContinuumApprox => exec::map_range(Strategy::available(), 2 * d - 1, |m| {
                let off = m as isize - (d as isize - 1);
                if off >= 0 {
                    integral(off as usize, 0)
                } else {
                    integral(0, (-off) as usize)
                }
            }),
            Regime::Compact => Vec::new(),
        };
        CMat::from_fn(d, d, |j, k| {
            let val = match self.regime() {
                Regime::ContinuumApprox => kernel[(j as isize - k as isize + d as isize - 1) as usize],
                Regime::Compact => integral(j, k),
            };
            val * cis(self.phases[j] - self.phases[k]) * self.measure
        })
    }

    fn check_interval(&self, a: f64, b: f64) -> Result<()> {
        let slack = 1e-12 * self.group.length().max(1.0);
        let ok = match self.group {
            Group::Circle { t_max, .. } => b >= a && b - a <= t_max + slack,
            Group::Window { half_width, .. } => b >= a && a >= -half_width - slack && b <= half_width + slack,
        };
        if ok {
            Ok(())
        } else {
            Err(TrinityError::IntervalOutsideGroup { a, b })
        }
    }

    /// `E_T([a,b]) = μ ∫_a^b |t⟩⟨t| dt` as a raw matrix.
    pub fn effect_matrix(&self, a: f64, b: f64) -> Result<CMat> {
        self.check_interval(a, b)?;
        Ok(self.weighted_projector_integral(0, a, b))
    }

    /// `T̂^{(n)} = μ ∮ tⁿ |t⟩⟨t| dt` as a raw matrix.
    pub fn moment_matrix(&self, n: u32) -> CMat {
        let (a, b) = self.group.bounds();
        self.weighted_projector_integral(n, a, b)
    }

    /// Clock with the same spectrum and a different phase function.
    pub fn reparametrize(&self, g: PhaseFunction) -> Result<ClockSystem> {
        let spec = self.spec.clone().with_phase_function(g);
        build_clock_labeled(spec, &self.space().label)
    }
}

pub fn clock_state(c: &ClockSystem, t: f64) -> StateVector {
    StateVector { space: c.space().clone(), amplitudes: c.state(t) }
}

pub fn effect(c: &ClockSystem, a: f64, b: f64) -> Result<Operator> {
    Ok(Operator { space: c.space().clone(), matrix: c.effect_matrix(a, b)? })
}

pub fn moment_operator(c: &ClockSystem, n: u32) -> Operator {
    Operator { space: c.space().clone(), matrix: c.moment_matrix(n) }
}

/// `U_C(t) = e^{-iĤ_C t}` (diagonal).
pub fn clock_evolution(c: &ClockSystem, t: f64) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(c.dim(), c.energies().iter().map(|&e| cis(-e * t))))
}

/// Compact: `[T̂, Ĥ_C] - i(I - |t_max⟩⟨t_max|)`. ContinuumApprox: `[T̂, Ĥ_C] - iI`.
pub fn ccr_defect(c: &ClockSystem) -> Operator {
    let t = c.moment_matrix(1);
    let h = &c.hamiltonian().matrix;
    let d = c.dim();
    let mut target = CMat::identity(d, d) * I;
    if let Group::Circle { t_max, .. } = c.group() {
        let s = c.state(t_max);
        target -= (&s * s.adjoint()) * I;
    }
    Operator { space: c.space().clone(), matrix: commutator(&t, h) - target }
}

/// `‖E_T(X+t) - U_C(t) E_T(X) U_C†(t)‖` for `X = [a,b]`.
pub fn covariance_defect(c: &ClockSystem, a: f64, b: f64, t: f64) -> Result<f64> {
    let shifted = c.effect_matrix(a + t, b + t)?;
    let u = clock_evolution(c, t);
    let moved = &u * c.effect_matrix(a, b)? * u.adjoint();
    Ok((shifted - moved).norm())
}

/// `max_t ‖|t⟩ - U_C(t)|0⟩‖` over the given times.
pub fn state_covariance_defect(c: &ClockSystem, times: &[f64]) -> f64 {
    let zero = c.state(0.0);
    times.iter().map(|&t| (c.state(t) - clock_evolution(c, t) * &zero).norm()).fold(0.0, f64::max)
}

/// `‖E_T(G) - I‖`.
pub fn resolution_defect(c: &ClockSystem) -> f64 {
    let (a, b) = c.group().bounds();
    let e = c.weighted_projector_integral(0, a, b);
    (e - CMat::identity(c.dim(), c.dim())).norm()
}

/// `max_j ‖|ε_j⟩ - μ ∮ e^{-ig(ε_j)} e^{iε_j t} |t⟩ dt‖`.
pub fn fourier_defect(c: &ClockSystem) -> f64 {
    let d = c.dim();
    let mut worst = 0.0_f64;
    for j in 0..d {
        let mut v = CVec::zeros(d);
        for k in 0..d {
            // ∫ e^{iε_j t} e^{ig_k} e^{-iε_k t} dt
            v[k] = c.group_integral(c.energies()[j] - c.energies()[k]) * cis(c.phases()[k] - c.phases()[j]);
        }
        v[j] -= ONE;
        worst = worst.max(v.norm());
    }
    worst
}

/// Compact regime: `‖U_C(s) T̂ U_C†(s) - (T̂ - sI + ∫_0^s |t⟩⟨t| dt)‖`.
pub fn monotonicity_defect(c: &ClockSystem, s: f64) -> Result<f64> {
    let Group::Circle { t_max, .. } = c.group() else {
        return Err(TrinityError::Config("monotonicity identity needs a compact clock".into()));
    };
    let t = c.moment_matrix(1);
    let u = clock_evolution(c, s);
    let lhs = &u * &t * u.adjoint();
    let d = c.dim();
    let rhs = &t - CMat::identity(d, d) * Complex64::new(s, 0.0) + c.effect_matrix(0.0, s)? * Complex64::new(t_max, 0.0);
    Ok((lhs - rhs).norm())
}

/// `d⟨T̂⟩/dt = ⟨ψ(t)| i[Ĥ_C, T̂] |ψ(t)⟩` along `ψ(t) = U_C(t)ψ`, for normalized `ψ`.
pub fn mean_time_rate(c: &ClockSystem, psi: &CVec, times: &[f64]) -> Vec<f64> {
    let gen = commutator(&c.hamiltonian().matrix, &c.moment_matrix(1)) * I;
    times
        .iter()
        .map(|&t| {
            let v = clock_evolution(c, t) * psi;
            v.dotc(&(&gen * &v)).re / v.norm_squared()
        })
        .collect()
}

/// `μ_eff |⟨t|ψ⟩|²`, the time-observable density of `ψ`.
pub fn probability_density(c: &ClockSystem, psi: &CVec, t: f64) -> f64 {
    c.measure() * c.state(t).dotc(psi).norm_sqr()
}

/// Gaussian energy wavepacket centred at `e0` with energy width `width`,
/// translated to clock reading `t0`; normalized.
pub fn gaussian_probe(c: &ClockSystem, e0: f64, width: f64, t0: f64) -> CVec {
    let v = CVec::from_iterator(
        c.dim(),
        c.energies().iter().zip(c.phases()).map(|(&e, &g)| {
            let x = (e - e0) / width;
            cis(g - e * t0) * (-0.5 * x * x).exp()
        }),
    );
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Interior probe set used for continuum diagnostics: three energy centres
/// around the middle of the grid, each at three clock readings.
pub fn default_probes(c: &ClockSystem) -> Vec<CVec> {
    let e = c.energies();
    let (lo, hi) = (e[0], e[e.len() - 1]);
    let mid = 0.5 * (lo + hi);
    let width = (hi - lo) / 16.0;
    let (a, b) = c.group().bounds();
    let span = (b - a) / 16.0;
    let t_mid = 0.5 * (a + b);
    let mut probes = Vec::new();
    for de in [-1.0, 0.0, 1.0] {
        for dt in [-1.0, 0.0, 1.0] {
            probes.push(gaussian_probe(c, mid + de * width, width, t_mid + dt * span));
        }
    }
    probes
}

/// Outcome of the phase-freedom identity `e^{ig(Ĥ)} T̂ e^{-ig(Ĥ)} = T̂ + g′(Ĥ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseFreedomDefect {
    /// Frobenius norm of the full operator difference.
    pub full: f64,
    /// `max ‖Δ ψ‖ / ‖ψ‖` over the probe states.
    pub probe: f64,
}

pub fn check_phase_freedom(c: &ClockSystem, g: &PhaseFunction, probes: &[CVec]) -> PhaseFreedomDefect {
    let t = c.moment_matrix(1);
    let d = c.dim();
    let phase = CMat::from_diagonal(&CVec::from_iterator(d, c.energies().iter().map(|&e| cis(g.eval(e)))));
    let h = g.derivative();
    let shift = CMat::from_diagonal(&CVec::from_iterator(d, c.energies().iter().map(|&e| Complex64::new(h.eval(e), 0.0))));
    let diff = &phase * &t * phase.adjoint() - (&t + shift);
    let probe = probes.iter().map(|p| (&diff * p).norm() / p.norm()).fold(0.0, f64::max);
    PhaseFreedomDefect { full: diff.norm(), probe }
}

/// Uniform grid used for the phase-freedom row: 256 levels of spacing 1/16 centred on zero.
pub fn ideal_clock_grid() -> Result<ClockSystem> {
    build_clock(ClockSpec::continuum_grid(-8.0, 1.0 / 16.0, 256))
}

/// Clock POVM checks: covariance, resolution of identity, the commutation
/// relation with its boundary term, and reparametrization of the phase freedom.
pub fn clock_checks(c: &ClockSystem) -> Result<Report> {
    let (a, b) = c.group().bounds();
    let len = b - a;
    let mut report = Report::new();
    let cov = [(0.1, 0.3, 0.2), (0.0, 0.5, 0.4), (0.05, 0.15, 0.8)]
        .iter()
        .map(|&(x, y, t)| covariance_defect(c, a + x * len, a + y * len, t * len))
        .collect::<Result<Vec<_>>>()?;
    report.check("clock-covariance", "E_T(X + t) = U_C(t) E_T(X) U_C(t)†", max_defect(cov), 1e-10);
    let times = [-0.7 * len, 0.13 * len, 0.5 * len];
    report.check("clock-state-covariance", "|t⟩ = U_C(t)|0⟩", state_covariance_defect(c, &times), 1e-10);
    report.check("clock-resolution", "μ ∫ |t⟩⟨t| dt = I", resolution_defect(c), 1e-12);
    report.check("clock-fourier", "|ε⟩ recovered from the clock states", fourier_defect(c), 1e-12);
    match c.group() {
        Group::Circle { t_max, .. } => {
            report.check("clock-ccr", "[T̂, Ĥ_C] = i(I - |t_max⟩⟨t_max|)", ccr_defect(c).matrix.norm(), 1e-10);
            let mono = [0.1, 0.25, 0.5, 0.9].iter().map(|f| monotonicity_defect(c, f * t_max)).collect::<Result<Vec<_>>>()?;
            report.check("clock-monotonicity", "U_C(s) T̂ U_C(s)† = T̂ - s + t_max E_T([0, s])", max_defect(mono), 1e-10);
        }
        Group::Window { .. } => {
            report.push(CheckRow::skipped("clock-ccr", "[T̂, Ĥ_C] = iI", "holds only on interior probes of a windowed clock; see clock-info"));
            report.push(CheckRow::skipped("clock-monotonicity", "U_C(s) T̂ U_C(s)† = T̂ - s + t_max E_T([0, s])", "compact clocks only"));
        }
    }
    let ideal = ideal_clock_grid()?;
    let probes = default_probes(&ideal);
    let phase = [PhaseFunction::polynomial(vec![0.8]), PhaseFunction::polynomial(vec![0.0, 0.3]), PhaseFunction::polynomial(vec![0.0, 0.0, 0.5])]
        .iter()
        .map(|g| check_phase_freedom(&ideal, g, &probes).probe)
        .fold(0.0, f64::max);
    report
        .check("clock-phase-freedom", "e^{ig(Ĥ)} T̂ e^{-ig(Ĥ)} = T̂ + g'(Ĥ)", phase, 1e-8)
        .note = Some("interior probes on a 256-level grid of spacing 1/16".into());
    Ok(report)
}

/// Summary numbers printed by the `clock-info` command.
#[derive(Debug, Clone, Serialize)]
pub struct ClockDiagnostics {
    pub regime: Regime,
    pub dim: usize,
    pub mu: f64,
    pub measure: f64,
    pub t_max: Option<f64>,
    pub window: Option<f64>,
    pub dt: Option<f64>,
    pub resolution_defect: f64,
    pub ccr_defect: f64,
    pub ccr_probe_defect: Option<f64>,
    pub covariance_defect: f64,
    pub fourier_defect: f64,
    pub monotonicity_defect: Option<f64>,
    pub time_operator_hermiticity: f64,
}

pub fn diagnostics(c: &ClockSystem) -> Result<ClockDiagnostics> {
    let (a, b) = c.group().bounds();
    let len = b - a;
    let ccr = ccr_defect(c).matrix;
    let (t_max, window, dt, mono, probe) = match c.group() {
        Group::Circle { t_max, .. } => {
            let m = [0.1, 0.25, 0.5, 0.9].iter().map(|f| monotonicity_defect(c, f * t_max)).collect::<Result<Vec<_>>>()?;
            (Some(t_max), None, None, Some(m.into_iter().fold(0.0, f64::max)), None)
        }
        Group::Window { half_width, dt, .. } => {
            let p = default_probes(c).iter().map(|v| (&ccr * v).norm()).fold(0.0, f64::max);
            (None, Some(half_width), Some(dt), None, Some(p))
        }
    };
    Ok(ClockDiagnostics {
        regime: c.regime(),
        dim: c.dim(),
        mu: c.mu(),
        measure: c.measure(),
        t_max,
        window,
        dt,
        resolution_defect: resolution_defect(c),
        ccr_defect: ccr.norm(),
        ccr_probe_defect: probe,
        covariance_defect: covariance_defect(c, a, a + 0.25 * len, 0.37 * len)?,
        fourier_defect: fourier_defect(c),
        monotonicity_defect: mono,
        time_operator_hermiticity: crate::linalg::hermiticity_defect(&c.moment_matrix(1)),
    })
}
