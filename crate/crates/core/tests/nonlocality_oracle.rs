//! Independent state-vector oracle for the nonlocality scenario.
//!
//! Builds the physical state in the full `A ⊗ B ⊗ S` space by trapezoid group
//! averaging of a time-sampled product state, conditions on clock B, and
//! compares the 2×2 fidelities with closed forms.

use std::f64::consts::PI;

use num_complex::Complex64;
use trinity_core::exec::Strategy;
use trinity_core::framechange::{nonlocality_scenario, NonlocalityConfig, NONLOCALITY_FIDELITY_THRESHOLD};

type C = Complex64;

const D: usize = 64;
const SIGMA: f64 = 0.125;
const DELTA: f64 = 2.5;

fn energy(j: usize) -> f64 {
    j as f64 - (D / 2) as f64
}

fn cis(x: f64) -> C {
    C::new(x.cos(), x.sin())
}

/// `e^{-iĤ_S t}` for `Ĥ_S = (I - σ_x)/2`, applied to `(x0, x1)`.
fn evolve_s(t: f64, v: [C; 2]) -> [C; 2] {
    let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
    let g = cis(-t / 2.0);
    let i = C::new(0.0, 1.0);
    [g * (c * v[0] + i * s * v[1]), g * (c * v[1] + i * s * v[0])]
}

/// Energy coefficients of `∫dt φ(t)|t⟩` with `φ` a sum of periodized Gaussians,
/// from a fine time-domain Riemann sum over one period.
fn wavepacket(centers: &[f64]) -> Vec<C> {
    let n = 4096;
    let profile = |t: f64| -> f64 {
        centers
            .iter()
            .map(|&c| (-3..=3).map(|w| (-(t - c + 2.0 * PI * w as f64).powi(2) / (2.0 * SIGMA * SIGMA)).exp()).sum::<f64>())
            .sum()
    };
    let mut v = vec![C::new(0.0, 0.0); D];
    for m in 0..n {
        let t = -PI + 2.0 * PI * m as f64 / n as f64;
        let p = profile(t);
        for (b, vb) in v.iter_mut().enumerate() {
            *vb += cis(-energy(b) * t) * p;
        }
    }
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

fn idx(a: usize, b: usize, s: usize) -> usize {
    (a * D + b) * 2 + s
}

/// `Σ_m e^{-iĤ t_m} (|τ_A = 0⟩ ⊗ ψ_B ⊗ ψ_S) / N`, exact for integer gaps below N.
fn physical_state(psi_b: &[C], psi_s: [C; 2]) -> Vec<C> {
    let nodes = 256;
    let mut out = vec![C::new(0.0, 0.0); D * D * 2];
    for m in 0..nodes {
        let t = -PI + 2.0 * PI * m as f64 / nodes as f64;
        let s = evolve_s(t, psi_s);
        for a in 0..D {
            for b in 0..D {
                let phase = cis(-(energy(a) + energy(b)) * t) * psi_b[b];
                for k in 0..2 {
                    out[idx(a, b, k)] += phase * s[k] / nodes as f64;
                }
            }
        }
    }
    out
}

/// `(⟨τ|_B ⊗ I) Ψ` as a `D × 2` array indexed by `(a, s)`.
fn condition_on_b(psi: &[C], tau: f64) -> Vec<[C; 2]> {
    (0..D)
        .map(|a| {
            let mut acc = [C::new(0.0, 0.0); 2];
            for b in 0..D {
                let w = cis(energy(b) * tau);
                for k in 0..2 {
                    acc[k] += w * psi[idx(a, b, k)];
                }
            }
            acc
        })
        .collect()
}

type Rho = [[C; 2]; 2];

fn reduced_system(cond: &[[C; 2]]) -> Rho {
    let mut rho = [[C::new(0.0, 0.0); 2]; 2];
    for row in cond {
        for i in 0..2 {
            for j in 0..2 {
                rho[i][j] += row[i] * row[j].conj();
            }
        }
    }
    let tr = rho[0][0].re + rho[1][1].re;
    rho.map(|r| r.map(|x| x / tr))
}

fn pure(v: [C; 2]) -> Rho {
    let n = v[0].norm_sqr() + v[1].norm_sqr();
    [[v[0] * v[0].conj() / n, v[0] * v[1].conj() / n], [v[1] * v[0].conj() / n, v[1] * v[1].conj() / n]]
}

fn mix(x: &Rho, y: &Rho) -> Rho {
    let mut out = *x;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (x[i][j] + y[i][j]) * 0.5;
        }
    }
    out
}

fn det(r: &Rho) -> f64 {
    (r[0][0] * r[1][1] - r[0][1] * r[1][0]).re
}

/// Qubit fidelity `Tr(ρσ) + 2√(det ρ · det σ)`.
fn qubit_fidelity(r: &Rho, s: &Rho) -> f64 {
    let mut tr = C::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            tr += r[i][j] * s[j][i];
        }
    }
    tr.re + 2.0 * (det(r).max(0.0) * det(s).max(0.0)).sqrt()
}

struct Oracle {
    local_evolution: f64,
    single_peak: f64,
    mixture: f64,
    branch_mixture: f64,
}

fn oracle_at(single: &[C], double: &[C], tau: f64) -> Oracle {
    let psi_s0 = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let target = |t: f64| pure(evolve_s(t, psi_s0));
    let out1 = condition_on_b(single, tau);
    let out0 = condition_on_b(single, 0.0);
    let frozen: Vec<[C; 2]> = out0.iter().enumerate().map(|(a, v)| evolve_s(tau, *v).map(|x| x * cis(-energy(a) * tau))).collect();
    let dot: C = out1.iter().zip(&frozen).map(|(x, y)| x[0].conj() * y[0] + x[1].conj() * y[1]).sum();
    let nn = |v: &[[C; 2]]| v.iter().map(|x| x[0].norm_sqr() + x[1].norm_sqr()).sum::<f64>();
    let rho1 = reduced_system(&out1);
    let rho2 = reduced_system(&condition_on_b(double, tau));
    let branches = mix(&reduced_system(&condition_on_b(single, tau - DELTA)), &reduced_system(&condition_on_b(single, tau + DELTA)));
    Oracle {
        local_evolution: dot.norm_sqr() / (nn(&out1) * nn(&frozen)),
        single_peak: qubit_fidelity(&rho1, &target(tau)),
        mixture: qubit_fidelity(&rho2, &mix(&target(tau - DELTA), &target(tau + DELTA))),
        branch_mixture: qubit_fidelity(&rho2, &branches),
    }
}

/// Minimum single-peak fidelity over the default readings, frozen from the oracle.
const SINGLE_PEAK_MIN: f64 = 0.998_050_7;

#[test]
fn nonlocality_matches_state_vector_oracle() {
    let config = NonlocalityConfig::default();
    assert_eq!((config.sigma, config.delta, config.clock_dim, config.spacing), (SIGMA, DELTA, D, 1.0));
    let outcome = nonlocality_scenario(&config, Strategy::Sequential).unwrap();

    let psi_s0 = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let single = physical_state(&wavepacket(&[0.0]), psi_s0);
    let double = physical_state(&wavepacket(&[-DELTA, DELTA]), psi_s0);

    let mut min_single: f64 = 1.0;
    for sample in &outcome.samples {
        let o = oracle_at(&single, &double, sample.tau_b);
        println!(
            "tau_b={:+.2} single={:.8} mixture={:.8} branch={:.12} local={:.12}",
            sample.tau_b, o.single_peak, o.mixture, o.branch_mixture, o.local_evolution
        );
        for (got, want) in [
            (sample.local_evolution, o.local_evolution),
            (sample.single_peak, o.single_peak),
            (sample.mixture, o.mixture),
            (sample.branch_mixture, o.branch_mixture),
        ] {
            assert!((got - want).abs() < 1e-8, "tau_b={} got {got} want {want}", sample.tau_b);
        }
        assert!(o.single_peak >= NONLOCALITY_FIDELITY_THRESHOLD);
        assert!(o.mixture >= NONLOCALITY_FIDELITY_THRESHOLD);
        assert!((o.branch_mixture - 1.0).abs() < 1e-10);
        assert!((o.local_evolution - 1.0).abs() < 1e-10);
        min_single = min_single.min(o.single_peak);
    }
    assert!((min_single - SINGLE_PEAK_MIN).abs() < 1e-7, "min single-peak fidelity {min_single}");
    assert!(outcome.report.all_pass());
}

#[test]
fn coincident_peaks_reduce_to_single_peak() {
    let config = NonlocalityConfig { delta: 0.0, ..NonlocalityConfig::default() };
    let outcome = nonlocality_scenario(&config, Strategy::Sequential).unwrap();
    for s in &outcome.samples {
        assert!((s.mixture - s.single_peak).abs() < 1e-10);
        assert!((s.branch_mixture - 1.0).abs() < 1e-10);
    }
}
