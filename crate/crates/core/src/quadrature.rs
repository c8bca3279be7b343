//! Time-integration rules used by the clock and group-averaging code.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::linalg::cis;

/// Exact `∫_a^b e^{iωt} dt`, evaluated without cancellation for small `ω`.
pub fn exp_integral(omega: f64, a: f64, b: f64) -> Complex64 {
    let len = b - a;
    if omega == 0.0 {
        return Complex64::new(len, 0.0);
    }
    let x = omega * len;
    let half = (0.5 * x).sin();
    // (e^{ix} - 1)/(iω) = sin(x)/ω + i·2sin²(x/2)/ω
    let core = Complex64::new(x.sin() / omega, 2.0 * half * half / omega);
    cis(omega * a) * core
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let (p, pm1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n == 1 {
        nodes[0] = 0.0;
        weights[0] = 2.0;
    }
    (nodes, weights)
}

const GL_ORDER: usize = 24;

/// `∫_a^b tⁿ e^{iωt} dt` by composite Gauss–Legendre, with panels no wider
/// than two radians of phase. Accurate to rounding for moderate `n`.
pub fn moment_integral(n: u32, omega: f64, a: f64, b: f64) -> Complex64 {
    if n == 0 {
        return exp_integral(omega, a, b);
    }
    let len = b - a;
    if len == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let panels = ((omega.abs() * len.abs()) / 2.0).ceil().max(1.0) as usize;
    let (x, w) = gauss_legendre(GL_ORDER);
    let h = len / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(&w) {
            let t = mid + 0.5 * h * xi;
            acc += cis(omega * t) * (wi * t.powi(n as i32));
        }
    }
    acc * (0.5 * h)
}

/// Nodes of the uniform `n`-point rule over one period starting at `t0`;
/// each carries weight `period / n`. Exact for trigonometric polynomials of
/// integer frequency (in units of `2π/period`) below `n` in magnitude.
pub fn periodic_nodes(t0: f64, period: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| t0 + period * k as f64 / n as f64).collect()
}

/// Composite trapezoid nodes and weights on `[a, b]` with `steps` intervals.
pub fn trapezoid(a: f64, b: f64, steps: usize) -> (Vec<f64>, Vec<f64>) {
    let steps = steps.max(1);
    let h = (b - a) / steps as f64;
    let nodes: Vec<f64> = (0..=steps).map(|k| a + h * k as f64).collect();
    let mut weights = vec![h; steps + 1];
    weights[0] = 0.5 * h;
    weights[steps] = 0.5 * h;
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_integral_matches_closed_form() {
        let (w, a, b) = (1.7, -0.3, 2.2);
        let direct = (cis(w * b) - cis(w * a)) / Complex64::new(0.0, w);
        assert!((exp_integral(w, a, b) - direct).norm() < 1e-14);
        assert!((exp_integral(0.0, 1.0, 3.0) - Complex64::new(2.0, 0.0)).norm() == 0.0);
        assert!((exp_integral(1.0, 0.0, 2.0 * PI)).norm() < 1e-15);
        // tiny ω: series limit
        let z = exp_integral(1e-12, 0.0, 1.0);
        assert!((z - Complex64::new(1.0, 0.5e-12)).norm() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let sum: f64 = w.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((q - 2.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn first_moment_closed_form() {
        // ∫_0^{2π} t e^{-it} dt = 2πi
        let z = moment_integral(1, -1.0, 0.0, 2.0 * PI);
        assert!((z - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-12);
        let z = moment_integral(2, 0.0, 0.0, 3.0);
        assert!((z.re - 9.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_rule_is_exact_for_low_frequencies() {
        let nodes = periodic_nodes(0.3, 2.0 * PI, 9);
        for k in 1..9 {
            let s: Complex64 = nodes.iter().map(|&t| cis(k as f64 * t)).sum();
            assert!(s.norm() < 1e-13, "k={k}");
        }
    }
}
