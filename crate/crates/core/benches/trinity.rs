//! Sequential vs. rayon execution of the main check suites.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use trinity_core::exec::Strategy;
use trinity_core::framechange::{frame_change_report, nonlocality_scenario, NonlocalityConfig};
use trinity_core::linalg::{pauli_x, pauli_z};
use trinity_core::presets;
use trinity_core::reductions::{default_tau_grid, verify_trinity};

fn strategies() -> Vec<Strategy> {
    if cfg!(feature = "parallel") {
        vec![Strategy::Sequential, Strategy::Parallel]
    } else {
        vec![Strategy::Sequential]
    }
}

fn suites(c: &mut Criterion) {
    let m1 = presets::m1();
    let observables = [pauli_z(), pauli_x()];
    let taus = default_tau_grid(&m1);
    let three = presets::three_frame();
    let nonlocality = NonlocalityConfig::default();

    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    for strategy in strategies() {
        let name = format!("{strategy:?}");
        group.bench_with_input(BenchmarkId::new("verify_trinity", &name), &strategy, |b, &s| {
            b.iter(|| verify_trinity(&m1, &observables, &taus, 7, s).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("frame_change_report", &name), &strategy, |b, &s| {
            b.iter(|| frame_change_report(&three, 7, &taus, s).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("nonlocality", &name), &strategy, |b, &s| {
            b.iter(|| nonlocality_scenario(&nonlocality, s).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
