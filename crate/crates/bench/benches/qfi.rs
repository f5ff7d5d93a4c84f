use std::f64::consts::FRAC_PI_2;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use idm_bench::{gnd_osc, mid_osc};
use idm_core::mid::{mid_qubit_bloch, mid_qubit_bloch_derivative, MidParams};
use idm_core::optimizer::optimal_c;
use idm_core::state::{CoherentSpec, ProbeAngles};
use idm_core::{qfi_bloch, qfi_mixed, qfi_pure};

fn bench_qfi_mixed(c: &mut Criterion) {
    let mut group = c.benchmark_group("qfi_mixed_mid_oscillator");
    for alpha in [1.0, 3.0, 6.0, 10.0] {
        let f = mid_osc(alpha, 0.35);
        group.bench_with_input(BenchmarkId::from_parameter(f.rho.dim()), &f, |b, f| {
            b.iter(|| qfi_mixed(black_box(&f.rho), black_box(&f.drho)).unwrap())
        });
    }
    group.finish();
}

fn bench_qfi_pure(c: &mut Criterion) {
    let mut group = c.benchmark_group("qfi_pure_gnd_oscillator");
    for alpha in [1.0, 5.0, 10.0] {
        let f = gnd_osc(alpha, 1.0);
        group.bench_with_input(BenchmarkId::from_parameter(f.psi.dim()), &f, |b, f| {
            b.iter(|| qfi_pure(black_box(&f.psi), black_box(&f.dpsi)).unwrap())
        });
    }
    group.finish();
}

fn bench_qfi_bloch(c: &mut Criterion) {
    let a = ProbeAngles::new(FRAC_PI_2, 0.0).unwrap();
    let p = MidParams::new(1.0, 0.1, 2.0).unwrap();
    let (r, dr) = (mid_qubit_bloch(&a, &p), mid_qubit_bloch_derivative(&a, &p));
    c.bench_function("qfi_bloch_mid_qubit", |b| {
        b.iter(|| qfi_bloch(black_box(&r), black_box(&dr)).unwrap())
    });
}

fn bench_optimal_c(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimal_c");
    group.sample_size(10);
    for alpha in [1.0, 4.0] {
        let spec = CoherentSpec::real(alpha);
        group.bench_with_input(BenchmarkId::from_parameter(alpha), &spec, |b, s| {
            b.iter(|| optimal_c(s).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_qfi_mixed,
    bench_qfi_pure,
    bench_qfi_bloch,
    bench_optimal_c
);
criterion_main!(benches);
