use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use idm_bench::number_hamiltonian;
use idm_core::mid::{mid_fock_density, mid_qubit_density, MidParams};
use idm_core::oracle::{integrate_gnd_density, integrate_mid, integrate_state_vector, IntegratorConfig};
use idm_core::state::{coherent_amplitudes, CoherentSpec, ProbeAngles};

fn bench_qubit(c: &mut Criterion) {
    let a = ProbeAngles::new(FRAC_PI_4, FRAC_PI_2).unwrap();
    let rho0 = mid_qubit_density(&a, &MidParams::new(1.0, 0.1, 0.0).unwrap())
        .to_dense()
        .entries()
        .clone();
    let h = [1.0, -1.0];
    let cfg = IntegratorConfig::new(1e-3, 10.0, 100);
    let mut group = c.benchmark_group("rk4_qubit_10k_steps");
    group.bench_function("mid", |b| {
        b.iter(|| integrate_mid(black_box(&rho0), &h, 0.1, &cfg).unwrap())
    });
    group.bench_function("gnd", |b| {
        b.iter(|| integrate_gnd_density(black_box(&rho0), &h, 0.1, &cfg).unwrap())
    });
    group.finish();
}

fn bench_fock(c: &mut Criterion) {
    let mut group = c.benchmark_group("rk4_fock_t1");
    group.sample_size(10);
    for dim in [10usize, 20, 40] {
        let spec = CoherentSpec::real(1.0);
        let h = number_hamiltonian(dim, 1.0);
        let cfg = IntegratorConfig::new(0.01 / (dim - 1) as f64, 1.0, 1000);
        let rho0 = mid_fock_density(&spec, &MidParams::new(1.0, 0.1, 0.0).unwrap(), dim)
            .unwrap()
            .entries()
            .clone();
        let psi0 = coherent_amplitudes(&spec, dim).unwrap().amplitudes().clone();
        group.bench_with_input(BenchmarkId::new("mid_density", dim), &rho0, |b, r| {
            b.iter(|| integrate_mid(r, &h, 0.1, &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("gnd_state_vector", dim), &psi0, |b, p| {
            b.iter(|| integrate_state_vector(p, &h, 0.1, 0.0, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_qubit, bench_fock);
criterion_main!(benches);
