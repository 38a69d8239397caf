use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use iqc_bench::{couplings, hermitian, product_hamiltonian};
use iqc_core::nlevel::{apply_channel, conditional_decomposition, kraus_from_probe};
use iqc_core::opkit::{expm_i_hermitian, partial_trace_probe_matrix, DensityMatrix};
use iqc_core::qubit::{closed_form_state, DiagonalQubitState};
use iqc_core::random::{random_density, rng};
use iqc_core::verify::qubit_oracle_state;

fn expm(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm_i_hermitian");
    for n in [2, 4, 8, 16] {
        let h = hermitian(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| expm_i_hermitian(black_box(h), 0.7).unwrap())
        });
    }
    group.finish();
}

fn partial_trace(c: &mut Criterion) {
    let rho = hermitian(16);
    c.bench_function("partial_trace_probe 4x4", |b| {
        b.iter(|| partial_trace_probe_matrix(black_box(&rho), 4, 4).unwrap())
    });
}

fn qubit_reduced_state(c: &mut Criterion) {
    let g = couplings();
    let probe = DiagonalQubitState::new(0.3).unwrap().density();
    let system = DiagonalQubitState::new(0.9).unwrap().density();
    c.bench_function("qubit closed form", |b| {
        b.iter(|| closed_form_state(black_box(&g), 1.7, 0.9, &probe).unwrap())
    });
    c.bench_function("qubit composite oracle", |b| {
        b.iter(|| qubit_oracle_state(black_box(&g), 1.7, &system, &probe).unwrap())
    });
}

fn channel(c: &mut Criterion) {
    let mut group = c.benchmark_group("kraus channel");
    for n in [2, 3, 4] {
        let h = product_hamiltonian(n);
        let probe = DensityMatrix::maximally_mixed(n);
        let rho = random_density(&mut rng(n as u64), n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                let ch = kraus_from_probe(&conditional_decomposition(&h, 0.9), &probe).unwrap();
                apply_channel(&ch, black_box(&rho)).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, expm, partial_trace, qubit_reduced_state, channel);
criterion_main!(benches);
