use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ctwb_bench::{spekkens, trit};
use ctwb_core::protocols::teleport_trials;
use ctwb_core::{classify_sector, is_information_variable, run_argument, QuantumBackend};

fn closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure");
    for (name, backend) in [("spekkens", spekkens()), ("trit", trit())] {
        group.bench_with_input(BenchmarkId::new("replica", name), &backend, |b, backend| {
            b.iter(|| black_box(backend.replica().monoid_closure().len()))
        });
    }
    group.finish();
}

fn classification(c: &mut Criterion) {
    let toy = spekkens();
    let z = toy.theory().variable("Z").unwrap();
    c.bench_function("information_variable/spekkens_Z", |b| b.iter(|| is_information_variable(&toy, black_box(&z))));
    let qubit = QuantumBackend::qubit();
    c.bench_function("classify/qubit", |b| b.iter(|| classify_sector(&qubit, black_box(qubit.catalogue()))));
}

fn argument(c: &mut Criterion) {
    c.bench_function("argument/run", |b| b.iter(|| run_argument().unwrap().verdict));
}

fn teleport(c: &mut Criterion) {
    let mut group = c.benchmark_group("teleport");
    group.sample_size(20);
    for trials in [1usize, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(trials), &trials, |b, &n| {
            b.iter(|| teleport_trials(n, 42).unwrap().min_fidelity)
        });
    }
    group.finish();
}

criterion_group!(benches, closure, classification, argument, teleport);
criterion_main!(benches);
