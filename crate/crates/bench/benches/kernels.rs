use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lgcert_core::lowerbound::superop_from_povm;
use lgcert_core::{
    build_mub_design, hermitian_basis, verify_two_design, DensityMatrix, ExplicitPovm, GentlePovm,
    OutcomeSampler, SimRng,
};

fn sampler(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampler");
    for d in [2, 3, 5] {
        let povm = GentlePovm::new(build_mub_design(d).unwrap(), 0.2).unwrap();
        let rho = DensityMatrix::basis_state(d, 0).unwrap();
        let s = OutcomeSampler::new(&povm, &rho).unwrap();
        let mut rng = SimRng::new(1, 0);
        group.bench_with_input(BenchmarkId::new("outcomes_1000", d), &d, |b, _| {
            b.iter(|| black_box(s.sample_many(1000, &mut rng)))
        });
        group.bench_with_input(BenchmarkId::new("counts_1e6", d), &d, |b, _| {
            b.iter(|| black_box(s.sample_counts(1_000_000, &mut rng)))
        });
    }
    group.finish();
}

fn superop(c: &mut Criterion) {
    let mut group = c.benchmark_group("superop");
    for d in [2, 3] {
        let povm =
            ExplicitPovm::from_gentle(&GentlePovm::new(build_mub_design(d).unwrap(), 0.2).unwrap())
                .unwrap();
        let basis = hermitian_basis(d).unwrap();
        group.bench_with_input(BenchmarkId::new("gentle", d), &d, |b, _| {
            b.iter(|| black_box(superop_from_povm(&povm, &basis).unwrap()))
        });
    }
    group.finish();
}

fn design(c: &mut Criterion) {
    let mut group = c.benchmark_group("design");
    for d in [4, 7, 8] {
        let design = build_mub_design(d).unwrap();
        group.bench_with_input(BenchmarkId::new("build", d), &d, |b, &d| {
            b.iter(|| black_box(build_mub_design(d).unwrap()))
        });
        let mut rng = SimRng::new(2, 0);
        group.bench_with_input(BenchmarkId::new("verify_10", d), &d, |b, _| {
            b.iter(|| black_box(verify_two_design(&design, 10, &mut rng)))
        });
    }
    group.finish();
}

criterion_group!(benches, sampler, superop, design);
criterion_main!(benches);
