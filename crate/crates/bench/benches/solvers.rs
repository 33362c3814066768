use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use popmatch::{generate, is_popular, solve_one_sided, stable_k, GenConfig, Instance, Model};

fn instance(model: Model, n: usize, density: f64) -> Instance {
    generate(&GenConfig::new(model, n, n, density, 7)).unwrap()
}

fn bench_stable_k(c: &mut Criterion) {
    let mut group = c.benchmark_group("stable_k");
    group.sample_size(10);
    for n in [100, 250, 500] {
        let inst = instance(Model::TwoSidedTies { k: 3 }, n, 0.05);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| stable_k(black_box(inst)).unwrap())
        });
    }
    group.finish();
}

fn bench_verifier(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_popular");
    for n in [20, 50, 100] {
        let inst = instance(Model::TwoSidedTies { k: 2 }, n, 0.1);
        let m = stable_k(&inst).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &(inst, m), |b, (inst, m)| {
            b.iter(|| is_popular(black_box(inst), black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn bench_one_sided(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_one_sided");
    for n in [50, 100, 200] {
        let inst = instance(Model::OneSided, n, 0.05);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| solve_one_sided(black_box(inst)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_stable_k, bench_verifier, bench_one_sided);
criterion_main!(benches);
