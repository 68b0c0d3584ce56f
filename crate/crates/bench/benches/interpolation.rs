use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use manifold_hermite::basis::cbf_inverse;
use manifold_hermite::{Domain, NeighborIndex, Point, SampleStrategy};
use manifold_hermite_bench::{cap_interpolant, query_points};
use std::hint::black_box;

fn evaluate(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_batch");
    for n in [200, 800, 3200] {
        let h = cap_interpolant(n, 1);
        let queries = query_points(1000, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| h.evaluate_batch(black_box(&queries)).unwrap())
        });
    }
    group.finish();
}

fn global_weights(c: &mut Criterion) {
    let domain = Domain::unit_cap(0.8).unwrap();
    let nodes = manifold_hermite::sample_patch(&domain, 500, SampleStrategy::QuasiUniform);
    let index = NeighborIndex::build(&nodes, domain.manifold()).unwrap();
    let u = Point::from([0.1, 0.2, (1.0f64 - 0.05).sqrt()]);
    c.bench_function("cbf_inverse_500", |b| {
        b.iter(|| cbf_inverse(&index, black_box(&u), 3.0, 1e-12))
    });
}

fn range_query(c: &mut Criterion) {
    let domain = Domain::unit_cap(0.8).unwrap();
    let nodes = manifold_hermite::sample_patch(&domain, 5000, SampleStrategy::QuasiUniform);
    let index = NeighborIndex::build(&nodes, domain.manifold()).unwrap();
    let queries = query_points(100, 3);
    c.bench_function("range_query_5000", |b| {
        b.iter(|| {
            queries
                .iter()
                .map(|q| index.range_query(q, 0.05).len())
                .sum::<usize>()
        })
    });
}

criterion_group!(benches, evaluate, global_weights, range_query);
criterion_main!(benches);
