//! Benchmark fixtures.

use manifold_hermite::testfunctions::{builtin, hermite_nodes};
use manifold_hermite::{
    sample_patch, Domain, Interpolant, Mode, MultiIndexSet, Point, SampleStrategy, WeightConfig,
};

/// Localized interpolant of the gaussian on the cap of radius 0.8, with
/// complete order-`q` data at `n` quasi-uniform nodes and `delta = 2h`.
pub fn cap_interpolant(n: usize, q: u32) -> Interpolant {
    let domain = Domain::unit_cap(0.8).unwrap();
    let points = sample_patch(&domain, n, SampleStrategy::QuasiUniform);
    let f = builtin("gaussian", 2).unwrap();
    let sets = vec![MultiIndexSet::complete(2, q); n];
    let nodes = hermite_nodes(&domain, &points, &f, &sets).unwrap();
    let reference = sample_patch(&domain, 100 * n, SampleStrategy::QuasiUniform);
    let h = manifold_hermite::fill_distance(domain.manifold(), &points, &reference).unwrap();
    Interpolant::build(domain, nodes, WeightConfig::for_order(q), Mode::Localized { delta: 2.0 * h }).unwrap()
}

pub fn query_points(n: usize, seed: u64) -> Vec<Point> {
    let domain = Domain::unit_cap(0.8).unwrap();
    sample_patch(&domain, n, SampleStrategy::UniformRandom { seed })
}
