//! Worked examples checked against independent computations: hand
//! arithmetic, brute-force scans and direct loops.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use manifold_hermite::analysis::{
    check_bounds, error_norms, reference_sample, separation_distance, BOUND_SLACK,
};
use manifold_hermite::basis::{alpha_power, bump, cbf_inverse, cbf_localized, cbf_product};
use manifold_hermite::multiindex::{taylor_eval, TaylorExpansion};
use manifold_hermite::testfunctions::{builtin, derivative_check, hermite_nodes};
use manifold_hermite::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mi(c: &[u32]) -> MultiIndex {
    MultiIndex::new(c.to_vec())
}

fn line(radius: f64) -> Domain {
    let m = Manifold::euclidean(1).unwrap();
    let patch = Patch::new(&m, Point::from([0.0]), radius).unwrap();
    Domain::new(m, patch).unwrap()
}

fn great_circle(a: &[f64], b: &[f64]) -> f64 {
    // Haversine form, independent of the atan2 form used by the library.
    let lat = |p: &[f64]| p[2].asin();
    let lon = |p: &[f64]| p[1].atan2(p[0]);
    let (p1, p2) = (lat(a), lat(b));
    let dl = lon(b) - lon(a);
    let s = ((p2 - p1) / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * s.sqrt().min(1.0).asin()
}

#[test]
fn geodesic_examples() {
    let s = Manifold::unit_sphere();
    let d = s
        .geodesic_distance(&Point::from([0.0, 0.0, 1.0]), &Point::from([1.0, 0.0, 0.0]))
        .unwrap();
    assert!((d - PI / 2.0).abs() < 1e-15);
    let t = Manifold::flat_torus(vec![1.0]).unwrap();
    let d = t.geodesic_distance(&Point::from([0.1]), &Point::from([0.9])).unwrap();
    assert!((d - 0.2).abs() < 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let domain = Domain::new(s.clone(), Patch::full_sphere(&s, Point::from([0.0, 0.0, 1.0])).unwrap()).unwrap();
    let pts = sample_patch(&domain, 50, SampleStrategy::UniformRandom { seed: rng.random() });
    for a in &pts {
        for b in &pts {
            let lib = s.geodesic_distance(a, b).unwrap();
            assert!((lib - great_circle(a.coords(), b.coords())).abs() < 1e-7);
        }
    }
}

#[test]
fn stereographic_hand_example() {
    // Chart centered at the north pole projects from the south pole:
    // v = (x, y) / (1 + z).
    let domain = Domain::unit_cap(2.0).unwrap();
    let chart = domain.chart();
    let v = chart.forward(&Point::from([1.0, 0.0, 0.0])).unwrap();
    assert!((v[0] - 1.0).abs() < 1e-15 && v[1].abs() < 1e-15);
    let u = chart.inverse(&[1.0, 0.0]).unwrap();
    for (a, b) in u.coords().iter().zip([1.0, 0.0, 0.0]) {
        assert!((a - b).abs() < 1e-15);
    }
    let c = chart.forward(&Point::from([0.0, 0.0, 1.0])).unwrap();
    assert_eq!(c, vec![0.0, 0.0]);
    let e = Domain::new(
        Manifold::euclidean(2).unwrap(),
        Patch::new(&Manifold::euclidean(2).unwrap(), Point::from([0.0, 0.0]), 2.0).unwrap(),
    )
    .unwrap();
    assert_eq!(e.chart().forward(&Point::from([0.3, 0.7])).unwrap(), vec![0.3, 0.7]);
}

#[test]
fn chart_round_trip_on_random_points() {
    let domain = Domain::unit_cap(1.2).unwrap();
    let pts = sample_patch(&domain, 100, SampleStrategy::UniformRandom { seed: 5 });
    let mut worst: f64 = 0.0;
    for p in &pts {
        let back = domain.chart().inverse(&domain.chart().forward(p).unwrap()).unwrap();
        for (a, b) in back.coords().iter().zip(p.coords()) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn quasi_uniform_fill_distance_halves() {
    let domain = Domain::unit_cap(0.8).unwrap();
    let hs: Vec<f64> = (0..4)
        .map(|j| {
            let n = 50 * 4usize.pow(j);
            let nodes = sample_patch(&domain, n, SampleStrategy::QuasiUniform);
            fill_distance(domain.manifold(), &nodes, &reference_sample(&domain, 100 * n)).unwrap()
        })
        .collect();
    for w in hs.windows(2) {
        let r = w[1] / w[0];
        assert!((r - 0.5).abs() <= 0.15, "{hs:?}");
    }
}

#[test]
fn taylor_hand_sum() {
    let data: BTreeMap<MultiIndex, f64> = [(mi(&[0, 0]), 1.0), (mi(&[1, 0]), 2.0), (mi(&[0, 1]), 3.0)].into();
    let set = MultiIndexSet::new(data.keys().cloned()).unwrap();
    assert_eq!(taylor_eval(&[0.5, 1.0], &[0.0, 0.0], &set, &data).unwrap(), 1.0 + 2.0 * 0.5 + 3.0 * 1.0);
    assert_eq!(TaylorExpansion::new(&data).eval(&[0.5, 1.0]), 5.0);
}

#[test]
fn completeness_and_global_order() {
    let set = |v: &[&[u32]]| MultiIndexSet::new(v.iter().map(|c| mi(c))).unwrap();
    assert_eq!(set(&[&[0, 0], &[1, 0], &[0, 1]]).completeness_order(), 1);
    assert_eq!(set(&[&[0, 0], &[1, 0], &[0, 1], &[2, 0], &[1, 1]]).completeness_order(), 1);
    let k = manifold_hermite::multiindex::global_order_k(&[set(&[&[0, 0], &[1, 0]]), set(&[&[0, 0], &[0, 2]])]).unwrap();
    assert_eq!(k, 2);
}

#[test]
fn weight_primitives() {
    assert_eq!(alpha_power(0.5, 3.0), 0.125);
    assert_eq!(alpha_power(0.0, 3.0), 0.0);
    assert_eq!(alpha_power(1.0, 7.5), 1.0);
    assert_eq!(bump(0.5, 1.0, 2), 0.25);
    assert_eq!(bump(0.0, 1.0, 2), 1.0);
    assert_eq!(bump(1.0, 1.0, 2), 0.0);
}

#[test]
fn two_node_line_weights() {
    // d = (0.25, 0.75), μ = 2: g_1 = 0.75² / (0.25² + 0.75²) = 0.9.
    let m = Manifold::euclidean(1).unwrap();
    let index = NeighborIndex::build(&[Point::from([0.0]), Point::from([1.0])], &m).unwrap();
    let u = Point::from([0.25]);
    let oracle = [0.5625 / 0.625, 0.0625 / 0.625];
    let p = cbf_product(&index, &u, 2.0).unwrap();
    let q = cbf_inverse(&index, &u, 2.0, 1e-12).unwrap();
    for j in 0..2 {
        assert!((p[j] - oracle[j]).abs() < 1e-15);
        assert!((q[j] - oracle[j]).abs() < 1e-15);
    }
    assert!((p[0] - 0.9).abs() < 1e-15);
    let mid = cbf_inverse(&index, &Point::from([0.5]), 2.0, 1e-12).unwrap();
    assert_eq!(mid, vec![0.5, 0.5]);
}

#[test]
fn localized_single_and_empty_cover() {
    let m = Manifold::euclidean(1).unwrap();
    let index = NeighborIndex::build(&[Point::from([0.0]), Point::from([1.0])], &m).unwrap();
    let w = cbf_localized(&index, &Point::from([0.1]), 2.0, 0.5, 2, 1e-12).unwrap();
    assert_eq!(w.entries, vec![(0, 1.0)]);
    let e = cbf_localized(&index, &Point::from([0.5]), 2.0, 0.3, 2, 1e-12).unwrap_err();
    assert_eq!(e.category(), ErrorCategory::UncoveredPoint);
}

#[test]
fn range_queries_match_brute_force() {
    let domain = Domain::unit_cap(1.0).unwrap();
    let nodes = sample_patch(&domain, 200, SampleStrategy::UniformRandom { seed: 1 });
    let queries = sample_patch(&domain, 50, SampleStrategy::UniformRandom { seed: 2 });
    let index = NeighborIndex::build(&nodes, domain.manifold()).unwrap();
    for r in [0.0, 0.05, 0.2, 0.7, 3.0] {
        for q in &queries {
            let fast: Vec<usize> = index.range_query(q, r).into_iter().map(|(i, _)| i).collect();
            let slow: Vec<usize> = (0..nodes.len())
                .filter(|&i| great_circle(q.coords(), nodes[i].coords()) < r)
                .collect();
            // The haversine oracle differs in the last bits; exclude
            // boundary-grazing nodes from the comparison.
            let grazing = |i: &usize| (great_circle(q.coords(), nodes[*i].coords()) - r).abs() < 1e-9;
            let a: Vec<_> = fast.iter().filter(|i| !grazing(i)).collect();
            let b: Vec<_> = slow.iter().filter(|i| !grazing(i)).collect();
            assert_eq!(a, b);
        }
    }
    assert_eq!(index.range_query(&queries[0], 0.0), vec![]);
    assert_eq!(index.range_query(&queries[0], 10.0).len(), 200);
}

#[test]
fn fill_and_separation_match_brute_force() {
    let domain = Domain::unit_cap(0.8).unwrap();
    let nodes = sample_patch(&domain, 100, SampleStrategy::QuasiUniform);
    let reference = reference_sample(&domain, 2000);
    let s = domain.manifold();
    let brute_fill = reference
        .iter()
        .map(|r| {
            nodes
                .iter()
                .map(|z| s.geodesic_distance(r, z).unwrap())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    assert_eq!(fill_distance(s, &nodes, &reference).unwrap(), brute_fill);

    let rand_nodes = sample_patch(&domain, 50, SampleStrategy::UniformRandom { seed: 8 });
    let mut min = f64::INFINITY;
    for i in 0..50 {
        for j in 0..i {
            min = min.min(s.geodesic_distance(&rand_nodes[i], &rand_nodes[j]).unwrap());
        }
    }
    assert_eq!(separation_distance(s, &rand_nodes).unwrap(), 0.5 * min);

    let pair = [Point::from([0.0]), Point::from([0.4])];
    let d = separation_distance(&Manifold::euclidean(1).unwrap(), &pair).unwrap();
    assert!((d - 0.2).abs() < 1e-15);
}

#[test]
fn single_center_node_fill_distance_is_patch_radius() {
    let domain = Domain::unit_cap(0.8).unwrap();
    let nodes = [Point::from([0.0, 0.0, 1.0])];
    let h = fill_distance(domain.manifold(), &nodes, &reference_sample(&domain, 20000)).unwrap();
    assert!(h <= 0.8 && h > 0.79, "{h}");
}

#[test]
fn linear_reproduction_at_random_points() {
    let domain = Domain::unit_cap(0.8).unwrap();
    let f = builtin("linear", 2).unwrap();
    let pts = sample_patch(&domain, 60, SampleStrategy::QuasiUniform);
    let nodes = hermite_nodes(&domain, &pts, &f, &vec![MultiIndexSet::complete(2, 1); 60]).unwrap();
    let h = Interpolant::build(domain.clone(), nodes, WeightConfig::for_order(1), Mode::Global).unwrap();
    for u in sample_patch(&domain, 100, SampleStrategy::UniformRandom { seed: 4 }) {
        let v = domain.chart().forward(&u).unwrap();
        let direct = 2.0 * v[0] + 3.0 * v[1] + 1.0;
        assert!((h.evaluate(&u).unwrap() - direct).abs() <= 1e-10);
    }
}

#[test]
fn basis_function_hand_value() {
    // Nodes 0 and 0.4, u = 0.2: g_0 = 0.5, offset 0.2, β = (2):
    // 0.2² / 2! · 0.5 = 0.01.
    let n0 = HermiteNode::new(Point::from([0.0]), [(mi(&[0]), 1.0), (mi(&[1]), 0.0), (mi(&[2]), 0.0)].into()).unwrap();
    let n1 = HermiteNode::value_only(Point::from([0.4]), 1, 2.0);
    let h = Interpolant::build(line(1.0), vec![n0, n1], WeightConfig::for_order(2), Mode::Global).unwrap();
    let g = h.evaluate_basis(0, &mi(&[2]), &Point::from([0.2])).unwrap();
    assert!((g - 0.01).abs() < 1e-15);
    assert_eq!(h.evaluate_basis(0, &mi(&[1]), &Point::from([0.0])).unwrap(), 0.0);
    assert_eq!(h.evaluate_basis(0, &mi(&[0]), &Point::from([0.0])).unwrap(), 1.0);
}

fn gaussian_cap(n: usize, q: u32, mode: Mode) -> (Domain, TestFunction, Interpolant) {
    let domain = Domain::unit_cap(0.8).unwrap();
    let f = builtin("gaussian", 2).unwrap();
    let pts = sample_patch(&domain, n, SampleStrategy::QuasiUniform);
    let nodes = hermite_nodes(&domain, &pts, &f, &vec![MultiIndexSet::complete(2, q); n]).unwrap();
    let h = Interpolant::build(domain.clone(), nodes, WeightConfig::for_order(q), mode).unwrap();
    (domain, f, h)
}

#[test]
fn batch_matches_sequential_loop() {
    let (domain, _, h) = gaussian_cap(80, 1, Mode::Localized { delta: 0.5 });
    let pts = sample_patch(&domain, 1000, SampleStrategy::UniformRandom { seed: 3 });
    let batch = h.evaluate_batch(&pts).unwrap();
    for (u, b) in pts.iter().zip(&batch) {
        assert_eq!(h.evaluate(u).unwrap().to_bits(), b.to_bits());
    }
    assert!(h.evaluate_batch(&[]).unwrap().is_empty());
    let at_nodes: Vec<Point> = h.nodes().iter().map(|n| n.point().clone()).collect();
    let vals = h.evaluate_batch(&at_nodes).unwrap();
    for (node, v) in h.nodes().iter().zip(vals) {
        assert_eq!(v, node.value());
    }
}

#[test]
fn condition_residuals_decay_quadratically() {
    let (_, _, h) = gaussian_cap(60, 1, Mode::Global);
    let a = h.verify_conditions(1e-5).unwrap();
    let b = h.verify_conditions(5e-6).unwrap();
    for e in a.entries.iter().filter(|e| e.beta.is_zero()) {
        assert_eq!(e.residual, 0.0);
    }
    let ra = a.max_residual_by_order()[&1];
    let rb = b.max_residual_by_order()[&1];
    assert!(a.max_relative_by_order()[&1] <= 1e-6);
    // O(fd_step²) stencil error, until roundoff takes over.
    assert!(rb < ra || rb < 1e-9, "{ra} {rb}");
}

#[test]
fn error_norms_match_direct_loop() {
    let (domain, f, h) = gaussian_cap(40, 0, Mode::Global);
    let grid = sample_patch(&domain, 300, SampleStrategy::UniformRandom { seed: 9 });
    let norms = error_norms(&f, &h, &grid).unwrap();
    let mut max: f64 = 0.0;
    let mut sq = 0.0;
    for u in &grid {
        let v = domain.chart().forward(u).unwrap();
        let exact = (-(v[0] * v[0] + v[1] * v[1])).exp();
        let e = (exact - h.evaluate(u).unwrap()).abs();
        max = max.max(e);
        sq += e * e;
    }
    assert!((norms.max_error - max).abs() <= 1e-15);
    assert!((norms.rms_error - (sq / 300.0).sqrt()).abs() <= 1e-15);

    let at_nodes: Vec<Point> = h.nodes().iter().map(|n| n.point().clone()).collect();
    let zero = error_norms(&f, &h, &at_nodes).unwrap();
    assert_eq!((zero.max_error, zero.rms_error), (0.0, 0.0));
}

#[test]
fn constant_function_errors_vanish() {
    let domain = Domain::unit_cap(0.8).unwrap();
    let f = builtin("constant(3)", 2).unwrap();
    let pts = sample_patch(&domain, 30, SampleStrategy::QuasiUniform);
    let nodes = hermite_nodes(&domain, &pts, &f, &vec![MultiIndexSet::values_only(2); 30]).unwrap();
    let h = Interpolant::build(domain.clone(), nodes, WeightConfig::for_order(0), Mode::Global).unwrap();
    let grid = sample_patch(&domain, 200, SampleStrategy::UniformRandom { seed: 1 });
    let n = error_norms(&f, &h, &grid).unwrap();
    assert!(n.max_error <= 1e-14 && n.rms_error <= 1e-14);
    assert!(check_bounds(&f, &h, &grid).unwrap().violations.is_empty());
}

#[test]
fn bounds_hold_against_explicit_taylor_sums() {
    // Mixed derivative sets: node i gets complete data of order i % 3.
    let domain = Domain::unit_cap(0.8).unwrap();
    let f = builtin("gaussian(2)", 2).unwrap();
    let pts = sample_patch(&domain, 70, SampleStrategy::QuasiUniform);
    let sets: Vec<MultiIndexSet> = (0..70).map(|i| MultiIndexSet::complete(2, i % 3)).collect();
    let nodes = hermite_nodes(&domain, &pts, &f, &sets).unwrap();
    let h = Interpolant::build(domain.clone(), nodes.clone(), WeightConfig::for_order(2), Mode::Global).unwrap();
    let grid = sample_patch(&domain, 1000, SampleStrategy::UniformRandom { seed: 12 });
    let report = check_bounds(&f, &h, &grid).unwrap();
    assert_eq!(report.checked, 1000);
    assert!(report.violations.is_empty(), "{:?}", &report.violations[..1]);

    // Rebuild every T_i from the raw data for a few points.
    let chart = domain.chart();
    for u in grid.iter().take(50) {
        let v = chart.forward(u).unwrap();
        let fu = f.value(&v).unwrap();
        let w = h.weights(u).unwrap().to_dense(70);
        let mut t = Vec::new();
        for node in &nodes {
            let c = chart.forward(node.point()).unwrap();
            let off: Vec<f64> = v.iter().zip(&c).map(|(a, b)| a - b).collect();
            t.push(
                node.data()
                    .iter()
                    .map(|(b, val)| val * off[0].powi(b.components()[0] as i32) * off[1].powi(b.components()[1] as i32) / b.factorial())
                    .sum::<f64>(),
            );
        }
        let hu: f64 = w.iter().zip(&t).map(|(g, ti)| g * ti).sum();
        assert!((hu - h.evaluate(u).unwrap()).abs() < 1e-13);
        let max_t = t.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(hu.abs() <= max_t + BOUND_SLACK);
        let weighted: f64 = w.iter().zip(&t).map(|(g, ti)| g * (fu - ti).abs()).sum();
        assert!((fu - hu).abs() <= weighted + BOUND_SLACK);
    }
}

#[test]
fn builtin_derivatives() {
    let f = builtin("gaussian", 2).unwrap();
    assert_eq!(f.partial(&[0.0, 0.0], &mi(&[2, 0])).unwrap(), -2.0);
    let c = builtin("constant(5)", 2).unwrap();
    assert_eq!(c.partial(&[0.3, 0.1], &mi(&[0, 0])).unwrap(), 5.0);
    assert_eq!(c.partial(&[0.3, 0.1], &mi(&[1, 2])).unwrap(), 0.0);
    let l = TestFunction::linear(&[2.0, 3.0], 0.0);
    assert_eq!(l.partial(&[0.7, -0.2], &mi(&[1, 0])).unwrap(), 2.0);
}

#[test]
fn derivative_check_orders() {
    let c = builtin("constant", 2).unwrap();
    let l = builtin("linear", 2).unwrap();
    let g = builtin("gaussian", 2).unwrap();
    let v = [0.3, -0.2];
    assert!(derivative_check(&c, &v, &mi(&[1, 1]), 1e-4).unwrap() <= 1e-12);
    assert!(derivative_check(&l, &v, &mi(&[0, 1]), 1e-4).unwrap() <= 1e-10);
    let r1 = derivative_check(&g, &v, &mi(&[1, 1]), 1e-4).unwrap();
    let r2 = derivative_check(&g, &v, &mi(&[1, 1]), 5e-5).unwrap();
    let ratio = r1 / r2;
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn random_gaussian_taylor_data_matches_finite_differences() {
    // Independent oracle for the Hermite-polynomial partials.
    let g = builtin("gaussian(1.5)", 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let v = [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
        let h = 1e-4;
        let f = |x: f64, y: f64| (-1.5 * (x * x + y * y)).exp();
        let fd_xy = (f(v[0] + h, v[1] + h) - f(v[0] + h, v[1] - h) - f(v[0] - h, v[1] + h) + f(v[0] - h, v[1] - h)) / (4.0 * h * h);
        assert!((g.partial(&v, &mi(&[1, 1])).unwrap() - fd_xy).abs() < 1e-6);
    }
}
