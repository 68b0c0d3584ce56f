use std::path::Path;
use std::process::{Command, Output};

use manifold_hermite::io::{parse_results, write_points, ResultTable};
use manifold_hermite::{Manifold, Point};

fn mhi(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhi"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = mhi(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn table(text: &str) -> ResultTable {
    parse_results(text).unwrap()
}

fn col(t: &ResultTable, name: &str) -> usize {
    t.columns.iter().position(|c| c == name).unwrap()
}

fn setup(n: &str, q: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sample-nodes", "--function", "gaussian", "--n", n, "--q", q, "--out", "nodes.json"]);
    dir
}

fn node_points(dir: &Path) -> Vec<Point> {
    let file = manifold_hermite::io::read_nodes(dir.join("nodes.json")).unwrap();
    file.nodes.iter().map(|n| n.point().clone()).collect()
}

#[test]
fn eval_at_nodes_returns_stored_values() {
    let dir = setup("40", "1");
    let d = dir.path();
    write_points(d.join("pts.csv"), &node_points(d), 3).unwrap();
    let file = manifold_hermite::io::read_nodes(d.join("nodes.json")).unwrap();
    for mode in ["global", "localized"] {
        let t = table(&ok(d, &["eval", "--nodes", "nodes.json", "--points", "pts.csv", "--function", "gaussian", "--mode", mode]));
        let (h, e) = (col(&t, "H"), col(&t, "error"));
        for (row, node) in t.rows.iter().zip(&file.nodes) {
            assert_eq!(row[h].as_f64(), node.value());
            assert_eq!(row[e].as_f64(), 0.0);
        }
    }
}

#[test]
fn uncovered_points_exit_3_with_indices() {
    let dir = setup("20", "0");
    let d = dir.path();
    let out = mhi(d, &["eval", "--nodes", "nodes.json", "--grid-n", "10", "--mode", "localized", "--delta", "0.001"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error[uncovered-point]"), "{err}");
    assert!(err.contains("uncovered point indices: 0,1,2,3,4,5,6,7,8,9"), "{err}");

    let fallback = ok(d, &["eval", "--nodes", "nodes.json", "--grid-n", "10", "--mode", "localized", "--delta", "0.001", "--fallback-global"]);
    assert_eq!(table(&fallback).rows.len(), 10);
}

#[test]
fn eval_output_is_deterministic() {
    let dir = setup("60", "1");
    let d = dir.path();
    let args = ["eval", "--nodes", "nodes.json", "--grid-n", "500", "--grid-kind", "random", "--seed", "9", "--mode", "localized"];
    assert_eq!(ok(d, &args), ok(d, &args));
}

#[test]
fn config_echo_and_override_precedence() {
    let dir = setup("30", "1");
    let d = dir.path();
    let text = std::fs::read_to_string(d.join("nodes.json")).unwrap();
    let text = text.replace("\"weights\": {}", "\"weights\": {\"mu\": 4.0, \"mode\": \"localized\", \"delta\": 0.5}");
    std::fs::write(d.join("nodes.json"), text).unwrap();

    let header = table(&ok(d, &["eval", "--nodes", "nodes.json", "--grid-n", "3"])).comments[0].clone();
    assert!(header.contains("\"mu\":4.0") && header.contains("\"delta\":0.5") && header.contains("\"mode\":\"localized\""), "{header}");

    let header = table(&ok(d, &["eval", "--nodes", "nodes.json", "--grid-n", "3", "--mu", "2.5", "--delta", "0.7"])).comments[0].clone();
    assert!(header.contains("\"mu\":2.5") && header.contains("\"delta\":0.7"), "{header}");

    let header = table(&ok(d, &["eval", "--nodes", "nodes.json", "--grid-n", "3", "--mode", "global"])).comments[0].clone();
    assert!(header.contains("\"mode\":\"global\"") && header.contains("\"delta\":null"), "{header}");
}

#[test]
fn mu_not_above_k_is_rejected() {
    let dir = setup("10", "1");
    let out = mhi(dir.path(), &["eval", "--nodes", "nodes.json", "--grid-n", "3", "--mu", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error[validation]") && err.contains("mu > k"), "{err}");
}

#[test]
fn error_categories_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = mhi(d, &["eval", "--nodes", "missing.json", "--grid-n", "3"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[io]"));

    std::fs::write(d.join("bad.json"), "{\"format_version\": 1, \"manifold\": {\"kind\": \"sphere\", \"radius\": \"x\"}}").unwrap();
    let out = mhi(d, &["eval", "--nodes", "bad.json", "--grid-n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error[parse]") && err.contains("manifold.radius"), "{err}");

    let out = mhi(d, &["converge", "--function", "gaussian", "--q", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the available maximum 6"));

    let out = mhi(d, &["converge", "--function", "nonesuch"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = setup("10", "0");
    let out = mhi(dir.path(), &["eval", "--nodes", "nodes.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--points or --grid-n"));
}

#[test]
fn off_patch_points_are_validation_errors() {
    let dir = setup("10", "0");
    let d = dir.path();
    write_points(d.join("pts.csv"), &[Point::from([0.0, 0.0, -1.0])], 3).unwrap();
    let out = mhi(d, &["eval", "--nodes", "nodes.json", "--points", "pts.csv"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(d.join("pts.csv"), "x1,x2,x3\n0,0,1.5\n").unwrap();
    let out = mhi(d, &["eval", "--nodes", "nodes.json", "--points", "pts.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn converge_constant_skips_fit() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(dir.path(), &["converge", "--function", "constant(3)", "--q", "0", "--levels", "3"]);
    let t = table(&text);
    let e = col(&t, "max_err");
    assert!(t.rows.iter().all(|r| r[e].as_f64() <= 1e-14));
    assert!(t.footer[0].starts_with("order_fit: {\"skipped\":"), "{:?}", t.footer);
}

#[test]
fn converge_requires_three_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = mhi(dir.path(), &["converge", "--function", "gaussian", "--levels", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 3 levels"));
}

#[test]
fn converge_gaussian_q1_slope() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(dir.path(), &["converge", "--function", "gaussian", "--q", "1", "--levels", "4"]);
    let t = table(&text);
    assert_eq!(t.columns, ["level", "n", "h", "max_err", "rms_err"]);
    let fit = t.footer[0].strip_prefix("order_fit: ").unwrap();
    let fit: serde_json::Value = serde_json::from_str(fit).unwrap();
    let slope = fit["slope"].as_f64().unwrap();
    assert!((1.7..=2.6).contains(&slope), "{slope}");
    assert!(t.comments[0].contains("\"subcommand\":\"converge\""));
}

#[test]
fn converge_on_torus_and_plane() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        ["--manifold", "flat-torus", "--periods", "1,1", "--patch-radius", "0.4"],
        ["--manifold", "euclidean", "--dim", "2", "--patch-radius", "0.5"],
    ] {
        let mut full = vec!["converge", "--function", "gaussian", "--q", "1", "--levels", "3"];
        full.extend(args);
        let t = table(&ok(dir.path(), &full));
        let fit: serde_json::Value = serde_json::from_str(t.footer[0].strip_prefix("order_fit: ").unwrap()).unwrap();
        assert!(fit["slope"].as_f64().unwrap() > 1.5, "{fit}");
    }
}

#[test]
fn basis_dump_rows() {
    let dir = setup("25", "0");
    let d = dir.path();
    let nodes = node_points(d);
    let mut pts = vec![nodes[3].clone()];
    pts.extend(manifold_hermite::sample_patch(
        &manifold_hermite::Domain::unit_cap(0.8).unwrap(),
        50,
        manifold_hermite::SampleStrategy::UniformRandom { seed: 1 },
    ));
    write_points(d.join("pts.csv"), &pts, 3).unwrap();
    let t = table(&ok(d, &["basis-dump", "--nodes", "nodes.json", "--points", "pts.csv"]));
    let res = col(&t, "residual");
    let g0 = col(&t, "g0");
    assert_eq!(res, g0 + 25);
    let first: Vec<f64> = t.rows[0][g0..res].iter().map(|c| c.as_f64()).collect();
    assert!(first.iter().enumerate().all(|(i, &g)| g == if i == 3 { 1.0 } else { 0.0 }));
    assert_eq!(t.rows[0][res].as_f64(), 0.0);
    assert!(t.rows.iter().all(|r| r[res].as_f64() <= 1e-12));
}

#[test]
fn localized_dump_supports_inside_balls() {
    let dir = setup("40", "0");
    let d = dir.path();
    let nodes = node_points(d);
    let sphere = Manifold::unit_sphere();
    let diameter = "1.6";
    let global = table(&ok(d, &["basis-dump", "--nodes", "nodes.json", "--grid-n", "200", "--mode", "global"]));
    let (g0, x1) = (col(&global, "g0"), col(&global, "x1"));
    assert!(global.rows.iter().all(|r| r[g0..g0 + 40].iter().all(|c| c.as_f64() > 0.0)));
    for delta in [diameter, "0.3"] {
        let t = table(&ok(d, &["basis-dump", "--nodes", "nodes.json", "--grid-n", "200", "--mode", "localized", "--delta", delta]));
        let delta: f64 = delta.parse().unwrap();
        for row in &t.rows {
            let u = Point::new(row[x1..x1 + 3].iter().map(|c| c.as_f64()).collect());
            for (i, node) in nodes.iter().enumerate() {
                if row[g0 + i].as_f64() != 0.0 {
                    assert!(sphere.geodesic_distance(&u, node).unwrap() < delta);
                }
            }
        }
    }
}

#[test]
fn fill_distance_report() {
    let dir = setup("50", "1");
    let t = table(&ok(dir.path(), &["fill-distance", "--nodes", "nodes.json"]));
    assert_eq!(t.columns, ["n", "k", "q", "fill_distance", "separation_distance", "mesh_ratio"]);
    let row: Vec<f64> = t.rows[0].iter().map(|c| c.as_f64()).collect();
    assert_eq!(&row[..3], &[50.0, 1.0, 1.0]);
    assert!(row[3] > row[4] && row[3] < 0.3);
}

#[test]
fn output_file_matches_stdout() {
    let dir = setup("20", "0");
    let d = dir.path();
    let stdout = ok(d, &["eval", "--nodes", "nodes.json", "--grid-n", "7"]);
    ok(d, &["eval", "--nodes", "nodes.json", "--grid-n", "7", "--out", "out.csv"]);
    assert_eq!(std::fs::read_to_string(d.join("out.csv")).unwrap(), stdout);
}
