use std::io::Write;
use std::path::{Path, PathBuf};

use manifold_hermite::analysis::{reference_sample, separation_distance};
use manifold_hermite::geometry::chart_lipschitz;
use manifold_hermite::io::{self, Cell, EvaluationRow, ModeName, NodeFile, ResultTable, WeightDefaults};
use manifold_hermite::multiindex::global_order_k;
use manifold_hermite::testfunctions::{builtin, hermite_nodes};
use manifold_hermite::{
    convergence_study, sample_patch, Domain, Error, Interpolant, Manifold, Mode,
    MultiIndexSet, Patch, Point, Result, SampleStrategy, StudyConfig, WeightConfig,
};
use serde_json::{json, Value};

use crate::{
    ConvergeArgs, DomainArgs, DumpArgs, EvalArgs, FillArgs, GridKind, ManifoldArg, ModeArg,
    PointSource, SampleArgs, WeightArgs,
};

/// Default `δ = K h` multiplier when localized mode has no explicit radius.
const DEFAULT_K: f64 = 2.0;
const REFERENCE_FACTOR: usize = 100;

struct Resolved {
    interp: Interpolant,
    config: Value,
}

/// Builds the interpolant, applying CLI overrides over file defaults.
fn resolve(file: NodeFile, args: &WeightArgs) -> Result<Resolved> {
    let NodeFile {
        domain,
        weights: defaults,
        nodes,
    } = file;
    let sets: Vec<MultiIndexSet> = nodes.iter().map(|n| n.delta().clone()).collect();
    let k = global_order_k(&sets)?;
    let mut weights = WeightConfig::for_order(k);
    if let Some(mu) = args.mu.or(defaults.mu) {
        weights.mu = mu;
    }
    if let Some(s) = args.bump_exponent.or(defaults.bump_exponent) {
        weights.bump_exponent = s;
    }
    if let Some(eps) = args.eps.or(defaults.near_node_tol) {
        weights.near_node_tol = eps;
    }
    let mode_name = match args.mode {
        Some(ModeArg::Global) => ModeName::Global,
        Some(ModeArg::Localized) => ModeName::Localized,
        None => defaults.mode.unwrap_or(ModeName::Global),
    };

    let points: Vec<Point> = nodes.iter().map(|n| n.point().clone()).collect();
    let mut h = None;
    let mut k_used = None;
    let mode = match mode_name {
        ModeName::Global => Mode::Global,
        ModeName::Localized => {
            let delta = match (args.delta, args.k_factor, defaults.delta) {
                (Some(d), _, _) => d,
                (None, Some(kf), _) => {
                    k_used = Some(kf);
                    kf * *h.insert(node_fill_distance(&domain, &points)?)
                }
                (None, None, Some(d)) => d,
                (None, None, None) => {
                    k_used = Some(DEFAULT_K);
                    DEFAULT_K * *h.insert(node_fill_distance(&domain, &points)?)
                }
            };
            Mode::Localized { delta }
        }
    };
    let n = nodes.len();
    let interp = Interpolant::build(domain, nodes, weights, mode)?.with_global_fallback(args.fallback_global);
    let delta = match mode {
        Mode::Localized { delta } => Some(delta),
        Mode::Global => None,
    };
    let config = json!({
        "n_nodes": n,
        "k": k,
        "q": interp.completeness_q(),
        "mode": mode.name(),
        "mu": weights.mu,
        "delta": delta,
        "K": k_used,
        "fill_distance": h,
        "bump_exponent": weights.bump_exponent,
        "near_node_tol": weights.near_node_tol,
        "fallback_global": args.fallback_global,
    });
    Ok(Resolved { interp, config })
}

fn node_fill_distance(domain: &Domain, points: &[Point]) -> Result<f64> {
    let reference = reference_sample(domain, REFERENCE_FACTOR * points.len());
    manifold_hermite::fill_distance(domain.manifold(), points, &reference)
}

fn load_points(domain: &Domain, source: &PointSource) -> Result<(Vec<Point>, Value)> {
    match (&source.points, source.grid_n) {
        (Some(path), None) => {
            let points = io::read_points(path, domain.manifold())?;
            Ok((points, json!({ "points": path.display().to_string() })))
        }
        (None, Some(n)) => {
            let (strategy, kind) = match source.grid_kind {
                GridKind::QuasiUniform => (SampleStrategy::QuasiUniform, "quasi-uniform"),
                GridKind::Random => (SampleStrategy::UniformRandom { seed: source.seed }, "random"),
            };
            let points = sample_patch(domain, n, strategy);
            Ok((points, json!({ "grid_n": n, "grid_kind": kind, "seed": source.seed })))
        }
        _ => Err(Error::InvalidConfig(
            "exactly one of --points or --grid-n is required".into(),
        )),
    }
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

fn emit(out: Option<&Path>, table: &ResultTable) -> Result<()> {
    match out {
        Some(path) => io::write_results(path, table),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match io::render_results(&mut lock, table).and_then(|_| lock.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other,
            }
            .map_err(|e| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })
        }
    }
}

fn config_comment(config: &Value) -> String {
    format!("config: {config}")
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let file = io::read_nodes(&args.nodes)?;
    let resolved = resolve(file, &args.weights)?;
    let interp = &resolved.interp;
    let domain = interp.domain();
    let (points, source) = load_points(domain, &args.source)?;
    let reference = args
        .function
        .as_deref()
        .map(|name| builtin(name, domain.manifold().dim()))
        .transpose()?;
    let values = interp.evaluate_batch(&points)?;
    let mut rows = Vec::with_capacity(points.len());
    for (index, (u, value)) in points.iter().zip(values).enumerate() {
        let f = match &reference {
            Some(f) => Some(f.value(&domain.chart().forward(u)?)?),
            None => None,
        };
        rows.push(EvaluationRow {
            index,
            point: u.coords().to_vec(),
            value,
            reference: f,
        });
    }
    let config = merge(
        json!({
            "subcommand": "eval",
            "nodes": args.nodes.display().to_string(),
            "function": args.function,
        }),
        merge(source, resolved.config),
    );
    let mut table = ResultTable::evaluations(domain.manifold().ambient_dim(), reference.is_some(), &rows);
    table.comments.push(config_comment(&config));
    emit(args.out.as_deref(), &table)
}

pub fn basis_dump(args: DumpArgs) -> Result<()> {
    let file = io::read_nodes(&args.nodes)?;
    let resolved = resolve(file, &args.weights)?;
    let interp = &resolved.interp;
    let domain = interp.domain();
    let (points, source) = load_points(domain, &args.source)?;
    let n = interp.nodes().len();
    let weights = interp.weights_batch(&points)?;

    let d = domain.manifold().ambient_dim();
    let mut columns = vec!["index".to_string()];
    columns.extend((1..=d).map(|j| format!("x{j}")));
    columns.extend((0..n).map(|i| format!("g{i}")));
    columns.push("residual".into());
    let rows = points
        .iter()
        .zip(&weights)
        .enumerate()
        .map(|(index, (u, w))| {
            let mut row = vec![Cell::Int(index as u64)];
            row.extend(u.coords().iter().map(|&x| Cell::Real(x)));
            row.extend(w.to_dense(n).into_iter().map(Cell::Real));
            row.push(Cell::Real((w.sum() - 1.0).abs()));
            row
        })
        .collect();
    let config = merge(
        json!({ "subcommand": "basis-dump", "nodes": args.nodes.display().to_string() }),
        merge(source, resolved.config),
    );
    let table = ResultTable {
        comments: vec![config_comment(&config)],
        columns,
        rows,
        footer: Vec::new(),
    };
    emit(args.out.as_deref(), &table)
}

pub fn fill_distance(args: FillArgs) -> Result<()> {
    if args.reference_factor == 0 {
        return Err(Error::InvalidConfig("--reference-factor must be positive".into()));
    }
    let file = io::read_nodes(&args.nodes)?;
    let domain = &file.domain;
    let points: Vec<Point> = file.nodes.iter().map(|n| n.point().clone()).collect();
    let reference = reference_sample(domain, args.reference_factor * points.len());
    let h = manifold_hermite::fill_distance(domain.manifold(), &points, &reference)?;
    let sep = if points.len() > 1 {
        separation_distance(domain.manifold(), &points)?
    } else {
        f64::INFINITY
    };
    let sets: Vec<MultiIndexSet> = file.nodes.iter().map(|n| n.delta().clone()).collect();
    let q = sets.iter().map(MultiIndexSet::completeness_order).min().unwrap_or(0);
    let config = json!({
        "subcommand": "fill-distance",
        "nodes": args.nodes.display().to_string(),
        "reference_factor": args.reference_factor,
        "reference_size": reference.len(),
    });
    let table = ResultTable {
        comments: vec![config_comment(&config)],
        columns: ["n", "k", "q", "fill_distance", "separation_distance", "mesh_ratio"]
            .map(String::from)
            .to_vec(),
        rows: vec![vec![
            Cell::Int(points.len() as u64),
            Cell::Int(u64::from(global_order_k(&sets)?)),
            Cell::Int(u64::from(q)),
            Cell::Real(h),
            Cell::Real(sep),
            Cell::Real(h / sep),
        ]],
        footer: Vec::new(),
    };
    emit(args.out.as_deref(), &table)
}

fn build_domain(args: &DomainArgs) -> Result<(Domain, Value)> {
    let (manifold, center, desc) = match args.manifold {
        ManifoldArg::Sphere => (
            Manifold::sphere(args.radius)?,
            Point::new(vec![0.0, 0.0, args.radius]),
            json!({ "kind": "sphere", "radius": args.radius }),
        ),
        ManifoldArg::FlatTorus => (
            Manifold::flat_torus(args.periods.clone())?,
            Point::new(args.periods.iter().map(|p| 0.5 * p).collect()),
            json!({ "kind": "flat_torus", "periods": args.periods }),
        ),
        ManifoldArg::Euclidean => (
            Manifold::euclidean(args.dim)?,
            Point::new(vec![0.0; args.dim]),
            json!({ "kind": "euclidean", "dim": args.dim }),
        ),
    };
    let patch = Patch::new(&manifold, center.clone(), args.patch_radius)?;
    let domain = Domain::new(manifold, patch)?;
    let desc = json!({
        "manifold": desc,
        "patch_center": center.coords(),
        "patch_radius": args.patch_radius,
    });
    Ok((domain, desc))
}

pub fn converge(args: ConvergeArgs) -> Result<()> {
    let (domain, desc) = build_domain(&args.domain)?;
    let f = builtin(&args.function, domain.manifold().dim())?;
    let config = StudyConfig {
        q: args.q,
        levels: args.levels,
        base_nodes: args.base_nodes,
        k_factor: args.k_factor,
        seed: args.seed,
        eval_points: args.eval_points,
        reference_factor: REFERENCE_FACTOR,
        mu: args.mu,
    };
    let study = convergence_study(&f, &domain, &config)?;
    let lipschitz = chart_lipschitz(&domain, &sample_patch(&domain, 400, SampleStrategy::QuasiUniform))?;
    let mut table = ResultTable::convergence(&study.records);
    let echo = merge(
        merge(desc, serde_json::to_value(&config).expect("config serializes")),
        json!({
            "subcommand": "converge",
            "function": f.name(),
            "mu": args.mu.unwrap_or(f64::from(args.q) + 1.0),
            "bump_exponent": args.q + 1,
            "chart_lipschitz": lipschitz,
        }),
    );
    table.comments.push(config_comment(&echo));
    let footer = match (&study.fit, &study.skip_reason) {
        (Some(fit), _) => serde_json::to_value(fit).expect("fit serializes"),
        (None, reason) => json!({ "skipped": reason }),
    };
    table.footer.push(format!("order_fit: {footer}"));
    emit(args.out.as_deref(), &table)
}

pub fn sample_nodes(args: SampleArgs) -> Result<()> {
    let (domain, _) = build_domain(&args.domain)?;
    let m = domain.manifold().dim();
    let f = builtin(&args.function, m)?;
    if args.n == 0 {
        return Err(Error::InvalidConfig("--n must be positive".into()));
    }
    let strategy = match args.grid_kind {
        GridKind::QuasiUniform => SampleStrategy::QuasiUniform,
        GridKind::Random => SampleStrategy::UniformRandom { seed: args.seed },
    };
    let points = sample_patch(&domain, args.n, strategy);
    let sets = vec![MultiIndexSet::complete(m, args.q); args.n];
    let nodes = hermite_nodes(&domain, &points, &f, &sets)?;
    let file = NodeFile {
        domain,
        weights: WeightDefaults::default(),
        nodes,
    };
    io::write_nodes(&args.out, &file)
}
