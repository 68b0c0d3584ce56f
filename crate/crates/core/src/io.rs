//! Node files (JSON) and result tables (CSV).
//!
//! # Node file
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "manifold": { "kind": "sphere", "radius": 1.0 },
//!   "chart": { "kind": "stereographic" },
//!   "patch": { "center": [0.0, 0.0, 1.0], "radius": 0.8 },
//!   "weights": { "mu": 3.0, "mode": "localized", "delta": 0.2 },
//!   "nodes": [
//!     { "position": [0.0, 0.0, 1.0], "data": { "0,0": 1.0, "1,0": 0.5 } }
//!   ]
//! }
//! ```
//!
//! Derivative keys are comma-joined multi-indices in the chart's
//! coordinates. A `null` patch radius denotes the whole sphere.
//!
//! # Result tables
//!
//! Lines starting with `#` are comments (configuration echo, fit footer);
//! the first other line is the CSV header. Reals are printed with 17
//! significant digits.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::ConvergenceRecord;
use crate::basis::NeighborIndex;
use crate::error::{Error, Result};
use crate::geometry::{ChartKind, Domain, Manifold, Patch, Point};
use crate::interpolant::HermiteNode;
use crate::multiindex::MultiIndex;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Global,
    Localized,
}

/// Optional weight settings stored in the node file header.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDefaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bump_exponent: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near_node_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
}

#[derive(Debug, Clone)]
pub struct NodeFile {
    pub domain: Domain,
    pub weights: WeightDefaults,
    pub nodes: Vec<HermiteNode>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ManifoldKind {
    Sphere,
    FlatTorus,
    Euclidean,
}

// A flat struct rather than a tagged enum, so parse errors keep their
// field path.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifoldRepr {
    kind: ManifoldKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    periods: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
}

impl ManifoldRepr {
    fn build(self) -> Result<Manifold> {
        let required = |name: &str, kind: &str| {
            Error::parse(format!("field `manifold.{name}`"), format!("required for kind `{kind}`"))
        };
        let extra = [
            ("radius", self.radius.is_some()),
            ("periods", self.periods.is_some()),
            ("dim", self.dim.is_some()),
        ];
        let own = match self.kind {
            ManifoldKind::Sphere => "radius",
            ManifoldKind::FlatTorus => "periods",
            ManifoldKind::Euclidean => "dim",
        };
        if let Some((name, _)) = extra.iter().find(|(name, set)| *set && *name != own) {
            return Err(Error::parse(
                format!("field `manifold.{name}`"),
                format!("not allowed for kind `{:?}`", self.kind),
            ));
        }
        let m = match self.kind {
            ManifoldKind::Sphere => Manifold::sphere(self.radius.ok_or_else(|| required("radius", "sphere"))?),
            ManifoldKind::FlatTorus => {
                Manifold::flat_torus(self.periods.ok_or_else(|| required("periods", "flat_torus"))?)
            }
            ManifoldKind::Euclidean => Manifold::euclidean(self.dim.ok_or_else(|| required("dim", "euclidean"))?),
        };
        m.map_err(field("manifold"))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartRepr {
    kind: ChartKind,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchRepr {
    center: Vec<f64>,
    radius: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRepr {
    position: Vec<f64>,
    data: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeFileRepr {
    format_version: u32,
    manifold: ManifoldRepr,
    chart: ChartRepr,
    patch: PatchRepr,
    #[serde(default)]
    weights: WeightDefaults,
    nodes: Vec<NodeRepr>,
}

pub fn read_nodes(path: impl AsRef<Path>) -> Result<NodeFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_nodes(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

/// Parses and validates node-file text.
pub fn parse_nodes(text: &str) -> Result<NodeFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let repr: NodeFileRepr = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        Error::parse(
            format!("field `{}` (line {}, column {})", e.path(), inner.line(), inner.column()),
            inner.to_string(),
        )
    })?;
    if repr.format_version != FORMAT_VERSION {
        return Err(Error::parse(
            "field `format_version`",
            format!("unsupported version {}, expected {FORMAT_VERSION}", repr.format_version),
        ));
    }

    let manifold = repr.manifold.build()?;
    let expected_chart = ChartKind::for_manifold(&manifold);
    if repr.chart.kind != expected_chart {
        return Err(Error::parse(
            "field `chart.kind`",
            format!("{:?} does not match the manifold; expected {expected_chart:?}", repr.chart.kind),
        ));
    }
    let center = Point::new(repr.patch.center);
    let patch = match repr.patch.radius {
        Some(r) => Patch::new(&manifold, center, r),
        None => Patch::full_sphere(&manifold, center),
    }
    .map_err(field("patch"))?;
    let domain = Domain::new(manifold, patch).map_err(field("patch.center"))?;
    let m = domain.manifold().dim();

    let mut nodes = Vec::with_capacity(repr.nodes.len());
    for (i, node) in repr.nodes.into_iter().enumerate() {
        let point = Point::new(node.position);
        domain
            .check_inside(&point)
            .map_err(field(&format!("nodes[{i}].position")))?;
        let mut data = BTreeMap::new();
        for (key, value) in node.data {
            let loc = format!("nodes[{i}].data.\"{key}\"");
            let beta: MultiIndex = key
                .parse()
                .map_err(|e: Error| Error::parse(format!("field `{loc}`"), e.to_string()))?;
            if beta.dim() != m {
                return Err(Error::parse(
                    format!("field `{loc}`"),
                    format!("multi-index has {} components, chart dimension is {m}", beta.dim()),
                ));
            }
            if data.insert(beta, value).is_some() {
                return Err(Error::parse(format!("field `{loc}`"), "duplicate multi-index"));
            }
        }
        if !data.contains_key(&MultiIndex::zero(m)) {
            return Err(Error::parse(
                format!("field `nodes[{i}].data`"),
                format!("missing the zero index \"{}\"", MultiIndex::zero(m)),
            ));
        }
        nodes.push(HermiteNode::new(point, data).map_err(field(&format!("nodes[{i}].data")))?);
    }
    if nodes.is_empty() {
        return Err(Error::parse("field `nodes`", "at least one node is required"));
    }
    let points: Vec<Point> = nodes.iter().map(|n| n.point().clone()).collect();
    if let Err(Error::DuplicateNode { first, second }) = NeighborIndex::build(&points, domain.manifold()) {
        return Err(Error::parse(
            format!("field `nodes[{second}].position`"),
            format!("duplicate of nodes[{first}]"),
        ));
    }
    Ok(NodeFile {
        domain,
        weights: repr.weights,
        nodes,
    })
}

fn field(name: &str) -> impl FnOnce(Error) -> Error + '_ {
    move |e| Error::parse(format!("field `{name}`"), e.to_string())
}

pub fn write_nodes(path: impl AsRef<Path>, file: &NodeFile) -> Result<()> {
    let path = path.as_ref();
    let text = nodes_to_string(file);
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn nodes_to_string(file: &NodeFile) -> String {
    let mut manifold = ManifoldRepr {
        kind: ManifoldKind::Sphere,
        radius: None,
        periods: None,
        dim: None,
    };
    match file.domain.manifold() {
        Manifold::Sphere { radius } => manifold.radius = Some(*radius),
        Manifold::FlatTorus { periods } => {
            manifold.kind = ManifoldKind::FlatTorus;
            manifold.periods = Some(periods.clone());
        }
        Manifold::Euclidean { dim } => {
            manifold.kind = ManifoldKind::Euclidean;
            manifold.dim = Some(*dim);
        }
    }
    let patch = file.domain.patch();
    let repr = NodeFileRepr {
        format_version: FORMAT_VERSION,
        manifold,
        chart: ChartRepr {
            kind: file.domain.chart().kind(),
        },
        patch: PatchRepr {
            center: patch.center().coords().to_vec(),
            radius: (!patch.is_full()).then_some(patch.radius()),
        },
        weights: file.weights.clone(),
        nodes: file
            .nodes
            .iter()
            .map(|n| NodeRepr {
                position: n.point().coords().to_vec(),
                data: n.data().iter().map(|(b, v)| (b.to_string(), *v)).collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&repr).expect("node files always serialize");
    text.push('\n');
    text
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format_real(*x),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Int(i) => i as f64,
            Cell::Real(x) => x,
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with leading and trailing `#` comment lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Vec<String>,
}

/// One evaluated point.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRow {
    pub index: usize,
    pub point: Vec<f64>,
    pub value: f64,
    /// Reference value `f(u)`, when known.
    pub reference: Option<f64>,
}

impl ResultTable {
    /// Columns `index, x1..xd, H[, f, error]`.
    pub fn evaluations(ambient_dim: usize, with_reference: bool, rows: &[EvaluationRow]) -> Self {
        let mut columns = vec!["index".to_string()];
        columns.extend((1..=ambient_dim).map(|j| format!("x{j}")));
        columns.push("H".into());
        if with_reference {
            columns.push("f".into());
            columns.push("error".into());
        }
        let rows = rows
            .iter()
            .map(|r| {
                let mut cells = vec![Cell::Int(r.index as u64)];
                cells.extend(r.point.iter().map(|&x| Cell::Real(x)));
                cells.push(Cell::Real(r.value));
                if with_reference {
                    let f = r.reference.unwrap_or(f64::NAN);
                    cells.push(Cell::Real(f));
                    cells.push(Cell::Real((r.value - f).abs()));
                }
                cells
            })
            .collect();
        ResultTable {
            columns,
            rows,
            ..Default::default()
        }
    }

    /// Columns `level, n, h, max_err, rms_err`.
    pub fn convergence(records: &[ConvergenceRecord]) -> Self {
        ResultTable {
            columns: ["level", "n", "h", "max_err", "rms_err"].map(String::from).to_vec(),
            rows: records
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.level as u64),
                        Cell::Int(r.n_nodes as u64),
                        Cell::Real(r.fill_distance),
                        Cell::Real(r.max_error),
                        Cell::Real(r.rms_error),
                    ]
                })
                .collect(),
            ..Default::default()
        }
    }

    /// Parses evaluation rows back; the inverse of [`ResultTable::evaluations`].
    pub fn to_evaluation_rows(&self) -> Result<Vec<EvaluationRow>> {
        let h_col = self
            .columns
            .iter()
            .position(|c| c == "H")
            .ok_or_else(|| Error::parse("header", "missing column `H`"))?;
        let with_reference = self.columns.get(h_col + 1).is_some_and(|c| c == "f");
        self.rows
            .iter()
            .map(|row| {
                Ok(EvaluationRow {
                    index: row[0].as_f64() as usize,
                    point: row[1..h_col].iter().map(Cell::as_f64).collect(),
                    value: row[h_col].as_f64(),
                    reference: with_reference.then(|| row[h_col + 1].as_f64()),
                })
            })
            .collect()
    }

    pub fn to_convergence_records(&self) -> Result<Vec<ConvergenceRecord>> {
        if self.columns != ["level", "n", "h", "max_err", "rms_err"] {
            return Err(Error::parse("header", format!("unexpected columns {:?}", self.columns)));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| ConvergenceRecord {
                level: r[0].as_f64() as usize,
                n_nodes: r[1].as_f64() as usize,
                fill_distance: r[2].as_f64(),
                max_error: r[3].as_f64(),
                rms_error: r[4].as_f64(),
            })
            .collect())
    }
}

pub fn write_results(path: impl AsRef<Path>, table: &ResultTable) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    render_results(&mut buf, table).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Writes a table to any sink, e.g. stdout.
pub fn render_results<W: Write>(mut out: W, table: &ResultTable) -> std::io::Result<()> {
    for c in &table.comments {
        writeln!(out, "# {c}")?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
    }
    for c in &table.footer {
        writeln!(out, "# {c}")?;
    }
    Ok(())
}

pub fn read_results(path: impl AsRef<Path>) -> Result<ResultTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_results(&text)
}

/// Parses a result table. Integer-looking cells become [`Cell::Int`].
pub fn parse_results(text: &str) -> Result<ResultTable> {
    let mut table = ResultTable::default();
    let mut body = String::new();
    let mut seen_body = false;
    for line in text.lines() {
        if let Some(c) = line.strip_prefix('#') {
            let c = c.strip_prefix(' ').unwrap_or(c).to_string();
            if seen_body {
                table.footer.push(c);
            } else {
                table.comments.push(c);
            }
        } else if !line.trim().is_empty() {
            seen_body = true;
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    table.columns = reader
        .headers()
        .map_err(|e| Error::parse("header", e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse(format!("row {}", r + 1), e.to_string()))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(c, s)| parse_cell(s).ok_or_else(|| Error::parse(format!("row {}, column {}", r + 1, c + 1), format!("not a number: `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        table.rows.push(row);
    }
    Ok(table)
}

fn parse_cell(s: &str) -> Option<Cell> {
    let s = s.trim();
    if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok().map(Cell::Int)
    } else {
        s.parse().ok().map(Cell::Real)
    }
}

/// Reads a point list: CSV with a header row and one point per line, in
/// ambient coordinates. `#` lines are ignored.
pub fn read_points(path: impl AsRef<Path>, manifold: &Manifold) -> Result<Vec<Point>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let table = parse_results(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })?;
    if table.columns.len() != manifold.ambient_dim() {
        return Err(Error::parse(
            format!("{}: header", path.display()),
            format!(
                "expected {} coordinate columns, found {}",
                manifold.ambient_dim(),
                table.columns.len()
            ),
        ));
    }
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let p = Point::new(row.iter().map(Cell::as_f64).collect());
            manifold.validate(&p).map_err(|e| {
                Error::parse(format!("{}: row {}", path.display(), i + 1), e.to_string())
            })?;
            Ok(p)
        })
        .collect()
}

pub fn write_points(path: impl AsRef<Path>, points: &[Point], ambient_dim: usize) -> Result<()> {
    let table = ResultTable {
        columns: (1..=ambient_dim).map(|j| format!("x{j}")).collect(),
        rows: points
            .iter()
            .map(|p| p.coords().iter().map(|&x| Cell::Real(x)).collect())
            .collect(),
        ..Default::default()
    };
    write_results(path, &table)
}
