use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use manifold_hermite::{Error, ErrorCategory};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "mhi", version, about = "Hermite-Birkhoff interpolation on manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the interpolant of a node file at a point list or grid.
    Eval(EvalArgs),
    /// Run a convergence study for a builtin function.
    Converge(ConvergeArgs),
    /// Dump every cardinal basis function on a point list or grid.
    BasisDump(DumpArgs),
    /// Report fill and separation distance of a node file.
    FillDistance(FillArgs),
    /// Write a node file sampled from a builtin function.
    SampleNodes(SampleArgs),
}

#[derive(Args, Debug, Clone)]
struct PointSource {
    /// CSV of evaluation points (header row, ambient coordinates).
    #[arg(long, conflicts_with = "grid_n")]
    points: Option<PathBuf>,
    /// Number of generated evaluation points inside the patch.
    #[arg(long)]
    grid_n: Option<usize>,
    /// How generated points are placed.
    #[arg(long, value_enum, default_value_t = GridKind::QuasiUniform)]
    grid_kind: GridKind,
    /// Seed for random grids.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum GridKind {
    QuasiUniform,
    Random,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Global,
    Localized,
}

#[derive(Args, Debug, Clone)]
struct WeightArgs {
    /// Distance exponent; must exceed the largest derivative order k.
    #[arg(long)]
    mu: Option<f64>,
    /// Support radius of localized weights.
    #[arg(long, conflicts_with = "k_factor")]
    delta: Option<f64>,
    /// Support radius as a multiple of the fill distance.
    #[arg(long = "K", id = "k_factor")]
    k_factor: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Bump exponent s of localized weights.
    #[arg(long)]
    bump_exponent: Option<u32>,
    /// Relative near-node tolerance (times the patch diameter).
    #[arg(long = "eps")]
    eps: Option<f64>,
    /// Fall back to global weights where no node lies within delta.
    #[arg(long)]
    fallback_global: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[command(flatten)]
    source: PointSource,
    #[command(flatten)]
    weights: WeightArgs,
    /// Builtin reference function; adds `f` and `error` columns.
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DumpArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[command(flatten)]
    source: PointSource,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FillArgs {
    #[arg(long)]
    nodes: PathBuf,
    /// Reference sample size as a multiple of the node count.
    #[arg(long, default_value_t = 100)]
    reference_factor: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ManifoldArg {
    Sphere,
    FlatTorus,
    Euclidean,
}

#[derive(Args, Debug, Clone)]
struct DomainArgs {
    #[arg(long, value_enum, default_value_t = ManifoldArg::Sphere)]
    manifold: ManifoldArg,
    /// Sphere radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Torus periods, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0])]
    periods: Vec<f64>,
    /// Euclidean dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Geodesic radius of the patch around its center.
    #[arg(long, default_value_t = 0.8)]
    patch_radius: f64,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    /// Builtin function, e.g. `gaussian` or `gaussian(3)`.
    #[arg(long)]
    function: String,
    #[command(flatten)]
    domain: DomainArgs,
    /// Completeness order of the derivative data.
    #[arg(long, default_value_t = 1)]
    q: u32,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long = "K", default_value_t = 2.0)]
    k_factor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, default_value_t = 50)]
    base_nodes: usize,
    #[arg(long, default_value_t = 2000)]
    eval_points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    function: String,
    #[command(flatten)]
    domain: DomainArgs,
    /// Number of nodes.
    #[arg(long)]
    n: usize,
    /// Completeness order of each node's derivative data.
    #[arg(long, default_value_t = 0)]
    q: u32,
    #[arg(long, value_enum, default_value_t = GridKind::QuasiUniform)]
    grid_kind: GridKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Parse | ErrorCategory::Validation => 2,
        ErrorCategory::UncoveredPoint => 3,
        ErrorCategory::Io => 4,
    }
}

fn report(e: &Error) {
    let category = e.category();
    eprintln!("error[{}]: {e}", category.code());
    if category == ErrorCategory::UncoveredPoint {
        let indices = e.uncovered_indices();
        if !indices.is_empty() {
            let list: Vec<String> = indices.iter().map(usize::to_string).collect();
            eprintln!("uncovered point indices: {}", list.join(","));
        }
        eprintln!("hint: increase --delta/--K or pass --fallback-global");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Converge(a) => commands::converge(a),
        Command::BasisDump(a) => commands::basis_dump(a),
        Command::FillDistance(a) => commands::fill_distance(a),
        Command::SampleNodes(a) => commands::sample_nodes(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(exit_code(e.category()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn arguments_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(ErrorCategory::Parse), 2);
        assert_eq!(exit_code(ErrorCategory::Validation), 2);
        assert_eq!(exit_code(ErrorCategory::UncoveredPoint), 3);
        assert_eq!(exit_code(ErrorCategory::Io), 4);
    }

    #[test]
    fn delta_and_k_conflict() {
        let r = Cli::try_parse_from(["mhi", "eval", "--nodes", "n.json", "--grid-n", "3", "--delta", "0.1", "--K", "2"]);
        assert!(r.is_err());
        let r = Cli::try_parse_from(["mhi", "eval", "--nodes", "n.json", "--grid-n", "3", "--points", "p.csv"]);
        assert!(r.is_err());
    }
}
