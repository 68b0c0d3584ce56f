//! Fill and separation distances, error norms, the two pointwise error
//! bounds, and empirical convergence-order studies.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{CardinalBasis, Mode, NeighborIndex, WeightConfig};
use crate::finite_diff::central_difference_vec;
use crate::geometry::Chart;
use crate::multiindex::MultiIndex;
use crate::error::{Error, Result};
use crate::geometry::{sample_patch, Domain, Manifold, Point, SampleStrategy};
use crate::interpolant::Interpolant;
use crate::multiindex::MultiIndexSet;
use crate::testfunctions::{hermite_nodes, TestFunction};

/// Absolute slack used by [`check_bounds`].
pub const BOUND_SLACK: f64 = 1e-12;

/// Errors at or below this level on every level count as exact reproduction.
pub const EXACT_ERROR_FLOOR: f64 = 1e-10;

/// `max_{r ∈ reference} min_i d_g(r, z_i)`: a discrete lower bound of the
/// fill distance that converges as the reference sample densifies.
pub fn fill_distance(manifold: &Manifold, nodes: &[Point], reference: &[Point]) -> Result<f64> {
    if nodes.is_empty() || reference.is_empty() {
        return Err(Error::InvalidInput(
            "fill distance needs nonempty node and reference sets".into(),
        ));
    }
    let index = NeighborIndex::build_allowing_duplicates(nodes, manifold)?;
    for r in reference {
        manifold.validate(r)?;
    }
    Ok(reference
        .par_iter()
        .map(|r| index.nearest(r).map_or(0.0, |(_, d)| d))
        .reduce(|| 0.0, f64::max))
}

/// Half the smallest pairwise geodesic distance.
pub fn separation_distance(manifold: &Manifold, nodes: &[Point]) -> Result<f64> {
    if nodes.len() < 2 {
        return Err(Error::InvalidInput(
            "separation distance needs at least two nodes".into(),
        ));
    }
    let index = NeighborIndex::build_allowing_duplicates(nodes, manifold)?;
    let min = (0..nodes.len())
        .filter_map(|i| index.nearest_other(i).map(|(_, d)| d))
        .fold(f64::INFINITY, f64::min);
    Ok(0.5 * min)
}

/// Quasi-uniform reference sample used to approximate the supremum in the
/// fill distance.
pub fn reference_sample(domain: &Domain, size: usize) -> Vec<Point> {
    sample_patch(domain, size, SampleStrategy::QuasiUniform)
}

/// Largest finite-difference derivative of any basis function at any node,
/// per derivative order.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDerivativeReport {
    pub fd_step: f64,
    /// Entry `o - 1` is the maximum over `i`, `j` and `|β| = o` of
    /// `|D^β g_i(z_j)|`.
    pub max_by_order: Vec<f64>,
}

impl NodeDerivativeReport {
    pub fn max_overall(&self) -> f64 {
        self.max_by_order.iter().copied().fold(0.0, f64::max)
    }
}

/// Central differences of all `g_i` at all nodes, orders `1..=k`.
pub fn basis_derivatives_at_nodes(basis: &CardinalBasis, chart: &Chart, k: u32, fd_step: f64) -> Result<NodeDerivativeReport> {
    let points = basis.nodes().points();
    let n = points.len();
    let m = chart.dim();
    let betas: Vec<MultiIndex> = MultiIndex::all_up_to(m, k).into_iter().filter(|b| !b.is_zero()).collect();
    let per_node = points
        .par_iter()
        .map(|z| {
            let v = chart.forward(z)?;
            let mut max = vec![0.0f64; k as usize];
            for beta in &betas {
                let d = central_difference_vec(
                    |x| Ok(basis.weights(&chart.inverse(x)?)?.to_dense(n)),
                    &v,
                    beta,
                    fd_step,
                )?;
                let slot = &mut max[beta.order() as usize - 1];
                *slot = d.iter().fold(*slot, |a, b| a.max(b.abs()));
            }
            Ok(max)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_by_order = vec![0.0f64; k as usize];
    for row in per_node {
        for (a, b) in max_by_order.iter_mut().zip(row) {
            *a = a.max(b);
        }
    }
    Ok(NodeDerivativeReport { fd_step, max_by_order })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub max_error: f64,
    pub rms_error: f64,
}

/// Max and RMS of `|f(v(u)) - H(u)|` over `grid`.
pub fn error_norms(f: &TestFunction, h: &Interpolant, grid: &[Point]) -> Result<ErrorNorms> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("error norms need a nonempty grid".into()));
    }
    let values = h.evaluate_batch(grid)?;
    let chart = h.domain().chart();
    let mut max: f64 = 0.0;
    let mut sum_sq = 0.0;
    for (u, hu) in grid.iter().zip(values) {
        let e = (f.value(&chart.forward(u)?)? - hu).abs();
        max = max.max(e);
        sum_sq += e * e;
    }
    Ok(ErrorNorms {
        max_error: max,
        rms_error: (sum_sq / grid.len() as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `|H(u)| <= max_i |T_i(u)|`.
    Magnitude,
    /// `|f(u) - H(u)| <= Σ_i g_i(u) |f(u) - T_i(u)|`.
    WeightedLocalError,
    /// `Σ_i g_i(u) |f(u) - T_i(u)| <= max_i |f(u) - T_i(u)|`.
    MaxLocalError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub point: usize,
    pub kind: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BoundsReport {
    pub checked: usize,
    pub violations: Vec<BoundViolation>,
}

/// Checks both pointwise bounds at every point, with [`BOUND_SLACK`].
pub fn check_bounds(f: &TestFunction, h: &Interpolant, points: &[Point]) -> Result<BoundsReport> {
    let chart = h.domain().chart();
    let per_point: Vec<Result<Vec<BoundViolation>>> = points
        .par_iter()
        .enumerate()
        .map(|(p, u)| {
            let hu = h.evaluate(u)?;
            let fu = f.value(&chart.forward(u)?)?;
            let taylor = h.taylor_values(u)?;
            let weights = h.weights(u)?;
            let max_t = taylor.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            let max_local = taylor.iter().fold(0.0f64, |m, t| m.max((fu - t).abs()));
            let weighted: f64 = weights
                .entries
                .iter()
                .map(|&(i, g)| g * (fu - taylor[i]).abs())
                .sum();
            let checks = [
                (BoundKind::Magnitude, hu.abs(), max_t),
                (BoundKind::WeightedLocalError, (fu - hu).abs(), weighted),
                (BoundKind::MaxLocalError, weighted, max_local),
            ];
            Ok(checks
                .into_iter()
                .filter(|&(_, lhs, rhs)| lhs > rhs + BOUND_SLACK)
                .map(|(kind, lhs, rhs)| BoundViolation {
                    point: p,
                    kind,
                    lhs,
                    rhs,
                })
                .collect())
        })
        .collect();
    let mut report = BoundsReport {
        checked: points.len(),
        violations: Vec::new(),
    };
    for r in per_point {
        report.violations.extend(r?);
    }
    Ok(report)
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub level: usize,
    pub n_nodes: usize,
    pub fill_distance: f64,
    pub max_error: f64,
    pub rms_error: f64,
}

/// Least-squares line through `(ln h, ln max_error)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub levels_used: Vec<usize>,
}

/// Fits the empirical order on `records`. Returns `None` with fewer than
/// two usable points (nonpositive errors or distances are dropped).
pub fn fit_order(records: &[ConvergenceRecord]) -> Option<OrderFit> {
    let pts: Vec<(usize, f64, f64)> = records
        .iter()
        .filter(|r| r.fill_distance > 0.0 && r.max_error > 0.0)
        .map(|r| (r.level, r.fill_distance.ln(), r.max_error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.2).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.1 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.1 - mx) * (p.2 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.2 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Some(OrderFit {
        slope,
        intercept,
        r_squared,
        levels_used: pts.iter().map(|p| p.0).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    /// Completeness order of every node's derivative set.
    pub q: u32,
    pub levels: usize,
    /// Node count at level 0; each level multiplies it by `2^m`.
    pub base_nodes: usize,
    /// `δ = K h`.
    pub k_factor: f64,
    /// Seed of the random evaluation grid.
    pub seed: u64,
    pub eval_points: usize,
    /// Reference sample size as a multiple of the node count.
    pub reference_factor: usize,
    /// Overrides the default `μ = q + 1`.
    pub mu: Option<f64>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            q: 1,
            levels: 4,
            base_nodes: 50,
            k_factor: 2.0,
            seed: 0,
            eval_points: 2000,
            reference_factor: 100,
            mu: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub records: Vec<ConvergenceRecord>,
    pub fit: Option<OrderFit>,
    /// Why no fit was produced, if it was skipped.
    pub skip_reason: Option<String>,
}

/// Runs localized interpolation on successively finer quasi-uniform node
/// sets with complete derivative data of order `q` and fits the error order
/// against the fill distance. The coarsest level is excluded from the fit.
pub fn convergence_study(f: &TestFunction, domain: &Domain, config: &StudyConfig) -> Result<ConvergenceStudy> {
    if config.levels < 3 {
        return Err(Error::InvalidConfig(format!(
            "a convergence study needs at least 3 levels, got {}",
            config.levels
        )));
    }
    if config.k_factor.is_nan() || config.k_factor < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "K must be at least 1, got {}",
            config.k_factor
        )));
    }
    if config.q > f.max_order() {
        return Err(Error::OrderExceeded {
            requested: config.q,
            max: f.max_order(),
        });
    }
    if config.base_nodes == 0 || config.eval_points == 0 || config.reference_factor == 0 {
        return Err(Error::InvalidConfig(
            "node, evaluation and reference counts must be positive".into(),
        ));
    }
    let m = domain.manifold().dim();
    if f.dim() != m {
        return Err(Error::InvalidInput(format!(
            "function {} has dimension {}, manifold has {m}",
            f.name(),
            f.dim()
        )));
    }
    let grid = sample_patch(domain, config.eval_points, SampleStrategy::UniformRandom { seed: config.seed });
    let growth = 1usize << m;
    let mut weights = WeightConfig::for_order(config.q);
    if let Some(mu) = config.mu {
        weights.mu = mu;
    }

    let run_level = |level: usize| -> Result<ConvergenceRecord> {
        let n = config.base_nodes * growth.pow(level as u32);
        let points = sample_patch(domain, n, SampleStrategy::QuasiUniform);
        let reference = reference_sample(domain, config.reference_factor * n);
        let h = fill_distance(domain.manifold(), &points, &reference)?;
        let sets = vec![MultiIndexSet::complete(m, config.q); n];
        let nodes = hermite_nodes(domain, &points, f, &sets)?;
        let interp = Interpolant::build(
            domain.clone(),
            nodes,
            weights,
            Mode::Localized {
                delta: config.k_factor * h,
            },
        )?;
        let norms = error_norms(f, &interp, &grid)?;
        Ok(ConvergenceRecord {
            level,
            n_nodes: n,
            fill_distance: h,
            max_error: norms.max_error,
            rms_error: norms.rms_error,
        })
    };

    let records = (0..config.levels)
        .into_par_iter()
        .map(|level| {
            run_level(level).map_err(|e| Error::Level {
                level,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (fit, skip_reason) = if records.iter().all(|r| r.max_error <= EXACT_ERROR_FLOOR) {
        (
            None,
            Some(format!(
                "max error <= {EXACT_ERROR_FLOOR:e} on every level (exact reproduction); no order to fit"
            )),
        )
    } else {
        match fit_order(&records[1..]) {
            Some(fit) => (Some(fit), None),
            None => (None, Some("fewer than two levels with positive error".into())),
        }
    };
    Ok(ConvergenceStudy {
        records,
        fit,
        skip_reason,
    })
}
