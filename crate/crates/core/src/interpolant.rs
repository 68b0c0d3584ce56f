//! Hermite-Birkhoff interpolant `H(u) = Σ_i T(u; f, z_i, Δ_i) g_i(u)`.
//!
//! `T` is the incomplete Taylor expansion of the node data in chart
//! coordinates and `g_i` are cardinal basis functions, either global
//! inverse-distance weights or their bump-localized variant.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::basis::{CardinalBasis, Mode, NeighborIndex, WeightConfig, Weights};
use crate::error::{Error, Result};
use crate::finite_diff::central_difference;
use crate::geometry::{Domain, Point};
use crate::multiindex::{global_order_k, MultiIndex, MultiIndexSet, TaylorExpansion};

/// A node `z_i` with data `D^β f(z_i)` for `β ∈ Δ_i`, in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteNode {
    point: Point,
    delta: MultiIndexSet,
    data: BTreeMap<MultiIndex, f64>,
}

impl HermiteNode {
    /// `Δ_i` is the key set of `data`, which must contain the zero index.
    pub fn new(point: Point, data: BTreeMap<MultiIndex, f64>) -> Result<Self> {
        let delta = MultiIndexSet::new(data.keys().cloned())?;
        if let Some((beta, _)) = data.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite data value for index {beta}")));
        }
        Ok(HermiteNode { point, delta, data })
    }

    /// Lagrange data: the value only.
    pub fn value_only(point: Point, dim: usize, value: f64) -> Self {
        HermiteNode {
            point,
            delta: MultiIndexSet::values_only(dim),
            data: BTreeMap::from([(MultiIndex::zero(dim), value)]),
        }
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn delta(&self) -> &MultiIndexSet {
        &self.delta
    }

    pub fn data(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.data
    }

    /// The `β = 0` datum.
    pub fn value(&self) -> f64 {
        self.data[&MultiIndex::zero(self.delta.dim())]
    }
}

#[derive(Debug, Clone)]
pub struct Interpolant {
    domain: Domain,
    nodes: Vec<HermiteNode>,
    expansions: Vec<TaylorExpansion>,
    /// Chart coordinates of the nodes; empty for value-only data.
    chart_nodes: Vec<Vec<f64>>,
    basis: CardinalBasis,
    k: u32,
    node_q: Vec<u32>,
    fallback_global: bool,
}

impl Interpolant {
    pub fn build(domain: Domain, nodes: Vec<HermiteNode>, weights: WeightConfig, mode: Mode) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidInput("an interpolant needs at least one node".into()));
        }
        let m = domain.manifold().dim();
        if let Some((i, n)) = nodes.iter().enumerate().find(|(_, n)| n.delta.dim() != m) {
            return Err(Error::InvalidInput(format!(
                "node {i} has {}-component multi-indices on a {m}-dimensional manifold",
                n.delta.dim()
            )));
        }
        for node in &nodes {
            domain.check_inside(&node.point)?;
        }
        let sets: Vec<MultiIndexSet> = nodes.iter().map(|n| n.delta.clone()).collect();
        let k = global_order_k(&sets)?;
        weights.validate(k)?;
        if k > 0 && domain.patch().is_full() {
            return Err(Error::InvalidConfig(
                "derivative data need a chart; the full sphere is only allowed for value-only data".into(),
            ));
        }
        let points: Vec<Point> = nodes.iter().map(|n| n.point.clone()).collect();
        let index = NeighborIndex::build(&points, domain.manifold())?;
        let basis = CardinalBasis::new(index, weights, mode, domain.diameter())?;
        let chart_nodes = if k > 0 {
            points
                .iter()
                .map(|p| domain.chart().forward(p))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Interpolant {
            expansions: nodes.iter().map(|n| TaylorExpansion::new(&n.data)).collect(),
            node_q: sets.iter().map(MultiIndexSet::completeness_order).collect(),
            domain,
            nodes,
            chart_nodes,
            basis,
            k,
            fallback_global: false,
        })
    }

    /// In localized mode, fall back to global weights at points no node
    /// covers instead of failing.
    pub fn with_global_fallback(mut self, enabled: bool) -> Self {
        self.fallback_global = enabled;
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn nodes(&self) -> &[HermiteNode] {
        &self.nodes
    }

    pub fn basis(&self) -> &CardinalBasis {
        &self.basis
    }

    pub fn mode(&self) -> Mode {
        self.basis.mode()
    }

    /// Global derivative order `k`.
    pub fn order_k(&self) -> u32 {
        self.k
    }

    /// Per-node completeness orders `q_i`.
    pub fn node_completeness(&self) -> &[u32] {
        &self.node_q
    }

    /// `q = min_i q_i`, the order governing the error estimate.
    pub fn completeness_q(&self) -> u32 {
        self.node_q.iter().copied().min().unwrap_or(0)
    }

    pub fn evaluate(&self, u: &Point) -> Result<f64> {
        self.domain.check_inside(u)?;
        self.evaluate_on_manifold(u)
    }

    /// Evaluation without the patch-membership check, for stencils that may
    /// step slightly past the rim.
    fn evaluate_on_manifold(&self, u: &Point) -> Result<f64> {
        let w = self.weights_unchecked(u)?;
        if let Some((i, d)) = w.at_node {
            if d == 0.0 {
                return Ok(self.nodes[i].value());
            }
        }
        let v = self.chart_coords(u)?;
        Ok(w
            .entries
            .iter()
            .map(|&(i, g)| g * self.taylor_with(i, v.as_deref()))
            .sum())
    }

    /// `g_i(u)` for all nodes with nonzero weight.
    pub fn weights(&self, u: &Point) -> Result<Weights> {
        self.domain.check_inside(u)?;
        self.weights_unchecked(u)
    }

    fn weights_unchecked(&self, u: &Point) -> Result<Weights> {
        match self.basis.weights(u) {
            Err(Error::Uncovered { .. }) if self.fallback_global => Ok(self.basis.global(u)),
            other => other,
        }
    }

    fn chart_coords(&self, u: &Point) -> Result<Option<Vec<f64>>> {
        if self.k == 0 {
            Ok(None)
        } else {
            self.domain.chart().forward(u).map(Some)
        }
    }

    fn taylor_with(&self, i: usize, v: Option<&[f64]>) -> f64 {
        match v {
            None => self.expansions[i].value(),
            Some(v) => {
                let offset: Vec<f64> = v.iter().zip(&self.chart_nodes[i]).map(|(a, b)| a - b).collect();
                self.expansions[i].eval(&offset)
            }
        }
    }

    /// `T(u; f, z_i, Δ_i)` for every node.
    pub fn taylor_values(&self, u: &Point) -> Result<Vec<f64>> {
        self.domain.check_inside(u)?;
        let v = self.chart_coords(u)?;
        Ok((0..self.nodes.len()).map(|i| self.taylor_with(i, v.as_deref())).collect())
    }

    /// `g_{iβ}(u) = (v(u) - v(z_i))^β / β! · g_i(u)`.
    pub fn evaluate_basis(&self, i: usize, beta: &MultiIndex, u: &Point) -> Result<f64> {
        let node = self.nodes.get(i).ok_or_else(|| {
            Error::InvalidInput(format!("node index {i} out of range ({} nodes)", self.nodes.len()))
        })?;
        if !node.delta.contains(beta) {
            return Err(Error::InvalidIndex {
                node: i,
                index: beta.to_string(),
            });
        }
        let g = self.weights(u)?.get(i);
        if beta.is_zero() {
            return Ok(g);
        }
        let v = self.domain.chart().forward(u)?;
        let offset: Vec<f64> = v.iter().zip(&self.chart_nodes[i]).map(|(a, b)| a - b).collect();
        Ok(beta.monomial(&offset) / beta.factorial() * g)
    }

    /// Evaluates at every point, in parallel, preserving order. Failures are
    /// collected with their point indices.
    pub fn evaluate_batch(&self, points: &[Point]) -> Result<Vec<f64>> {
        collect_batch(points.par_iter().map(|u| self.evaluate(u)).collect())
    }

    /// [`Interpolant::weights`] at every point, in parallel, preserving order.
    pub fn weights_batch(&self, points: &[Point]) -> Result<Vec<Weights>> {
        collect_batch(points.par_iter().map(|u| self.weights(u)).collect())
    }

    /// Compares finite-difference derivatives of `H` at each node against
    /// the data. Value residuals use exact evaluation at the node.
    pub fn verify_conditions(&self, fd_step: f64) -> Result<ConditionReport> {
        let limit = if self.nodes.len() > 1 {
            crate::analysis::separation_distance(
                self.domain.manifold(),
                self.basis.nodes().points(),
            )?
        } else {
            self.domain.diameter()
        };
        if fd_step.is_nan() || fd_step <= 0.0 || fd_step >= limit {
            return Err(Error::StepTooLarge { step: fd_step, limit });
        }
        let chart = self.domain.chart();
        let mut entries = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            for (beta, &target) in &node.data {
                let approx = if beta.is_zero() {
                    self.evaluate_on_manifold(&node.point)?
                } else {
                    central_difference(
                        |v| self.evaluate_on_manifold(&chart.inverse(v)?),
                        &self.chart_nodes[i],
                        beta,
                        fd_step,
                    )?
                };
                entries.push(ConditionResidual {
                    node: i,
                    beta: beta.clone(),
                    target,
                    approx,
                    residual: (approx - target).abs(),
                });
            }
        }
        Ok(ConditionReport { fd_step, entries })
    }
}

fn collect_batch<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    let mut values = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => values.push(v),
            Err(e) => failures.push((i, e)),
        }
    }
    if failures.is_empty() {
        Ok(values)
    } else {
        Err(Error::Batch(failures))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResidual {
    pub node: usize,
    pub beta: MultiIndex,
    pub target: f64,
    pub approx: f64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub fd_step: f64,
    pub entries: Vec<ConditionResidual>,
}

impl ConditionReport {
    /// Largest absolute residual per derivative order.
    pub fn max_residual_by_order(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            let slot = out.entry(e.beta.order()).or_insert(0.0f64);
            *slot = slot.max(e.residual);
        }
        out
    }

    /// Largest residual per order divided by the largest datum magnitude of
    /// that order (or 1 if all such data vanish).
    pub fn max_relative_by_order(&self) -> BTreeMap<u32, f64> {
        let mut scale: BTreeMap<u32, f64> = BTreeMap::new();
        for e in &self.entries {
            let s = scale.entry(e.beta.order()).or_insert(0.0);
            *s = s.max(e.target.abs());
        }
        self.max_residual_by_order()
            .into_iter()
            .map(|(o, r)| {
                let s = scale[&o];
                (o, if s > 0.0 { r / s } else { r })
            })
            .collect()
    }
}
