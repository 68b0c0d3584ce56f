//! Cardinal basis functions built from geodesic distances.
//!
//! Three constructions are provided:
//!
//! * [`cbf_product`]: the product form `Π_{j≠i} α(u, z_j) / Σ_k Π_{j≠k} α(u, z_j)`
//!   with `α = d_g^μ`. Kept as a reference for small node sets only, since
//!   the products under- and overflow quickly.
//! * [`cbf_inverse`]: the equivalent inverse-distance form
//!   `d_g(u, z_i)^{-μ} / Σ_k d_g(u, z_k)^{-μ}`, evaluated after rescaling by
//!   the smallest distance.
//! * [`cbf_localized`]: inverse-distance weights multiplied by a compactly
//!   supported bump `τ(d) = (1 - d/δ)_+^s`.
//!
//! All forms return the exact cardinal vector `e_i` when `u` is within the
//! near-node tolerance of `z_i`.

mod neighbor;

pub use neighbor::NeighborIndex;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Default near-node tolerance, as a fraction of the patch diameter.
pub const DEFAULT_NEAR_NODE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConfig {
    /// Distance exponent `μ`; must exceed the global derivative order `k`.
    pub mu: f64,
    /// Exponent `s` of the bump function; at least `k + 1`.
    pub bump_exponent: u32,
    /// Near-node tolerance `ε`, relative to the patch diameter.
    pub near_node_tol: f64,
}

impl WeightConfig {
    /// Defaults for global derivative order `k`: `μ = s = k + 1`.
    pub fn for_order(k: u32) -> Self {
        WeightConfig {
            mu: f64::from(k + 1),
            bump_exponent: k + 1,
            near_node_tol: DEFAULT_NEAR_NODE_TOL,
        }
    }

    pub fn validate(&self, k: u32) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > f64::from(k)) {
            return Err(Error::InvalidConfig(format!(
                "mu = {} must satisfy mu > k = {k} so that derivatives up to order k vanish at the nodes",
                self.mu
            )));
        }
        if self.bump_exponent < k + 1 {
            return Err(Error::InvalidConfig(format!(
                "bump exponent s = {} must be at least k + 1 = {}",
                self.bump_exponent,
                k + 1
            )));
        }
        if !(self.near_node_tol > 0.0 && self.near_node_tol <= 1e-8) {
            return Err(Error::InvalidConfig(format!(
                "near-node tolerance {} must lie in (0, 1e-8]",
                self.near_node_tol
            )));
        }
        Ok(())
    }
}

/// How weights are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Inverse-distance weights over all nodes.
    Global,
    /// Bump-localized weights over the nodes within `delta`.
    Localized { delta: f64 },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Global => "global",
            Mode::Localized { .. } => "localized",
        }
    }
}

/// Sparse weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    /// `(node, g_node(u))`, sorted by node.
    pub entries: Vec<(usize, f64)>,
    /// Set when the near-node short-circuit fired: the node and its distance.
    pub at_node: Option<(usize, f64)>,
}

impl Weights {
    fn unit(node: usize, distance: f64) -> Self {
        Weights {
            entries: vec![(node, 1.0)],
            at_node: Some((node, distance)),
        }
    }

    pub fn get(&self, node: usize) -> f64 {
        self.entries
            .binary_search_by_key(&node, |&(i, _)| i)
            .map_or(0.0, |k| self.entries[k].1)
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(i, w) in &self.entries {
            out[i] = w;
        }
        out
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }
}

/// `α(d) = d^μ`.
pub fn alpha_power(d: f64, mu: f64) -> f64 {
    d.powf(mu)
}

/// Truncated power bump `τ(r) = (1 - r/δ)^s` for `r < δ`, zero beyond.
pub fn bump(r: f64, delta: f64, s: u32) -> f64 {
    if r >= delta {
        0.0
    } else {
        crate::multiindex::int_pow(1.0 - r / delta, s)
    }
}

/// Product-form cardinal functions with `α = d_g^μ`.
pub fn cbf_product(nodes: &NeighborIndex, u: &Point, mu: f64) -> Result<Vec<f64>> {
    nodes.manifold().validate(u)?;
    let alpha: Vec<f64> = nodes
        .points()
        .iter()
        .map(|z| alpha_power(nodes.manifold().distance(u.coords(), z.coords()), mu))
        .collect();
    let numerators: Vec<f64> = (0..alpha.len())
        .map(|i| {
            alpha
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, a)| a)
                .product()
        })
        .collect();
    let denom: f64 = numerators.iter().sum();
    Ok(numerators.into_iter().map(|p| p / denom).collect())
}

/// Inverse-distance cardinal functions over all nodes. `tol` is an absolute
/// distance.
pub fn cbf_inverse(nodes: &NeighborIndex, u: &Point, mu: f64, tol: f64) -> Result<Vec<f64>> {
    nodes.manifold().validate(u)?;
    Ok(global_weights(nodes, u, mu, tol).to_dense(nodes.len()))
}

/// Localized cardinal functions. `tol` is an absolute distance.
pub fn cbf_localized(
    nodes: &NeighborIndex,
    u: &Point,
    mu: f64,
    delta: f64,
    s: u32,
    tol: f64,
) -> Result<Weights> {
    nodes.manifold().validate(u)?;
    localized_weights(nodes, u, mu, delta, s, tol)
}

fn global_weights(nodes: &NeighborIndex, u: &Point, mu: f64, tol: f64) -> Weights {
    let dists: Vec<(usize, f64)> = nodes
        .points()
        .iter()
        .enumerate()
        .map(|(i, z)| (i, nodes.manifold().distance(u.coords(), z.coords())))
        .collect();
    quotient(&dists, mu, tol, None).expect("global weights always have a positive sum")
}

fn localized_weights(
    nodes: &NeighborIndex,
    u: &Point,
    mu: f64,
    delta: f64,
    s: u32,
    tol: f64,
) -> Result<Weights> {
    let dists = nodes.range_query(u, delta);
    quotient(&dists, mu, tol, Some((delta, s))).ok_or_else(|| Error::Uncovered {
        point: u.coords().to_vec(),
        delta,
    })
}

/// Normalized `τ(d_i) (d_min / d_i)^μ`; `None` if every weight vanishes.
fn quotient(dists: &[(usize, f64)], mu: f64, tol: f64, bump_params: Option<(f64, u32)>) -> Option<Weights> {
    let &(nearest, d_min) = dists
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))?;
    if d_min <= tol {
        return Some(Weights::unit(nearest, d_min));
    }
    let mut entries: Vec<(usize, f64)> = dists
        .iter()
        .map(|&(i, d)| {
            let tau = bump_params.map_or(1.0, |(delta, s)| bump(d, delta, s));
            (i, tau * (d_min / d).powf(mu))
        })
        .collect();
    let sum: f64 = entries.iter().map(|(_, w)| w).sum();
    if !(sum > 0.0 && sum.is_finite()) {
        return None;
    }
    for e in &mut entries {
        e.1 /= sum;
    }
    Some(Weights {
        entries,
        at_node: None,
    })
}

/// A node set with its weight configuration, ready to evaluate `g_i(u)`.
#[derive(Debug, Clone)]
pub struct CardinalBasis {
    nodes: NeighborIndex,
    config: WeightConfig,
    mode: Mode,
    near_tol: f64,
}

impl CardinalBasis {
    /// `diameter` scales the relative near-node tolerance to a distance.
    pub fn new(nodes: NeighborIndex, config: WeightConfig, mode: Mode, diameter: f64) -> Result<Self> {
        if let Mode::Localized { delta } = mode {
            if !(delta.is_finite() && delta > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "localization radius delta must be positive, got {delta}"
                )));
            }
        }
        Ok(CardinalBasis {
            nodes,
            near_tol: config.near_node_tol * diameter,
            config,
            mode,
        })
    }

    pub fn nodes(&self) -> &NeighborIndex {
        &self.nodes
    }

    pub fn config(&self) -> &WeightConfig {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Absolute near-node distance.
    pub fn near_tol(&self) -> f64 {
        self.near_tol
    }

    /// Weights in the configured mode. `u` is assumed valid.
    pub fn weights(&self, u: &Point) -> Result<Weights> {
        match self.mode {
            Mode::Global => Ok(self.global(u)),
            Mode::Localized { delta } => localized_weights(
                &self.nodes,
                u,
                self.config.mu,
                delta,
                self.config.bump_exponent,
                self.near_tol,
            ),
        }
    }

    /// Inverse-distance weights regardless of mode.
    pub fn global(&self, u: &Point) -> Weights {
        global_weights(&self.nodes, u, self.config.mu, self.near_tol)
    }
}
