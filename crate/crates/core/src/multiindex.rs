//! Multi-indices, derivative sets and incomplete Taylor expansions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Partial-derivative order `β = (β_1, …, β_m)`.
///
/// Ordered by total order first, then lexicographically, so that sets list
/// the value term first and higher derivatives later.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        MultiIndex(components)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// `e_j`, the first-order index in direction `j`.
    pub fn unit(dim: usize, j: usize) -> Self {
        let mut c = vec![0; dim];
        c[j] = 1;
        MultiIndex(c)
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|β|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    /// `β_1! ⋯ β_m!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&b| factorial(b)).product()
    }

    /// `x^β = x_1^β_1 ⋯ x_m^β_m`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.0.len());
        self.0.iter().zip(x).map(|(&b, &xi)| int_pow(xi, b)).product()
    }

    /// `β - e_j`, if `β_j > 0`.
    pub fn lowered(&self, j: usize) -> Option<MultiIndex> {
        let mut c = self.0.clone();
        c[j] = c[j].checked_sub(1)?;
        Some(MultiIndex(c))
    }

    /// All multi-indices in `dim` variables with `|β| = order`.
    pub fn all_of_order(dim: usize, order: u32) -> Vec<MultiIndex> {
        fn rec(dim: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == dim {
                prefix.push(remaining);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for b in (0..=remaining).rev() {
                prefix.push(b);
                rec(dim, remaining - b, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            return out;
        }
        rec(dim, order, &mut Vec::with_capacity(dim), &mut out);
        out
    }

    /// All multi-indices in `dim` variables with `|β| <= order`.
    pub fn all_up_to(dim: usize, order: u32) -> Vec<MultiIndex> {
        (0..=order).flat_map(|o| Self::all_of_order(dim, o)).collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Comma-joined components, e.g. `1,0`.
impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|part| {
                part.trim().parse::<u32>().map_err(|e| {
                    Error::parse(format!("multi-index \"{s}\""), format!("bad component `{part}`: {e}"))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

/// Derivative set `Δ_i`: distinct multi-indices of a common dimension,
/// always containing zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexSet {
    dim: usize,
    indices: BTreeSet<MultiIndex>,
}

impl MultiIndexSet {
    pub fn new(indices: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        let mut set = BTreeSet::new();
        let mut dim = None;
        for beta in indices {
            match dim {
                None => dim = Some(beta.dim()),
                Some(d) if d != beta.dim() => {
                    return Err(Error::InvalidInput(format!(
                        "multi-index {beta} has {} components, expected {d}",
                        beta.dim()
                    )))
                }
                _ => {}
            }
            let shown = beta.to_string();
            if !set.insert(beta) {
                return Err(Error::InvalidInput(format!("duplicate multi-index {shown}")));
            }
        }
        let dim = dim.ok_or_else(|| Error::InvalidInput("empty multi-index set".into()))?;
        if dim == 0 {
            return Err(Error::InvalidInput("multi-indices need at least one component".into()));
        }
        if !set.contains(&MultiIndex::zero(dim)) {
            return Err(Error::InvalidInput(
                "multi-index set must contain the zero index".into(),
            ));
        }
        Ok(MultiIndexSet { dim, indices: set })
    }

    /// `{0}`: value data only.
    pub fn values_only(dim: usize) -> Self {
        MultiIndexSet {
            dim,
            indices: BTreeSet::from([MultiIndex::zero(dim)]),
        }
    }

    /// Every index of order at most `q`.
    pub fn complete(dim: usize, q: u32) -> Self {
        MultiIndexSet {
            dim,
            indices: MultiIndex::all_up_to(dim, q).into_iter().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, beta: &MultiIndex) -> bool {
        self.indices.contains(beta)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.indices.iter()
    }

    pub fn max_order(&self) -> u32 {
        self.indices.iter().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// Largest `q` such that every index of order `<= q` is present.
    pub fn completeness_order(&self) -> u32 {
        let mut q = 0;
        while q < self.max_order()
            && MultiIndex::all_of_order(self.dim, q + 1)
                .iter()
                .all(|b| self.indices.contains(b))
        {
            q += 1;
        }
        q
    }
}

/// Global derivative order `k`: the largest `|β|` over all sets.
pub fn global_order_k(sets: &[MultiIndexSet]) -> Result<u32> {
    if sets.is_empty() {
        return Err(Error::InvalidInput("no derivative sets given".into()));
    }
    Ok(sets.iter().map(MultiIndexSet::max_order).max().unwrap_or(0))
}

/// Evaluates the incomplete Taylor expansion
/// `Σ_{β∈Δ} data(β) (v - v_center)^β / β!`.
pub fn taylor_eval(
    v: &[f64],
    v_center: &[f64],
    delta: &MultiIndexSet,
    data: &BTreeMap<MultiIndex, f64>,
) -> Result<f64> {
    if data.len() != delta.len() || !data.keys().all(|b| delta.contains(b)) {
        return Err(Error::InconsistentData(format!(
            "data covers {{{}}} but the derivative set is {{{}}}",
            join(data.keys()),
            join(delta.iter())
        )));
    }
    if v.len() != delta.dim() || v_center.len() != delta.dim() {
        return Err(Error::InconsistentData(format!(
            "chart vectors must have {} components",
            delta.dim()
        )));
    }
    let offset: Vec<f64> = v.iter().zip(v_center).map(|(a, b)| a - b).collect();
    Ok(TaylorExpansion::new(data).eval(&offset))
}

fn join<'a>(it: impl Iterator<Item = &'a MultiIndex>) -> String {
    it.map(|b| format!("({b})")).collect::<Vec<_>>().join(" ")
}

/// Taylor data pre-divided by `β!`, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct TaylorExpansion {
    constant: f64,
    terms: Vec<(Vec<u32>, f64)>,
}

impl TaylorExpansion {
    pub fn new(data: &BTreeMap<MultiIndex, f64>) -> Self {
        let max_component = data
            .keys()
            .flat_map(|b| b.components().iter().copied())
            .max()
            .unwrap_or(0);
        let fact = factorial_table(max_component);
        let mut constant = 0.0;
        let mut terms = Vec::new();
        for (beta, value) in data {
            if beta.is_zero() {
                constant = *value;
            } else {
                let denom: f64 = beta.components().iter().map(|&b| fact[b as usize]).product();
                terms.push((beta.components().to_vec(), value / denom));
            }
        }
        TaylorExpansion { constant, terms }
    }

    /// The `β = 0` coefficient.
    pub fn value(&self) -> f64 {
        self.constant
    }

    /// Evaluates at `offset = v - v_center`.
    pub fn eval(&self, offset: &[f64]) -> f64 {
        self.terms.iter().fold(self.constant, |acc, (exps, coeff)| {
            acc + coeff
                * exps
                    .iter()
                    .zip(offset)
                    .map(|(&b, &x)| int_pow(x, b))
                    .product::<f64>()
        })
    }
}

/// `x^n` by repeated squaring.
pub fn int_pow(mut x: f64, mut n: u32) -> f64 {
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= x;
        }
        x *= x;
        n >>= 1;
    }
    acc
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn factorial_table(max: u32) -> Vec<f64> {
    let mut t = vec![1.0; max as usize + 1];
    for i in 1..t.len() {
        t[i] = t[i - 1] * i as f64;
    }
    t
}
