//! Closed-form functions of chart coordinates with analytic partials, used to
//! generate exact Hermite data.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::interpolant::HermiteNode;
use crate::multiindex::{int_pow, MultiIndex, MultiIndexSet};

/// Highest partial order provided for the transcendental builtins.
pub const TRANSCENDENTAL_MAX_ORDER: u32 = 6;

/// Names accepted by [`builtin`]; parameters go in parentheses, e.g.
/// `constant(5)` or `gaussian(2.5)`.
pub const BUILTIN_NAMES: [&str; 5] = ["constant", "linear", "quadratic", "trig-product", "gaussian"];

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// `Σ coeff · v^α`.
    Polynomial(Vec<(Vec<u32>, f64)>),
    /// `Π_j cos(ω v_j)`.
    TrigProduct { omega: f64 },
    /// `exp(-c ‖v‖²)`.
    Gaussian { c: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    name: String,
    dim: usize,
    kind: Kind,
}

impl TestFunction {
    pub fn constant(dim: usize, c: f64) -> Self {
        TestFunction {
            name: format!("constant({c})"),
            dim,
            kind: Kind::Polynomial(vec![(vec![0; dim], c)]),
        }
    }

    /// `a · v + b`.
    pub fn linear(a: &[f64], b: f64) -> Self {
        let dim = a.len();
        let mut terms = vec![(vec![0; dim], b)];
        for (j, &aj) in a.iter().enumerate() {
            let mut e = vec![0; dim];
            e[j] = 1;
            terms.push((e, aj));
        }
        TestFunction {
            name: "linear".into(),
            dim,
            kind: Kind::Polynomial(terms),
        }
    }

    /// Arbitrary polynomial `Σ coeff · v^α`.
    pub fn polynomial(name: &str, dim: usize, terms: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        if terms.iter().any(|(e, _)| e.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "polynomial exponents must have {dim} components"
            )));
        }
        Ok(TestFunction {
            name: name.into(),
            dim,
            kind: Kind::Polynomial(terms),
        })
    }

    pub fn trig_product(dim: usize, omega: f64) -> Self {
        TestFunction {
            name: format!("trig-product({omega})"),
            dim,
            kind: Kind::TrigProduct { omega },
        }
    }

    pub fn gaussian(dim: usize, c: f64) -> Self {
        TestFunction {
            name: format!("gaussian({c})"),
            dim,
            kind: Kind::Gaussian { c },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest derivative order available; polynomials have all of them.
    pub fn max_order(&self) -> u32 {
        match self.kind {
            Kind::Polynomial(_) => u32::MAX,
            _ => TRANSCENDENTAL_MAX_ORDER,
        }
    }

    /// Total degree for polynomials, `None` otherwise.
    pub fn degree(&self) -> Option<u32> {
        match &self.kind {
            Kind::Polynomial(terms) => Some(
                terms
                    .iter()
                    .filter(|(_, c)| *c != 0.0)
                    .map(|(e, _)| e.iter().sum())
                    .max()
                    .unwrap_or(0),
            ),
            _ => None,
        }
    }

    pub fn value(&self, v: &[f64]) -> Result<f64> {
        self.partial(v, &MultiIndex::zero(self.dim))
    }

    /// `D^β f(v)`.
    pub fn partial(&self, v: &[f64], beta: &MultiIndex) -> Result<f64> {
        if v.len() != self.dim || beta.dim() != self.dim {
            return Err(Error::InvalidInput(format!(
                "{} takes {} chart coordinates",
                self.name, self.dim
            )));
        }
        if beta.order() > self.max_order() {
            return Err(Error::OrderExceeded {
                requested: beta.order(),
                max: self.max_order(),
            });
        }
        let b = beta.components();
        Ok(match &self.kind {
            Kind::Polynomial(terms) => terms
                .iter()
                .map(|(alpha, coeff)| {
                    let mut t = *coeff;
                    for ((&a, &bj), &x) in alpha.iter().zip(b).zip(v) {
                        if bj > a {
                            return 0.0;
                        }
                        t *= falling_factorial(a, bj) * int_pow(x, a - bj);
                    }
                    t
                })
                .sum(),
            Kind::TrigProduct { omega } => b
                .iter()
                .zip(v)
                .map(|(&bj, &x)| {
                    let (s, c) = (omega * x).sin_cos();
                    let d = match bj % 4 {
                        0 => c,
                        1 => -s,
                        2 => -c,
                        _ => s,
                    };
                    int_pow(*omega, bj) * d
                })
                .product(),
            Kind::Gaussian { c } => {
                let sc = c.sqrt();
                b.iter()
                    .zip(v)
                    .map(|(&bj, &x)| {
                        // d^p/dx^p exp(-c x²) = (-√c)^p H_p(√c x) exp(-c x²)
                        let sign = if bj % 2 == 0 { 1.0 } else { -1.0 };
                        sign * int_pow(sc, bj) * hermite_h(bj, sc * x) * (-c * x * x).exp()
                    })
                    .product()
            }
        })
    }

    /// `{β: D^β f(v)}` over `delta`.
    pub fn taylor_data(&self, v: &[f64], delta: &MultiIndexSet) -> Result<BTreeMap<MultiIndex, f64>> {
        delta
            .iter()
            .map(|beta| Ok((beta.clone(), self.partial(v, beta)?)))
            .collect()
    }
}

/// Looks up a builtin by name, with optional parenthesized parameter.
pub fn builtin(spec: &str, dim: usize) -> Result<TestFunction> {
    let spec = spec.trim();
    let (name, param) = match spec.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::UnknownFunction(spec.into()))?;
            let p = inner
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::UnknownFunction(spec.into()))?;
            (name.trim(), Some(p))
        }
        None => (spec, None),
    };
    if dim == 0 {
        return Err(Error::InvalidInput("test functions need dimension >= 1".into()));
    }
    let f = match name {
        "constant" => TestFunction::constant(dim, param.unwrap_or(1.0)),
        "linear" => {
            let a: Vec<f64> = (0..dim).map(|j| j as f64 + 2.0).collect();
            TestFunction::linear(&a, param.unwrap_or(1.0))
        }
        "quadratic" => {
            // 0.5 + Σ 0.3 v_j + Σ (j+1) v_j² - Σ_{j<l} v_j v_l
            let mut terms = vec![(vec![0; dim], param.unwrap_or(0.5))];
            for j in 0..dim {
                let mut e = vec![0; dim];
                e[j] = 1;
                terms.push((e.clone(), 0.3));
                e[j] = 2;
                terms.push((e, j as f64 + 1.0));
                for l in (j + 1)..dim {
                    let mut e = vec![0; dim];
                    e[j] = 1;
                    e[l] = 1;
                    terms.push((e, -1.0));
                }
            }
            TestFunction {
                name: "quadratic".into(),
                dim,
                kind: Kind::Polynomial(terms),
            }
        }
        "trig-product" => TestFunction::trig_product(dim, param.unwrap_or(1.0)),
        "gaussian" => TestFunction::gaussian(dim, param.unwrap_or(1.0)),
        _ => return Err(Error::UnknownFunction(spec.into())),
    };
    Ok(f)
}

/// `|D^β f(v) - central FD of D^{β - e_j} f along v_j|` for the first axis
/// `j` with `β_j > 0`. Each hand-coded partial is thus checked against the
/// one below it. Zero for `β = 0`.
pub fn derivative_check(f: &TestFunction, v: &[f64], beta: &MultiIndex, fd_step: f64) -> Result<f64> {
    let analytic = f.partial(v, beta)?;
    let Some(j) = beta.components().iter().position(|&b| b > 0) else {
        return Ok(0.0);
    };
    let lower = beta.lowered(j).expect("component is positive");
    let mut plus = v.to_vec();
    let mut minus = v.to_vec();
    plus[j] += fd_step;
    minus[j] -= fd_step;
    let fd = (f.partial(&plus, &lower)? - f.partial(&minus, &lower)?) / (2.0 * fd_step);
    Ok((analytic - fd).abs())
}

/// Hermite nodes carrying exact partials of `f` over each node's set.
pub fn hermite_nodes(
    domain: &Domain,
    points: &[Point],
    f: &TestFunction,
    delta_sets: &[MultiIndexSet],
) -> Result<Vec<HermiteNode>> {
    if points.len() != delta_sets.len() {
        return Err(Error::InvalidInput(format!(
            "{} points but {} derivative sets",
            points.len(),
            delta_sets.len()
        )));
    }
    points
        .iter()
        .zip(delta_sets)
        .map(|(p, delta)| {
            let v = domain.chart().forward(p)?;
            HermiteNode::new(p.clone(), f.taylor_data(&v, delta)?)
        })
        .collect()
}

/// Physicists' Hermite polynomial `H_n(x)` by three-term recurrence.
fn hermite_h(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn falling_factorial(a: u32, k: u32) -> f64 {
    (0..k).map(|i| f64::from(a - i)).product()
}
