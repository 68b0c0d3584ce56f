use serde::{Deserialize, Serialize};

use super::{wrap_centered, Manifold, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    /// Stereographic projection from the antipode of the chart centre.
    Stereographic,
    /// Torus coordinates unwrapped into the period cell around the centre.
    PeriodicUnwrap,
    Identity,
}

impl ChartKind {
    /// The chart used for each manifold.
    pub fn for_manifold(manifold: &Manifold) -> Self {
        match manifold {
            Manifold::Sphere { .. } => ChartKind::Stereographic,
            Manifold::FlatTorus { .. } => ChartKind::PeriodicUnwrap,
            Manifold::Euclidean { .. } => ChartKind::Identity,
        }
    }
}

#[derive(Debug, Clone)]
enum ChartMap {
    Stereographic {
        radius: f64,
        /// Orthonormal frame `(e1, e2, c/|c|)`; the centre maps to `v = 0`.
        frame: [[f64; 3]; 3],
    },
    PeriodicUnwrap {
        center: Vec<f64>,
        periods: Vec<f64>,
    },
    Identity {
        dim: usize,
    },
}

/// Homeomorphism `v = φ(u)` from a patch to an open subset of `ℝ^m`.
#[derive(Debug, Clone)]
pub struct Chart {
    map: ChartMap,
}

impl Chart {
    /// Builds the natural chart of `manifold` about `center`.
    ///
    /// The Euclidean chart is the identity, so its centre is the origin
    /// regardless of `center`.
    pub fn for_manifold(manifold: &Manifold, center: &Point) -> Result<Self> {
        manifold.validate(center)?;
        let map = match manifold {
            Manifold::Sphere { radius } => {
                let c = center.coords();
                let n = [c[0] / radius, c[1] / radius, c[2] / radius];
                let (e1, e2) = tangent_frame(n);
                ChartMap::Stereographic {
                    radius: *radius,
                    frame: [e1, e2, n],
                }
            }
            Manifold::FlatTorus { periods } => ChartMap::PeriodicUnwrap {
                center: center.coords().to_vec(),
                periods: periods.clone(),
            },
            Manifold::Euclidean { dim } => ChartMap::Identity { dim: *dim },
        };
        Ok(Chart { map })
    }

    pub fn kind(&self) -> ChartKind {
        match self.map {
            ChartMap::Stereographic { .. } => ChartKind::Stereographic,
            ChartMap::PeriodicUnwrap { .. } => ChartKind::PeriodicUnwrap,
            ChartMap::Identity { .. } => ChartKind::Identity,
        }
    }

    /// Length of chart coordinate vectors.
    pub fn dim(&self) -> usize {
        match &self.map {
            ChartMap::Stereographic { .. } => 2,
            ChartMap::PeriodicUnwrap { periods, .. } => periods.len(),
            ChartMap::Identity { dim } => *dim,
        }
    }

    fn ambient_dim(&self) -> usize {
        match &self.map {
            ChartMap::Stereographic { .. } => 3,
            _ => self.dim(),
        }
    }

    pub fn forward(&self, u: &Point) -> Result<Vec<f64>> {
        let c = u.coords();
        if c.len() != self.ambient_dim() {
            return Err(Error::InvalidPoint(format!(
                "chart expects {} coordinates, got {}",
                self.ambient_dim(),
                c.len()
            )));
        }
        match &self.map {
            ChartMap::Stereographic { radius, frame } => {
                let local = [dot3(&frame[0], c), dot3(&frame[1], c), dot3(&frame[2], c)];
                let denom = radius + local[2];
                if denom <= 1e-12 * radius {
                    return Err(Error::OutOfChart(format!(
                        "{c:?} is the excluded antipode of the stereographic chart"
                    )));
                }
                let s = radius / denom;
                Ok(vec![s * local[0], s * local[1]])
            }
            ChartMap::PeriodicUnwrap { center, periods } => Ok(c
                .iter()
                .zip(center)
                .zip(periods)
                .map(|((x, x0), p)| wrap_centered(x - x0, *p))
                .collect()),
            ChartMap::Identity { .. } => Ok(c.to_vec()),
        }
    }

    pub fn inverse(&self, v: &[f64]) -> Result<Point> {
        if v.len() != self.dim() {
            return Err(Error::OutOfChart(format!(
                "chart coordinates must have {} components, got {}",
                self.dim(),
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::OutOfChart(format!("non-finite chart coordinates {v:?}")));
        }
        match &self.map {
            ChartMap::Stereographic { radius, frame } => {
                let w = [v[0] / radius, v[1] / radius];
                let rho2 = w[0] * w[0] + w[1] * w[1];
                let inv = 1.0 / (1.0 + rho2);
                let local = [2.0 * w[0] * inv, 2.0 * w[1] * inv, (1.0 - rho2) * inv];
                let mut out = [0.0; 3];
                for (axis, coeff) in frame.iter().zip(local) {
                    for (o, e) in out.iter_mut().zip(axis) {
                        *o += radius * coeff * e;
                    }
                }
                Ok(Point::from(out))
            }
            ChartMap::PeriodicUnwrap { center, periods } => {
                let mut out = Vec::with_capacity(v.len());
                for ((x, x0), p) in v.iter().zip(center).zip(periods) {
                    if x.abs() > 0.5 * p {
                        return Err(Error::OutOfChart(format!(
                            "unwrapped coordinate {x} exceeds half period {}",
                            0.5 * p
                        )));
                    }
                    let mut u = (x0 + x).rem_euclid(*p);
                    if u >= *p {
                        u = 0.0;
                    }
                    out.push(u);
                }
                Ok(Point::new(out))
            }
            ChartMap::Identity { .. } => Ok(Point::new(v.to_vec())),
        }
    }
}

/// Orthonormal tangent vectors at unit normal `n`, continuous for `n_z > -1`.
/// At the north pole this returns the x and y axes.
pub(crate) fn tangent_frame(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let sign = 1f64.copysign(n[2]);
    let a = -1.0 / (sign + n[2]);
    let b = n[0] * n[1] * a;
    (
        [1.0 + sign * n[0] * n[0] * a, sign * b, -sign * n[0]],
        [b, sign + n[1] * n[1] * a, -n[1]],
    )
}

fn dot3(a: &[f64; 3], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
