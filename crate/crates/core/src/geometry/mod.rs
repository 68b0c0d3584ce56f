//! Manifolds, points, patches and geodesic distance.
//!
//! Three manifolds are supported, each with a closed-form geodesic distance:
//! the sphere of radius `R` embedded in 3-space, the flat torus with a given
//! period vector, and Euclidean space. Interpolation happens on a [`Patch`]
//! (a geodesic ball) that is covered by a single [`Chart`].

mod chart;
mod sampling;

pub use chart::{Chart, ChartKind};
pub use sampling::{sample_patch, SampleStrategy};

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative tolerance on `‖u‖ = R` for points on the sphere.
pub const SPHERE_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Manifold {
    /// Sphere of the given radius centred at the origin of 3-space.
    Sphere { radius: f64 },
    /// `ℝ^m / (P_1 ℤ × … × P_m ℤ)`, points stored in `[0, P_j)`.
    FlatTorus { periods: Vec<f64> },
    Euclidean { dim: usize },
}

impl Manifold {
    pub fn sphere(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        Ok(Manifold::Sphere { radius })
    }

    pub fn unit_sphere() -> Self {
        Manifold::Sphere { radius: 1.0 }
    }

    pub fn flat_torus(periods: Vec<f64>) -> Result<Self> {
        if periods.is_empty() {
            return Err(Error::InvalidConfig("torus needs at least one period".into()));
        }
        if let Some(p) = periods.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "torus periods must be positive, got {p}"
            )));
        }
        Ok(Manifold::FlatTorus { periods })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("euclidean dimension must be >= 1".into()));
        }
        Ok(Manifold::Euclidean { dim })
    }

    /// Number of coordinates of a [`Point`] on this manifold.
    pub fn ambient_dim(&self) -> usize {
        match self {
            Manifold::Sphere { .. } => 3,
            Manifold::FlatTorus { periods } => periods.len(),
            Manifold::Euclidean { dim } => *dim,
        }
    }

    /// Intrinsic dimension `m` (length of chart coordinate vectors).
    pub fn dim(&self) -> usize {
        match self {
            Manifold::Sphere { .. } => 2,
            Manifold::FlatTorus { periods } => periods.len(),
            Manifold::Euclidean { dim } => *dim,
        }
    }

    /// Checks that `u` is a valid point of this manifold.
    pub fn validate(&self, u: &Point) -> Result<()> {
        let c = u.coords();
        if c.len() != self.ambient_dim() {
            return Err(Error::InvalidPoint(format!(
                "expected {} coordinates, got {}",
                self.ambient_dim(),
                c.len()
            )));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate in {c:?}")));
        }
        match self {
            Manifold::Sphere { radius } => {
                let norm = norm(c);
                if (norm - radius).abs() > SPHERE_NORM_TOL * radius {
                    return Err(Error::InvalidPoint(format!(
                        "point {c:?} is off the sphere: |u| = {norm}, radius {radius}"
                    )));
                }
            }
            Manifold::FlatTorus { periods } => {
                for (x, p) in c.iter().zip(periods) {
                    if !(0.0..*p).contains(x) {
                        return Err(Error::InvalidPoint(format!(
                            "torus coordinate {x} outside [0, {p})"
                        )));
                    }
                }
            }
            Manifold::Euclidean { .. } => {}
        }
        Ok(())
    }

    /// Geodesic distance between two validated points.
    pub fn geodesic_distance(&self, u: &Point, w: &Point) -> Result<f64> {
        self.validate(u)?;
        self.validate(w)?;
        Ok(self.distance(u.coords(), w.coords()))
    }

    /// Geodesic distance on raw coordinates, without validation.
    pub(crate) fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Manifold::Sphere { radius } => {
                let cross = [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                radius * norm(&cross).atan2(dot)
            }
            Manifold::FlatTorus { periods } => a
                .iter()
                .zip(b)
                .zip(periods)
                .map(|((x, y), p)| {
                    let d = wrap_centered(x - y, *p);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            Manifold::Euclidean { .. } => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Largest possible geodesic distance between two points.
    pub fn max_distance(&self) -> f64 {
        match self {
            Manifold::Sphere { radius } => PI * radius,
            Manifold::FlatTorus { periods } => {
                periods.iter().map(|p| 0.25 * p * p).sum::<f64>().sqrt()
            }
            Manifold::Euclidean { .. } => f64::INFINITY,
        }
    }
}

/// A point given by its ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

/// Closed geodesic ball `{u : d_g(center, u) <= radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    center: Point,
    radius: f64,
    full: bool,
}

impl Patch {
    /// On the sphere the radius must stay below `πR` so that a single
    /// stereographic chart covers the patch; on the torus it must stay below
    /// half the smallest period so the ball does not wrap onto itself.
    pub fn new(manifold: &Manifold, center: Point, radius: f64) -> Result<Self> {
        manifold.validate(&center)?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "patch radius must be positive, got {radius}"
            )));
        }
        match manifold {
            Manifold::Sphere { radius: r } if radius >= PI * r => {
                return Err(Error::InvalidConfig(format!(
                    "spherical patch radius {radius} must be below pi*R = {}",
                    PI * r
                )));
            }
            Manifold::FlatTorus { periods } => {
                let limit = 0.5 * periods.iter().cloned().fold(f64::INFINITY, f64::min);
                if radius >= limit {
                    return Err(Error::InvalidConfig(format!(
                        "torus patch radius {radius} must be below half the smallest period ({limit})"
                    )));
                }
            }
            _ => {}
        }
        Ok(Patch {
            center,
            radius,
            full: false,
        })
    }

    /// The whole sphere. Only usable for value-only (Lagrange) data, since
    /// no single chart covers it.
    pub fn full_sphere(manifold: &Manifold, center: Point) -> Result<Self> {
        let Manifold::Sphere { radius } = manifold else {
            return Err(Error::InvalidConfig(
                "full-manifold patches exist only on the sphere".into(),
            ));
        };
        manifold.validate(&center)?;
        Ok(Patch {
            center,
            radius: PI * radius,
            full: true,
        })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_full(&self) -> bool {
        self.full
    }
}

/// A manifold together with the patch being interpolated on and its chart.
#[derive(Debug, Clone)]
pub struct Domain {
    manifold: Manifold,
    patch: Patch,
    chart: Chart,
}

impl Domain {
    pub fn new(manifold: Manifold, patch: Patch) -> Result<Self> {
        let chart = Chart::for_manifold(&manifold, patch.center())?;
        Ok(Domain {
            manifold,
            patch,
            chart,
        })
    }

    /// Spherical cap on the unit sphere centred at the north pole.
    pub fn unit_cap(radius: f64) -> Result<Self> {
        let m = Manifold::unit_sphere();
        let patch = Patch::new(&m, Point::from([0.0, 0.0, 1.0]), radius)?;
        Domain::new(m, patch)
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Geodesic diameter of the patch.
    pub fn diameter(&self) -> f64 {
        (2.0 * self.patch.radius).min(self.manifold.max_distance())
    }

    pub fn distance(&self, u: &Point, w: &Point) -> f64 {
        self.manifold.distance(u.coords(), w.coords())
    }

    /// Validates `u` against the manifold and checks patch membership.
    pub fn check_inside(&self, u: &Point) -> Result<()> {
        self.manifold.validate(u)?;
        if self.patch.full {
            return Ok(());
        }
        let d = self.distance(self.patch.center(), u);
        if d > self.patch.radius * (1.0 + 1e-12) {
            return Err(Error::OutsidePatch {
                point: u.coords().to_vec(),
                distance: d,
                radius: self.patch.radius,
            });
        }
        Ok(())
    }
}

/// Estimates the chart's Lipschitz constant `max ‖v(u) - v(w)‖ / d_g(u, w)`
/// over all pairs of `samples`.
pub fn chart_lipschitz(domain: &Domain, samples: &[Point]) -> Result<f64> {
    let charted = samples
        .iter()
        .map(|u| domain.chart().forward(u))
        .collect::<Result<Vec<_>>>()?;
    let mut best: f64 = 0.0;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let d = domain.distance(&samples[i], &samples[j]);
            if d > 0.0 {
                let dv = norm_diff(&charted[i], &charted[j]);
                best = best.max(dv / d);
            }
        }
    }
    Ok(best)
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Reduces `d` into `[-p/2, p/2]`.
pub(crate) fn wrap_centered(d: f64, p: f64) -> f64 {
    d - p * (d / p).round()
}
