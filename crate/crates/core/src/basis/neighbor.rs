use crate::error::{Error, Result};
use crate::geometry::{Manifold, Point};

/// Balanced kd-tree over ambient coordinates, stored implicitly: the node of
/// a slice `[lo, hi)` is its median element.
#[derive(Debug, Clone)]
struct KdTree {
    dim: usize,
    /// Coordinates in tree order.
    coords: Vec<f64>,
    /// Original index of each tree slot.
    ids: Vec<usize>,
    /// Split axis of each tree slot.
    axes: Vec<u8>,
}

impl KdTree {
    fn build(dim: usize, points: &[Point]) -> Self {
        let mut ids: Vec<usize> = (0..points.len()).collect();
        let mut axes = vec![0u8; points.len()];
        Self::partition(points, dim, &mut ids, &mut axes);
        let coords = ids
            .iter()
            .flat_map(|&i| points[i].coords().iter().copied())
            .collect();
        KdTree {
            dim,
            coords,
            ids,
            axes,
        }
    }

    fn partition(points: &[Point], dim: usize, ids: &mut [usize], axes: &mut [u8]) {
        if ids.len() <= 1 {
            return;
        }
        let axis = (0..dim)
            .map(|a| {
                let (lo, hi) = ids.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let x = points[i].coords()[a];
                    (lo.min(x), hi.max(x))
                });
                (a, hi - lo)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map_or(0, |(a, _)| a);
        let mid = ids.len() / 2;
        ids.select_nth_unstable_by(mid, |&i, &j| {
            points[i].coords()[axis].total_cmp(&points[j].coords()[axis])
        });
        axes[mid] = axis as u8;
        let (left, rest) = ids.split_at_mut(mid);
        let (left_axes, rest_axes) = axes.split_at_mut(mid);
        Self::partition(points, dim, left, left_axes);
        Self::partition(points, dim, &mut rest[1..], &mut rest_axes[1..]);
    }

    fn point(&self, slot: usize) -> &[f64] {
        &self.coords[slot * self.dim..(slot + 1) * self.dim]
    }

    fn dist2(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    /// Pushes the ids of all points with squared distance `<= r2` to `q`.
    fn within(&self, q: &[f64], r2: f64, out: &mut Vec<usize>) {
        self.within_slice(0, self.ids.len(), q, r2, out);
    }

    fn within_slice(&self, lo: usize, hi: usize, q: &[f64], r2: f64, out: &mut Vec<usize>) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let p = self.point(mid);
        if Self::dist2(p, q) <= r2 {
            out.push(self.ids[mid]);
        }
        let axis = self.axes[mid] as usize;
        let diff = q[axis] - p[axis];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.within_slice(near.0, near.1, q, r2, out);
        if diff * diff <= r2 {
            self.within_slice(far.0, far.1, q, r2, out);
        }
    }

    /// Nearest point to `q` by Euclidean distance, skipping `exclude`.
    /// Ties resolve to the smaller id.
    fn nearest(&self, q: &[f64], exclude: Option<usize>, best: &mut (usize, f64)) {
        self.nearest_slice(0, self.ids.len(), q, exclude, best);
    }

    fn nearest_slice(
        &self,
        lo: usize,
        hi: usize,
        q: &[f64],
        exclude: Option<usize>,
        best: &mut (usize, f64),
    ) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let p = self.point(mid);
        let id = self.ids[mid];
        if Some(id) != exclude {
            let d2 = Self::dist2(p, q);
            if d2 < best.1 || (d2 == best.1 && id < best.0) {
                *best = (id, d2);
            }
        }
        let axis = self.axes[mid] as usize;
        let diff = q[axis] - p[axis];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.nearest_slice(near.0, near.1, q, exclude, best);
        if diff * diff <= best.1 {
            self.nearest_slice(far.0, far.1, q, exclude, best);
        }
    }
}

/// Spatial index over a set of distinct nodes answering geodesic range and
/// nearest-node queries.
///
/// Search runs in ambient coordinates: on the sphere a geodesic radius is
/// converted to the equivalent chord length, on the torus the query is
/// repeated for each periodic image that can reach the fundamental cell.
/// Candidates are then filtered by exact geodesic distance, so results agree
/// with a brute-force scan.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    manifold: Manifold,
    points: Vec<Point>,
    tree: KdTree,
}

impl NeighborIndex {
    /// Fails on off-manifold points or on coinciding nodes.
    pub fn build(nodes: &[Point], manifold: &Manifold) -> Result<Self> {
        let index = Self::build_allowing_duplicates(nodes, manifold)?;
        let mut hits = Vec::new();
        for (i, p) in nodes.iter().enumerate() {
            hits.clear();
            index.tree.within(p.coords(), 0.0, &mut hits);
            if let Some(&j) = hits.iter().find(|&&j| j != i) {
                return Err(Error::DuplicateNode {
                    first: i.min(j),
                    second: i.max(j),
                });
            }
        }
        Ok(index)
    }

    pub(crate) fn build_allowing_duplicates(nodes: &[Point], manifold: &Manifold) -> Result<Self> {
        for p in nodes {
            manifold.validate(p)?;
        }
        Ok(NeighborIndex {
            manifold: manifold.clone(),
            points: nodes.to_vec(),
            tree: KdTree::build(manifold.ambient_dim(), nodes),
        })
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// All `(i, d_g(u, z_i))` with `d_g(u, z_i) < radius`, sorted by `i`.
    pub fn range_query(&self, u: &Point, radius: f64) -> Vec<(usize, f64)> {
        let q = u.coords();
        let mut candidates = Vec::new();
        if radius > self.manifold.max_distance() {
            candidates.extend(0..self.points.len());
        } else {
            match &self.manifold {
                Manifold::Sphere { radius: r } => {
                    let chord = 2.0 * r * (0.5 * radius / r).sin();
                    let reach = chord * (1.0 + 1e-9) + 1e-15 * r;
                    self.tree.within(q, reach * reach, &mut candidates);
                }
                Manifold::FlatTorus { periods } => {
                    let reach = radius * (1.0 + 1e-9);
                    for image in torus_images(q, periods, reach) {
                        self.tree.within(&image, reach * reach, &mut candidates);
                    }
                    candidates.sort_unstable();
                    candidates.dedup();
                }
                Manifold::Euclidean { .. } => {
                    let reach = radius * (1.0 + 1e-9);
                    self.tree.within(q, reach * reach, &mut candidates);
                }
            }
        }
        let mut out: Vec<(usize, f64)> = candidates
            .into_iter()
            .filter_map(|i| {
                let d = self.manifold.distance(q, self.points[i].coords());
                (d < radius).then_some((i, d))
            })
            .collect();
        out.sort_unstable_by_key(|&(i, _)| i);
        out
    }

    /// Closest node to `u` and its geodesic distance.
    pub fn nearest(&self, u: &Point) -> Option<(usize, f64)> {
        self.nearest_impl(u.coords(), None)
    }

    pub(crate) fn nearest_other(&self, node: usize) -> Option<(usize, f64)> {
        self.nearest_impl(self.points[node].coords(), Some(node))
    }

    fn nearest_impl(&self, q: &[f64], exclude: Option<usize>) -> Option<(usize, f64)> {
        let images = match &self.manifold {
            Manifold::FlatTorus { periods } => torus_images(q, periods, f64::INFINITY),
            _ => vec![q.to_vec()],
        };
        let mut best = (usize::MAX, f64::INFINITY);
        for image in &images {
            self.tree.nearest(image, exclude, &mut best);
        }
        (best.0 != usize::MAX)
            .then(|| (best.0, self.manifold.distance(q, self.points[best.0].coords())))
    }
}

/// Shifted copies of `q` by `{-P, 0, P}` per axis whose `reach`-ball can meet
/// the fundamental cell `[0, P)`.
fn torus_images(q: &[f64], periods: &[f64], reach: f64) -> Vec<Vec<f64>> {
    let mut images = vec![q.to_vec()];
    for (j, &p) in periods.iter().enumerate() {
        let mut shifts = Vec::new();
        if q[j] < reach {
            shifts.push(p);
        }
        if q[j] + reach >= p {
            shifts.push(-p);
        }
        let mut extra = Vec::new();
        for img in &images {
            for s in &shifts {
                let mut shifted = img.clone();
                shifted[j] += s;
                extra.push(shifted);
            }
        }
        images.extend(extra);
    }
    images
}
