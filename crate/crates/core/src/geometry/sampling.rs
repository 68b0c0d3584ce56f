use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::chart::tangent_frame;
use super::{Domain, Manifold, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleStrategy {
    /// Independent area/volume-uniform draws from a seeded ChaCha8 stream.
    UniformRandom { seed: u64 },
    /// Deterministic low-discrepancy sets: Fibonacci spirals on spherical
    /// caps, sunflower spirals on discs, midpoints on intervals and Halton
    /// sequences in three or more dimensions.
    QuasiUniform,
}

/// The golden angle, `π (3 - √5)`.
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Draws `n` points inside the patch of `domain`.
pub fn sample_patch(domain: &Domain, n: usize, strategy: SampleStrategy) -> Vec<Point> {
    let patch = domain.patch();
    match domain.manifold() {
        Manifold::Sphere { radius } => {
            let c = patch.center().coords();
            let normal = [c[0] / radius, c[1] / radius, c[2] / radius];
            let (e1, e2) = tangent_frame(normal);
            let cos_rho = (patch.radius() / radius).cos();
            let to_ambient = |z: f64, phi: f64| {
                let r = (1.0 - z * z).max(0.0).sqrt();
                let (x, y) = (r * phi.cos(), r * phi.sin());
                let mut p = [0.0; 3];
                for k in 0..3 {
                    p[k] = radius * (x * e1[k] + y * e2[k] + z * normal[k]);
                }
                Point::from(p)
            };
            match strategy {
                SampleStrategy::QuasiUniform => (0..n)
                    .map(|i| {
                        let z = 1.0 - (1.0 - cos_rho) * (i as f64 + 0.5) / n as f64;
                        to_ambient(z, i as f64 * GOLDEN_ANGLE)
                    })
                    .collect(),
                SampleStrategy::UniformRandom { seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..n)
                        .map(|_| {
                            let z = 1.0 - (1.0 - cos_rho) * rng.random::<f64>();
                            to_ambient(z, 2.0 * PI * rng.random::<f64>())
                        })
                        .collect()
                }
            }
        }
        Manifold::FlatTorus { periods } => {
            let center = patch.center().coords();
            sample_ball(periods.len(), patch.radius(), n, strategy)
                .into_iter()
                .map(|offset| {
                    Point::new(
                        offset
                            .iter()
                            .zip(center)
                            .zip(periods)
                            .map(|((d, c), p)| {
                                let u = (c + d).rem_euclid(*p);
                                if u >= *p {
                                    0.0
                                } else {
                                    u
                                }
                            })
                            .collect(),
                    )
                })
                .collect()
        }
        Manifold::Euclidean { dim } => {
            let center = patch.center().coords();
            sample_ball(*dim, patch.radius(), n, strategy)
                .into_iter()
                .map(|offset| Point::new(offset.iter().zip(center).map(|(d, c)| c + d).collect()))
                .collect()
        }
    }
}

/// Offsets inside the closed ball of radius `r` about the origin of `ℝ^dim`.
fn sample_ball(dim: usize, r: f64, n: usize, strategy: SampleStrategy) -> Vec<Vec<f64>> {
    match strategy {
        SampleStrategy::QuasiUniform => match dim {
            1 => (0..n)
                .map(|i| vec![r * (-1.0 + (2 * i + 1) as f64 / n as f64)])
                .collect(),
            2 => (0..n)
                .map(|i| {
                    let rho = r * ((i as f64 + 0.5) / n as f64).sqrt();
                    let phi = i as f64 * GOLDEN_ANGLE;
                    vec![rho * phi.cos(), rho * phi.sin()]
                })
                .collect(),
            _ => {
                let mut out = Vec::with_capacity(n);
                let mut k = 1u64;
                while out.len() < n {
                    let p: Vec<f64> = (0..dim)
                        .map(|j| r * (2.0 * radical_inverse(k, PRIMES[j % PRIMES.len()]) - 1.0))
                        .collect();
                    k += 1;
                    if p.iter().map(|x| x * x).sum::<f64>() <= r * r {
                        out.push(p);
                    }
                }
                out
            }
        },
        SampleStrategy::UniformRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                let p: Vec<f64> = (0..dim)
                    .map(|_| r * (2.0 * rng.random::<f64>() - 1.0))
                    .collect();
                if p.iter().map(|x| x * x).sum::<f64>() <= r * r {
                    out.push(p);
                }
            }
            out
        }
    }
}

const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while k > 0 {
        out += f * (k % base) as f64;
        k /= base;
        f *= inv;
    }
    out
}
