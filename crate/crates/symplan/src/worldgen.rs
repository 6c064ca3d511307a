//! Seeded random environments: scattered-point alpha complexes in 2D,
//! clustered convex blobs in 3D, and feasible start/goal problems.
//!
//! Everything here is a pure function of its parameters. Retries after a
//! degenerate draw use a fresh RNG substream so results stay bit-identical
//! per seed.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collision::{is_free, MovingObject, PlacedShape, World};
use crate::error::{Error, Result};
use crate::geometry::{sample_uniform, Aabb, Config, Dim, MetricWeights, Space};
use crate::quotient::{project, q_dist};
use crate::symmetry::SymmetryGroup;

/// Substream retries before giving up on a degenerate point set.
pub const DEGENERACY_RETRIES: usize = 8;

/// Free-configuration draws before a problem is declared infeasible.
pub const PROBLEM_SAMPLE_BUDGET: usize = 10_000;

/// Parameters for world generation. `points` is the number of scattered
/// points in 2D and the number of points per cluster in 3D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldGenParams {
    pub dimension: Dim,
    pub bounds: Aabb,
    pub points: usize,
    /// Circumradius threshold of kept triangles (2D), meters.
    pub alpha: f64,
    /// Number of convex blobs (3D).
    pub clusters: usize,
    /// Radius of the ball each cluster's points are drawn from (3D), meters.
    pub spread: f64,
    pub seed: u64,
}

impl WorldGenParams {
    fn validate(&self) -> Result<()> {
        match self.dimension {
            Dim::Two => {
                if self.points < 3 {
                    return Err(Error::InvalidArgument(
                        "2D generation needs at least 3 points".into(),
                    ));
                }
                if !(self.alpha > 0.0) {
                    return Err(Error::InvalidArgument("alpha must be positive".into()));
                }
            }
            Dim::Three => {
                if self.clusters < 1 {
                    return Err(Error::InvalidArgument("need at least one cluster".into()));
                }
                if self.points < 4 {
                    return Err(Error::InvalidArgument(
                        "3D clusters need at least 4 points".into(),
                    ));
                }
                if !(self.spread > 0.0) || !self.spread.is_finite() {
                    return Err(Error::InvalidArgument(
                        "cluster spread must be positive and finite".into(),
                    ));
                }
            }
        }
        for k in 0..self.dimension.ambient() {
            if !(self.bounds.extent(k) > 0.0) {
                return Err(Error::InvalidArgument(
                    "generation bounds must have positive extent".into(),
                ));
            }
        }
        Ok(())
    }
}

const INCIRCLE_EPS: f64 = 1e-12;

fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Strict in-circumcircle predicate for a counterclockwise triangle.
fn in_circumcircle(a: [f64; 2], b: [f64; 2], c: [f64; 2], p: [f64; 2]) -> bool {
    let (ax, ay) = (a[0] - p[0], a[1] - p[1]);
    let (bx, by) = (b[0] - p[0], b[1] - p[1]);
    let (cx, cy) = (c[0] - p[0], c[1] - p[1]);
    let det = (ax * ax + ay * ay) * (bx * cy - cx * by)
        - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay);
    det > INCIRCLE_EPS
}

/// Delaunay triangulation by point insertion (Bowyer-Watson), returning
/// index triples into `points` in counterclockwise order. Points exactly
/// on a circumcircle are not treated as interior, so cocircular sets get a
/// valid (non-unique) triangulation instead of a failure. Inputs whose
/// triangulation is empty (fewer than three points, all points collinear
/// or coincident) are reported as degenerate.
pub fn delaunay_triangles_2d(points: &[[f64; 2]]) -> Result<Vec<[usize; 3]>> {
    if points.len() < 3 {
        return Err(Error::DegeneratePoints { retries: 0 });
    }
    // Work in normalized coordinates for a scale-free epsilon; indices map
    // back to the originals, so output precision is unaffected.
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(Error::DegeneratePoints { retries: 0 });
    }
    let n = points.len();
    let mut pts: Vec<[f64; 2]> = points
        .iter()
        .map(|p| [(p[0] - lo[0]) / extent, (p[1] - lo[1]) / extent])
        .collect();
    // A huge, deliberately asymmetric enclosing triangle. Its vertices lie
    // far outside every circumcircle of generic interior triangles, so the
    // real Delaunay faces survive the final filter.
    pts.push([-256.0, -171.0]);
    pts.push([259.0, -167.0]);
    pts.push([1.5, 383.0]);
    let ccw = |t: [usize; 3], pts: &[[f64; 2]]| -> [usize; 3] {
        if orient2d(pts[t[0]], pts[t[1]], pts[t[2]]) < 0.0 {
            [t[0], t[2], t[1]]
        } else {
            t
        }
    };
    let mut tris: Vec<[usize; 3]> = vec![ccw([n, n + 1, n + 2], &pts)];
    for i in 0..n {
        let p = pts[i];
        let bad: Vec<usize> = (0..tris.len())
            .filter(|&t| in_circumcircle(pts[tris[t][0]], pts[tris[t][1]], pts[tris[t][2]], p))
            .collect();
        if bad.is_empty() {
            // Duplicate of an existing vertex; skip it.
            continue;
        }
        // Cavity boundary: directed edges of bad triangles whose reverse
        // is not also a bad-triangle edge.
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(bad.len() * 3);
        for &t in &bad {
            let [a, b, c] = tris[t];
            edges.extend_from_slice(&[(a, b), (b, c), (c, a)]);
        }
        let boundary: Vec<(usize, usize)> = edges
            .iter()
            .filter(|(a, b)| !edges.contains(&(*b, *a)))
            .copied()
            .collect();
        let mut keep = Vec::with_capacity(tris.len() - bad.len() + boundary.len());
        for (t, tri) in tris.iter().enumerate() {
            if !bad.contains(&t) {
                keep.push(*tri);
            }
        }
        for (a, b) in boundary {
            keep.push(ccw([a, b, i], &pts));
        }
        tris = keep;
    }
    let real: Vec<[usize; 3]> = tris
        .into_iter()
        .filter(|t| t.iter().all(|&v| v < n))
        .collect();
    if real.is_empty() {
        return Err(Error::DegeneratePoints { retries: 0 });
    }
    Ok(real)
}

/// Circumradius of a triangle; infinite for (near-)collinear vertices.
pub fn triangle_circumradius(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let la = ((b[0] - c[0]).powi(2) + (b[1] - c[1]).powi(2)).sqrt();
    let lb = ((c[0] - a[0]).powi(2) + (c[1] - a[1]).powi(2)).sqrt();
    let lc = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let area2 = orient2d(a, b, c).abs();
    if area2 <= f64::MIN_POSITIVE {
        return f64::INFINITY;
    }
    la * lb * lc / (2.0 * area2)
}

/// Scatters points in the bounds and keeps the Delaunay triangles of
/// circumradius at most `alpha` as obstacles (each triangle is one convex
/// piece). Degenerate draws retry on a fresh substream.
pub fn gen_world_2d(params: &WorldGenParams) -> Result<World> {
    if params.dimension != Dim::Two {
        return Err(Error::InvalidArgument("gen_world_2d needs dimension 2".into()));
    }
    params.validate()?;
    'retry: for retry in 0..DEGENERACY_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(retry as u64);
        let points: Vec<[f64; 2]> = (0..params.points)
            .map(|_| {
                [
                    rng.random_range(params.bounds.min[0]..params.bounds.max[0]),
                    rng.random_range(params.bounds.min[1]..params.bounds.max[1]),
                ]
            })
            .collect();
        let tris = match delaunay_triangles_2d(&points) {
            Ok(t) => t,
            Err(Error::DegeneratePoints { .. }) => continue 'retry,
            Err(e) => return Err(e),
        };
        let mut obstacles = Vec::new();
        for t in tris {
            let (a, b, c) = (points[t[0]], points[t[1]], points[t[2]]);
            let r = triangle_circumradius(a, b, c);
            if r <= params.alpha {
                match PlacedShape::from_world_vertices_2d(&[a, b, c]) {
                    Ok(shape) => obstacles.push(shape),
                    // A sliver too thin to make a polygon: degenerate draw.
                    Err(_) => continue 'retry,
                }
            }
        }
        return Ok(World {
            dim: Dim::Two,
            bounds: params.bounds,
            obstacles,
        });
    }
    Err(Error::DegeneratePoints {
        retries: DEGENERACY_RETRIES,
    })
}

fn ball_offset<R: Rng>(spread: f64, rng: &mut R) -> [f64; 3] {
    loop {
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 <= 1.0 {
            return [v[0] * spread, v[1] * spread, v[2] * spread];
        }
    }
}

/// Drops clusters of points in the bounds and takes each cluster's convex
/// hull as one obstacle, so the obstacle count equals the cluster count.
pub fn gen_world_3d(params: &WorldGenParams) -> Result<World> {
    if params.dimension != Dim::Three {
        return Err(Error::InvalidArgument("gen_world_3d needs dimension 3".into()));
    }
    params.validate()?;
    'retry: for retry in 0..DEGENERACY_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(retry as u64);
        let mut obstacles = Vec::with_capacity(params.clusters);
        'cluster: for _ in 0..params.clusters {
            for _attempt in 0..64 {
                let center = [
                    rng.random_range(params.bounds.min[0]..params.bounds.max[0]),
                    rng.random_range(params.bounds.min[1]..params.bounds.max[1]),
                    rng.random_range(params.bounds.min[2]..params.bounds.max[2]),
                ];
                let mut cluster = Vec::with_capacity(params.points);
                'point: for _ in 0..params.points {
                    for _ in 0..256 {
                        let o = ball_offset(params.spread, &mut rng);
                        let p = [center[0] + o[0], center[1] + o[1], center[2] + o[2]];
                        if params.bounds.contains(p, Dim::Three) {
                            cluster.push(p);
                            continue 'point;
                        }
                    }
                    // Center too deep in a corner; try a new center.
                    continue 'cluster;
                }
                if let Ok(shape) = PlacedShape::from_world_vertices_3d(&cluster) {
                    obstacles.push(shape);
                    continue 'cluster;
                }
            }
            continue 'retry;
        }
        return Ok(World {
            dim: Dim::Three,
            bounds: params.bounds,
            obstacles,
        });
    }
    Err(Error::DegeneratePoints {
        retries: DEGENERACY_RETRIES,
    })
}

/// Generates either dimension based on `params.dimension`.
pub fn gen_world(params: &WorldGenParams) -> Result<World> {
    match params.dimension {
        Dim::Two => gen_world_2d(params),
        Dim::Three => gen_world_3d(params),
    }
}

/// Draws a feasible start/goal pair: both configurations collision-free
/// and in distinct classes. Fails explicitly once the rejection budget is
/// spent (the free space is empty or vanishingly small).
pub fn gen_problem<R: Rng>(
    world: &World,
    objects: &[MovingObject],
    group: &Arc<SymmetryGroup>,
    weights: &MetricWeights,
    rng: &mut R,
) -> Result<(Config, Config)> {
    let space = Space {
        dim: world.dim,
        objects: objects.len(),
        bounds: world.bounds,
    };
    let draw = |rng: &mut R| -> Result<Config> {
        for _ in 0..PROBLEM_SAMPLE_BUDGET {
            let q = sample_uniform(&space, rng);
            if is_free(world, objects, &q) {
                return Ok(q);
            }
        }
        Err(Error::RejectionBudget {
            budget: PROBLEM_SAMPLE_BUDGET,
        })
    };
    let q0 = draw(rng)?;
    let c0 = project(q0.clone(), Arc::clone(group))?;
    for _ in 0..PROBLEM_SAMPLE_BUDGET {
        let q1 = draw(rng)?;
        let c1 = project(q1.clone(), Arc::clone(group))?;
        let (d, _) = q_dist(&c0, &c1, weights)?;
        if d > 0.0 {
            return Ok((q0, q1));
        }
    }
    Err(Error::RejectionBudget {
        budget: PROBLEM_SAMPLE_BUDGET,
    })
}
