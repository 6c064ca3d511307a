//! Convex collision checking for symmetric rigid bodies among static
//! convex obstacles.
//!
//! Narrow phase: separating-axis tests on hull-ordered polygons in 2D, a
//! support-function GJK distance loop on vertex sets in 3D. Touching counts
//! as collision everywhere (free space is open), and the 3D test treats any
//! separation below a 1e-9 margin as contact, which also stabilizes
//! degenerate simplices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist_config, geodesic, Aabb, Config, Dim, MetricWeights};
use crate::symmetry::SymmetryGroup;

/// Contact margin for the 3D support-function test.
pub const CONTACT_MARGIN: f64 = 1e-9;

const HULL_EPS: f64 = 1e-12;

/// A convex polytope given by its extreme vertices in a body frame whose
/// origin is the vertex centroid. 2D hulls are stored in counterclockwise
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexShape {
    vertices: Vec<[f64; 3]>,
    dim: Dim,
    circumradius: f64,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Counterclockwise 2D hull (Andrew's monotone chain); collinear points
/// dropped.
fn hull_2d(points: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let mut pts: Vec<[f64; 3]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < HULL_EPS && (a[1] - b[1]).abs() < HULL_EPS);
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: [f64; 3], a: [f64; 3], b: [f64; 3]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 3]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= HULL_EPS
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 3]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= HULL_EPS
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Vertex of `vertices` furthest along `dir` (first index on ties).
fn support(vertices: &[[f64; 3]], dir: [f64; 3]) -> [f64; 3] {
    let mut best = vertices[0];
    let mut best_d = dot(best, dir);
    for &v in &vertices[1..] {
        let d = dot(v, dir);
        if d > best_d {
            best_d = d;
            best = v;
        }
    }
    best
}

/// Closest point to the origin on the convex hull of 1-4 simplex points,
/// together with the indices of the points supporting it.
fn closest_on_simplex(simplex: &[[f64; 3]]) -> ([f64; 3], Vec<usize>) {
    match simplex.len() {
        1 => (simplex[0], vec![0]),
        2 => closest_on_segment(simplex[0], simplex[1], 0, 1),
        3 => closest_on_triangle(simplex, [0, 1, 2]),
        4 => closest_on_tetrahedron(simplex),
        _ => unreachable!("simplex holds at most 4 points"),
    }
}

fn closest_on_segment(a: [f64; 3], b: [f64; 3], ia: usize, ib: usize) -> ([f64; 3], Vec<usize>) {
    let ab = sub(b, a);
    let denom = dot(ab, ab);
    if denom < HULL_EPS {
        return (a, vec![ia]);
    }
    let t = -dot(a, ab) / denom;
    if t <= 0.0 {
        (a, vec![ia])
    } else if t >= 1.0 {
        (b, vec![ib])
    } else {
        (add(a, scale(ab, t)), vec![ia, ib])
    }
}

fn closest_on_triangle(points: &[[f64; 3]], idx: [usize; 3]) -> ([f64; 3], Vec<usize>) {
    let (a, b, c) = (points[idx[0]], points[idx[1]], points[idx[2]]);
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = scale(a, -1.0);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (a, vec![idx[0]]);
    }
    let bp = scale(b, -1.0);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (b, vec![idx[1]]);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return (add(a, scale(ab, t)), vec![idx[0], idx[1]]);
    }
    let cp = scale(c, -1.0);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (c, vec![idx[2]]);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return (add(a, scale(ac, t)), vec![idx[0], idx[2]]);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (add(b, scale(sub(c, b), t)), vec![idx[1], idx[2]]);
    }
    let denom = va + vb + vc;
    if denom.abs() < HULL_EPS {
        // Degenerate triangle: fall back to the best edge.
        let (p1, s1) = closest_on_segment(a, b, idx[0], idx[1]);
        let (p2, s2) = closest_on_segment(a, c, idx[0], idx[2]);
        return if norm(p1) <= norm(p2) { (p1, s1) } else { (p2, s2) };
    }
    let v = vb / denom;
    let w = vc / denom;
    (
        add(a, add(scale(ab, v), scale(ac, w))),
        vec![idx[0], idx[1], idx[2]],
    )
}

fn closest_on_tetrahedron(points: &[[f64; 3]]) -> ([f64; 3], Vec<usize>) {
    let faces: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let opposite = [3usize, 2, 1, 0];
    let mut best: Option<([f64; 3], Vec<usize>, f64)> = None;
    let mut inside = true;
    for (face, &opp) in faces.iter().zip(opposite.iter()) {
        let (a, b, c) = (points[face[0]], points[face[1]], points[face[2]]);
        let n = cross(sub(b, a), sub(c, a));
        let origin_side = dot(n, scale(a, -1.0));
        let opp_side = dot(n, sub(points[opp], a));
        // Origin strictly on the far side of this face from the fourth
        // vertex means the face can see the origin; a flat tetrahedron
        // (opp_side ≈ 0) is handled as all faces visible.
        let visible = if opp_side.abs() < HULL_EPS {
            true
        } else {
            origin_side * opp_side < 0.0
        };
        if visible {
            inside = false;
            let (p, s) = closest_on_triangle(points, *face);
            let d = norm(p);
            if best.as_ref().map_or(true, |(_, _, bd)| d < *bd) {
                best = Some((p, s, d));
            }
        }
    }
    if inside {
        return ([0.0; 3], vec![0, 1, 2, 3]);
    }
    let (p, s, _) = best.expect("at least one visible face");
    (p, s)
}

/// Distance between two convex vertex sets via GJK on the Minkowski
/// difference; returns 0 when they intersect or come within
/// [`CONTACT_MARGIN`].
fn gjk_distance(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    let minkowski_support = |d: [f64; 3]| sub(support(a, d), support(b, scale(d, -1.0)));
    let mut dir = sub(a[0], b[0]);
    if norm(dir) < HULL_EPS {
        dir = [1.0, 0.0, 0.0];
    }
    let mut simplex = vec![minkowski_support(dir)];
    let (mut v, _) = closest_on_simplex(&simplex);
    for _ in 0..128 {
        let vnorm = norm(v);
        if vnorm <= CONTACT_MARGIN {
            return 0.0;
        }
        let w = minkowski_support(scale(v, -1.0));
        // Lower bound on the distance along -v; no progress means v is the
        // true closest point.
        let progress = vnorm - dot(v, w) / vnorm;
        if progress <= 1e-12 * vnorm.max(1.0) {
            return if vnorm <= CONTACT_MARGIN { 0.0 } else { vnorm };
        }
        if simplex
            .iter()
            .any(|s| norm(sub(*s, w)) < HULL_EPS)
        {
            return if vnorm <= CONTACT_MARGIN { 0.0 } else { vnorm };
        }
        simplex.push(w);
        let (nv, keep) = closest_on_simplex(&simplex);
        simplex = keep.into_iter().map(|i| simplex[i]).collect();
        v = nv;
    }
    // Non-convergence is treated as contact (conservative).
    0.0
}

impl ConvexShape {
    /// Convex hull of 2D points, recentered so the hull-vertex centroid is
    /// at the origin. Needs at least 3 non-collinear points.
    pub fn hull_2d(points: &[[f64; 2]]) -> Result<ConvexShape> {
        let lifted: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], 0.0]).collect();
        let hull = hull_2d(&lifted);
        if hull.len() < 3 {
            return Err(Error::InvalidArgument(
                "2D shape needs at least 3 non-collinear points".into(),
            ));
        }
        Ok(ConvexShape::centered(hull, Dim::Two))
    }

    /// Convex hull of 3D points (interior and boundary-redundant vertices
    /// pruned), recentered on the vertex centroid. Needs at least 4
    /// non-coplanar points.
    pub fn hull_3d(points: &[[f64; 3]]) -> Result<ConvexShape> {
        let extreme = extreme_points_3d(points)?;
        Ok(ConvexShape::centered(extreme, Dim::Three))
    }

    fn centered(mut vertices: Vec<[f64; 3]>, dim: Dim) -> ConvexShape {
        let n = vertices.len() as f64;
        let mut centroid = [0.0; 3];
        for v in &vertices {
            for k in 0..3 {
                centroid[k] += v[k] / n;
            }
        }
        for v in &mut vertices {
            for k in 0..3 {
                v[k] -= centroid[k];
            }
        }
        let circumradius = vertices.iter().map(|v| norm(*v)).fold(0.0, f64::max);
        ConvexShape {
            vertices,
            dim,
            circumradius,
        }
    }

    /// Regular n-gon with circumradius `r` and a vertex on the +x axis.
    pub fn regular_polygon(n: usize, r: f64) -> Result<ConvexShape> {
        if n < 3 || r <= 0.0 {
            return Err(Error::InvalidArgument(
                "regular polygon needs n ≥ 3 and positive radius".into(),
            ));
        }
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / n as f64;
                [r * phi.cos(), r * phi.sin()]
            })
            .collect();
        ConvexShape::hull_2d(&pts)
    }

    /// Axis-aligned box, centered at the origin.
    pub fn cuboid(half_extents: [f64; 3]) -> Result<ConvexShape> {
        if half_extents.iter().any(|h| *h <= 0.0) {
            return Err(Error::InvalidArgument("box half-extents must be positive".into()));
        }
        let [hx, hy, hz] = half_extents;
        let pts: Vec<[f64; 3]> = (0..8)
            .map(|i| {
                [
                    if i & 1 == 0 { -hx } else { hx },
                    if i & 2 == 0 { -hy } else { hy },
                    if i & 4 == 0 { -hz } else { hz },
                ]
            })
            .collect();
        ConvexShape::hull_3d(&pts)
    }

    /// Axis-aligned rectangle, centered at the origin.
    pub fn rectangle(half_width: f64, half_height: f64) -> Result<ConvexShape> {
        if half_width <= 0.0 || half_height <= 0.0 {
            return Err(Error::InvalidArgument("rectangle half-extents must be positive".into()));
        }
        ConvexShape::hull_2d(&[
            [-half_width, -half_height],
            [half_width, -half_height],
            [half_width, half_height],
            [-half_width, half_height],
        ])
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// Largest vertex distance from the body origin; the natural rotation
    /// weight for the product metric.
    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }
}

/// An obstacle: a centered convex shape plus its world position.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedShape {
    pub shape: ConvexShape,
    pub position: [f64; 3],
}

impl PlacedShape {
    /// Builds from world-frame vertices (2D).
    pub fn from_world_vertices_2d(points: &[[f64; 2]]) -> Result<PlacedShape> {
        let lifted: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], 0.0]).collect();
        let hull = hull_2d(&lifted);
        if hull.len() < 3 {
            return Err(Error::InvalidArgument(
                "2D obstacle needs at least 3 non-collinear points".into(),
            ));
        }
        let shape = ConvexShape::centered(hull.clone(), Dim::Two);
        let position = centroid_of(&hull);
        Ok(PlacedShape { shape, position })
    }

    /// Builds from world-frame vertices (3D).
    pub fn from_world_vertices_3d(points: &[[f64; 3]]) -> Result<PlacedShape> {
        let extreme = extreme_points_3d(points)?;
        let position = centroid_of(&extreme);
        let shape = ConvexShape::centered(extreme, Dim::Three);
        Ok(PlacedShape { shape, position })
    }

    /// Vertices back in the world frame, hull order preserved.
    pub fn world_vertices(&self) -> Vec<[f64; 3]> {
        self.shape
            .vertices()
            .iter()
            .map(|v| add(*v, self.position))
            .collect()
    }
}

fn centroid_of(points: &[[f64; 3]]) -> [f64; 3] {
    let n = points.len() as f64;
    let mut c = [0.0; 3];
    for p in points {
        for k in 0..3 {
            c[k] += p[k] / n;
        }
    }
    c
}

/// Deduplicates, keeps exactly the extreme points (p is redundant when it
/// lies in the hull of the others), and validates non-coplanarity.
fn extreme_points_3d(points: &[[f64; 3]]) -> Result<Vec<[f64; 3]>> {
    let mut pts: Vec<[f64; 3]> = Vec::new();
    for &p in points {
        if !pts.iter().any(|q| norm(sub(*q, p)) < HULL_EPS) {
            pts.push(p);
        }
    }
    if pts.len() < 4 {
        return Err(Error::InvalidArgument(
            "3D shape needs at least 4 distinct points".into(),
        ));
    }
    let mut extreme: Vec<[f64; 3]> = Vec::new();
    for i in 0..pts.len() {
        let others: Vec<[f64; 3]> = pts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| *p)
            .collect();
        if gjk_distance(&others, &[pts[i]]) > 0.0 {
            extreme.push(pts[i]);
        }
    }
    if extreme.len() < 4 {
        return Err(Error::InvalidArgument(
            "3D shape needs at least 4 extreme points".into(),
        ));
    }
    let a = extreme[0];
    let mut volume_found = false;
    'outer: for i in 1..extreme.len() {
        for j in (i + 1)..extreme.len() {
            for k in (j + 1)..extreme.len() {
                let v = dot(
                    cross(sub(extreme[i], a), sub(extreme[j], a)),
                    sub(extreme[k], a),
                );
                if v.abs() > 1e-9 {
                    volume_found = true;
                    break 'outer;
                }
            }
        }
    }
    if !volume_found {
        return Err(Error::InvalidArgument("3D shape points are coplanar".into()));
    }
    Ok(extreme)
}

/// Static environment: translation bounds plus convex obstacles.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub dim: Dim,
    pub bounds: Aabb,
    pub obstacles: Vec<PlacedShape>,
}

impl World {
    pub fn empty(dim: Dim, bounds: Aabb) -> World {
        World {
            dim,
            bounds,
            obstacles: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let d = self.dim.ambient();
        let scene = SceneFile {
            dim: d,
            bounds: SceneBounds {
                min: self.bounds.min[..d].to_vec(),
                max: self.bounds.max[..d].to_vec(),
            },
            obstacles: self
                .obstacles
                .iter()
                .map(|o| SceneObstacle {
                    vertices: o
                        .world_vertices()
                        .iter()
                        .map(|v| v[..d].to_vec())
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&scene)?)
    }

    pub fn from_json(text: &str) -> Result<World> {
        let scene: SceneFile = serde_json::from_str(text)?;
        let dim = match scene.dim {
            2 => Dim::Two,
            3 => Dim::Three,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "scene dimension must be 2 or 3, got {other}"
                )))
            }
        };
        let take = |v: &[f64], what: &str| -> Result<[f64; 3]> {
            if v.len() != dim.ambient() {
                return Err(Error::InvalidArgument(format!(
                    "{what} must have {} components",
                    dim.ambient()
                )));
            }
            let mut out = [0.0; 3];
            out[..v.len()].copy_from_slice(v);
            Ok(out)
        };
        let bmin = take(&scene.bounds.min, "bounds.min")?;
        let bmax = take(&scene.bounds.max, "bounds.max")?;
        let bounds = match dim {
            Dim::Two => Aabb::new_2d([bmin[0], bmin[1]], [bmax[0], bmax[1]])?,
            Dim::Three => Aabb::new_3d(bmin, bmax)?,
        };
        let mut obstacles = Vec::with_capacity(scene.obstacles.len());
        for o in &scene.obstacles {
            let pts: Vec<[f64; 3]> = o
                .vertices
                .iter()
                .map(|v| take(v, "obstacle vertex"))
                .collect::<Result<_>>()?;
            obstacles.push(match dim {
                Dim::Two => {
                    let flat: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
                    PlacedShape::from_world_vertices_2d(&flat)?
                }
                Dim::Three => PlacedShape::from_world_vertices_3d(&pts)?,
            });
        }
        Ok(World {
            dim,
            bounds,
            obstacles,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SceneFile {
    dim: usize,
    bounds: SceneBounds,
    obstacles: Vec<SceneObstacle>,
}

#[derive(Serialize, Deserialize)]
struct SceneBounds {
    min: Vec<f64>,
    max: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SceneObstacle {
    vertices: Vec<Vec<f64>>,
}

/// Result of checking a shape against its claimed symmetry group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryCheck {
    pub passes: bool,
    /// Worst distance from a rotated vertex to the nearest original vertex.
    pub max_deviation: f64,
}

/// The moving body: a centered convex shape, the rotation group it is
/// invariant under, and its rotation weight in the product metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingObject {
    shape: ConvexShape,
    symmetry: SymmetryGroup,
    weight: f64,
}

/// Verifies that every group rotation maps the vertex set onto itself
/// within `tol`.
pub fn check_shape_symmetry(shape: &ConvexShape, group: &SymmetryGroup, tol: f64) -> SymmetryCheck {
    let mut max_deviation: f64 = 0.0;
    if group.objects() != 1 || group.dim() != shape.dim() {
        return SymmetryCheck {
            passes: false,
            max_deviation: f64::INFINITY,
        };
    }
    let factor = group.factor(0).expect("single factor");
    for element in factor.elements() {
        for v in shape.vertices() {
            let rv = match element {
                crate::geometry::Rotation::Planar(r) => {
                    let [x, y] = r.rotate([v[0], v[1]]);
                    [x, y, 0.0]
                }
                crate::geometry::Rotation::Spatial(r) => r.rotate(*v),
            };
            let nearest = shape
                .vertices()
                .iter()
                .map(|u| norm(sub(*u, rv)))
                .fold(f64::INFINITY, f64::min);
            max_deviation = max_deviation.max(nearest);
        }
    }
    SymmetryCheck {
        passes: max_deviation <= tol,
        max_deviation,
    }
}

impl MovingObject {
    /// Builds a moving object, enforcing that the shape is invariant under
    /// the group within 1e-9. The metric weight defaults to the shape's
    /// circumradius.
    pub fn new(shape: ConvexShape, symmetry: SymmetryGroup) -> Result<MovingObject> {
        let check = check_shape_symmetry(&shape, &symmetry, 1e-9);
        if !check.passes {
            return Err(Error::InvalidArgument(format!(
                "shape is not invariant under the group (max vertex deviation {:.3e})",
                check.max_deviation
            )));
        }
        let weight = shape.circumradius();
        Ok(MovingObject {
            shape,
            symmetry,
            weight,
        })
    }

    pub fn with_weight(mut self, weight: f64) -> Result<MovingObject> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::InvalidArgument("weight must be positive and finite".into()));
        }
        self.weight = weight;
        Ok(self)
    }

    pub fn shape(&self) -> &ConvexShape {
        &self.shape
    }

    pub fn symmetry(&self) -> &SymmetryGroup {
        &self.symmetry
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Re-runs the construction-time invariance check.
    pub fn check_symmetry(&self) -> SymmetryCheck {
        check_shape_symmetry(&self.shape, &self.symmetry, 1e-9)
    }
}

/// Builds the per-object metric weights for a body list.
pub fn object_weights(objects: &[MovingObject]) -> Result<MetricWeights> {
    MetricWeights::new(objects.iter().map(MovingObject::weight).collect())
}

/// Builds the full symmetry group for a body list (product of the
/// per-object groups).
pub fn object_group(objects: &[MovingObject]) -> Result<SymmetryGroup> {
    SymmetryGroup::product(
        objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.symmetry.clone(), i))
            .collect(),
    )
}

fn polygons_collide_2d(a: &[[f64; 3]], b: &[[f64; 3]]) -> bool {
    // Separating-axis test on edge normals of both hull-ordered polygons;
    // separation requires a strictly positive gap, so touching collides.
    let mut axes = Vec::with_capacity(a.len() + b.len());
    for poly in [a, b] {
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            axes.push([-(q[1] - p[1]), q[0] - p[0]]);
        }
    }
    for axis in axes {
        let project = |poly: &[[f64; 3]]| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for v in poly {
                let d = v[0] * axis[0] + v[1] * axis[1];
                lo = lo.min(d);
                hi = hi.max(d);
            }
            (lo, hi)
        };
        let (alo, ahi) = project(a);
        let (blo, bhi) = project(b);
        if ahi < blo || bhi < alo {
            return false;
        }
    }
    true
}

/// True when the configuration is inside the bounds and the transformed
/// bodies intersect no obstacle (touching counts as intersecting).
pub fn is_free(world: &World, objects: &[MovingObject], q: &Config) -> bool {
    assert_eq!(
        objects.len(),
        q.len(),
        "one moving object per configured pose"
    );
    for (object, pose) in objects.iter().zip(q.objects()) {
        debug_assert_eq!(object.shape.dim(), pose.dim());
        if !world.bounds.contains(pose.translation, world.dim) {
            return false;
        }
        if world.obstacles.is_empty() {
            continue;
        }
        let moved: Vec<[f64; 3]> = object
            .shape
            .vertices()
            .iter()
            .map(|v| pose.transform(*v))
            .collect();
        for obstacle in &world.obstacles {
            let obs = obstacle.world_vertices();
            let hit = match world.dim {
                Dim::Two => polygons_collide_2d(&moved, &obs),
                Dim::Three => gjk_distance(&moved, &obs) == 0.0,
            };
            if hit {
                return false;
            }
        }
    }
    true
}

/// True when every discretization point of the geodesic from `a` to `b`
/// (spacing at most `resolution` in the metric, endpoints included) is
/// free. An edge whose rotations are antipodal has no unique geodesic and
/// is treated as blocked.
pub fn edge_free(
    world: &World,
    objects: &[MovingObject],
    a: &Config,
    b: &Config,
    resolution: f64,
) -> bool {
    assert!(resolution > 0.0, "edge resolution must be positive");
    let weights = match object_weights(objects) {
        Ok(w) => w,
        Err(_) => return false,
    };
    let d = match dist_config(a, b, &weights) {
        Ok(d) => d,
        Err(_) => return false,
    };
    let steps = (d / resolution).ceil().max(1.0) as usize;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let point = match geodesic(a, b, t) {
            Ok(p) => p,
            Err(_) => return false,
        };
        if !is_free(world, objects, &point) {
            return false;
        }
    }
    true
}
