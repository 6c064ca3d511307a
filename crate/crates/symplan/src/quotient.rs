//! The quotient of a configuration space by a finite symmetry group:
//! equivalence classes, the induced metric, samplers, a steering
//! primitive, and roadmaps whose paths lift back to the original space.
//!
//! The induced distance min_g d(x, g·y) factors per object because the
//! group acts object-wise and the product metric is separable, so its cost
//! is the sum of the factor orders rather than their product. Ties in the
//! minimizing element are broken toward the smallest element index, least
//! significant factor first, which for a separable objective is exactly
//! the smallest composite index.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::collision::{edge_free, MovingObject, World};
use crate::error::{Error, Result};
use crate::geometry::{
    dist_config, sample_ball, sample_uniform, Config, MetricWeights, Space,
};
use crate::symmetry::SymmetryGroup;

/// Tolerance for recognizing that a configuration lies on a group orbit.
pub const ORBIT_TOL: f64 = 1e-9;

/// A point of the quotient space: an equivalence class, carried by one of
/// its representatives.
#[derive(Debug, Clone)]
pub struct ClassPoint {
    representative: Config,
    group: Arc<SymmetryGroup>,
}

impl ClassPoint {
    pub fn representative(&self) -> &Config {
        &self.representative
    }

    pub fn group(&self) -> &Arc<SymmetryGroup> {
        &self.group
    }

    /// The canonical representative of this class: the orbit member whose
    /// sign-folded rotation coordinates are lexicographically smallest.
    pub fn canonical(&self) -> Result<Config> {
        canonicalize(self)
    }
}

/// Wraps a configuration as its equivalence class. The representative is
/// the configuration itself.
pub fn project(q: Config, group: Arc<SymmetryGroup>) -> Result<ClassPoint> {
    group.matches_config(&q)?;
    Ok(ClassPoint {
        representative: q,
        group,
    })
}

fn same_group(a: &ClassPoint, b: &ClassPoint) -> Result<()> {
    if Arc::ptr_eq(&a.group, &b.group) || a.group == b.group {
        Ok(())
    } else {
        Err(Error::GroupMismatch(
            "class points live in different quotients".into(),
        ))
    }
}

/// Distance between two classes together with the minimizing group
/// element: min over g of dist(a, g·b), computed factor by factor.
///
/// The minimum is taken per object (the translation term does not depend
/// on g, and rotations act object-wise), so the cost is linear in the
/// number of objects. For the trivial group this reproduces
/// [`dist_config`] bit for bit.
pub fn q_dist(a: &ClassPoint, b: &ClassPoint, w: &MetricWeights) -> Result<(f64, usize)> {
    same_group(a, b)?;
    let group = &a.group;
    group.matches_config(&a.representative)?;
    a.representative.check_same_shape(&b.representative)?;
    if w.len() != a.representative.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} weights for {} objects",
            w.len(),
            a.representative.len()
        )));
    }
    let mut sum = 0.0;
    let mut parts = vec![0usize; group.objects()];
    for (i, (pa, pb)) in a
        .representative
        .objects()
        .iter()
        .zip(b.representative.objects())
        .enumerate()
    {
        // Accumulation order mirrors the plain product metric exactly, so
        // the trivial group reproduces it bit for bit.
        for k in 0..3 {
            let d = pa.translation[k] - pb.translation[k];
            sum += d * d;
        }
        let factor = group.factor(i)?;
        let mut best_cost = f64::INFINITY;
        let mut best_k = 0usize;
        for (k, g) in factor.elements().iter().enumerate() {
            // Element 0 is the identity; skipping the compose keeps the
            // rotation bits untouched on that branch.
            let rb = if k == 0 {
                pb.rotation
            } else {
                pb.rotation.compose(g)?
            };
            let cost = w.weights()[i] * pa.rotation.distance(&rb)?;
            if cost < best_cost {
                best_cost = cost;
                best_k = k;
            }
        }
        sum += best_cost * best_cost;
        parts[i] = best_k;
    }
    Ok((sum.sqrt(), group.composite_index(&parts)?))
}

/// Uniform sample of the quotient: a uniform configuration, projected.
pub fn sample_global_q<R: rand::Rng>(
    space: &Space,
    group: Arc<SymmetryGroup>,
    rng: &mut R,
) -> Result<ClassPoint> {
    if group.objects() != space.objects || group.dim() != space.dim {
        return Err(Error::GroupMismatch(format!(
            "group acts on {} objects, space has {}",
            group.objects(),
            space.objects
        )));
    }
    let q = sample_uniform(space, rng);
    project(q, group)
}

/// Sample of the quotient ball of radius `r` around `center`: a metric
/// ball sample around the representative, projected. The quotient
/// distance never exceeds the base distance, so the result stays within
/// `r` of the center class.
pub fn sample_local_q<R: rand::Rng>(
    center: &ClassPoint,
    r: f64,
    w: &MetricWeights,
    rng: &mut R,
) -> Result<ClassPoint> {
    let q = sample_ball(&center.representative, r, w, rng)?;
    project(q, Arc::clone(&center.group))
}

/// Steering primitive: connects `a` to the representative of `b` rotated
/// by the minimizing group element, checking the geodesic for collisions
/// at the given resolution. Returns the reached endpoint and the edge
/// length, or `None` when the segment is blocked (a normal outcome, not
/// an error).
pub fn local_plan(
    a: &ClassPoint,
    b: &ClassPoint,
    world: &World,
    objects: &[MovingObject],
    w: &MetricWeights,
    resolution: f64,
) -> Result<Option<(Config, f64)>> {
    let (length, g) = q_dist(a, b, w)?;
    let q_e = a.group.act(g, &b.representative)?;
    if edge_free(world, objects, &a.representative, &q_e, resolution) {
        Ok(Some((q_e, length)))
    } else {
        Ok(None)
    }
}

/// The canonical representative of a class: the orbit member whose
/// concatenated sign-folded rotation coordinates are lexicographically
/// smallest (translations are shared across the orbit). Idempotent, and
/// stable across representatives except when an orbit member sits within
/// roughly 1e-9 of a fold boundary.
pub fn canonicalize(class: &ClassPoint) -> Result<Config> {
    let orbit = class.group.orbit(&class.representative)?;
    let key = |q: &Config| -> Vec<f64> {
        q.objects()
            .iter()
            .flat_map(|p| p.rotation.folded_coords())
            .collect()
    };
    let mut best = 0usize;
    let mut best_key = key(&orbit[0]);
    for (i, member) in orbit.iter().enumerate().skip(1) {
        let k = key(member);
        if lex_less(&k, &best_key) {
            best = i;
            best_key = k;
        }
    }
    Ok(orbit[best].clone())
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// A directed roadmap edge. `q_e` is the endpoint actually reached in the
/// original space: a representative of the destination class, rotated so
/// the geodesic from the source representative realizes the quotient
/// distance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoadmapEdge {
    pub src: usize,
    pub dst: usize,
    pub q_e: Config,
    pub length: f64,
}

#[derive(Serialize, Deserialize)]
struct RoadmapVertexFile {
    id: usize,
    q: Config,
}

#[derive(Serialize, Deserialize)]
struct RoadmapFile {
    vertices: Vec<RoadmapVertexFile>,
    edges: Vec<RoadmapEdge>,
}

/// A graph over quotient classes. Vertices store class representatives;
/// edges are directed and store the realized endpoint `q_e` plus its
/// length, which must equal both the base distance from the source
/// representative to `q_e` and the quotient distance between the classes
/// (within 1e-9).
#[derive(Debug, Clone)]
pub struct Roadmap {
    group: Arc<SymmetryGroup>,
    weights: MetricWeights,
    vertices: Vec<Config>,
    edges: Vec<RoadmapEdge>,
    adjacency: Vec<Vec<usize>>,
}

impl Roadmap {
    pub fn new(group: Arc<SymmetryGroup>, weights: MetricWeights) -> Roadmap {
        Roadmap {
            group,
            weights,
            vertices: Vec::new(),
            edges: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    pub fn group(&self) -> &Arc<SymmetryGroup> {
        &self.group
    }

    pub fn weights(&self) -> &MetricWeights {
        &self.weights
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, id: usize) -> Result<&Config> {
        self.vertices
            .get(id)
            .ok_or_else(|| Error::InvalidArgument(format!("no vertex {id}")))
    }

    /// The class carried by a vertex.
    pub fn class(&self, id: usize) -> Result<ClassPoint> {
        Ok(ClassPoint {
            representative: self.vertex(id)?.clone(),
            group: Arc::clone(&self.group),
        })
    }

    pub fn edges(&self) -> &[RoadmapEdge] {
        &self.edges
    }

    /// Outgoing edge ids of a vertex.
    pub fn outgoing(&self, id: usize) -> &[usize] {
        self.adjacency.get(id).map_or(&[], Vec::as_slice)
    }

    pub fn add_vertex(&mut self, class: &ClassPoint) -> Result<usize> {
        if !(Arc::ptr_eq(&self.group, &class.group) || *self.group == *class.group) {
            return Err(Error::GroupMismatch(
                "vertex belongs to a different quotient".into(),
            ));
        }
        self.group.matches_config(&class.representative)?;
        self.vertices.push(class.representative.clone());
        self.adjacency.push(Vec::new());
        Ok(self.vertices.len() - 1)
    }

    /// Inserts a directed edge after checking the datatype invariants:
    /// `q_e` lies on the destination's orbit and `length` matches both the
    /// base distance from the source and the quotient distance.
    pub fn add_edge(&mut self, edge: RoadmapEdge) -> Result<usize> {
        let src = self.vertex(edge.src)?.clone();
        let dst = self.vertex(edge.dst)?.clone();
        if self.group.identify(&dst, &edge.q_e, ORBIT_TOL)?.is_none() {
            return Err(Error::InvalidArgument(format!(
                "edge endpoint is not on the orbit of vertex {}",
                edge.dst
            )));
        }
        let base = dist_config(&src, &edge.q_e, &self.weights)?;
        if (base - edge.length).abs() > ORBIT_TOL {
            return Err(Error::InvalidArgument(format!(
                "edge length {} differs from realized distance {}",
                edge.length, base
            )));
        }
        let (qd, _) = q_dist(&self.class(edge.src)?, &self.class(edge.dst)?, &self.weights)?;
        if (qd - edge.length).abs() > ORBIT_TOL {
            return Err(Error::InvalidArgument(format!(
                "edge length {} differs from quotient distance {}",
                edge.length, qd
            )));
        }
        self.adjacency[edge.src].push(self.edges.len());
        self.edges.push(edge);
        Ok(self.edges.len() - 1)
    }

    /// First edge from `src` to `dst`, if any.
    pub fn find_edge(&self, src: usize, dst: usize) -> Option<&RoadmapEdge> {
        self.outgoing(src)
            .iter()
            .map(|&e| &self.edges[e])
            .find(|e| e.dst == dst)
    }

    /// Re-checks every edge invariant.
    pub fn validate(&self) -> Result<()> {
        for edge in &self.edges {
            let dst = self.vertex(edge.dst)?;
            if self.group.identify(dst, &edge.q_e, ORBIT_TOL)?.is_none() {
                return Err(Error::InvalidArgument(format!(
                    "edge {} -> {}: endpoint off the destination orbit",
                    edge.src, edge.dst
                )));
            }
            let base = dist_config(self.vertex(edge.src)?, &edge.q_e, &self.weights)?;
            if (base - edge.length).abs() > ORBIT_TOL {
                return Err(Error::InvalidArgument(format!(
                    "edge {} -> {}: stored length drifted",
                    edge.src, edge.dst
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = RoadmapFile {
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, q)| RoadmapVertexFile { id, q: q.clone() })
                .collect(),
            edges: self.edges.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Loads a roadmap for a known quotient, re-validating every edge.
    pub fn from_json(
        text: &str,
        group: Arc<SymmetryGroup>,
        weights: MetricWeights,
    ) -> Result<Roadmap> {
        let file: RoadmapFile = serde_json::from_str(text)?;
        let mut map = Roadmap::new(group, weights);
        for (i, v) in file.vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::InvalidArgument(format!(
                    "vertex ids must be dense and ordered, found {} at {}",
                    v.id, i
                )));
            }
            let class = project(v.q.clone(), Arc::clone(&map.group))?;
            map.add_vertex(&class)?;
        }
        for e in file.edges {
            map.add_edge(e)?;
        }
        Ok(map)
    }
}

/// A path lifted back to the original configuration space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftedPath {
    pub waypoints: Vec<Config>,
    pub total_length: f64,
}

impl LiftedPath {
    /// Sum of waypoint-to-waypoint distances; equal to `total_length`
    /// within 1e-9 for any lift produced by [`lift_path`].
    pub fn measured_length(&self, w: &MetricWeights) -> Result<f64> {
        let mut sum = 0.0;
        for pair in self.waypoints.windows(2) {
            sum += dist_config(&pair[0], &pair[1], w)?;
        }
        Ok(sum)
    }
}

/// Lifts a vertex path of the roadmap to a continuous path upstairs.
///
/// Each edge stores its realized endpoint g_i·q_{v_{i+1}}; composing the
/// g_i along the way keeps consecutive waypoints joined by the same
/// geodesics the edges were checked with, so the lift preserves length
/// exactly (group elements act by isometries).
pub fn lift_path(roadmap: &Roadmap, path: &[usize]) -> Result<LiftedPath> {
    if path.is_empty() {
        return Err(Error::InvalidArgument("empty roadmap path".into()));
    }
    let group = roadmap.group();
    let mut acc = group.identity_index();
    let mut waypoints = Vec::with_capacity(path.len());
    waypoints.push(roadmap.vertex(path[0])?.clone());
    let mut total_length = 0.0;
    for pair in path.windows(2) {
        let (src, dst) = (pair[0], pair[1]);
        let edge = roadmap
            .find_edge(src, dst)
            .ok_or(Error::MissingEdge { from: src, to: dst })?;
        let g = group
            .identify(roadmap.vertex(dst)?, &edge.q_e, ORBIT_TOL)?
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "edge {src} -> {dst}: endpoint off the destination orbit"
                ))
            })?;
        acc = group.compose(acc, g)?;
        waypoints.push(group.act(acc, roadmap.vertex(dst)?)?);
        total_length += edge.length;
    }
    Ok(LiftedPath {
        waypoints,
        total_length,
    })
}
