//! Sampling-based planners over a quotient space. One code path serves
//! both arms of every comparison: the symmetry-unaware baseline is the
//! same planner instantiated with the trivial group, which keeps seeds,
//! sample sequences, and collision checks identical across arms.
//!
//! Nearest-neighbor queries are linear scans under the quotient metric;
//! the metric axioms hold, so a metric tree could replace them behind the
//! same interface if the vertex counts ever warrant it.

use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collision::{edge_free, is_free, object_group, object_weights, MovingObject, World};
use crate::error::{Error, Result};
use crate::geometry::{dist_config, geodesic, Config, MetricWeights, Space};
use crate::quotient::{
    lift_path, local_plan, project, q_dist, sample_global_q, ClassPoint, LiftedPath, Roadmap,
    RoadmapEdge,
};
use crate::symmetry::SymmetryGroup;

/// Steers shorter than this are treated as duplicate samples.
const DUPLICATE_EPS: f64 = 1e-12;

/// Everything a planner needs about the problem domain: the static world,
/// the moving bodies, the symmetry group defining the quotient, and the
/// metric weights (per-object circumradii).
#[derive(Debug, Clone)]
pub struct PlanningSpace {
    world: World,
    objects: Vec<MovingObject>,
    group: Arc<SymmetryGroup>,
    weights: MetricWeights,
}

impl PlanningSpace {
    /// Builds a planning space with an explicit group. The group must act
    /// on exactly the given objects.
    pub fn new(
        world: World,
        objects: Vec<MovingObject>,
        group: SymmetryGroup,
    ) -> Result<PlanningSpace> {
        if objects.is_empty() {
            return Err(Error::InvalidArgument("no moving objects".into()));
        }
        if group.objects() != objects.len() || group.dim() != world.dim {
            return Err(Error::GroupMismatch(format!(
                "group acts on {} objects, problem has {}",
                group.objects(),
                objects.len()
            )));
        }
        for o in &objects {
            if o.shape().dim() != world.dim {
                return Err(Error::ShapeMismatch(
                    "object dimension differs from world dimension".into(),
                ));
            }
        }
        let weights = object_weights(&objects)?;
        Ok(PlanningSpace {
            world,
            objects,
            group: Arc::new(group),
            weights,
        })
    }

    /// Symmetry-aware space: the quotient by the product of the objects'
    /// own symmetry groups.
    pub fn aware(world: World, objects: Vec<MovingObject>) -> Result<PlanningSpace> {
        let group = object_group(&objects)?;
        PlanningSpace::new(world, objects, group)
    }

    /// Symmetry-unaware baseline: the same space under the trivial group.
    pub fn unaware(world: World, objects: Vec<MovingObject>) -> Result<PlanningSpace> {
        let group = SymmetryGroup::trivial(world.dim, objects.len())?;
        PlanningSpace::new(world, objects, group)
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn objects(&self) -> &[MovingObject] {
        &self.objects
    }

    pub fn group(&self) -> &Arc<SymmetryGroup> {
        &self.group
    }

    pub fn weights(&self) -> &MetricWeights {
        &self.weights
    }

    /// The sampled base space (translations bounded by the world box).
    pub fn space(&self) -> Space {
        Space {
            dim: self.world.dim,
            objects: self.objects.len(),
            bounds: self.world.bounds,
        }
    }

    /// Dimension of the configuration manifold (3 per planar object, 6
    /// per spatial one); radius formulas depend on it.
    pub fn config_dimension(&self) -> usize {
        self.space().config_dimension()
    }

    pub fn project(&self, q: Config) -> Result<ClassPoint> {
        project(q, Arc::clone(&self.group))
    }

    pub fn is_free(&self, q: &Config) -> bool {
        is_free(&self.world, &self.objects, q)
    }

    pub fn dist(&self, a: &ClassPoint, b: &ClassPoint) -> Result<(f64, usize)> {
        q_dist(a, b, &self.weights)
    }

    pub fn local_plan(
        &self,
        a: &ClassPoint,
        b: &ClassPoint,
        resolution: f64,
    ) -> Result<Option<(Config, f64)>> {
        local_plan(a, b, &self.world, &self.objects, &self.weights, resolution)
    }
}

/// Tuning knobs shared by the planner family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub max_samples: usize,
    /// RRT extension step, in metric length.
    pub eta: f64,
    /// Radius scale for RRT* (`r(n) = min(eta, rho_rrt (log n / n)^{1/(d+1)})`).
    pub rho_rrt: f64,
    /// Radius scale for radius-PRM* (`r(n) = rho_prm (log n / n)^{1/d}`).
    pub rho_prm: f64,
    /// KNN-PRM* constant in `k(n) = ceil(knn_k_const · log n)`.
    pub knn_k_const: f64,
    /// Collision-check spacing along edges, in metric length.
    pub edge_resolution: f64,
    pub seed: u64,
}

/// The dimension-dependent KNN-PRM* constant `e · (1 + 1/d)`.
pub fn default_knn_const(config_dim: usize) -> f64 {
    std::f64::consts::E * (1.0 + 1.0 / config_dim as f64)
}

impl PlannerParams {
    /// Reasonable defaults for a configuration manifold of dimension `d`.
    pub fn defaults(config_dim: usize) -> PlannerParams {
        PlannerParams {
            max_samples: 1000,
            eta: 0.5,
            rho_rrt: 1.5,
            rho_prm: 1.5,
            knn_k_const: default_knn_const(config_dim),
            edge_resolution: 0.01,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_samples < 1 {
            return Err(Error::InvalidArgument("max_samples must be at least 1".into()));
        }
        for (name, v) in [
            ("eta", self.eta),
            ("rho_rrt", self.rho_rrt),
            ("rho_prm", self.rho_prm),
            ("knn_k_const", self.knn_k_const),
            ("edge_resolution", self.edge_resolution),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanStatus {
    Success,
    Exhausted,
    InfeasibleEndpoints,
}

/// Seconds spent in each planner phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub sampling: f64,
    pub nearest: f64,
    pub steering: f64,
    pub search: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanResult {
    pub status: PlanStatus,
    pub path: Option<LiftedPath>,
    pub length: Option<f64>,
    pub samples: usize,
    /// End-to-end seconds (for roadmap planners: shared construction plus
    /// this query).
    pub wall_time: f64,
    pub phases: PhaseTimings,
}

impl PlanResult {
    fn infeasible(samples: usize, started: Instant, phases: PhaseTimings) -> PlanResult {
        PlanResult {
            status: PlanStatus::InfeasibleEndpoints,
            path: None,
            length: None,
            samples,
            wall_time: started.elapsed().as_secs_f64(),
            phases,
        }
    }

    fn exhausted(samples: usize, started: Instant, phases: PhaseTimings) -> PlanResult {
        PlanResult {
            status: PlanStatus::Exhausted,
            path: None,
            length: None,
            samples,
            wall_time: started.elapsed().as_secs_f64(),
            phases,
        }
    }

    fn success(
        path: LiftedPath,
        samples: usize,
        started: Instant,
        phases: PhaseTimings,
    ) -> PlanResult {
        PlanResult {
            status: PlanStatus::Success,
            length: Some(path.total_length),
            path: Some(path),
            samples,
            wall_time: started.elapsed().as_secs_f64(),
            phases,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Search tree: class points plus parent links and path costs.
struct Tree {
    nodes: Vec<ClassPoint>,
    parent: Vec<usize>,
    cost: Vec<f64>,
    children: Vec<Vec<usize>>,
}

impl Tree {
    fn new(root: ClassPoint) -> Tree {
        Tree {
            nodes: vec![root],
            parent: vec![usize::MAX],
            cost: vec![0.0],
            children: vec![Vec::new()],
        }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    fn add(&mut self, parent: usize, class: ClassPoint, edge_len: f64) -> usize {
        let id = self.nodes.len();
        self.nodes.push(class);
        self.parent.push(parent);
        self.cost.push(self.cost[parent] + edge_len);
        self.children.push(Vec::new());
        self.children[parent].push(id);
        id
    }

    /// Nearest node to `target` under the quotient metric (first index on
    /// ties).
    fn nearest(&self, ps: &PlanningSpace, target: &ClassPoint) -> Result<(usize, f64)> {
        let mut best = (0usize, f64::INFINITY);
        for (i, node) in self.nodes.iter().enumerate() {
            let (d, _) = ps.dist(node, target)?;
            if d < best.1 {
                best = (i, d);
            }
        }
        Ok(best)
    }

    fn reparent(&mut self, node: usize, new_parent: usize, edge_len: f64) {
        let old = self.parent[node];
        let pos = self.children[old]
            .iter()
            .position(|&c| c == node)
            .expect("node registered under its parent");
        self.children[old].swap_remove(pos);
        self.parent[node] = new_parent;
        self.children[new_parent].push(node);
        let delta = self.cost[new_parent] + edge_len - self.cost[node];
        // Propagate the improvement through the subtree.
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            self.cost[v] += delta;
            stack.extend_from_slice(&self.children[v]);
        }
    }

    /// Root-to-node index chain.
    fn chain(&self, node: usize) -> Vec<usize> {
        let mut out = vec![node];
        let mut v = node;
        while self.parent[v] != usize::MAX {
            v = self.parent[v];
            out.push(v);
        }
        out.reverse();
        out
    }
}

/// One bounded extension step toward `to`: at most `eta` along the
/// quotient geodesic, collision-checked. Returns the new class and the
/// realized edge length, or `None` if blocked or degenerate. `reached` is
/// true when the step arrives at `to`'s class itself.
struct Steered {
    class: ClassPoint,
    length: f64,
    reached: bool,
}

fn steer(
    ps: &PlanningSpace,
    from: &ClassPoint,
    to: &ClassPoint,
    eta: f64,
    resolution: f64,
) -> Result<Option<Steered>> {
    let (d, g) = ps.dist(from, to)?;
    if d <= DUPLICATE_EPS {
        return Ok(None);
    }
    let target = ps.group().act(g, to.representative())?;
    let reached = d <= eta;
    let endpoint = if reached {
        target
    } else {
        match geodesic(from.representative(), &target, eta / d) {
            Ok(q) => q,
            // Antipodal rotations have no unique geodesic; treat the
            // extension as blocked.
            Err(Error::AntipodalGeodesic { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    };
    if !edge_free(
        ps.world(),
        ps.objects(),
        from.representative(),
        &endpoint,
        resolution,
    ) {
        return Ok(None);
    }
    let length = dist_config(from.representative(), &endpoint, ps.weights())?;
    Ok(Some(Steered {
        class: ps.project(endpoint)?,
        length,
        reached,
    }))
}

/// Rebuilds the final path as a validated roadmap and lifts it. Distances
/// and collision checks are recomputed from scratch here, so a successful
/// assembly certifies the invariants the search relied on.
fn assemble(
    ps: &PlanningSpace,
    resolution: f64,
    classes: &[ClassPoint],
) -> Result<LiftedPath> {
    let mut map = Roadmap::new(Arc::clone(ps.group()), ps.weights().clone());
    let mut ids = Vec::with_capacity(classes.len());
    for c in classes {
        ids.push(map.add_vertex(c)?);
    }
    for i in 0..classes.len() - 1 {
        let (q_e, length) = ps
            .local_plan(&classes[i], &classes[i + 1], resolution)?
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "path segment {i} failed revalidation during assembly"
                ))
            })?;
        map.add_edge(RoadmapEdge {
            src: ids[i],
            dst: ids[i + 1],
            q_e,
            length,
        })?;
    }
    lift_path(&map, &ids)
}

struct Endpoints {
    start: ClassPoint,
    goal: ClassPoint,
}

fn check_endpoints(
    ps: &PlanningSpace,
    problem: &(Config, Config),
) -> Result<std::result::Result<Endpoints, ()>> {
    if !ps.is_free(&problem.0) || !ps.is_free(&problem.1) {
        return Ok(Err(()));
    }
    Ok(Ok(Endpoints {
        start: ps.project(problem.0.clone())?,
        goal: ps.project(problem.1.clone())?,
    }))
}

/// RRT in the quotient: grow a tree from the start by bounded extensions
/// toward uniform samples; attempt a goal connection whenever a new
/// vertex lands within `eta` of the goal class. No goal biasing.
pub fn rrt(
    problem: &(Config, Config),
    ps: &PlanningSpace,
    params: &PlannerParams,
) -> Result<PlanResult> {
    params.validate()?;
    let started = Instant::now();
    let mut phases = PhaseTimings::default();
    let ends = match check_endpoints(ps, problem)? {
        Ok(e) => e,
        Err(()) => return Ok(PlanResult::infeasible(0, started, phases)),
    };
    let mut tree = Tree::new(ends.start.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let space = ps.space();

    // The start itself may already see the goal.
    if let Some(result) = try_goal(ps, params, &tree, 0, &ends.goal, &mut phases)? {
        let lifted = assemble(ps, params.edge_resolution, &result)?;
        return Ok(PlanResult::success(lifted, 0, started, phases));
    }

    let mut samples = 0usize;
    while samples < params.max_samples {
        let t0 = Instant::now();
        let sample = sample_global_q(&space, Arc::clone(ps.group()), &mut rng)?;
        samples += 1;
        phases.sampling += t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let (near, _) = tree.nearest(ps, &sample)?;
        phases.nearest += t1.elapsed().as_secs_f64();

        let t2 = Instant::now();
        let stepped = steer(ps, &tree.nodes[near], &sample, params.eta, params.edge_resolution)?;
        phases.steering += t2.elapsed().as_secs_f64();
        let Some(step) = stepped else { continue };
        let new = tree.add(near, step.class, step.length);

        if let Some(result) = try_goal(ps, params, &tree, new, &ends.goal, &mut phases)? {
            let lifted = assemble(ps, params.edge_resolution, &result)?;
            return Ok(PlanResult::success(lifted, samples, started, phases));
        }
    }
    Ok(PlanResult::exhausted(samples, started, phases))
}

/// Goal connection for tree planners: if `node` is within `eta` of the
/// goal class and the connecting geodesic is free, return the full class
/// chain root → node → goal.
fn try_goal(
    ps: &PlanningSpace,
    params: &PlannerParams,
    tree: &Tree,
    node: usize,
    goal: &ClassPoint,
    phases: &mut PhaseTimings,
) -> Result<Option<Vec<ClassPoint>>> {
    let (d, _) = ps.dist(&tree.nodes[node], goal)?;
    if d > params.eta {
        return Ok(None);
    }
    let t = Instant::now();
    let connected = ps
        .local_plan(&tree.nodes[node], goal, params.edge_resolution)?
        .is_some();
    phases.steering += t.elapsed().as_secs_f64();
    if !connected {
        return Ok(None);
    }
    let mut chain: Vec<ClassPoint> = tree
        .chain(node)
        .into_iter()
        .map(|i| tree.nodes[i].clone())
        .collect();
    chain.push(goal.clone());
    Ok(Some(chain))
}

/// Bidirectional RRT: trees rooted at the start and goal classes take
/// turns; after each bounded extension the other tree greedily chains
/// `eta`-steps toward the new vertex until it connects or is blocked.
pub fn birrt(
    problem: &(Config, Config),
    ps: &PlanningSpace,
    params: &PlannerParams,
) -> Result<PlanResult> {
    params.validate()?;
    let started = Instant::now();
    let mut phases = PhaseTimings::default();
    let ends = match check_endpoints(ps, problem)? {
        Ok(e) => e,
        Err(()) => return Ok(PlanResult::infeasible(0, started, phases)),
    };
    let mut trees = [Tree::new(ends.start.clone()), Tree::new(ends.goal.clone())];
    // trees[active] extends toward the sample; the other connects.
    let mut active = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let space = ps.space();

    // Immediate start-goal visibility.
    {
        let (d, _) = ps.dist(&ends.start, &ends.goal)?;
        if d <= params.eta
            && ps
                .local_plan(&ends.start, &ends.goal, params.edge_resolution)?
                .is_some()
        {
            let lifted = assemble(
                ps,
                params.edge_resolution,
                &[ends.start.clone(), ends.goal.clone()],
            )?;
            return Ok(PlanResult::success(lifted, 0, started, phases));
        }
    }

    let mut samples = 0usize;
    while samples < params.max_samples {
        let t0 = Instant::now();
        let sample = sample_global_q(&space, Arc::clone(ps.group()), &mut rng)?;
        samples += 1;
        phases.sampling += t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let (near, _) = trees[active].nearest(ps, &sample)?;
        phases.nearest += t1.elapsed().as_secs_f64();

        let t2 = Instant::now();
        let stepped = steer(
            ps,
            &trees[active].nodes[near],
            &sample,
            params.eta,
            params.edge_resolution,
        )?;
        phases.steering += t2.elapsed().as_secs_f64();

        if let Some(step) = stepped {
            let target = step.class.clone();
            let new_active = trees[active].add(near, step.class, step.length);

            // Greedy connect: the passive tree repeats eta-extensions
            // toward the fresh vertex until blocked or joined.
            let passive = 1 - active;
            let t3 = Instant::now();
            let (mut from, _) = trees[passive].nearest(ps, &target)?;
            phases.nearest += t3.elapsed().as_secs_f64();
            loop {
                let t4 = Instant::now();
                let stepped = steer(
                    ps,
                    &trees[passive].nodes[from],
                    &target,
                    params.eta,
                    params.edge_resolution,
                )?;
                phases.steering += t4.elapsed().as_secs_f64();
                let Some(step) = stepped else { break };
                let reached = step.reached;
                from = trees[passive].add(from, step.class, step.length);
                if reached {
                    // trees[0] is rooted at the start, trees[1] at the
                    // goal; only the junction indices depend on which
                    // tree extended this round.
                    let (junction_start, junction_goal) = if active == 0 {
                        (new_active, from)
                    } else {
                        (from, new_active)
                    };
                    let (start_tree, goal_tree) = (&trees[0], &trees[1]);
                    let mut classes: Vec<ClassPoint> = start_tree
                        .chain(junction_start)
                        .into_iter()
                        .map(|i| start_tree.nodes[i].clone())
                        .collect();
                    let mut back: Vec<ClassPoint> = goal_tree
                        .chain(junction_goal)
                        .into_iter()
                        .map(|i| goal_tree.nodes[i].clone())
                        .collect();
                    back.reverse();
                    // The two junction vertices carry the same class; keep
                    // only the start tree's copy.
                    classes.extend(back.into_iter().skip(1));
                    let lifted = assemble(ps, params.edge_resolution, &classes)?;
                    return Ok(PlanResult::success(lifted, samples, started, phases));
                }
            }
        }
        active = 1 - active;
    }
    Ok(PlanResult::exhausted(samples, started, phases))
}

/// RRT*: asymptotically optimal variant. New vertices choose the
/// cheapest collision-free parent among neighbors within
/// `r(n) = min(eta, rho_rrt (log n / n)^{1/(d+1)})` and rewire those
/// neighbors through themselves when that lowers cost. Runs its full
/// sample budget and then reports the best goal connection found.
pub fn rrt_star(
    problem: &(Config, Config),
    ps: &PlanningSpace,
    params: &PlannerParams,
) -> Result<PlanResult> {
    params.validate()?;
    let started = Instant::now();
    let mut phases = PhaseTimings::default();
    let ends = match check_endpoints(ps, problem)? {
        Ok(e) => e,
        Err(()) => return Ok(PlanResult::infeasible(0, started, phases)),
    };
    let mut tree = Tree::new(ends.start.clone());
    let mut goal_id: Option<usize> = None;
    let dim = ps.config_dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let space = ps.space();

    // Direct start-goal edge as the initial incumbent, when visible.
    {
        let (d, _) = ps.dist(&ends.start, &ends.goal)?;
        if d <= params.eta
            && ps
                .local_plan(&ends.start, &ends.goal, params.edge_resolution)?
                .is_some()
        {
            goal_id = Some(tree.add(0, ends.goal.clone(), d));
        }
    }

    let mut samples = 0usize;
    while samples < params.max_samples {
        let t0 = Instant::now();
        let sample = sample_global_q(&space, Arc::clone(ps.group()), &mut rng)?;
        samples += 1;
        phases.sampling += t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let (near, _) = tree.nearest(ps, &sample)?;
        phases.nearest += t1.elapsed().as_secs_f64();

        let t2 = Instant::now();
        let stepped = steer(ps, &tree.nodes[near], &sample, params.eta, params.edge_resolution)?;
        phases.steering += t2.elapsed().as_secs_f64();
        let Some(step) = stepped else { continue };

        // Neighborhood radius from the current tree size.
        let n = tree.len().max(2) as f64;
        let radius = params.eta.min(params.rho_rrt * (n.ln() / n).powf(1.0 / (dim as f64 + 1.0)));

        let t3 = Instant::now();
        let mut neighbors: Vec<(usize, f64)> = Vec::new();
        for (i, node) in tree.nodes.iter().enumerate() {
            let (d, _) = ps.dist(node, &step.class)?;
            if d <= radius {
                neighbors.push((i, d));
            }
        }
        phases.nearest += t3.elapsed().as_secs_f64();

        // Cheapest verifiable parent; the steered edge from `near` is
        // known-free and serves as the fallback.
        let mut candidates: Vec<(f64, usize, f64)> = neighbors
            .iter()
            .filter(|(i, _)| *i != near)
            .map(|&(i, d)| (tree.cost[i] + d, i, d))
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let fallback_cost = tree.cost[near] + step.length;
        let mut parent = (fallback_cost, near, step.length);
        let t4 = Instant::now();
        for &(c, i, d) in &candidates {
            if c >= parent.0 {
                break;
            }
            if ps
                .local_plan(&tree.nodes[i], &step.class, params.edge_resolution)?
                .is_some()
            {
                parent = (c, i, d);
                break;
            }
        }
        let new = tree.add(parent.1, step.class, parent.2);

        // Rewire the neighborhood through the new vertex.
        for &(i, d) in &neighbors {
            if i == parent.1 || i == new {
                continue;
            }
            let via = tree.cost[new] + d;
            if via + 1e-12 < tree.cost[i]
                && ps
                    .local_plan(&tree.nodes[new], &tree.nodes[i], params.edge_resolution)?
                    .is_some()
            {
                tree.reparent(i, new, d);
            }
        }
        phases.steering += t4.elapsed().as_secs_f64();

        // Goal connection: attach or improve.
        let (dg, _) = ps.dist(&tree.nodes[new], &ends.goal)?;
        if dg <= params.eta {
            let candidate_cost = tree.cost[new] + dg;
            let improves = goal_id.map_or(true, |g| candidate_cost + 1e-12 < tree.cost[g]);
            if improves {
                let t5 = Instant::now();
                let free = ps
                    .local_plan(&tree.nodes[new], &ends.goal, params.edge_resolution)?
                    .is_some();
                phases.steering += t5.elapsed().as_secs_f64();
                if free {
                    match goal_id {
                        Some(g) => tree.reparent(g, new, dg),
                        None => goal_id = Some(tree.add(new, ends.goal.clone(), dg)),
                    }
                }
            }
        }
    }

    match goal_id {
        Some(g) => {
            let t = Instant::now();
            let classes: Vec<ClassPoint> =
                tree.chain(g).into_iter().map(|i| tree.nodes[i].clone()).collect();
            let lifted = assemble(ps, params.edge_resolution, &classes)?;
            phases.search += t.elapsed().as_secs_f64();
            Ok(PlanResult::success(lifted, samples, started, phases))
        }
        None => Ok(PlanResult::exhausted(samples, started, phases)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrmVariant {
    /// Connect each vertex to its `k(n) = ceil(k_const log n)` nearest.
    Knn,
    /// Connect all pairs within `r(n) = rho_prm (log n / n)^{1/d}`.
    Radius,
}

/// PRM*: one shared roadmap built from `max_samples` uniform draws (free
/// configurations kept), then one query per problem linking its start and
/// goal into a clone of the roadmap and running Dijkstra.
pub fn prm_star(
    problems: &[(Config, Config)],
    ps: &PlanningSpace,
    params: &PlannerParams,
    variant: PrmVariant,
) -> Result<(Roadmap, Vec<PlanResult>)> {
    params.validate()?;
    let build_start = Instant::now();
    let mut build_phases = PhaseTimings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let space = ps.space();

    let t0 = Instant::now();
    let mut classes: Vec<ClassPoint> = Vec::new();
    for _ in 0..params.max_samples {
        let s = sample_global_q(&space, Arc::clone(ps.group()), &mut rng)?;
        if ps.is_free(s.representative()) {
            classes.push(s);
        }
    }
    build_phases.sampling = t0.elapsed().as_secs_f64();

    let mut map = Roadmap::new(Arc::clone(ps.group()), ps.weights().clone());
    for c in &classes {
        map.add_vertex(c)?;
    }
    let n = classes.len();
    connect_prm(ps, params, variant, &mut map, &classes, &mut build_phases)?;
    let build_time = build_start.elapsed().as_secs_f64();

    let mut results = Vec::with_capacity(problems.len());
    for problem in problems {
        let query_start = Instant::now();
        let mut phases = build_phases;
        let ends = match check_endpoints(ps, problem)? {
            Ok(e) => e,
            Err(()) => {
                let mut r = PlanResult::infeasible(n, query_start, phases);
                r.wall_time += build_time;
                results.push(r);
                continue;
            }
        };
        let t1 = Instant::now();
        let mut query_map = map.clone();
        let start_id = query_map.add_vertex(&ends.start)?;
        let goal_id = query_map.add_vertex(&ends.goal)?;
        let all: Vec<ClassPoint> = classes
            .iter()
            .cloned()
            .chain([ends.start.clone(), ends.goal.clone()])
            .collect();
        link_vertex(ps, params, variant, &mut query_map, &all, start_id)?;
        link_vertex(ps, params, variant, &mut query_map, &all, goal_id)?;
        let path = shortest_path(&query_map, start_id, goal_id);
        phases.search += t1.elapsed().as_secs_f64();
        let result = match path {
            Ok(ids) => {
                let lifted = lift_path(&query_map, &ids)?;
                let mut r = PlanResult::success(lifted, n, query_start, phases);
                r.wall_time += build_time;
                r
            }
            Err(Error::Unreachable { .. }) => {
                let mut r = PlanResult::exhausted(n, query_start, phases);
                r.wall_time += build_time;
                r
            }
            Err(e) => return Err(e),
        };
        results.push(result);
    }
    Ok((map, results))
}

/// Number of neighbors for KNN-PRM* at roadmap size `n`.
fn knn_k(params: &PlannerParams, n: usize) -> usize {
    let n = n.max(2) as f64;
    (params.knn_k_const * n.ln()).ceil().max(1.0) as usize
}

/// Connection radius for radius-PRM* at roadmap size `n` and dimension `d`.
fn prm_radius(params: &PlannerParams, n: usize, dim: usize) -> f64 {
    let n = n.max(2) as f64;
    params.rho_prm * (n.ln() / n).powf(1.0 / dim as f64)
}

/// Adds the PRM* edges among the construction vertices. Each verified
/// connection is inserted in both directions; the reverse endpoint is the
/// inverse group element's image, whose geodesic is the isometric image
/// of the verified one.
fn connect_prm(
    ps: &PlanningSpace,
    params: &PlannerParams,
    variant: PrmVariant,
    map: &mut Roadmap,
    classes: &[ClassPoint],
    phases: &mut PhaseTimings,
) -> Result<()> {
    let n = classes.len();
    if n < 2 {
        return Ok(());
    }
    let dim = ps.config_dimension();
    let mut linked: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    match variant {
        PrmVariant::Knn => {
            let k = knn_k(params, n);
            for v in 0..n {
                let t0 = Instant::now();
                let mut dists: Vec<(f64, usize, usize)> = Vec::with_capacity(n - 1);
                for u in 0..n {
                    if u == v {
                        continue;
                    }
                    let (d, g) = ps.dist(&classes[v], &classes[u])?;
                    dists.push((d, u, g));
                }
                dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                phases.nearest += t0.elapsed().as_secs_f64();
                let t1 = Instant::now();
                for &(d, u, g) in dists.iter().take(k) {
                    try_link(ps, params, map, classes, v, u, d, g, &mut linked)?;
                }
                phases.steering += t1.elapsed().as_secs_f64();
            }
        }
        PrmVariant::Radius => {
            let r = prm_radius(params, n, dim);
            for v in 0..n {
                let t0 = Instant::now();
                let mut close: Vec<(f64, usize, usize)> = Vec::new();
                for u in (v + 1)..n {
                    let (d, g) = ps.dist(&classes[v], &classes[u])?;
                    if d <= r {
                        close.push((d, u, g));
                    }
                }
                phases.nearest += t0.elapsed().as_secs_f64();
                let t1 = Instant::now();
                for (d, u, g) in close {
                    try_link(ps, params, map, classes, v, u, d, g, &mut linked)?;
                }
                phases.steering += t1.elapsed().as_secs_f64();
            }
        }
    }
    Ok(())
}

/// Verifies the geodesic between two roadmap vertices once and inserts
/// both directed edges.
#[allow(clippy::too_many_arguments)]
fn try_link(
    ps: &PlanningSpace,
    params: &PlannerParams,
    map: &mut Roadmap,
    classes: &[ClassPoint],
    v: usize,
    u: usize,
    d: f64,
    g: usize,
    linked: &mut std::collections::HashSet<(usize, usize)>,
) -> Result<()> {
    if d <= DUPLICATE_EPS || linked.contains(&(v, u)) {
        return Ok(());
    }
    linked.insert((v, u));
    linked.insert((u, v));
    let group = ps.group();
    let q_e = group.act(g, classes[u].representative())?;
    if !edge_free(
        ps.world(),
        ps.objects(),
        classes[v].representative(),
        &q_e,
        params.edge_resolution,
    ) {
        return Ok(());
    }
    map.add_edge(RoadmapEdge {
        src: v,
        dst: u,
        q_e,
        length: d,
    })?;
    let g_inv = group.inverse(g)?;
    let q_e_rev = group.act(g_inv, classes[v].representative())?;
    let rev_len = dist_config(classes[u].representative(), &q_e_rev, ps.weights())?;
    map.add_edge(RoadmapEdge {
        src: u,
        dst: v,
        q_e: q_e_rev,
        length: rev_len,
    })?;
    Ok(())
}

/// Wires one query vertex (start or goal) into the roadmap clone using
/// the same neighbor rule as construction.
fn link_vertex(
    ps: &PlanningSpace,
    params: &PlannerParams,
    variant: PrmVariant,
    map: &mut Roadmap,
    all: &[ClassPoint],
    vertex: usize,
) -> Result<()> {
    let n = all.len();
    let dim = ps.config_dimension();
    let mut dists: Vec<(f64, usize, usize)> = Vec::with_capacity(n - 1);
    for u in 0..n {
        if u == vertex {
            continue;
        }
        let (d, g) = ps.dist(&all[vertex], &all[u])?;
        dists.push((d, u, g));
    }
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let chosen: Vec<(f64, usize, usize)> = match variant {
        PrmVariant::Knn => dists.into_iter().take(knn_k(params, n)).collect(),
        PrmVariant::Radius => {
            let r = prm_radius(params, n, dim);
            dists.into_iter().take_while(|(d, _, _)| *d <= r).collect()
        }
    };
    let mut linked = std::collections::HashSet::new();
    for (d, u, g) in chosen {
        try_link(ps, params, map, all, vertex, u, d, g, &mut linked)?;
    }
    Ok(())
}

/// Dijkstra over the directed roadmap; ties between equal-length paths
/// are settled toward smaller vertex ids. Errors when the goal is
/// unreachable.
pub fn shortest_path(map: &Roadmap, start: usize, goal: usize) -> Result<Vec<usize>> {
    map.vertex(start)?;
    map.vertex(goal)?;
    let n = map.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut settled = vec![false; n];
    // Min-heap keyed by (distance, vertex id).
    let mut heap = std::collections::BinaryHeap::new();
    dist[start] = 0.0;
    heap.push(std::cmp::Reverse(HeapEntry {
        dist: 0.0,
        vertex: start,
    }));
    while let Some(std::cmp::Reverse(entry)) = heap.pop() {
        let v = entry.vertex;
        if settled[v] {
            continue;
        }
        settled[v] = true;
        if v == goal {
            break;
        }
        for &e in map.outgoing(v) {
            let edge = &map.edges()[e];
            let nd = dist[v] + edge.length;
            if nd < dist[edge.dst] {
                dist[edge.dst] = nd;
                pred[edge.dst] = v;
                heap.push(std::cmp::Reverse(HeapEntry {
                    dist: nd,
                    vertex: edge.dst,
                }));
            }
        }
    }
    if !dist[goal].is_finite() {
        return Err(Error::Unreachable {
            from: start,
            to: goal,
        });
    }
    let mut path = vec![goal];
    let mut v = goal;
    while v != start {
        v = pred[v];
        path.push(v);
    }
    path.reverse();
    Ok(path)
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.vertex.cmp(&other.vertex))
    }
}

/// Re-validates a successful result from scratch: endpoints in the right
/// classes, every segment collision-free at the planner's resolution, and
/// the reported length consistent with the waypoints within 1e-9.
pub fn validate_result(
    result: &PlanResult,
    problem: &(Config, Config),
    ps: &PlanningSpace,
    params: &PlannerParams,
) -> Result<()> {
    if result.status != PlanStatus::Success {
        return Ok(());
    }
    let path = result
        .path
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("success without a path".into()))?;
    let fail = |msg: String| Err(Error::InvalidArgument(msg));
    if path.waypoints.len() < 2 {
        return fail("path has fewer than two waypoints".into());
    }
    let group = ps.group();
    if group
        .identify(&problem.0, &path.waypoints[0], 1e-9)?
        .is_none()
    {
        return fail("first waypoint is not in the start class".into());
    }
    if group
        .identify(&problem.1, path.waypoints.last().unwrap(), 1e-9)?
        .is_none()
    {
        return fail("last waypoint is not in the goal class".into());
    }
    let mut measured = 0.0;
    for (i, pair) in path.waypoints.windows(2).enumerate() {
        if !edge_free(
            ps.world(),
            ps.objects(),
            &pair[0],
            &pair[1],
            params.edge_resolution,
        ) {
            return fail(format!("segment {i} fails collision re-validation"));
        }
        measured += dist_config(&pair[0], &pair[1], ps.weights())?;
    }
    if (measured - path.total_length).abs() > 1e-9 {
        return fail(format!(
            "reported length {} differs from measured {measured}",
            path.total_length
        ));
    }
    if let Some(len) = result.length {
        if (len - path.total_length).abs() > 1e-9 {
            return fail("result length differs from path length".into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::{ConvexShape, PlacedShape};
    use crate::geometry::{Aabb, Dim, ObjectPose, Rotation, Rotation2};
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn square_object(half: f64) -> MovingObject {
        let shape =
            ConvexShape::hull_2d(&[[-half, -half], [half, -half], [half, half], [-half, half]])
                .unwrap();
        MovingObject::new(shape, SymmetryGroup::cyclic_2d(4).unwrap()).unwrap()
    }

    fn empty_2d(extent: f64) -> World {
        World::empty(
            Dim::Two,
            Aabb::new_2d([-extent, -extent], [extent, extent]).unwrap(),
        )
    }

    fn cfg(x: f64, y: f64, theta: f64) -> Config {
        Config::new(vec![ObjectPose::planar(x, y, Rotation2::new(theta))]).unwrap()
    }

    fn rotation_traversed(path: &LiftedPath) -> f64 {
        path.waypoints
            .windows(2)
            .map(|p| {
                p[0].objects()[0]
                    .rotation
                    .distance(&p[1].objects()[0].rotation)
                    .unwrap()
            })
            .sum()
    }

    #[test]
    fn goal_within_eta_connects_without_samples() {
        let ps = PlanningSpace::aware(empty_2d(5.0), vec![square_object(0.5)]).unwrap();
        let mut params = PlannerParams::defaults(ps.config_dimension());
        params.eta = 2.0;
        let problem = (cfg(0.0, 0.0, 0.0), cfg(1.0, 0.5, 0.2));
        for planner in [rrt, birrt] {
            let r = planner(&problem, &ps, &params).unwrap();
            assert_eq!(r.status, PlanStatus::Success);
            assert_eq!(r.samples, 0);
            assert_eq!(r.path.as_ref().unwrap().waypoints.len(), 2);
            validate_result(&r, &problem, &ps, &params).unwrap();
        }
    }

    #[test]
    fn infeasible_endpoints_are_reported() {
        let mut world = empty_2d(5.0);
        world.obstacles.push(
            PlacedShape::from_world_vertices_2d(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
                .unwrap(),
        );
        let ps = PlanningSpace::aware(world, vec![square_object(0.5)]).unwrap();
        let params = PlannerParams::defaults(ps.config_dimension());
        let problem = (cfg(0.0, 0.0, 0.0), cfg(3.0, 3.0, 0.0));
        for planner in [rrt, birrt, rrt_star] {
            let r = planner(&problem, &ps, &params).unwrap();
            assert_eq!(r.status, PlanStatus::InfeasibleEndpoints);
        }
        let (_, results) =
            prm_star(&[problem], &ps, &params, PrmVariant::Knn).unwrap();
        assert_eq!(results[0].status, PlanStatus::InfeasibleEndpoints);
    }

    #[test]
    fn tiny_budget_exhausts() {
        let ps = PlanningSpace::aware(empty_2d(5.0), vec![square_object(0.5)]).unwrap();
        let mut params = PlannerParams::defaults(ps.config_dimension());
        params.max_samples = 1;
        params.eta = 0.1;
        let problem = (cfg(-4.0, -4.0, 0.0), cfg(4.0, 4.0, 0.0));
        let r = rrt(&problem, &ps, &params).unwrap();
        assert_eq!(r.status, PlanStatus::Exhausted);
        assert_eq!(r.samples, 1);
    }

    #[test]
    fn aware_arm_rotates_less_on_the_85_degree_problem() {
        // Start at 0°, goal at 85°: under C4 the quotient needs only 5° of
        // rotation, the base space needs the full 85°. A goal within eta
        // makes both arms connect directly, so the comparison is exact.
        let world = empty_2d(5.0);
        let objects = vec![square_object(0.5)];
        let aware = PlanningSpace::aware(world.clone(), objects.clone()).unwrap();
        let unaware = PlanningSpace::unaware(world, objects).unwrap();
        let mut params = PlannerParams::defaults(aware.config_dimension());
        params.eta = 6.0;
        params.seed = 5;
        let problem = (cfg(-2.0, 0.0, 0.0), cfg(2.0, 0.0, 85.0f64.to_radians()));
        let ra = rrt(&problem, &aware, &params).unwrap();
        let ru = rrt(&problem, &unaware, &params).unwrap();
        assert_eq!(ra.status, PlanStatus::Success);
        assert_eq!(ru.status, PlanStatus::Success);
        let rot_aware = rotation_traversed(ra.path.as_ref().unwrap());
        let rot_unaware = rotation_traversed(ru.path.as_ref().unwrap());
        assert_abs_diff_eq!(rot_aware, 5.0f64.to_radians(), epsilon = 1e-9);
        assert_abs_diff_eq!(rot_unaware, 85.0f64.to_radians(), epsilon = 1e-9);
        assert!(ra.length.unwrap() < ru.length.unwrap());
        // The aware path's final waypoint is the goal class at 355°.
        let last = ra.path.as_ref().unwrap().waypoints.last().unwrap().clone();
        match last.objects()[0].rotation {
            Rotation::Planar(r) => {
                assert_abs_diff_eq!(r.angle(), 355.0f64.to_radians(), epsilon = 1e-9)
            }
            Rotation::Spatial(_) => panic!("planar expected"),
        }
        validate_result(&ra, &problem, &aware, &params).unwrap();
        validate_result(&ru, &problem, &unaware, &params).unwrap();
    }

    fn door_world() -> World {
        // A wall across x = 0 with a narrow door around y = 0.
        let mut world = empty_2d(3.0);
        for wall in [
            [[-0.15, 0.45], [0.15, 0.45], [0.15, 3.0], [-0.15, 3.0]],
            [[-0.15, -3.0], [0.15, -3.0], [0.15, -0.45], [-0.15, -0.45]],
        ] {
            world
                .obstacles
                .push(PlacedShape::from_world_vertices_2d(&wall).unwrap());
        }
        world
    }

    #[test]
    fn birrt_outperforms_rrt_through_a_door() {
        let world = door_world();
        let objects = vec![square_object(0.3)];
        let ps = PlanningSpace::aware(world, objects).unwrap();
        let mut params = PlannerParams::defaults(ps.config_dimension());
        params.max_samples = 120;
        params.eta = 0.6;
        params.edge_resolution = 0.03;
        let problem = (cfg(-2.0, 0.0, 0.0), cfg(2.0, 0.0, 0.0));
        let mut rrt_wins = 0;
        let mut birrt_wins = 0;
        for seed in 0..20 {
            params.seed = seed;
            if rrt(&problem, &ps, &params).unwrap().status == PlanStatus::Success {
                rrt_wins += 1;
            }
            let rb = birrt(&problem, &ps, &params).unwrap();
            if rb.status == PlanStatus::Success {
                birrt_wins += 1;
                validate_result(&rb, &problem, &ps, &params).unwrap();
            }
        }
        assert!(
            rrt_wins <= 10,
            "RRT should fail at least half the time, won {rrt_wins}/20"
        );
        assert!(
            birrt_wins > rrt_wins,
            "BiRRT ({birrt_wins}) should beat RRT ({rrt_wins})"
        );
    }

    #[test]
    fn rrt_star_cost_is_monotone_in_budget_and_near_optimal() {
        let ps = PlanningSpace::aware(empty_2d(3.0), vec![square_object(0.5)]).unwrap();
        let mut params = PlannerParams::defaults(ps.config_dimension());
        params.eta = 1.0;
        params.rho_rrt = 3.0;
        params.seed = 9;
        let problem = (cfg(-2.0, -2.0, 0.0), cfg(2.0, 2.0, 85.0f64.to_radians()));
        let start = ps.project(problem.0.clone()).unwrap();
        let goal = ps.project(problem.1.clone()).unwrap();
        let (optimal, _) = ps.dist(&start, &goal).unwrap();

        params.max_samples = 300;
        let cheap = rrt_star(&problem, &ps, &params).unwrap();
        params.max_samples = 2000;
        let rich = rrt_star(&problem, &ps, &params).unwrap();
        assert_eq!(cheap.status, PlanStatus::Success);
        assert_eq!(rich.status, PlanStatus::Success);
        // Same seed: more samples can only improve the incumbent.
        assert!(rich.length.unwrap() <= cheap.length.unwrap() + 1e-12);
        assert!(
            rich.length.unwrap() <= optimal * 1.05,
            "cost {} exceeds 105% of optimum {optimal}",
            rich.length.unwrap()
        );
        validate_result(&rich, &problem, &ps, &params).unwrap();
    }

    #[test]
    fn prm_star_answers_queries_near_optimally_in_an_empty_world() {
        let ps = PlanningSpace::aware(empty_2d(3.0), vec![square_object(0.5)]).unwrap();
        let mut params = PlannerParams::defaults(ps.config_dimension());
        params.max_samples = 2500;
        params.seed = 10;
        // Optimality needs connection rules above the asymptotic
        // thresholds; at finite n, generous constants buy path quality.
        params.knn_k_const *= 2.5;
        params.rho_prm = 5.0;
        let problems = vec![
            (cfg(-2.0, -2.0, 0.0), cfg(2.0, 2.0, 85.0f64.to_radians())),
            (cfg(-2.0, 2.0, 0.3), cfg(2.0, -2.0, 0.3)),
        ];
        for variant in [PrmVariant::Knn, PrmVariant::Radius] {
            let (map, results) = prm_star(&problems, &ps, &params, variant).unwrap();
            map.validate().unwrap();
            assert!(map.edge_count() > 0);
            for (problem, r) in problems.iter().zip(&results) {
                assert_eq!(r.status, PlanStatus::Success, "{variant:?}");
                let start = ps.project(problem.0.clone()).unwrap();
                let goal = ps.project(problem.1.clone()).unwrap();
                let (optimal, _) = ps.dist(&start, &goal).unwrap();
                assert!(
                    r.length.unwrap() <= optimal * 1.05,
                    "{variant:?}: {} vs optimum {optimal}",
                    r.length.unwrap()
                );
                validate_result(r, problem, &ps, &params).unwrap();
            }
        }
    }

    #[test]
    fn planners_are_deterministic_per_seed() {
        let world = door_world();
        let ps = PlanningSpace::aware(world, vec![square_object(0.3)]).unwrap();
        let mut params = PlannerParams::defaults(ps.config_dimension());
        params.max_samples = 400;
        params.eta = 0.6;
        params.seed = 3;
        let problem = (cfg(-2.0, 0.0, 0.0), cfg(2.0, 0.5, 0.4));
        for planner in [rrt, birrt, rrt_star] {
            let a = planner(&problem, &ps, &params).unwrap();
            let b = planner(&problem, &ps, &params).unwrap();
            assert_eq!(a.status, b.status);
            assert_eq!(a.samples, b.samples);
            match (a.length, b.length) {
                (Some(x), Some(y)) => assert_eq!(x.to_bits(), y.to_bits()),
                (None, None) => {}
                other => panic!("nondeterministic outcome {other:?}"),
            }
        }
    }

    /// A deliberately independent, minimal RRT written directly against
    /// the base-space primitives: plain product metric, plain geodesic
    /// steering, no quotient machinery anywhere.
    fn plain_rrt(
        problem: &(Config, Config),
        world: &World,
        objects: &[MovingObject],
        params: &PlannerParams,
    ) -> Option<(Vec<Config>, f64)> {
        let weights = object_weights(objects).unwrap();
        let space = Space {
            dim: world.dim,
            objects: objects.len(),
            bounds: world.bounds,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut nodes = vec![problem.0.clone()];
        let mut parents = vec![usize::MAX];
        let direct = dist_config(&problem.0, &problem.1, &weights).unwrap();
        let connect = |a: &Config, b: &Config| {
            edge_free(world, objects, a, b, params.edge_resolution)
        };
        let finish = |nodes: &[Config], parents: &[usize], leaf: usize| {
            let mut chain = vec![problem.1.clone()];
            let mut v = leaf;
            loop {
                chain.push(nodes[v].clone());
                if parents[v] == usize::MAX {
                    break;
                }
                v = parents[v];
            }
            chain.reverse();
            let mut len = 0.0;
            for p in chain.windows(2) {
                len += dist_config(&p[0], &p[1], &weights).unwrap();
            }
            (chain, len)
        };
        if direct <= params.eta && connect(&problem.0, &problem.1) {
            return Some(finish(&nodes, &parents, 0));
        }
        let mut samples = 0;
        while samples < params.max_samples {
            let s = crate::geometry::sample_uniform(&space, &mut rng);
            samples += 1;
            let mut near = 0;
            let mut best = f64::INFINITY;
            for (i, n) in nodes.iter().enumerate() {
                let d = dist_config(n, &s, &weights).unwrap();
                if d < best {
                    best = d;
                    near = i;
                }
            }
            if best <= DUPLICATE_EPS {
                continue;
            }
            let endpoint = if best <= params.eta {
                s
            } else {
                match geodesic(&nodes[near], &s, params.eta / best) {
                    Ok(q) => q,
                    Err(_) => continue,
                }
            };
            if !connect(&nodes[near], &endpoint) {
                continue;
            }
            nodes.push(endpoint);
            parents.push(near);
            let new = nodes.len() - 1;
            let dg = dist_config(&nodes[new], &problem.1, &weights).unwrap();
            if dg <= params.eta && connect(&nodes[new], &problem.1) {
                return Some(finish(&nodes, &parents, new));
            }
        }
        None
    }

    #[test]
    fn trivial_group_run_is_bit_identical_to_a_plain_implementation() {
        let world = door_world();
        let objects = vec![square_object(0.3)];
        let ps = PlanningSpace::unaware(world.clone(), objects.clone()).unwrap();
        let mut params = PlannerParams::defaults(ps.config_dimension());
        params.max_samples = 500;
        params.eta = 0.6;
        for seed in [1, 4, 12] {
            params.seed = seed;
            let problem = (cfg(-2.0, 0.3, 0.1), cfg(2.0, -0.4, 0.9));
            let quotient_run = rrt(&problem, &ps, &params).unwrap();
            let plain = plain_rrt(&problem, &world, &objects, &params);
            match (quotient_run.status, plain) {
                (PlanStatus::Success, Some((waypoints, length))) => {
                    let path = quotient_run.path.as_ref().unwrap();
                    assert_eq!(path.waypoints.len(), waypoints.len());
                    for (a, b) in path.waypoints.iter().zip(&waypoints) {
                        for (pa, pb) in a.objects().iter().zip(b.objects()) {
                            assert_eq!(pa.translation, pb.translation);
                            assert_eq!(
                                pa.rotation.folded_coords(),
                                pb.rotation.folded_coords()
                            );
                        }
                    }
                    assert_eq!(path.total_length.to_bits(), length.to_bits());
                }
                (PlanStatus::Exhausted, None) => {}
                other => panic!("arms disagree on seed {seed}: {other:?}"),
            }
        }
    }

    #[test]
    fn dijkstra_matches_brute_force_on_small_graphs() {
        // Random small roadmaps on a trivial quotient; compare against
        // exhaustive path enumeration.
        let trivial = Arc::new(SymmetryGroup::trivial(Dim::Two, 1).unwrap());
        let w = MetricWeights::uniform(1, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..30 {
            let n = rng.random_range(4..=8);
            let mut map = Roadmap::new(Arc::clone(&trivial), w.clone());
            let mut classes = Vec::new();
            for _ in 0..n {
                let q = cfg(
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-3.0..3.0),
                    rng.random_range(0.0..1.0),
                );
                let c = project(q, Arc::clone(&trivial)).unwrap();
                map.add_vertex(&c).unwrap();
                classes.push(c);
            }
            for v in 0..n {
                for u in 0..n {
                    if v != u && rng.random_range(0.0..1.0) < 0.4 {
                        let (d, _) = q_dist(&classes[v], &classes[u], &w).unwrap();
                        map.add_edge(RoadmapEdge {
                            src: v,
                            dst: u,
                            q_e: classes[u].representative().clone(),
                            length: d,
                        })
                        .unwrap();
                    }
                }
            }
            // Exhaustive DFS over simple paths.
            fn explore(
                map: &Roadmap,
                v: usize,
                goal: usize,
                seen: &mut Vec<bool>,
                len: f64,
                best: &mut f64,
            ) {
                if v == goal {
                    *best = best.min(len);
                    return;
                }
                for &e in map.outgoing(v) {
                    let edge = &map.edges()[e];
                    if !seen[edge.dst] {
                        seen[edge.dst] = true;
                        explore(map, edge.dst, goal, seen, len + edge.length, best);
                        seen[edge.dst] = false;
                    }
                }
            }
            let mut best = f64::INFINITY;
            let mut seen = vec![false; n];
            seen[0] = true;
            explore(&map, 0, n - 1, &mut seen, 0.0, &mut best);
            match shortest_path(&map, 0, n - 1) {
                Ok(path) => {
                    let mut len = 0.0;
                    for pair in path.windows(2) {
                        len += map.find_edge(pair[0], pair[1]).unwrap().length;
                    }
                    assert_abs_diff_eq!(len, best, epsilon = 1e-12);
                }
                Err(Error::Unreachable { .. }) => {
                    assert_eq!(best, f64::INFINITY);
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn dijkstra_picks_the_short_side_of_a_triangle() {
        let trivial = Arc::new(SymmetryGroup::trivial(Dim::Two, 1).unwrap());
        let w = MetricWeights::uniform(1, 1.0).unwrap();
        let mut map = Roadmap::new(Arc::clone(&trivial), w.clone());
        let configs = [cfg(0.0, 0.0, 0.0), cfg(3.0, 4.0, 0.0), cfg(6.0, 0.0, 0.0)];
        let classes: Vec<ClassPoint> = configs
            .iter()
            .map(|q| project(q.clone(), Arc::clone(&trivial)).unwrap())
            .collect();
        for c in &classes {
            map.add_vertex(c).unwrap();
        }
        let mut connect = |a: usize, b: usize| {
            let (d, _) = q_dist(&classes[a], &classes[b], &w).unwrap();
            map.add_edge(RoadmapEdge {
                src: a,
                dst: b,
                q_e: classes[b].representative().clone(),
                length: d,
            })
            .unwrap();
        };
        connect(0, 1); // length 5
        connect(1, 2); // length 5
        connect(0, 2); // length 6, direct
        assert_eq!(shortest_path(&map, 0, 2).unwrap(), vec![0, 2]);
        // Single edge graph.
        assert_eq!(shortest_path(&map, 0, 1).unwrap(), vec![0, 1]);
        // Unreachable direction (edges are directed).
        assert!(matches!(
            shortest_path(&map, 2, 0),
            Err(Error::Unreachable { .. })
        ));
    }

    #[test]
    fn plan_results_serialize() {
        let ps = PlanningSpace::aware(empty_2d(5.0), vec![square_object(0.5)]).unwrap();
        let mut params = PlannerParams::defaults(ps.config_dimension());
        params.eta = 3.0;
        let problem = (cfg(0.0, 0.0, 0.0), cfg(1.0, 1.0, 0.3));
        let r = rrt(&problem, &ps, &params).unwrap();
        let text = r.to_json().unwrap();
        assert!(text.contains("\"status\": \"success\""));
        assert!(text.contains("waypoints"));
    }
}
