//! End-to-end runs through the public API: world generation, quotient
//! construction, planning, result validation, and roadmap persistence.

use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symplan::collision::{ConvexShape, MovingObject};
use symplan::geometry::{Aabb, Dim, MetricWeights};
use symplan::planners::{
    birrt, prm_star, rrt, rrt_star, shortest_path, validate_result, PlanStatus, PlannerParams,
    PlanningSpace, PrmVariant,
};
use symplan::quotient::{lift_path, q_dist, Roadmap};
use symplan::symmetry::SymmetryGroup;
use symplan::worldgen::{gen_problem, gen_world, WorldGenParams};

fn pentagon() -> MovingObject {
    MovingObject::new(
        ConvexShape::regular_polygon(5, 0.6).unwrap(),
        SymmetryGroup::cyclic_2d(5).unwrap(),
    )
    .unwrap()
}

fn cube() -> MovingObject {
    MovingObject::new(
        ConvexShape::cuboid([0.35; 3]).unwrap(),
        SymmetryGroup::octahedral().unwrap(),
    )
    .unwrap()
}

fn planar_params(seed: u64) -> WorldGenParams {
    WorldGenParams {
        dimension: Dim::Two,
        bounds: Aabb::new_2d([0.0, 0.0], [10.0, 10.0]).unwrap(),
        points: 24,
        alpha: 1.0,
        clusters: 1,
        spread: 0.5,
        seed,
    }
}

fn spatial_params(seed: u64) -> WorldGenParams {
    WorldGenParams {
        dimension: Dim::Three,
        bounds: Aabb::new_3d([0.0; 3], [6.0; 3]).unwrap(),
        points: 10,
        alpha: 1.0,
        clusters: 4,
        spread: 0.5,
        seed,
    }
}

/// Plans with every planner on one planar problem and checks each success
/// against the independent validator, including endpoint classes.
#[test]
fn planar_pipeline_produces_validated_paths() {
    let world = gen_world(&planar_params(400)).unwrap();
    let ps = PlanningSpace::aware(world, vec![pentagon()]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let problem = gen_problem(ps.world(), ps.objects(), ps.group(), ps.weights(), &mut rng).unwrap();

    let mut params = PlannerParams::defaults(ps.config_dimension());
    params.seed = rng.next_u64();
    params.max_samples = 2000;

    let mut successes = 0;
    for (name, result) in [
        ("rrt", rrt(&problem, &ps, &params).unwrap()),
        ("birrt", birrt(&problem, &ps, &params).unwrap()),
        ("rrt_star", rrt_star(&problem, &ps, &params).unwrap()),
    ] {
        if result.status != PlanStatus::Success {
            continue;
        }
        successes += 1;
        validate_result(&result, &problem, &ps, &params)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        let path = result.path.as_ref().unwrap();
        assert_eq!(result.length.unwrap(), path.total_length, "{name}");

        let start = ps.project(problem.0.clone()).unwrap();
        let goal = ps.project(problem.1.clone()).unwrap();
        let first = ps.project(path.waypoints.first().unwrap().clone()).unwrap();
        let last = ps.project(path.waypoints.last().unwrap().clone()).unwrap();
        assert!(q_dist(&start, &first, ps.weights()).unwrap().0 < 1e-9, "{name}");
        assert!(q_dist(&goal, &last, ps.weights()).unwrap().0 < 1e-9, "{name}");
        for q in &path.waypoints {
            assert!(ps.is_free(q), "{name}: waypoint in collision");
        }
    }
    assert!(successes >= 2, "pipeline found only {successes}/3 paths");
}

#[test]
fn spatial_pipeline_produces_validated_paths() {
    let world = gen_world(&spatial_params(77)).unwrap();
    let ps = PlanningSpace::aware(world, vec![cube()]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    let problem = gen_problem(ps.world(), ps.objects(), ps.group(), ps.weights(), &mut rng).unwrap();

    let mut params = PlannerParams::defaults(ps.config_dimension());
    params.seed = rng.next_u64();
    params.max_samples = 2000;
    let result = birrt(&problem, &ps, &params).unwrap();
    assert_eq!(result.status, PlanStatus::Success);
    validate_result(&result, &problem, &ps, &params).unwrap();
}

/// The unaware baseline is the same code over the trivial group, so a
/// repeated run with the same seed must agree bitwise.
#[test]
fn unaware_baseline_is_deterministic_and_trivial() {
    let world = gen_world(&planar_params(88)).unwrap();
    let ps = PlanningSpace::unaware(world, vec![pentagon()]).unwrap();
    assert_eq!(ps.group().order(), 1);

    let mut rng = ChaCha8Rng::seed_from_u64(89);
    let problem = gen_problem(ps.world(), ps.objects(), ps.group(), ps.weights(), &mut rng).unwrap();
    let mut params = PlannerParams::defaults(ps.config_dimension());
    params.seed = 4242;

    let a = rrt(&problem, &ps, &params).unwrap();
    let b = rrt(&problem, &ps, &params).unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(a.length, b.length);
    assert_eq!(a.samples, b.samples);
}

#[test]
fn roadmap_survives_json_round_trip_and_revalidation() {
    let world = gen_world(&planar_params(55)).unwrap();
    let ps = PlanningSpace::aware(world, vec![pentagon()]).unwrap();
    let mut params = PlannerParams::defaults(ps.config_dimension());
    params.max_samples = 300;
    params.seed = 56;
    let (map, _) = prm_star(&[], &ps, &params, PrmVariant::Knn).unwrap();
    assert!(map.vertex_count() > 0 && map.edge_count() > 0);

    let text = map.to_json().unwrap();
    let loaded = Roadmap::from_json(&text, Arc::clone(map.group()), map.weights().clone()).unwrap();
    assert_eq!(loaded.vertex_count(), map.vertex_count());
    assert_eq!(loaded.edge_count(), map.edge_count());
    loaded.validate().unwrap();

    // Graph search plus lifting works on the reloaded copy.
    let reachable = (0..loaded.vertex_count())
        .find(|&goal| goal != 0 && shortest_path(&loaded, 0, goal).is_ok());
    if let Some(goal) = reachable {
        let path = shortest_path(&loaded, 0, goal).unwrap();
        let lifted = lift_path(&loaded, &path).unwrap();
        let measured = lifted.measured_length(loaded.weights()).unwrap();
        assert!((measured - lifted.total_length).abs() < 1e-9);
    }
}

#[test]
fn corrupting_weights_fails_roadmap_reload() {
    let world = gen_world(&planar_params(55)).unwrap();
    let ps = PlanningSpace::aware(world, vec![pentagon()]).unwrap();
    let mut params = PlannerParams::defaults(ps.config_dimension());
    params.max_samples = 200;
    params.seed = 57;
    let (map, _) = prm_star(&[], &ps, &params, PrmVariant::Knn).unwrap();
    assert!(map.edge_count() > 0);

    // Reload under a rescaled metric: stored edge lengths no longer match.
    let text = map.to_json().unwrap();
    let wrong = MetricWeights::uniform(1, 3.0).unwrap();
    assert!(Roadmap::from_json(&text, Arc::clone(map.group()), wrong).is_err());
}
