//! Paired aware/unaware benchmark runs over seeded random worlds.
//!
//! Both arms of a pair share the world, the start/goal classes, and the
//! planner seed; the unaware arm is the same planner instantiated over the
//! trivial group. Resource mode `equal` gives both arms the same budgets;
//! `reduced` divides the aware arm's roadmap samples by the group order and
//! shrinks its connection radii by the factors the optimality thresholds
//! permit (|G|^{-1/d} for PRM*, |G|^{-1/(d+1)} for RRT*).

use clap::ValueEnum;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use symplan::bounds::{estimate_free_volume, prm_star_rho, rrt_star_rho, BoundInputs};
use symplan::collision::MovingObject;
use symplan::geometry::{Aabb, Config, Dim};
use symplan::planners::{
    birrt, prm_star, rrt, rrt_star, PlanResult, PlanStatus, PlannerParams, PlanningSpace,
    PrmVariant,
};
use symplan::worldgen::{gen_problem, gen_world, WorldGenParams};
use symplan::{Error, Result};

use crate::objects::ObjectKind;
use crate::report::{aggregate, Arm, Report, RunRecord};

/// RNG stream ids under each world's base key. World generation itself
/// uses low stream ids internally, so everything else lives far above.
const PROBLEM_STREAM_BASE: u64 = 1000;
const PRM_SEED_STREAM: u64 = 998;
const VOLUME_STREAM: u64 = 999;

/// Monte-Carlo draws for the per-world free-volume estimate feeding the
/// connection-radius formulas.
const VOLUME_SAMPLES: usize = 20_000;

/// Sample caps from the reference protocol, applied when the config gives
/// no explicit budget.
const RRT_CAP_2D: usize = 1000;
const RRT_CAP_3D: usize = 250;
const PRM_CAP_PER_ORDER_2D: usize = 3000;
const PRM_CAP_PER_ORDER_3D: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    #[value(name = "rrt")]
    Rrt,
    #[value(name = "birrt")]
    Birrt,
    #[value(name = "rrt_star")]
    RrtStar,
    #[value(name = "prm_star_knn")]
    PrmStarKnn,
    #[value(name = "prm_star_radius")]
    PrmStarRadius,
}

impl PlannerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlannerKind::Rrt => "rrt",
            PlannerKind::Birrt => "birrt",
            PlannerKind::RrtStar => "rrt_star",
            PlannerKind::PrmStarKnn => "prm_star_knn",
            PlannerKind::PrmStarRadius => "prm_star_radius",
        }
    }

    fn is_roadmap(&self) -> bool {
        matches!(self, PlannerKind::PrmStarKnn | PlannerKind::PrmStarRadius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ResourceMode {
    /// Both arms get identical budgets and radii.
    #[value(name = "equal")]
    Equal,
    /// The aware arm gets 1/|G| of the roadmap samples and shrunk radii.
    #[value(name = "reduced")]
    Reduced,
}

/// World-generation knobs; see [`symplan::worldgen::WorldGenParams`] for
/// the meaning of the clutter fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldSettings {
    pub bounds: Aabb,
    pub points: usize,
    pub alpha: f64,
    pub clusters: usize,
    pub spread: f64,
}

impl WorldSettings {
    pub fn defaults(dim: Dim) -> WorldSettings {
        match dim {
            Dim::Two => WorldSettings {
                bounds: Aabb::new_2d([0.0, 0.0], [10.0, 10.0])
                    .expect("static bounds are valid"),
                points: 24,
                alpha: 1.0,
                clusters: 1,
                spread: 0.5,
            },
            Dim::Three => WorldSettings {
                bounds: Aabb::new_3d([0.0; 3], [6.0; 3]).expect("static bounds are valid"),
                points: 10,
                alpha: 1.0,
                clusters: 4,
                spread: 0.5,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dimension: Dim,
    pub object: ObjectKind,
    pub planner: PlannerKind,
    pub worlds: usize,
    pub pairs: usize,
    pub mode: ResourceMode,
    pub seed: u64,
    /// Overrides the protocol sample caps when set. For roadmap planners
    /// this is the full (unaware) budget; reduced mode still divides the
    /// aware arm's share by the group order.
    pub max_samples: Option<usize>,
    pub world: WorldSettings,
}

impl ExperimentConfig {
    pub fn new(object: ObjectKind, planner: PlannerKind) -> ExperimentConfig {
        let dimension = object.dimension();
        ExperimentConfig {
            dimension,
            object,
            planner,
            worlds: 10,
            pairs: 100,
            mode: ResourceMode::Equal,
            seed: 0,
            max_samples: None,
            world: WorldSettings::defaults(dimension),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.worlds < 1 {
            return Err(Error::InvalidArgument("worlds count must be positive".into()));
        }
        if self.pairs < 1 {
            return Err(Error::InvalidArgument("pairs count must be positive".into()));
        }
        if self.dimension != self.object.dimension() {
            return Err(Error::InvalidArgument(format!(
                "object {} plans in {:?}, not {:?}",
                self.object,
                self.object.dimension(),
                self.dimension
            )));
        }
        if self.max_samples == Some(0) {
            return Err(Error::InvalidArgument("max_samples must be positive".into()));
        }
        Ok(())
    }
}

/// Builds the worker pool, capped by the SYMPLAN_THREADS environment
/// variable when it is set.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("SYMPLAN_THREADS") {
        let n: usize = raw.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!(
                "SYMPLAN_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
        if n == 0 {
            return Err(Error::InvalidArgument(
                "SYMPLAN_THREADS must be a positive integer".into(),
            ));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool construction failed: {e}")))
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs the experiment on the catalog object named in the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    run_experiment_objects(config, config.object.objects()?)
}

/// Runs the experiment on explicit moving objects; `config.object` is kept
/// only as a label in the report.
pub fn run_experiment_objects(
    config: &ExperimentConfig,
    objects: Vec<MovingObject>,
) -> Result<Report> {
    config.validate()?;
    if objects.is_empty() {
        return Err(Error::InvalidArgument("need at least one moving object".into()));
    }
    for object in &objects {
        if object.symmetry().dim() != config.dimension {
            return Err(Error::InvalidArgument(
                "moving object dimension does not match the experiment".into(),
            ));
        }
    }

    let mut seeder = ChaCha8Rng::seed_from_u64(config.seed);
    let world_seeds: Vec<u64> = (0..config.worlds).map(|_| seeder.next_u64()).collect();

    let pool = worker_pool()?;
    let per_world: Vec<Vec<RunRecord>> = pool.install(|| {
        world_seeds
            .par_iter()
            .map(|&ws| run_world(config, &objects, ws))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut records: Vec<RunRecord> = per_world.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (a.world_seed, a.pair, a.arm).cmp(&(b.world_seed, b.pair, b.arm))
    });
    let aggregates = aggregate(&records);
    Ok(Report {
        config: config.clone(),
        records,
        aggregates,
    })
}

struct WorldArms {
    aware: PlanningSpace,
    unaware: PlanningSpace,
    order: usize,
    dim: usize,
}

fn run_world(
    config: &ExperimentConfig,
    objects: &[MovingObject],
    world_seed: u64,
) -> Result<Vec<RunRecord>> {
    let gen = WorldGenParams {
        dimension: config.dimension,
        bounds: config.world.bounds,
        points: config.world.points,
        alpha: config.world.alpha,
        clusters: config.world.clusters,
        spread: config.world.spread,
        seed: world_seed,
    };
    let world = gen_world(&gen)?;
    let aware = PlanningSpace::aware(world.clone(), objects.to_vec())?;
    let unaware = PlanningSpace::unaware(world, objects.to_vec())?;
    let order = aware.group().order();
    let dim = aware.config_dimension();
    let arms = WorldArms {
        aware,
        unaware,
        order,
        dim,
    };

    // Paired problems: both arms consume the same start/goal classes. The
    // per-pair planner seed is drawn after the problem from the same stream.
    let mut problems = Vec::with_capacity(config.pairs);
    for p in 0..config.pairs {
        let mut rng = stream_rng(world_seed, PROBLEM_STREAM_BASE + p as u64);
        let problem = gen_problem(
            arms.aware.world(),
            arms.aware.objects(),
            arms.aware.group(),
            arms.aware.weights(),
            &mut rng,
        )?;
        problems.push((problem, rng.next_u64()));
    }

    if config.planner.is_roadmap() {
        roadmap_records(config, &arms, world_seed, &problems)
    } else {
        tree_records(config, &arms, world_seed, &problems)
    }
}

/// Free-volume inputs for the connection-radius formulas, estimated once
/// per world on a dedicated RNG stream.
fn radius_inputs(arms: &WorldArms, world_seed: u64, group_order: usize) -> Result<BoundInputs> {
    let mut rng = stream_rng(world_seed, VOLUME_STREAM);
    let volume = estimate_free_volume(
        arms.aware.world(),
        arms.aware.objects(),
        arms.aware.group(),
        arms.aware.weights(),
        VOLUME_SAMPLES,
        &mut rng,
    )?;
    Ok(BoundInputs {
        free_volume: volume.base,
        ..BoundInputs::new(arms.dim, group_order)
    })
}

fn tree_cap(config: &ExperimentConfig) -> usize {
    config.max_samples.unwrap_or(match config.dimension {
        Dim::Two => RRT_CAP_2D,
        Dim::Three => RRT_CAP_3D,
    })
}

fn record(world_seed: u64, pair: usize, arm: Arm, result: &PlanResult) -> RunRecord {
    RunRecord {
        world_seed,
        pair,
        arm,
        status: result.status,
        length: result.length,
        samples: result.samples,
        wall_time: result.wall_time,
    }
}

/// Both rows of a pair the RRT* feeder could not seed: the pair is skipped,
/// and the feeder's failure is recorded symmetrically so the row count
/// stays worlds x pairs x arms.
fn skipped_pair(world_seed: u64, pair: usize, feeder: &PlanResult) -> [RunRecord; 2] {
    [
        record(world_seed, pair, Arm::Aware, feeder),
        record(world_seed, pair, Arm::Unaware, feeder),
    ]
}

fn tree_records(
    config: &ExperimentConfig,
    arms: &WorldArms,
    world_seed: u64,
    problems: &[((Config, Config), u64)],
) -> Result<Vec<RunRecord>> {
    // The radius prescription for RRT* needs the free volume; the plain
    // RRT family does not pay for the estimate.
    let inputs = match config.planner {
        PlannerKind::RrtStar => Some(radius_inputs(arms, world_seed, 1)?),
        _ => None,
    };

    let pair_records: Vec<[RunRecord; 2]> = problems
        .par_iter()
        .enumerate()
        .map(|(pair, (problem, seed))| -> Result<[RunRecord; 2]> {
            let mut base = PlannerParams::defaults(arms.dim);
            base.max_samples = tree_cap(config);
            base.seed = *seed;

            match config.planner {
                PlannerKind::Rrt => {
                    let a = rrt(problem, &arms.aware, &base)?;
                    let u = rrt(problem, &arms.unaware, &base)?;
                    Ok([
                        record(world_seed, pair, Arm::Aware, &a),
                        record(world_seed, pair, Arm::Unaware, &u),
                    ])
                }
                PlannerKind::Birrt => {
                    let a = birrt(problem, &arms.aware, &base)?;
                    let u = birrt(problem, &arms.unaware, &base)?;
                    Ok([
                        record(world_seed, pair, Arm::Aware, &a),
                        record(world_seed, pair, Arm::Unaware, &u),
                    ])
                }
                PlannerKind::RrtStar => {
                    // The optimal cost entering the radius formula is
                    // overapproximated by an unaware RRT run on the same
                    // seed; a pair it cannot seed is skipped.
                    let feeder = rrt(problem, &arms.unaware, &base)?;
                    if feeder.status != PlanStatus::Success {
                        return Ok(skipped_pair(world_seed, pair, &feeder));
                    }
                    let c_star = feeder.length.expect("success carries a length");
                    let inputs = inputs.as_ref().expect("computed for rrt_star");
                    let rho = |order: usize| {
                        rrt_star_rho(&BoundInputs {
                            optimal_cost: c_star,
                            group_order: order,
                            ..inputs.clone()
                        })
                    };
                    let classical = rho(1)?;
                    let mut aware_params = base.clone();
                    aware_params.rho_rrt = match config.mode {
                        ResourceMode::Equal => classical,
                        ResourceMode::Reduced => rho(arms.order)?,
                    };
                    let mut unaware_params = base.clone();
                    unaware_params.rho_rrt = classical;
                    let a = rrt_star(problem, &arms.aware, &aware_params)?;
                    let u = rrt_star(problem, &arms.unaware, &unaware_params)?;
                    Ok([
                        record(world_seed, pair, Arm::Aware, &a),
                        record(world_seed, pair, Arm::Unaware, &u),
                    ])
                }
                PlannerKind::PrmStarKnn | PlannerKind::PrmStarRadius => {
                    unreachable!("roadmap planners take the batch path")
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(pair_records.into_iter().flatten().collect())
}

fn roadmap_records(
    config: &ExperimentConfig,
    arms: &WorldArms,
    world_seed: u64,
    problems: &[((Config, Config), u64)],
) -> Result<Vec<RunRecord>> {
    let cap = config.max_samples.unwrap_or(
        arms.order
            * match config.dimension {
                Dim::Two => PRM_CAP_PER_ORDER_2D,
                Dim::Three => PRM_CAP_PER_ORDER_3D,
            },
    );
    let variant = match config.planner {
        PlannerKind::PrmStarKnn => PrmVariant::Knn,
        PlannerKind::PrmStarRadius => PrmVariant::Radius,
        _ => unreachable!("tree planners take the per-pair path"),
    };

    let shared_seed = stream_rng(world_seed, PRM_SEED_STREAM).next_u64();
    let mut aware_params = PlannerParams::defaults(arms.dim);
    aware_params.seed = shared_seed;
    let mut unaware_params = aware_params.clone();
    unaware_params.max_samples = cap;
    aware_params.max_samples = match config.mode {
        ResourceMode::Equal => cap,
        ResourceMode::Reduced => (cap / arms.order).max(1),
    };
    if variant == PrmVariant::Radius {
        let inputs = radius_inputs(arms, world_seed, 1)?;
        let classical = prm_star_rho(&inputs)?;
        unaware_params.rho_prm = classical;
        aware_params.rho_prm = match config.mode {
            ResourceMode::Equal => classical,
            ResourceMode::Reduced => prm_star_rho(&BoundInputs {
                group_order: arms.order,
                ..inputs
            })?,
        };
    }

    let configs: Vec<(Config, Config)> = problems.iter().map(|(p, _)| p.clone()).collect();
    let (aware_out, unaware_out) = rayon::join(
        || prm_star(&configs, &arms.aware, &aware_params, variant),
        || prm_star(&configs, &arms.unaware, &unaware_params, variant),
    );
    let (_, aware_results) = aware_out?;
    let (_, unaware_results) = unaware_out?;

    let mut records = Vec::with_capacity(2 * problems.len());
    for (pair, (a, u)) in aware_results.iter().zip(&unaware_results).enumerate() {
        records.push(record(world_seed, pair, Arm::Aware, a));
        records.push(record(world_seed, pair, Arm::Unaware, u));
    }
    Ok(records)
}
