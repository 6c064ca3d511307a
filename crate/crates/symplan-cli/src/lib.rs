//! Benchmark harness for the planning library: paired symmetry-aware vs.
//! symmetry-unaware runs over seeded random worlds, dimension-scaling
//! sweeps, and a theory self-check suite.
//!
//! Everything except wall-clock fields is deterministic for a fixed
//! configuration: worlds, problems, and planner seeds are derived from the
//! experiment seed through fixed ChaCha substreams, and the worker pool
//! (capped by `SYMPLAN_THREADS`) never influences results, only timing.

pub mod experiment;
pub mod objects;
pub mod report;
pub mod scaling;
pub mod theory;

pub use experiment::{
    run_experiment, run_experiment_objects, worker_pool, ExperimentConfig, PlannerKind,
    ResourceMode, WorldSettings,
};
pub use objects::ObjectKind;
pub use report::{aggregate, Aggregates, Arm, ArmStats, Report, RunRecord};
pub use scaling::{
    linear_fit_r2, measure_qdist_times, run_dimension_scaling, ScalingConfig, ScalingReport,
    ScalingRow,
};
pub use theory::{verify_theory, TheoryCheck, TheoryReport};
