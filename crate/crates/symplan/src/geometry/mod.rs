//! Closed-form Riemannian primitives on rigid-body configuration spaces.
//!
//! A configuration is one pose (translation + rotation) per movable object.
//! Distances use the weighted product metric
//! `sqrt(Σᵢ ‖Δtᵢ‖² + (wᵢ · dθᵢ)²)` where `dθᵢ` is the geodesic angle on
//! SO(2) or SO(3) and `wᵢ` is a per-object length scale (typically the
//! body's circumradius). Geodesics, uniform sampling, and metric-ball
//! sampling are all exact, no iterative projection anywhere.

mod config;
mod rotation;
mod sample;

pub use config::{dist_config, geodesic, Aabb, Config, MetricWeights, ObjectPose, Space};
pub use rotation::{Dim, Rotation, Rotation2, Rotation3, ANTIPODAL_TOL};
pub use sample::{
    random_rotation3, sample_ball, sample_uniform, BALL_SAMPLE_BUDGET,
};
