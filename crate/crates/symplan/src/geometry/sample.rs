use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

use super::config::{dist_config, Config, MetricWeights, ObjectPose, Space};
use super::rotation::{Dim, Rotation, Rotation2, Rotation3};

/// Attempt cap for the joint-radius rejection loop in [`sample_ball`].
pub const BALL_SAMPLE_BUDGET: usize = 1_000_000;

fn uniform_in(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Uniform random orientation (Haar measure on SO(3)): a normalized
/// 4-dimensional Gaussian draw.
pub fn random_rotation3(rng: &mut impl Rng) -> Rotation3 {
    loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        if let Ok(r) = Rotation3::from_quat(q) {
            return r;
        }
    }
}

fn random_unit_vector3(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Uniform sample over the translation bounds and rotation group of every
/// object.
pub fn sample_uniform(space: &Space, rng: &mut impl Rng) -> Config {
    let b = &space.bounds;
    let objects = (0..space.objects)
        .map(|_| match space.dim {
            Dim::Two => ObjectPose::planar(
                uniform_in(rng, b.min[0], b.max[0]),
                uniform_in(rng, b.min[1], b.max[1]),
                Rotation2::new(rng.random_range(0.0..TAU)),
            ),
            Dim::Three => ObjectPose::spatial(
                [
                    uniform_in(rng, b.min[0], b.max[0]),
                    uniform_in(rng, b.min[1], b.max[1]),
                    uniform_in(rng, b.min[2], b.max[2]),
                ],
                random_rotation3(rng),
            ),
        })
        .collect();
    Config::new(objects).expect("sampled poses share the space's dimension")
}

/// Uniform rotation offset within geodesic radius `max_angle` of the
/// identity: angle density ∝ sin²(θ/2) (the SO(3) volume element), axis
/// uniform on the sphere.
fn random_rotation3_in_ball(rng: &mut impl Rng, max_angle: f64) -> Rotation3 {
    let cap = max_angle.min(PI);
    let ceiling = (cap / 2.0).sin().powi(2);
    let theta = loop {
        let theta = rng.random_range(0.0..cap);
        let u: f64 = rng.random_range(0.0..ceiling);
        if u <= (theta / 2.0).sin().powi(2) {
            break theta;
        }
    };
    let axis = random_unit_vector3(rng);
    Rotation3::from_axis_angle(axis, theta).expect("axis is unit length")
}

fn translation_offset(rng: &mut impl Rng, dim: Dim, r: f64) -> [f64; 3] {
    match dim {
        Dim::Two => {
            let phi = rng.random_range(0.0..TAU);
            let rad = r * rng.random_range(0.0..1.0f64).sqrt();
            [rad * phi.cos(), rad * phi.sin(), 0.0]
        }
        Dim::Three => {
            let dir = random_unit_vector3(rng);
            let rad = r * rng.random_range(0.0..1.0f64).cbrt();
            [rad * dir[0], rad * dir[1], rad * dir[2]]
        }
    }
}

/// Uniform sample in the product-metric ball of radius `r` around `center`.
///
/// Each object's translation and rotation offsets are drawn uniformly from
/// their own radius-`r` component balls; the joint draw is then rejected
/// against the product metric. Acceptance shrinks with object count, so the
/// loop is capped at [`BALL_SAMPLE_BUDGET`] attempts.
pub fn sample_ball(
    center: &Config,
    r: f64,
    weights: &MetricWeights,
    rng: &mut impl Rng,
) -> Result<Config> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ball radius {r} must be positive and finite"
        )));
    }
    if weights.len() != center.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} weights for {} objects",
            weights.len(),
            center.len()
        )));
    }
    let dim = center.dim();
    for _ in 0..BALL_SAMPLE_BUDGET {
        let mut objects = Vec::with_capacity(center.len());
        for (pose, &w) in center.objects().iter().zip(weights.weights()) {
            let dt = translation_offset(rng, dim, r);
            let mut translation = pose.translation;
            for k in 0..3 {
                translation[k] += dt[k];
            }
            let rotation = match &pose.rotation {
                Rotation::Planar(rot) => {
                    let cap = (r / w).min(PI);
                    let delta = rng.random_range(-cap..cap);
                    Rotation::Planar(rot.compose(Rotation2::new(delta)))
                }
                Rotation::Spatial(rot) => {
                    let delta = random_rotation3_in_ball(rng, r / w);
                    Rotation::Spatial(rot.compose(delta))
                }
            };
            objects.push(ObjectPose { translation, rotation });
        }
        let candidate = Config::new(objects)?;
        if dist_config(center, &candidate, weights)? <= r {
            return Ok(candidate);
        }
    }
    Err(Error::RejectionBudget {
        budget: BALL_SAMPLE_BUDGET,
    })
}
