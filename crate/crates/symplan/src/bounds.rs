//! Sample-complexity and connection-radius bounds for planning in a
//! quotient space, with Monte-Carlo estimators for the geometric
//! quantities they consume and for the facts they rest on.
//!
//! A group of order |G| shrinks the effective space: failure
//! probabilities gain a factor of |G| in the exponent, expected sample
//! counts drop by |G|, and the asymptotic-optimality radii shrink by
//! |G|^{-1/d} (PRM*) and |G|^{-1/(d+1)} (RRT*). Every evaluator reduces
//! to its classical counterpart at |G| = 1.
//!
//! Ball volumes use the Euclidean d-ball formula throughout. That is an
//! approximation valid in the small-radius regime where these bounds
//! apply (radii below the injectivity radius and the curvature scale);
//! the Monte-Carlo checks quantify how far it stretches.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::collision::{is_free, MovingObject, World};
use crate::error::{Error, Result};
use crate::geometry::{
    dist_config, sample_ball, sample_uniform, Config, Dim, MetricWeights, Space,
};
use crate::quotient::{project, q_dist, sample_local_q};
use crate::symmetry::SymmetryGroup;

/// Fixed fan-out for parallel Monte-Carlo: results are sums over a fixed
/// set of RNG substreams, so they do not depend on the thread count.
const MC_CHUNKS: u64 = 64;

/// Euler-Mascheroni constant, for the harmonic-number tail formula.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Inputs shared by the bound evaluators. Symbols: path length `path_length`
/// (ℓ), clearance `clearance` (δ), steering step `step` (η), configuration
/// dimension `dim` (d), group order `group_order` (|G|), probability
/// `ball_probability` that one uniform sample lands in a ball of radius
/// ν/5 (p), free-space volume `free_volume`, Euclidean unit-ball volume
/// `unit_ball_volume`, optimal cost `optimal_cost` (c*), and the RRT*
/// constants `theta` ∈ (0, 1/4), `mu` ∈ (0, 1), `epsilon` ∈ (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub path_length: f64,
    pub clearance: f64,
    pub step: f64,
    pub dim: usize,
    pub group_order: usize,
    pub ball_probability: f64,
    pub free_volume: f64,
    pub unit_ball_volume: f64,
    pub optimal_cost: f64,
    pub theta: f64,
    pub mu: f64,
    pub epsilon: f64,
}

impl BoundInputs {
    /// Reasonable defaults for a given dimension; callers override the
    /// problem-specific fields.
    pub fn new(dim: usize, group_order: usize) -> BoundInputs {
        BoundInputs {
            path_length: 1.0,
            clearance: 0.1,
            step: 0.1,
            dim,
            group_order,
            ball_probability: 0.01,
            free_volume: 1.0,
            unit_ball_volume: unit_ball_volume(dim),
            optimal_cost: 1.0,
            theta: 0.2,
            mu: 0.5,
            epsilon: 0.5,
        }
    }

    /// ν = min{δ, η}: the scale at which the RRT bound discretizes the
    /// reference path.
    pub fn nu(&self) -> f64 {
        self.clearance.min(self.step)
    }

    /// m = ⌈5ℓ/ν⌉: number of path segments in the RRT failure bound.
    pub fn m(&self) -> f64 {
        (5.0 * self.path_length / self.nu()).ceil()
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("path_length", self.path_length),
            ("clearance", self.clearance),
            ("step", self.step),
            ("ball_probability", self.ball_probability),
            ("free_volume", self.free_volume),
            ("unit_ball_volume", self.unit_ball_volume),
            ("optimal_cost", self.optimal_cost),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if self.group_order == 0 {
            return Err(Error::InvalidArgument("group order must be positive".into()));
        }
        if self.ball_probability > 1.0 {
            return Err(Error::InvalidArgument(
                "ball_probability must be at most 1".into(),
            ));
        }
        Ok(())
    }

    fn validate_rrt_star(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 0.25) {
            return Err(Error::InvalidArgument(format!(
                "theta must lie in (0, 1/4), got {}",
                self.theta
            )));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "mu must lie in (0, 1), got {}",
                self.mu
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Volume of the Euclidean unit d-ball, π^{d/2} / Γ(d/2 + 1).
pub fn unit_ball_volume(d: usize) -> f64 {
    let d = d as f64;
    ((d / 2.0) * PI.ln() - ln_gamma(d / 2.0 + 1.0)).exp()
}

/// Probability that a uniform sample lands in a metric ball of the given
/// radius, under the flat-ball approximation: ζ_d r^d / Vol(Q), capped
/// at 1.
pub fn uniform_ball_probability(radius: f64, dim: usize, space_volume: f64) -> f64 {
    (unit_ball_volume(dim) * radius.powi(dim as i32) / space_volume).min(1.0)
}

/// Metric volume of the configuration space: per object, the translation
/// box measure times the rotation-factor volume (a circle of
/// circumference 2πw in the plane; a copy of SO(3) with volume 8π²w³ in
/// space, under the angle metric scaled by w).
pub fn space_volume(space: &Space, w: &MetricWeights) -> Result<f64> {
    if w.len() != space.objects {
        return Err(Error::ShapeMismatch(format!(
            "{} weights for {} objects",
            w.len(),
            space.objects
        )));
    }
    let box_measure: f64 = match space.dim {
        Dim::Two => space.bounds.extent(0) * space.bounds.extent(1),
        Dim::Three => (0..3).map(|k| space.bounds.extent(k)).product(),
    };
    let mut volume = 1.0;
    for i in 0..space.objects {
        let wi = w.weights()[i];
        let rot = match space.dim {
            Dim::Two => 2.0 * PI * wi,
            Dim::Three => 8.0 * PI * PI * wi.powi(3),
        };
        volume *= box_measure * rot;
    }
    Ok(volume)
}

/// Upper bound on the probability that an RRT has not reached the goal
/// region after `k` iterations:
/// (1/(m−1)!) k^m m e^{−|G|pk}, with m = ⌈5ℓ/ν⌉ and ν = min{δ, η}.
/// Evaluated in the log domain and clamped to [0, 1].
pub fn rrt_failure_bound(k: u64, inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    if k == 0 {
        return Err(Error::InvalidArgument("iteration count must be positive".into()));
    }
    let m = inputs.m();
    let kf = k as f64;
    // 1/(m-1)! = 1/Γ(m).
    let ln_coeff = -ln_gamma(m) + m * kf.ln() + m.ln();
    let exponent = inputs.group_order as f64 * inputs.ball_probability * kf;
    // Two factors rather than one exp keep the |G|-scaling an exact
    // ratio of exponentials.
    let value = ln_coeff.exp() * (-exponent).exp();
    Ok(value.min(1.0))
}

/// Harmonic number H(n), exact summation for moderate n and the
/// asymptotic expansion beyond it.
pub fn harmonic(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= 10_000_000 {
        (1..=n).map(|i| 1.0 / i as f64).sum()
    } else {
        let nf = n as f64;
        nf.ln() + EULER_GAMMA + 1.0 / (2.0 * nf) - 1.0 / (12.0 * nf * nf)
    }
}

/// Upper bound on the expected number of samples for a PRM to connect a
/// δ-clear path of length ℓ: H(⌈2ℓ/δ⌉) Vol(Q_free) / (|G| Vol(B_{δ/2})).
/// The harmonic argument is rounded up, keeping the bound an upper bound.
pub fn prm_expected_samples(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let n = (2.0 * inputs.path_length / inputs.clearance).ceil() as u64;
    let ball = unit_ball_volume(inputs.dim) * (inputs.clearance / 2.0).powi(inputs.dim as i32);
    let classical = harmonic(n) * inputs.free_volume / ball;
    // |G| enters as one final division: the quotient bound is exactly the
    // classical bound over the group order.
    Ok(classical / inputs.group_order as f64)
}

/// Minimum radius-scaling constant for radius-PRM* to stay
/// asymptotically optimal in the quotient:
/// 2 (1+1/d)^{1/d} (Vol(Q_free)/Vol(B₁))^{1/d} |G|^{−1/d}.
pub fn prm_star_rho(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let d = inputs.dim as f64;
    let classical =
        2.0 * (1.0 + 1.0 / d).powf(1.0 / d) * (inputs.free_volume / inputs.unit_ball_volume).powf(1.0 / d);
    Ok(classical * (inputs.group_order as f64).powf(-1.0 / d))
}

/// Minimum radius-scaling constant for RRT* to return paths within
/// (1+ε)c* with probability approaching one:
/// (2+θ) ((1+ε/4) c* Vol(Q_free) / ((d+1) θ (1−μ) Vol(B₁)))^{1/(d+1)} |G|^{−1/(d+1)}.
pub fn rrt_star_rho(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    inputs.validate_rrt_star()?;
    let d = inputs.dim as f64;
    let inner = (1.0 + inputs.epsilon / 4.0) * inputs.optimal_cost * inputs.free_volume
        / ((d + 1.0) * inputs.theta * (1.0 - inputs.mu) * inputs.unit_ball_volume);
    let classical = (2.0 + inputs.theta) * inner.powf(1.0 / (d + 1.0));
    Ok(classical * (inputs.group_order as f64).powf(-1.0 / (d + 1.0)))
}

/// Rejection-sampling estimate of the free-space volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    /// Estimated Vol(Q_free) in the base space.
    pub base: f64,
    /// Vol(Q_free)/|G|: the quotient free volume (the projection is a
    /// |G|-fold local isometry, so this is exact given the base volume).
    pub quotient: f64,
    /// One standard error of `base`.
    pub stderr: f64,
    /// Fraction of samples that were collision-free.
    pub free_fraction: f64,
    pub samples: usize,
}

/// Splits `total` Monte-Carlo trials across fixed RNG substreams and sums
/// per-chunk hit counts; the merge is integer addition, so the result is
/// independent of scheduling. `hits` receives a fresh substream RNG and
/// its trial count and returns how many of its trials hit.
fn parallel_hits<F>(total: usize, rng: &mut ChaCha8Rng, hits: F) -> Vec<u64>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Vec<u64> + Sync,
{
    let base_seed = rng.next_u64();
    let per_chunk = total / MC_CHUNKS as usize;
    let remainder = total % MC_CHUNKS as usize;
    (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let mut sub = ChaCha8Rng::seed_from_u64(base_seed);
            sub.set_stream(chunk + 1);
            let n = per_chunk + usize::from((chunk as usize) < remainder);
            hits(&mut sub, n)
        })
        .reduce(Vec::new, |mut a, b| {
            if a.is_empty() {
                return b;
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        })
}

/// Estimates Vol(Q_free) by rejection sampling: the free fraction of
/// uniform configurations times the metric volume of the space. The
/// quotient free volume is the base estimate divided by |G|.
pub fn estimate_free_volume(
    world: &World,
    objects: &[MovingObject],
    group: &Arc<SymmetryGroup>,
    w: &MetricWeights,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    if group.objects() != objects.len() || group.dim() != world.dim {
        return Err(Error::GroupMismatch(
            "group does not act on this problem".into(),
        ));
    }
    let space = Space {
        dim: world.dim,
        objects: objects.len(),
        bounds: world.bounds,
    };
    let total_volume = space_volume(&space, w)?;
    let counts = parallel_hits(samples, rng, |sub, n| {
        let mut free = 0u64;
        for _ in 0..n {
            let q = sample_uniform(&space, sub);
            if is_free(world, objects, &q) {
                free += 1;
            }
        }
        vec![free]
    });
    let free = counts[0];
    if free == 0 {
        return Err(Error::NoFreeSamples { samples });
    }
    let fraction = free as f64 / samples as f64;
    let stderr_fraction = (fraction * (1.0 - fraction) / samples as f64).sqrt();
    Ok(VolumeEstimate {
        base: fraction * total_volume,
        quotient: fraction * total_volume / group.order() as f64,
        stderr: stderr_fraction * total_volume,
        free_fraction: fraction,
        samples,
    })
}

/// Empirical ball probabilities in the base space and the quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallProbability {
    pub p_base: f64,
    pub p_quotient: f64,
    /// p_base / p_quotient; estimates 1/|G| for ε below the injectivity
    /// radius bound.
    pub ratio: f64,
    /// One standard error of `ratio` (delta method on the two counts).
    pub ratio_stderr: f64,
    pub samples: usize,
}

/// Estimates P[dist(q', q) < ε] and P[q_dist([q'], [q]) < ε] for a
/// uniform sample q'. Their ratio estimates 1/|G|: the quotient ball
/// pulls back to |G| disjoint base balls. Requires ε below the
/// injectivity radius bound, where that disjointness holds.
pub fn mc_ball_probability(
    space: &Space,
    group: &Arc<SymmetryGroup>,
    q: &Config,
    eps: f64,
    w: &MetricWeights,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<BallProbability> {
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let bound = injectivity_radius_bound(group, w)?;
    if eps >= bound {
        return Err(Error::InvalidArgument(format!(
            "radius {eps} is not below the injectivity radius bound {bound}"
        )));
    }
    let center = project(q.clone(), Arc::clone(group))?;
    let counts = parallel_hits(samples, rng, |sub, n| {
        let mut base = 0u64;
        let mut quotient = 0u64;
        for _ in 0..n {
            let s = sample_uniform(space, sub);
            if dist_config(q, &s, w).expect("sampled config matches the space") < eps {
                base += 1;
            }
            let class = project(s, Arc::clone(group)).expect("sample lies in the space");
            let (dq, _) = q_dist(&center, &class, w).expect("classes share the group");
            if dq < eps {
                quotient += 1;
            }
        }
        vec![base, quotient]
    });
    let n = samples as f64;
    let p_base = counts[0] as f64 / n;
    let p_quotient = counts[1] as f64 / n;
    let ratio = if p_quotient > 0.0 { p_base / p_quotient } else { 0.0 };
    let ratio_stderr = if counts[0] > 0 && counts[1] > 0 {
        let var_rel = (1.0 - p_base) / (n * p_base) + (1.0 - p_quotient) / (n * p_quotient);
        ratio * var_rel.sqrt()
    } else {
        f64::INFINITY
    };
    Ok(BallProbability {
        p_base,
        p_quotient,
        ratio,
        ratio_stderr,
        samples,
    })
}

/// Lower bound on the injectivity radius of the quotient:
/// r_inj(Q)/|G|, with r_inj(Q) the minimum over rotational factors of
/// w_i·π (the bounded translation factor is flat and not binding). Tight
/// for cyclic groups acting on a single planar rotation.
pub fn injectivity_radius_bound(group: &SymmetryGroup, w: &MetricWeights) -> Result<f64> {
    if w.len() != group.objects() {
        return Err(Error::ShapeMismatch(format!(
            "{} weights for {} objects",
            w.len(),
            group.objects()
        )));
    }
    let r_inj_base = w
        .weights()
        .iter()
        .map(|wi| wi * PI)
        .fold(f64::INFINITY, f64::min);
    Ok(r_inj_base / group.order() as f64)
}

/// Empirical minimum over random configurations and distinct group
/// elements g, h of dist(g·q, h·q). The injectivity-radius bound rests
/// on this being at least 2·r_inj(Q)/|G|; for cyclic groups on a planar
/// rotation it equals 2π/n exactly. The trivial group has no distinct
/// pair, reported as infinity.
pub fn min_orbit_separation<R: rand::Rng>(
    group: &Arc<SymmetryGroup>,
    space: &Space,
    w: &MetricWeights,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if group.objects() != space.objects || group.dim() != space.dim {
        return Err(Error::GroupMismatch(
            "group does not act on this space".into(),
        ));
    }
    let order = group.order();
    if order == 1 {
        return Ok(f64::INFINITY);
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trial count must be positive".into()));
    }
    let mut min = f64::INFINITY;
    for _ in 0..trials {
        let q = sample_uniform(space, rng);
        for g in 0..order {
            let qg = group.act(g, &q)?;
            for h in (g + 1)..order {
                let qh = group.act(h, &q)?;
                min = min.min(dist_config(&qg, &qh, w)?);
            }
        }
    }
    Ok(min)
}

/// Outcome of probing a path for δ-clearance in the base space and in
/// the quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClearanceCheck {
    /// Every probe in a base-space δ-ball around a waypoint was free.
    pub base_clear: bool,
    /// Every probe in a quotient δ-ball around a waypoint class was free.
    pub quotient_clear: bool,
    /// Total probes drawn (per kind).
    pub probes: usize,
}

/// Probes δ-balls around each waypoint, in the base space and in the
/// quotient. Free space is G-invariant, so a δ-clear base path projects
/// to a δ-clear quotient path; the probes witness that implication.
/// Requires δ below the injectivity radius bound, where quotient balls
/// are isometric images of base balls.
#[allow(clippy::too_many_arguments)]
pub fn clearance_check<R: rand::Rng>(
    waypoints: &[Config],
    delta: f64,
    world: &World,
    objects: &[MovingObject],
    group: &Arc<SymmetryGroup>,
    w: &MetricWeights,
    probes_per_waypoint: usize,
    rng: &mut R,
) -> Result<ClearanceCheck> {
    if waypoints.is_empty() {
        return Err(Error::InvalidArgument("path has no waypoints".into()));
    }
    if probes_per_waypoint == 0 {
        return Err(Error::InvalidArgument("probe count must be positive".into()));
    }
    let bound = injectivity_radius_bound(group, w)?;
    if !(delta > 0.0) || delta >= bound {
        return Err(Error::InvalidArgument(format!(
            "clearance {delta} is not below the injectivity radius bound {bound}"
        )));
    }
    let mut base_clear = true;
    let mut quotient_clear = true;
    let mut probes = 0usize;
    for q in waypoints {
        let class = project(q.clone(), Arc::clone(group))?;
        for _ in 0..probes_per_waypoint {
            let base_probe = sample_ball(q, delta, w, rng)?;
            if !is_free(world, objects, &base_probe) {
                base_clear = false;
            }
            let quotient_probe = sample_local_q(&class, delta, w, rng)?;
            if !is_free(world, objects, quotient_probe.representative()) {
                quotient_clear = false;
            }
            probes += 1;
        }
    }
    Ok(ClearanceCheck {
        base_clear,
        quotient_clear,
        probes,
    })
}
