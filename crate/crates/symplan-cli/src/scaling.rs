//! Dimension scaling: m stacked rectangles, group (C2)^m. The group order
//! doubles with every copy while the quotient distance is factored per
//! object, so its cost must grow linearly in m.

use std::hint::black_box;
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use symplan::collision::{object_group, object_weights, World};
use symplan::geometry::Space;
use symplan::quotient::{q_dist, sample_global_q, ClassPoint};
use symplan::{Error, Result};

use crate::experiment::{
    run_experiment_objects, ExperimentConfig, PlannerKind, ResourceMode, WorldSettings,
};
use crate::objects::ObjectKind;
use crate::report::{csv_err, Aggregates};

/// BiRRT cap from the reference protocol, used when the config gives none.
const SCALING_BIRRT_CAP: usize = 40_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    /// Largest copy count; rows cover m = 1..=max_m.
    pub max_m: usize,
    pub worlds: usize,
    pub pairs: usize,
    pub mode: ResourceMode,
    pub seed: u64,
    pub max_samples: Option<usize>,
    /// Distance evaluations per timing measurement.
    pub qdist_evals: usize,
}

impl ScalingConfig {
    pub fn new() -> ScalingConfig {
        ScalingConfig {
            max_m: 5,
            worlds: 2,
            pairs: 10,
            mode: ResourceMode::Equal,
            seed: 0,
            max_samples: None,
            qdist_evals: 200_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_m < 1 {
            return Err(Error::InvalidArgument("max_m must be positive".into()));
        }
        if self.worlds < 1 || self.pairs < 1 {
            return Err(Error::InvalidArgument("counts must be positive".into()));
        }
        if self.qdist_evals < 1 {
            return Err(Error::InvalidArgument("qdist_evals must be positive".into()));
        }
        Ok(())
    }
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub m: usize,
    pub group_order: usize,
    pub config_dim: usize,
    /// Nanoseconds per quotient-distance call (best of three passes).
    pub qdist_ns: f64,
    pub aggregates: Aggregates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub config: ScalingConfig,
    pub rows: Vec<ScalingRow>,
    /// Coefficient of determination of the best linear fit to
    /// (m, qdist_ns); near 1 means per-object cost, not per-element cost.
    pub qdist_linear_r2: f64,
    /// qdist_ns at m = max_m over qdist_ns at m = 1.
    pub qdist_time_ratio: f64,
}

impl ScalingReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per m; fit quality lives in the JSON report and the summary.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "m",
            "group_order",
            "config_dim",
            "qdist_ns",
            "pairs",
            "both_succeeded",
            "aware_success_rate",
            "unaware_success_rate",
            "length_improvement",
            "runtime_improvement",
        ])
        .map_err(csv_err)?;
        for row in &self.rows {
            let a = &row.aggregates;
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            w.write_record([
                row.m.to_string(),
                row.group_order.to_string(),
                row.config_dim.to_string(),
                row.qdist_ns.to_string(),
                a.pairs.to_string(),
                a.both_succeeded.to_string(),
                a.aware.success_rate.to_string(),
                a.unaware.success_rate.to_string(),
                opt(a.length_improvement),
                opt(a.runtime_improvement),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "m = 1..{} | qdist linear fit R^2 {:.4} | time({})/time(1) {:.2}",
            self.rows.len(),
            self.qdist_linear_r2,
            self.rows.len(),
            self.qdist_time_ratio,
        )
    }
}

/// Times the quotient distance on a pool of sampled classes in the
/// m-rectangle space (empty world, so only the metric is measured).
/// Returns nanoseconds per call, best of `passes` passes.
fn time_qdist(m: usize, evals: usize, seed: u64, passes: usize) -> Result<f64> {
    let objects = ObjectKind::RectangleStack(m).objects()?;
    let group = Arc::new(object_group(&objects)?);
    let weights = object_weights(&objects)?;
    let settings = WorldSettings::defaults(symplan::geometry::Dim::Two);
    let world = World::empty(symplan::geometry::Dim::Two, settings.bounds);
    let space = Space {
        dim: world.dim,
        objects: objects.len(),
        bounds: world.bounds,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<ClassPoint> = (0..512)
        .map(|_| sample_global_q(&space, Arc::clone(&group), &mut rng))
        .collect::<Result<_>>()?;

    let mut best = f64::INFINITY;
    for _ in 0..passes {
        let mut sink = 0.0;
        let start = Instant::now();
        for i in 0..evals {
            let a = &pool[(i * 7) % pool.len()];
            let b = &pool[(i * 13 + 1) % pool.len()];
            sink += q_dist(black_box(a), black_box(b), &weights)?.0;
        }
        let elapsed = start.elapsed().as_secs_f64();
        black_box(sink);
        best = best.min(elapsed * 1e9 / evals as f64);
    }
    Ok(best)
}

/// Per-m quotient-distance timings, nanoseconds per call.
pub fn measure_qdist_times(max_m: usize, evals: usize, seed: u64) -> Result<Vec<(usize, f64)>> {
    (1..=max_m).map(|m| Ok((m, time_qdist(m, evals, seed, 3)?))).collect()
}

/// Least-squares line through the points; returns (r_squared, slope,
/// intercept). A constant input gets r_squared 1 when the fit is exact.
pub fn linear_fit_r2(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    assert!(points.len() >= 2, "fit needs at least two points");
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| {
            let e = p.1 - (intercept + slope * p.0);
            e * e
        })
        .sum();
    let r2 = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    (r2, slope, intercept)
}

/// BiRRT paired runs plus the distance-timing fit for m = 1..=max_m.
pub fn run_dimension_scaling(config: &ScalingConfig) -> Result<ScalingReport> {
    config.validate()?;
    let times = measure_qdist_times(config.max_m, config.qdist_evals, config.seed)?;

    let mut rows = Vec::with_capacity(config.max_m);
    for &(m, qdist_ns) in &times {
        let kind = ObjectKind::RectangleStack(m);
        let mut exp = ExperimentConfig::new(kind, PlannerKind::Birrt);
        exp.worlds = config.worlds;
        exp.pairs = config.pairs;
        exp.mode = config.mode;
        exp.seed = config.seed.wrapping_add(m as u64);
        exp.max_samples = Some(config.max_samples.unwrap_or(SCALING_BIRRT_CAP));
        let report = run_experiment_objects(&exp, kind.objects()?)?;
        rows.push(ScalingRow {
            m,
            group_order: kind.group_order(),
            config_dim: 3 * m,
            qdist_ns,
            aggregates: report.aggregates,
        });
    }

    let points: Vec<(f64, f64)> = times.iter().map(|&(m, t)| (m as f64, t)).collect();
    let (qdist_linear_r2, _, _) = if points.len() >= 2 {
        linear_fit_r2(&points)
    } else {
        (1.0, 0.0, points[0].1)
    };
    let qdist_time_ratio = times.last().expect("max_m >= 1").1 / times[0].1;

    Ok(ScalingReport {
        config: config.clone(),
        rows,
        qdist_linear_r2,
        qdist_time_ratio,
    })
}
