//! Run records, paired aggregates, and the CSV/JSON writers.
//!
//! CSV column order is fixed:
//! `world_seed,pair,arm,status,length,samples,wall_time_s`
//! with `length` left empty for runs that found no path.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};
use symplan::planners::PlanStatus;
use symplan::{Error, Result};

use crate::experiment::ExperimentConfig;

/// Which side of a paired comparison a run belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    /// Planner over the quotient by the object's symmetry group.
    Aware,
    /// The same planner over the trivial group.
    Unaware,
}

impl Arm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Arm::Aware => "aware",
            Arm::Unaware => "unaware",
        }
    }
}

/// One planner execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Seed the world was generated from (also the per-world RNG key).
    pub world_seed: u64,
    /// Start/goal pair index within the world.
    pub pair: usize,
    pub arm: Arm,
    pub status: PlanStatus,
    /// Quotient-metric path length; `None` unless `status` is success.
    pub length: Option<f64>,
    /// Samples drawn (roadmap planners: vertices kept).
    pub samples: usize,
    /// End-to-end seconds. Excluded from determinism comparisons.
    pub wall_time: f64,
}

/// Per-arm summary over the pairs where both arms succeeded (failed pairs
/// are omitted from the averages so the arms stay comparable).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmStats {
    pub successes: usize,
    /// Successes over all pairs, not just mutually solved ones.
    pub success_rate: f64,
    pub mean_length: Option<f64>,
    pub stddev_length: Option<f64>,
    pub mean_runtime: Option<f64>,
    pub stddev_runtime: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    /// Distinct (world, pair) problems.
    pub pairs: usize,
    /// Problems both arms solved.
    pub both_succeeded: usize,
    pub aware: ArmStats,
    pub unaware: ArmStats,
    /// Mean over mutually solved pairs of unaware length / aware length;
    /// above 1 means the aware arm found shorter paths.
    pub length_improvement: Option<f64>,
    /// Mean over mutually solved pairs of unaware runtime / aware runtime.
    /// Reported but hardware-dependent, so never gated on.
    pub runtime_improvement: Option<f64>,
    /// Mutually solved pairs where the aware path was strictly shorter.
    pub aware_shorter: usize,
    /// Mutually solved pairs where the unaware path was strictly shorter.
    pub unaware_shorter: usize,
    /// One-sided sign test against "the unaware arm is shorter or equal";
    /// small values favor the aware arm. Ties are dropped.
    pub sign_test_p: Option<f64>,
}

/// A full experiment: the configuration it ran under, every record sorted
/// by (world seed, pair, arm), and the paired aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    pub aggregates: Aggregates,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Report> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes the record table; columns documented at the top of this file.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "world_seed",
            "pair",
            "arm",
            "status",
            "length",
            "samples",
            "wall_time_s",
        ])
        .map_err(csv_err)?;
        for r in &self.records {
            w.write_record([
                r.world_seed.to_string(),
                r.pair.to_string(),
                r.arm.as_str().to_string(),
                status_str(r.status).to_string(),
                r.length.map(|l| l.to_string()).unwrap_or_default(),
                r.samples.to_string(),
                r.wall_time.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Two-line human summary for stderr.
    pub fn summary(&self) -> String {
        let a = &self.aggregates;
        let fmt_opt = |v: Option<f64>| match v {
            Some(v) => format!("{v:.4}"),
            None => "n/a".to_string(),
        };
        format!(
            "pairs {} | both solved {} | success aware {:.1}% unaware {:.1}%\n\
             length improvement {} | runtime improvement {} | sign test p {}",
            a.pairs,
            a.both_succeeded,
            100.0 * a.aware.success_rate,
            100.0 * a.unaware.success_rate,
            fmt_opt(a.length_improvement),
            fmt_opt(a.runtime_improvement),
            fmt_opt(a.sign_test_p),
        )
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv write failed: {e}"))
}

pub fn status_str(s: PlanStatus) -> &'static str {
    match s {
        PlanStatus::Success => "success",
        PlanStatus::Exhausted => "exhausted",
        PlanStatus::InfeasibleEndpoints => "infeasible-endpoints",
    }
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Sample standard deviation; `None` below two observations.
pub fn stddev(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// One-sided sign test p-value: probability of at least `wins` successes
/// in `wins + losses` fair coin flips. `None` when every pair tied.
pub fn sign_test_p(wins: usize, losses: usize) -> Option<f64> {
    let n = wins + losses;
    if n == 0 {
        return None;
    }
    if wins == 0 {
        return Some(1.0);
    }
    let binom = Binomial::new(0.5, n as u64).expect("0.5 is a valid probability");
    Some(binom.sf(wins as u64 - 1))
}

/// Folds the per-run records into paired aggregates. Records are grouped
/// by (world seed, pair); averages and the sign test only see pairs where
/// both arms reported success.
pub fn aggregate(records: &[RunRecord]) -> Aggregates {
    let mut by_pair: BTreeMap<(u64, usize), [Option<&RunRecord>; 2]> = BTreeMap::new();
    for r in records {
        let slot = by_pair.entry((r.world_seed, r.pair)).or_insert([None, None]);
        slot[r.arm as usize] = Some(r);
    }
    let pairs = by_pair.len();
    let success = |r: Option<&&RunRecord>| matches!(r, Some(r) if r.status == PlanStatus::Success);

    let mut aware_successes = 0;
    let mut unaware_successes = 0;
    let mut a_len = Vec::new();
    let mut u_len = Vec::new();
    let mut a_time = Vec::new();
    let mut u_time = Vec::new();
    let mut len_ratio = Vec::new();
    let mut time_ratio = Vec::new();
    let mut aware_shorter = 0;
    let mut unaware_shorter = 0;

    for slot in by_pair.values() {
        let [aware, unaware] = slot;
        if success(aware.as_ref()) {
            aware_successes += 1;
        }
        if success(unaware.as_ref()) {
            unaware_successes += 1;
        }
        let (Some(a), Some(u)) = (aware, unaware) else {
            continue;
        };
        if a.status != PlanStatus::Success || u.status != PlanStatus::Success {
            continue;
        }
        let (la, lu) = (
            a.length.expect("success carries a length"),
            u.length.expect("success carries a length"),
        );
        a_len.push(la);
        u_len.push(lu);
        a_time.push(a.wall_time);
        u_time.push(u.wall_time);
        len_ratio.push(lu / la);
        if a.wall_time > 0.0 {
            time_ratio.push(u.wall_time / a.wall_time);
        }
        if lu > la {
            aware_shorter += 1;
        } else if la > lu {
            unaware_shorter += 1;
        }
    }

    let rate = |n: usize| if pairs == 0 { 0.0 } else { n as f64 / pairs as f64 };
    Aggregates {
        pairs,
        both_succeeded: a_len.len(),
        aware: ArmStats {
            successes: aware_successes,
            success_rate: rate(aware_successes),
            mean_length: mean(&a_len),
            stddev_length: stddev(&a_len),
            mean_runtime: mean(&a_time),
            stddev_runtime: stddev(&a_time),
        },
        unaware: ArmStats {
            successes: unaware_successes,
            success_rate: rate(unaware_successes),
            mean_length: mean(&u_len),
            stddev_length: stddev(&u_len),
            mean_runtime: mean(&u_time),
            stddev_runtime: stddev(&u_time),
        },
        length_improvement: mean(&len_ratio),
        runtime_improvement: mean(&time_ratio),
        aware_shorter,
        unaware_shorter,
        sign_test_p: sign_test_p(aware_shorter, unaware_shorter),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rec(seed: u64, pair: usize, arm: Arm, length: Option<f64>) -> RunRecord {
        RunRecord {
            world_seed: seed,
            pair,
            arm,
            status: if length.is_some() {
                PlanStatus::Success
            } else {
                PlanStatus::Exhausted
            },
            length,
            samples: 10,
            wall_time: 0.5,
        }
    }

    #[test]
    fn aggregates_use_only_mutually_solved_pairs() {
        let records = vec![
            rec(1, 0, Arm::Aware, Some(2.0)),
            rec(1, 0, Arm::Unaware, Some(3.0)),
            rec(1, 1, Arm::Aware, Some(5.0)),
            rec(1, 1, Arm::Unaware, None),
            rec(2, 0, Arm::Aware, None),
            rec(2, 0, Arm::Unaware, Some(4.0)),
        ];
        let agg = aggregate(&records);
        assert_eq!(agg.pairs, 3);
        assert_eq!(agg.both_succeeded, 1);
        assert_eq!(agg.aware.successes, 2);
        assert_eq!(agg.unaware.successes, 2);
        assert_relative_eq!(agg.aware.mean_length.unwrap(), 2.0);
        assert_relative_eq!(agg.unaware.mean_length.unwrap(), 3.0);
        assert_relative_eq!(agg.length_improvement.unwrap(), 1.5);
        assert_eq!(agg.aware_shorter, 1);
        assert_eq!(agg.unaware_shorter, 0);
        assert_relative_eq!(agg.sign_test_p.unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn sign_test_matches_binomial_tail() {
        // P(X >= 9 | n = 10, p = 1/2) = (10 + 1) / 1024.
        assert_relative_eq!(sign_test_p(9, 1).unwrap(), 11.0 / 1024.0, epsilon = 1e-12);
        assert_relative_eq!(sign_test_p(0, 5).unwrap(), 1.0);
        assert!(sign_test_p(0, 0).is_none());
        // All ten wins: 1/1024.
        assert_relative_eq!(sign_test_p(10, 0).unwrap(), 1.0 / 1024.0, epsilon = 1e-12);
    }

    #[test]
    fn stddev_is_the_sample_estimate() {
        assert!(stddev(&[1.0]).is_none());
        assert_relative_eq!(stddev(&[1.0, 3.0]).unwrap(), 2.0f64.sqrt(), epsilon = 1e-12);
    }
}
