//! The self-check suite behind the `verify` subcommand: group axioms,
//! orbit-separation facts, quotient ball probabilities, and the scaling
//! identities of the sample-complexity evaluators.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use symplan::bounds::{
    injectivity_radius_bound, mc_ball_probability, min_orbit_separation, prm_expected_samples,
    prm_star_rho, rrt_failure_bound, rrt_star_rho, unit_ball_volume, BoundInputs,
};
use symplan::geometry::{Aabb, Config, Dim, MetricWeights, ObjectPose, Rotation2, Space};
use symplan::symmetry::SymmetryGroup;
use symplan::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub checks: Vec<TheoryCheck>,
    pub all_pass: bool,
}

impl TheoryReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["name", "pass", "detail"])
            .map_err(crate::report::csv_err)?;
        for c in &self.checks {
            w.write_record([c.name.as_str(), if c.pass { "true" } else { "false" }, &c.detail])
                .map_err(crate::report::csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        format!(
            "{}/{} checks passed{}",
            passed,
            self.checks.len(),
            if self.all_pass { "" } else { " - FAILURE" }
        )
    }
}

struct Suite {
    checks: Vec<TheoryCheck>,
}

impl Suite {
    fn push(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(TheoryCheck {
            name: name.to_string(),
            pass,
            detail,
        });
    }
}

/// A planar one-object space whose translations are pinned, so distances
/// come from rotation alone.
fn rotation_only_space() -> Result<Space> {
    Space::new(
        Dim::Two,
        1,
        Aabb::new_2d([0.0, 0.0], [0.0, 0.0])?,
    )
}

fn rotation_only_config(angle: f64) -> Result<Config> {
    Config::new(vec![ObjectPose::planar(0.0, 0.0, Rotation2::new(angle))])
}

fn group_axiom_checks(suite: &mut Suite) -> Result<()> {
    let cases: Vec<(String, SymmetryGroup, usize)> = vec![
        ("cyclic(2)".into(), SymmetryGroup::cyclic_2d(2)?, 2),
        ("cyclic(3)".into(), SymmetryGroup::cyclic_2d(3)?, 3),
        ("cyclic(5)".into(), SymmetryGroup::cyclic_2d(5)?, 5),
        ("cyclic(8)".into(), SymmetryGroup::cyclic_2d(8)?, 8),
        (
            "cyclic3d(6)".into(),
            SymmetryGroup::cyclic_3d(6, [0.0, 0.0, 1.0])?,
            6,
        ),
        (
            "dihedral(4)".into(),
            SymmetryGroup::dihedral_3d(4, [0.0, 0.0, 1.0], [1.0, 0.0, 0.0])?,
            8,
        ),
        ("tetrahedral".into(), SymmetryGroup::tetrahedral()?, 12),
        ("octahedral".into(), SymmetryGroup::octahedral()?, 24),
        ("icosahedral".into(), SymmetryGroup::icosahedral()?, 60),
    ];
    for (name, group, order) in cases {
        let report = group.verify_axioms(1e-9);
        let pass = report.all_pass() && group.order() == order;
        suite.push(
            &format!("group-axioms/{name}"),
            pass,
            format!(
                "order {} (want {}), worst closure error {:.3e}",
                group.order(),
                order,
                report.max_closure_error
            ),
        );
    }
    Ok(())
}

fn separation_checks(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let space = rotation_only_space()?;
    let w = MetricWeights::uniform(1, 1.0)?;
    for n in [2usize, 3, 4, 8] {
        let group = Arc::new(SymmetryGroup::cyclic_2d(n)?);
        let sep = min_orbit_separation(&group, &space, &w, 50, rng)?;
        let want = 2.0 * PI / n as f64;
        suite.push(
            &format!("orbit-separation/cyclic({n})"),
            (sep - want).abs() <= 1e-9,
            format!("measured {sep:.12}, tight value {want:.12}"),
        );
    }
    let space3 = Space::new(Dim::Three, 1, Aabb::new_3d([0.0; 3], [0.0; 3])?)?;
    for (name, group) in [
        ("tetrahedral", SymmetryGroup::tetrahedral()?),
        ("octahedral", SymmetryGroup::octahedral()?),
        ("icosahedral", SymmetryGroup::icosahedral()?),
    ] {
        let order = group.order();
        let group = Arc::new(group);
        let sep = min_orbit_separation(&group, &space3, &w, 50, rng)?;
        let floor = 2.0 * PI / order as f64;
        suite.push(
            &format!("orbit-separation/{name}"),
            sep >= floor - 1e-9,
            format!("measured {sep:.12}, lower bound {floor:.12}"),
        );
    }
    Ok(())
}

fn injectivity_checks(suite: &mut Suite) -> Result<()> {
    let w = MetricWeights::uniform(1, 1.0)?;
    let cases = [
        ("cyclic(4)", SymmetryGroup::cyclic_2d(4)?, PI / 4.0),
        ("octahedral", SymmetryGroup::octahedral()?, PI / 24.0),
        ("trivial", SymmetryGroup::trivial(Dim::Two, 1)?, PI),
    ];
    for (name, group, want) in cases {
        let got = injectivity_radius_bound(&group, &w)?;
        suite.push(
            &format!("injectivity-radius/{name}"),
            (got - want).abs() <= 1e-12,
            format!("bound {got:.12}, expected {want:.12}"),
        );
    }
    Ok(())
}

fn ball_probability_checks(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let space = rotation_only_space()?;
    let w = MetricWeights::uniform(1, 1.0)?;
    let group = Arc::new(SymmetryGroup::cyclic_2d(4)?);
    let q = rotation_only_config(0.3)?;
    let est = mc_ball_probability(&space, &group, &q, 0.1, &w, 200_000, rng)?;
    let want = 0.25;
    suite.push(
        "ball-probability/cyclic(4)",
        (est.ratio - want).abs() <= 4.0 * est.ratio_stderr,
        format!(
            "ratio {:.5} +- {:.5}, expected {want}",
            est.ratio, est.ratio_stderr
        ),
    );

    let space3 = Space::new(Dim::Three, 1, Aabb::new_3d([0.0; 3], [0.0; 3])?)?;
    let group3 = Arc::new(SymmetryGroup::octahedral()?);
    let q3 = {
        let mut sample_rng = ChaCha8Rng::seed_from_u64(11);
        symplan::geometry::sample_uniform(&space3, &mut sample_rng)
    };
    let est3 = mc_ball_probability(&space3, &group3, &q3, 0.1, &w, 200_000, rng)?;
    let want3 = 1.0 / 24.0;
    suite.push(
        "ball-probability/octahedral",
        (est3.ratio - want3).abs() <= 4.0 * est3.ratio_stderr && est3.ratio_stderr.is_finite(),
        format!(
            "ratio {:.5} +- {:.5}, expected {want3:.5}",
            est3.ratio, est3.ratio_stderr
        ),
    );
    Ok(())
}

fn evaluator_checks(suite: &mut Suite) -> Result<()> {
    // Short-path inputs keep the tree bound nonvacuous and well inside the
    // representable range for every order tested here.
    let inputs = |order: usize| BoundInputs {
        path_length: 0.4,
        clearance: 1.0,
        step: 1.0,
        ball_probability: 0.2,
        ..BoundInputs::new(3, order)
    };

    let k = 100u64;
    let b1 = rrt_failure_bound(k, &inputs(1))?;
    // m = ceil(5 * 0.4 / 1.0) = 2, so the coefficient is k^2 * 2 / 1!.
    let direct = 2.0 * (k as f64).powi(2) * (-0.2 * k as f64).exp();
    suite.push(
        "tree-bound/classical-identity",
        (b1 - direct.min(1.0)).abs() <= 1e-12 * direct.max(1.0),
        format!("evaluator {b1:.6e}, direct {direct:.6e}"),
    );
    let b2 = rrt_failure_bound(k, &inputs(2))?;
    let b4 = rrt_failure_bound(k, &inputs(4))?;
    let ratio_21 = b2 / b1;
    let want_21 = (-(2.0 - 1.0) * 0.2 * k as f64).exp();
    let ratio_42 = b4 / b2;
    let want_42 = (-(4.0 - 2.0) * 0.2 * k as f64).exp();
    suite.push(
        "tree-bound/group-scaling",
        (ratio_21 / want_21 - 1.0).abs() <= 1e-12 && (ratio_42 / want_42 - 1.0).abs() <= 1e-12,
        format!("ratios {ratio_21:.6e}, {ratio_42:.6e}"),
    );

    let s1 = prm_expected_samples(&inputs(1))?;
    let s2 = prm_expected_samples(&inputs(2))?;
    let s3 = prm_expected_samples(&inputs(3))?;
    suite.push(
        "roadmap-bound/group-scaling",
        s2 == s1 / 2.0 && (s1 / s3 / 3.0 - 1.0).abs() <= 1e-13,
        format!("samples {s1:.6e}, {s2:.6e}, {s3:.6e}"),
    );

    let d = 3usize;
    let rho1 = prm_star_rho(&inputs(1))?;
    let rho8 = prm_star_rho(&inputs(8))?;
    let want = (8.0f64).powf(-1.0 / d as f64);
    suite.push(
        "roadmap-radius/group-scaling",
        (rho8 / rho1 / want - 1.0).abs() <= 1e-14,
        format!("ratio {:.15}, want {want:.15}", rho8 / rho1),
    );

    let mut star = inputs(1);
    star.free_volume = 2.0;
    star.optimal_cost = 1.5;
    let r1 = rrt_star_rho(&star)?;
    let mut star16 = star.clone();
    star16.group_order = 16;
    let r16 = rrt_star_rho(&star16)?;
    let want16 = (16.0f64).powf(-1.0 / (d as f64 + 1.0));
    suite.push(
        "tree-radius/group-scaling",
        (r16 / r1 / want16 - 1.0).abs() <= 1e-14,
        format!("ratio {:.15}, want {want16:.15}", r16 / r1),
    );

    let ball = unit_ball_volume(2);
    suite.push(
        "unit-ball/closed-form",
        (ball - PI).abs() <= 1e-12,
        format!("volume {ball:.15}"),
    );
    Ok(())
}

/// Runs every check; deterministic for a fixed seed.
pub fn verify_theory(seed: u64) -> Result<TheoryReport> {
    let mut suite = Suite { checks: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    group_axiom_checks(&mut suite)?;
    separation_checks(&mut suite, &mut rng)?;
    injectivity_checks(&mut suite)?;
    ball_probability_checks(&mut suite, &mut rng)?;
    evaluator_checks(&mut suite)?;
    let all_pass = suite.checks.iter().all(|c| c.pass);
    Ok(TheoryReport {
        checks: suite.checks,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use symplan::geometry::Rotation;
    use symplan::symmetry::verify_rotation_set_axioms;

    #[test]
    fn shipped_groups_pass_the_full_suite() {
        let report = verify_theory(5).unwrap();
        for check in &report.checks {
            assert!(check.pass, "{}: {}", check.name, check.detail);
        }
        assert!(report.all_pass);
    }

    #[test]
    fn suite_is_deterministic_per_seed() {
        let a = verify_theory(9).unwrap();
        let b = verify_theory(9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corrupted_rotation_set_fails_the_axiom_check() {
        // Identity plus an irrational-angle rotation is not closed.
        let broken = vec![
            Rotation::Planar(Rotation2::new(0.0)),
            Rotation::Planar(Rotation2::new(0.3)),
        ];
        let report = verify_rotation_set_axioms(&broken, 1e-9);
        assert!(!report.all_pass());
        assert!(!report.closure);
    }

    #[test]
    fn report_serializes_and_round_trips() {
        let report = verify_theory(3).unwrap();
        let json = report.to_json().unwrap();
        let back: TheoryReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        let mut csv_bytes = Vec::new();
        report.write_csv(&mut csv_bytes).unwrap();
        let text = String::from_utf8(csv_bytes).unwrap();
        assert!(text.starts_with("name,pass,detail"));
        assert!(text.lines().count() == report.checks.len() + 1);
    }
}
