use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::rotation::{Dim, Rotation, Rotation2, Rotation3};

/// Pose of one rigid body: a translation and a rotation.
///
/// Planar poses keep `translation[2] == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectPose {
    pub translation: [f64; 3],
    pub rotation: Rotation,
}

impl ObjectPose {
    pub fn planar(x: f64, y: f64, rotation: Rotation2) -> ObjectPose {
        ObjectPose {
            translation: [x, y, 0.0],
            rotation: Rotation::Planar(rotation),
        }
    }

    pub fn spatial(translation: [f64; 3], rotation: Rotation3) -> ObjectPose {
        ObjectPose {
            translation,
            rotation: Rotation::Spatial(rotation),
        }
    }

    pub fn dim(&self) -> Dim {
        self.rotation.dim()
    }

    fn validate(&self) -> Result<()> {
        if self.dim() == Dim::Two && self.translation[2] != 0.0 {
            return Err(Error::ShapeMismatch(
                "planar pose has a nonzero z translation".into(),
            ));
        }
        Ok(())
    }

    /// Maps a point from the body frame to the world frame.
    pub fn transform(&self, p: [f64; 3]) -> [f64; 3] {
        match &self.rotation {
            Rotation::Planar(r) => {
                let [x, y] = r.rotate([p[0], p[1]]);
                [
                    x + self.translation[0],
                    y + self.translation[1],
                    self.translation[2],
                ]
            }
            Rotation::Spatial(r) => {
                let v = r.rotate(p);
                [
                    v[0] + self.translation[0],
                    v[1] + self.translation[1],
                    v[2] + self.translation[2],
                ]
            }
        }
    }
}

/// A full configuration: one pose per movable object.
///
/// All poses share the same ambient dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ObjectPose>", into = "Vec<ObjectPose>")]
pub struct Config {
    objects: Vec<ObjectPose>,
}

impl TryFrom<Vec<ObjectPose>> for Config {
    type Error = Error;

    fn try_from(objects: Vec<ObjectPose>) -> Result<Self> {
        Config::new(objects)
    }
}

impl From<Config> for Vec<ObjectPose> {
    fn from(c: Config) -> Vec<ObjectPose> {
        c.objects
    }
}

impl Config {
    pub fn new(objects: Vec<ObjectPose>) -> Result<Config> {
        let first = objects
            .first()
            .ok_or_else(|| Error::ShapeMismatch("configuration has no objects".into()))?;
        let dim = first.dim();
        for pose in &objects {
            pose.validate()?;
            if pose.dim() != dim {
                return Err(Error::ShapeMismatch(
                    "configuration mixes planar and spatial poses".into(),
                ));
            }
        }
        Ok(Config { objects })
    }

    pub fn objects(&self) -> &[ObjectPose] {
        &self.objects
    }

    pub fn object(&self, index: usize) -> Result<&ObjectPose> {
        self.objects.get(index).ok_or(Error::ObjectIndexOutOfRange {
            index,
            objects: self.objects.len(),
        })
    }

    /// Replaces the pose at `index`, preserving shape invariants.
    pub fn with_object(&self, index: usize, pose: ObjectPose) -> Result<Config> {
        if index >= self.objects.len() {
            return Err(Error::ObjectIndexOutOfRange {
                index,
                objects: self.objects.len(),
            });
        }
        let mut objects = self.objects.clone();
        objects[index] = pose;
        Config::new(objects)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn dim(&self) -> Dim {
        self.objects[0].dim()
    }

    pub(crate) fn check_same_shape(&self, other: &Config) -> Result<()> {
        if self.objects.len() != other.objects.len() {
            return Err(Error::ShapeMismatch(format!(
                "configurations have {} and {} objects",
                self.objects.len(),
                other.objects.len()
            )));
        }
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch(
                "configurations live in different ambient dimensions".into(),
            ));
        }
        Ok(())
    }
}

/// Per-object rotation weights for the product metric.
///
/// The natural choice is each body's circumradius, which makes the rotation
/// term commensurate with the translation a boundary point sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MetricWeights {
    weights: Vec<f64>,
}

impl TryFrom<Vec<f64>> for MetricWeights {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        MetricWeights::new(weights)
    }
}

impl From<MetricWeights> for Vec<f64> {
    fn from(w: MetricWeights) -> Vec<f64> {
        w.weights
    }
}

impl MetricWeights {
    pub fn new(weights: Vec<f64>) -> Result<MetricWeights> {
        if weights.is_empty() {
            return Err(Error::ShapeMismatch("no metric weights given".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidArgument(
                "metric weights must be finite and positive".into(),
            ));
        }
        Ok(MetricWeights { weights })
    }

    pub fn uniform(objects: usize, weight: f64) -> Result<MetricWeights> {
        MetricWeights::new(vec![weight; objects])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<f64> {
        self.weights
            .get(index)
            .copied()
            .ok_or(Error::ObjectIndexOutOfRange {
                index,
                objects: self.weights.len(),
            })
    }
}

/// Product metric over objects:
/// `sqrt(Σᵢ ‖Δtᵢ‖² + (wᵢ · dθᵢ)²)`.
pub fn dist_config(a: &Config, b: &Config, weights: &MetricWeights) -> Result<f64> {
    a.check_same_shape(b)?;
    if weights.len() != a.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} weights for {} objects",
            weights.len(),
            a.len()
        )));
    }
    let mut sum = 0.0;
    for ((pa, pb), w) in a
        .objects()
        .iter()
        .zip(b.objects().iter())
        .zip(weights.weights())
    {
        for k in 0..3 {
            let d = pa.translation[k] - pb.translation[k];
            sum += d * d;
        }
        let dr = w * pa.rotation.distance(&pb.rotation)?;
        sum += dr * dr;
    }
    Ok(sum.sqrt())
}

/// Point at fraction `t ∈ [0, 1]` along the product geodesic from `a` to
/// `b`: translations interpolate linearly, rotations along their shortest
/// arc.
pub fn geodesic(a: &Config, b: &Config, t: f64) -> Result<Config> {
    a.check_same_shape(b)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "interpolation fraction {t} outside [0, 1]"
        )));
    }
    let mut objects = Vec::with_capacity(a.len());
    for (pa, pb) in a.objects().iter().zip(b.objects().iter()) {
        let mut translation = [0.0; 3];
        for k in 0..3 {
            translation[k] = (1.0 - t) * pa.translation[k] + t * pb.translation[k];
        }
        objects.push(ObjectPose {
            translation,
            rotation: pa.rotation.interpolate(&pb.rotation, t)?,
        });
    }
    Config::new(objects)
}

/// Axis-aligned box of allowed translations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn new_2d(min: [f64; 2], max: [f64; 2]) -> Result<Aabb> {
        Aabb::checked(
            [min[0], min[1], 0.0],
            [max[0], max[1], 0.0],
            Dim::Two,
        )
    }

    pub fn new_3d(min: [f64; 3], max: [f64; 3]) -> Result<Aabb> {
        Aabb::checked(min, max, Dim::Three)
    }

    fn checked(min: [f64; 3], max: [f64; 3], dim: Dim) -> Result<Aabb> {
        for k in 0..dim.ambient() {
            if !(min[k] <= max[k]) {
                return Err(Error::InvalidArgument(format!(
                    "box min exceeds max on axis {k}"
                )));
            }
        }
        Ok(Aabb { min, max })
    }

    pub fn contains(&self, p: [f64; 3], dim: Dim) -> bool {
        (0..dim.ambient()).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    /// Volume of the translation box (area in 2D).
    pub fn volume(&self, dim: Dim) -> f64 {
        (0..dim.ambient()).map(|k| self.extent(k)).product()
    }
}

/// The configuration space being planned in: ambient dimension, object
/// count, and the shared translation bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub dim: Dim,
    pub objects: usize,
    pub bounds: Aabb,
}

impl Space {
    pub fn new(dim: Dim, objects: usize, bounds: Aabb) -> Result<Space> {
        if objects == 0 {
            return Err(Error::InvalidArgument("space needs at least one object".into()));
        }
        if dim == Dim::Two && (bounds.min[2] != 0.0 || bounds.max[2] != 0.0) {
            return Err(Error::InvalidArgument(
                "planar bounds must keep z fixed at zero".into(),
            ));
        }
        Ok(Space { dim, objects, bounds })
    }

    /// Configuration-space dimension: 3 per object in 2D, 6 in 3D.
    pub fn config_dimension(&self) -> usize {
        self.objects * self.dim.per_object()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn planar_cfg(poses: &[(f64, f64, f64)]) -> Config {
        Config::new(
            poses
                .iter()
                .map(|&(x, y, th)| ObjectPose::planar(x, y, Rotation2::new(th)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn config_rejects_mixed_dimensions() {
        let poses = vec![
            ObjectPose::planar(0.0, 0.0, Rotation2::identity()),
            ObjectPose::spatial([0.0; 3], Rotation3::identity()),
        ];
        assert!(matches!(Config::new(poses), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn config_rejects_planar_z_offset() {
        let pose = ObjectPose {
            translation: [0.0, 0.0, 0.5],
            rotation: Rotation::Planar(Rotation2::identity()),
        };
        assert!(matches!(
            Config::new(vec![pose]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn dist_weighs_rotation_by_radius() {
        // Pure rotation by π/2 with weight 2 costs π.
        let a = planar_cfg(&[(0.0, 0.0, 0.0)]);
        let b = planar_cfg(&[(0.0, 0.0, PI / 2.0)]);
        let w = MetricWeights::uniform(1, 2.0).unwrap();
        assert_abs_diff_eq!(dist_config(&a, &b, &w).unwrap(), PI, epsilon = 1e-12);
    }

    #[test]
    fn dist_mixes_translation_and_rotation_in_quadrature() {
        let a = planar_cfg(&[(0.0, 0.0, 0.0)]);
        let b = planar_cfg(&[(3.0, 0.0, 2.0)]);
        let w = MetricWeights::uniform(1, 2.0).unwrap();
        // sqrt(3² + (2·2)²) = 5.
        assert_abs_diff_eq!(dist_config(&a, &b, &w).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn dist_sums_over_objects() {
        let a = planar_cfg(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]);
        let b = planar_cfg(&[(1.0, 0.0, 0.0), (1.0, 1.0, 0.0)]);
        let w = MetricWeights::uniform(2, 1.0).unwrap();
        assert_abs_diff_eq!(
            dist_config(&a, &b, &w).unwrap(),
            2.0f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn dist_is_a_metric_on_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let w = MetricWeights::uniform(2, 0.7).unwrap();
        let random_cfg = |rng: &mut rand_chacha::ChaCha8Rng| {
            planar_cfg(&[
                (
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(0.0..2.0 * PI),
                ),
                (
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(0.0..2.0 * PI),
                ),
            ])
        };
        for _ in 0..200 {
            let a = random_cfg(&mut rng);
            let b = random_cfg(&mut rng);
            let c = random_cfg(&mut rng);
            let ab = dist_config(&a, &b, &w).unwrap();
            let ba = dist_config(&b, &a, &w).unwrap();
            let ac = dist_config(&a, &c, &w).unwrap();
            let cb = dist_config(&c, &b, &w).unwrap();
            assert_abs_diff_eq!(ab, ba, epsilon = 1e-12);
            assert!(ab <= ac + cb + 1e-12);
            assert_abs_diff_eq!(dist_config(&a, &a, &w).unwrap(), 0.0);
        }
    }

    #[test]
    fn geodesic_lengths_split_proportionally() {
        let a = planar_cfg(&[(0.0, 0.0, 0.0)]);
        let b = planar_cfg(&[(2.0, 1.0, 1.0)]);
        let w = MetricWeights::uniform(1, 0.5).unwrap();
        let d = dist_config(&a, &b, &w).unwrap();
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let p = geodesic(&a, &b, t).unwrap();
            assert_abs_diff_eq!(dist_config(&a, &p, &w).unwrap(), t * d, epsilon = 1e-9);
            assert_abs_diff_eq!(
                dist_config(&p, &b, &w).unwrap(),
                (1.0 - t) * d,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn geodesic_rejects_out_of_range_fraction() {
        let a = planar_cfg(&[(0.0, 0.0, 0.0)]);
        let b = planar_cfg(&[(1.0, 0.0, 0.0)]);
        assert!(geodesic(&a, &b, 1.5).is_err());
        assert!(geodesic(&a, &b, -0.1).is_err());
    }

    #[test]
    fn space_dimension_counts_dof() {
        let bounds = Aabb::new_2d([-1.0, -1.0], [1.0, 1.0]).unwrap();
        let s = Space::new(Dim::Two, 3, bounds).unwrap();
        assert_eq!(s.config_dimension(), 9);
        let bounds3 = Aabb::new_3d([-1.0; 3], [1.0; 3]).unwrap();
        let s3 = Space::new(Dim::Three, 2, bounds3).unwrap();
        assert_eq!(s3.config_dimension(), 12);
    }

    #[test]
    fn aabb_volume_and_containment() {
        let b = Aabb::new_2d([0.0, 0.0], [2.0, 3.0]).unwrap();
        assert_abs_diff_eq!(b.volume(Dim::Two), 6.0);
        assert!(b.contains([1.0, 1.0, 0.0], Dim::Two));
        assert!(!b.contains([2.5, 1.0, 0.0], Dim::Two));
        let b3 = Aabb::new_3d([0.0; 3], [1.0, 2.0, 3.0]).unwrap();
        assert_abs_diff_eq!(b3.volume(Dim::Three), 6.0);
    }

    #[test]
    fn config_json_round_trip() {
        let c = Config::new(vec![
            ObjectPose::planar(0.5, -1.0, Rotation2::new(2.0)),
            ObjectPose::planar(0.0, 0.25, Rotation2::new(0.1)),
        ])
        .unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: Config = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
    }
}
