use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dot-product threshold below which two unit quaternions are treated as an
/// antipodal orientation pair (geodesic not unique).
pub const ANTIPODAL_TOL: f64 = 1e-9;

/// Ambient dimension of the bodies being planned for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    /// Workspace dimension (2 or 3).
    pub fn ambient(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Configuration-space dimension contributed by one rigid body.
    pub fn per_object(self) -> usize {
        match self {
            Dim::Two => 3,
            Dim::Three => 6,
        }
    }
}

/// Planar rotation stored as an angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "Angle")]
pub struct Rotation2 {
    angle: f64,
}

#[derive(Deserialize)]
struct Angle {
    angle: f64,
}

impl From<Angle> for Rotation2 {
    fn from(raw: Angle) -> Self {
        Rotation2::new(raw.angle)
    }
}

impl Rotation2 {
    pub fn identity() -> Self {
        Rotation2 { angle: 0.0 }
    }

    /// Wraps `angle` into `[0, 2π)`.
    pub fn new(angle: f64) -> Self {
        let mut a = angle.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs.
        if a >= TAU {
            a = 0.0;
        }
        Rotation2 { angle: a }
    }

    pub fn angle(self) -> f64 {
        self.angle
    }

    /// Composition `self · other`: as an operator, applies `other` first.
    pub fn compose(self, other: Rotation2) -> Rotation2 {
        Rotation2::new(self.angle + other.angle)
    }

    pub fn inverse(self) -> Rotation2 {
        Rotation2::new(-self.angle)
    }

    /// Geodesic distance on SO(2): min(|Δ|, 2π − |Δ|), in `[0, π]`.
    pub fn distance(self, other: Rotation2) -> f64 {
        let d = (self.angle - other.angle).abs();
        d.min(TAU - d)
    }

    /// Signed shortest angular offset from `self` to `other`, in `(−π, π]`.
    pub fn signed_delta(self, other: Rotation2) -> f64 {
        let d = (other.angle - self.angle + PI).rem_euclid(TAU) - PI;
        if d <= -PI {
            PI
        } else {
            d
        }
    }

    /// Point at fraction `t` along the shortest arc from `self` to `other`.
    ///
    /// Errors when the pair is antipodal within [`ANTIPODAL_TOL`].
    pub fn interpolate(self, other: Rotation2, t: f64) -> Result<Rotation2> {
        let delta = self.signed_delta(other);
        if PI - delta.abs() < ANTIPODAL_TOL {
            return Err(Error::AntipodalGeodesic { tol: ANTIPODAL_TOL });
        }
        Ok(Rotation2::new(self.angle + t * delta))
    }

    pub fn rotate(self, v: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.angle.sin_cos();
        [c * v[0] - s * v[1], s * v[0] + c * v[1]]
    }
}

/// Spatial rotation stored as a unit quaternion `[w, x, y, z]`.
///
/// `q` and `−q` describe the same orientation; all comparisons and the
/// metric fold that sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Quat")]
pub struct Rotation3 {
    quat: [f64; 4],
}

#[derive(Deserialize)]
struct Quat {
    quat: [f64; 4],
}

impl TryFrom<Quat> for Rotation3 {
    type Error = Error;

    fn try_from(raw: Quat) -> Result<Self> {
        Rotation3::from_quat(raw.quat)
    }
}

impl Rotation3 {
    pub fn identity() -> Self {
        Rotation3 {
            quat: [1.0, 0.0, 0.0, 0.0],
        }
    }

    /// Normalizes `[w, x, y, z]` to a unit quaternion.
    ///
    /// Errors when the norm is too small to normalize reliably.
    pub fn from_quat(quat: [f64; 4]) -> Result<Self> {
        let norm2: f64 = quat.iter().map(|c| c * c).sum();
        if norm2 < 1e-24 {
            return Err(Error::InvalidArgument(
                "quaternion norm is too close to zero".into(),
            ));
        }
        let norm = norm2.sqrt();
        // Leave already-unit quaternions bit-identical.
        if (norm - 1.0).abs() <= 1e-12 {
            return Ok(Rotation3 { quat });
        }
        Ok(Rotation3 {
            quat: quat.map(|c| c / norm),
        })
    }

    /// Rotation by `angle` about `axis` (axis need not be unit length).
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidArgument(
                "rotation axis is too close to zero".into(),
            ));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        let k = s / norm;
        Ok(Rotation3 {
            quat: [c, k * axis[0], k * axis[1], k * axis[2]],
        })
    }

    pub fn quat(self) -> [f64; 4] {
        self.quat
    }

    /// Hamilton product `self ⊗ other`: as an operator, applies `other`
    /// first.
    pub fn compose(self, other: Rotation3) -> Rotation3 {
        let [aw, ax, ay, az] = self.quat;
        let [bw, bx, by, bz] = other.quat;
        Rotation3 {
            quat: [
                aw * bw - ax * bx - ay * by - az * bz,
                aw * bx + ax * bw + ay * bz - az * by,
                aw * by - ax * bz + ay * bw + az * bx,
                aw * bz + ax * by - ay * bx + az * bw,
            ],
        }
    }

    pub fn inverse(self) -> Rotation3 {
        let [w, x, y, z] = self.quat;
        Rotation3 {
            quat: [w, -x, -y, -z],
        }
    }

    fn dot(self, other: Rotation3) -> f64 {
        self.quat
            .iter()
            .zip(other.quat.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Geodesic distance on SO(3): `2·arccos(|⟨p, q⟩|)`, in `[0, π]`,
    /// evaluated through the chord length (4·arcsin(‖p ∓ q‖/2)), which
    /// stays fully precise where arccos degrades near coincident pairs.
    pub fn distance(self, other: Rotation3) -> f64 {
        let sign = if self.dot(other) < 0.0 { -1.0 } else { 1.0 };
        let mut chord2 = 0.0;
        for i in 0..4 {
            let d = self.quat[i] - sign * other.quat[i];
            chord2 += d * d;
        }
        // Sign folding keeps the half-chord at or below sin(π/4).
        4.0 * (chord2.sqrt() / 2.0).clamp(0.0, 1.0).asin()
    }

    /// Rotation angle of `self` itself, in `[0, π]`.
    pub fn angle(self) -> f64 {
        let [w, x, y, z] = self.quat;
        2.0 * (x * x + y * y + z * z).sqrt().atan2(w.abs())
    }

    /// Point at fraction `t` along the shortest arc from `self` to `other`.
    ///
    /// Errors when the pair is antipodal within [`ANTIPODAL_TOL`].
    pub fn interpolate(self, other: Rotation3, t: f64) -> Result<Rotation3> {
        let mut dot = self.dot(other);
        let mut target = other.quat;
        if dot < 0.0 {
            // Slerp toward the hemisphere-matched representative.
            target = target.map(|c| -c);
            dot = -dot;
        }
        if dot < ANTIPODAL_TOL {
            return Err(Error::AntipodalGeodesic { tol: ANTIPODAL_TOL });
        }
        let dot = dot.min(1.0);
        if dot > 1.0 - 1e-12 {
            // Endpoints nearly coincide: linear blend then renormalize.
            let mut q = [0.0; 4];
            for i in 0..4 {
                q[i] = (1.0 - t) * self.quat[i] + t * target[i];
            }
            return Rotation3::from_quat(q);
        }
        let theta = dot.acos();
        let sin_theta = theta.sin();
        let a = ((1.0 - t) * theta).sin() / sin_theta;
        let b = (t * theta).sin() / sin_theta;
        let mut q = [0.0; 4];
        for i in 0..4 {
            q[i] = a * self.quat[i] + b * target[i];
        }
        Rotation3::from_quat(q)
    }

    pub fn rotate(self, v: [f64; 3]) -> [f64; 3] {
        // q v q* expanded via the cross-product form.
        let [w, x, y, z] = self.quat;
        let u = [x, y, z];
        let uv = cross(u, v);
        let uuv = cross(u, uv);
        [
            v[0] + 2.0 * (w * uv[0] + uuv[0]),
            v[1] + 2.0 * (w * uv[1] + uuv[1]),
            v[2] + 2.0 * (w * uv[2] + uuv[2]),
        ]
    }

    /// Representative with the first non-negligible component positive.
    pub fn sign_folded(self) -> Rotation3 {
        for c in self.quat {
            if c.abs() > 1e-9 {
                if c < 0.0 {
                    return Rotation3 {
                        quat: self.quat.map(|v| -v),
                    };
                }
                return self;
            }
        }
        self
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Rotation of a single rigid body, planar or spatial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rotation {
    Planar(Rotation2),
    Spatial(Rotation3),
}

impl Rotation {
    pub fn identity(dim: Dim) -> Rotation {
        match dim {
            Dim::Two => Rotation::Planar(Rotation2::identity()),
            Dim::Three => Rotation::Spatial(Rotation3::identity()),
        }
    }

    pub fn dim(&self) -> Dim {
        match self {
            Rotation::Planar(_) => Dim::Two,
            Rotation::Spatial(_) => Dim::Three,
        }
    }

    /// Composition `self · other` (applies `other` first). Errors when the
    /// two rotations live in different dimensions.
    pub fn compose(&self, other: &Rotation) -> Result<Rotation> {
        match (self, other) {
            (Rotation::Planar(a), Rotation::Planar(b)) => Ok(Rotation::Planar(a.compose(*b))),
            (Rotation::Spatial(a), Rotation::Spatial(b)) => Ok(Rotation::Spatial(a.compose(*b))),
            _ => Err(Error::ShapeMismatch(
                "cannot compose planar and spatial rotations".into(),
            )),
        }
    }

    pub fn inverse(&self) -> Rotation {
        match self {
            Rotation::Planar(r) => Rotation::Planar(r.inverse()),
            Rotation::Spatial(r) => Rotation::Spatial(r.inverse()),
        }
    }

    pub fn distance(&self, other: &Rotation) -> Result<f64> {
        match (self, other) {
            (Rotation::Planar(a), Rotation::Planar(b)) => Ok(a.distance(*b)),
            (Rotation::Spatial(a), Rotation::Spatial(b)) => Ok(a.distance(*b)),
            _ => Err(Error::ShapeMismatch(
                "cannot compare planar and spatial rotations".into(),
            )),
        }
    }

    pub fn interpolate(&self, other: &Rotation, t: f64) -> Result<Rotation> {
        match (self, other) {
            (Rotation::Planar(a), Rotation::Planar(b)) => {
                Ok(Rotation::Planar(a.interpolate(*b, t)?))
            }
            (Rotation::Spatial(a), Rotation::Spatial(b)) => {
                Ok(Rotation::Spatial(a.interpolate(*b, t)?))
            }
            _ => Err(Error::ShapeMismatch(
                "cannot interpolate between planar and spatial rotations".into(),
            )),
        }
    }

    /// Rotation angle from the identity, in `[0, π]`.
    pub fn angle_from_identity(&self) -> f64 {
        match self {
            Rotation::Planar(r) => r.distance(Rotation2::identity()),
            Rotation::Spatial(r) => r.angle(),
        }
    }

    /// Coordinates used for tolerance-based lexicographic comparison:
    /// `[angle, 0, 0, 0]` for planar, the sign-folded quaternion for
    /// spatial.
    pub fn folded_coords(&self) -> [f64; 4] {
        match self {
            Rotation::Planar(r) => [r.angle(), 0.0, 0.0, 0.0],
            Rotation::Spatial(r) => r.sign_folded().quat(),
        }
    }

    /// True when the two rotations represent the same orientation within
    /// `tol` (geodesic distance).
    pub fn approx_eq(&self, other: &Rotation, tol: f64) -> bool {
        matches!(self.distance(other), Ok(d) if d <= tol)
    }
}
