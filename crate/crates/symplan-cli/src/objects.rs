//! The benchmark object catalog: named shapes paired with their rotation
//! groups. Every entry is validated for exact group invariance when the
//! moving object is constructed.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use symplan::collision::{ConvexShape, MovingObject};
use symplan::geometry::Dim;
use symplan::symmetry::SymmetryGroup;
use symplan::{Error, Result};

/// Circumradius of the planar catalog shapes, meters.
const POLYGON_RADIUS: f64 = 0.6;
/// Base radius of pyramids and prisms, meters.
const SOLID_RADIUS: f64 = 0.5;
/// Half-height of prisms, meters.
const PRISM_HALF_HEIGHT: f64 = 0.35;
/// Cube half-extent, meters.
const CUBE_HALF: f64 = 0.35;
/// Tetrahedron vertex coordinate magnitude, meters.
const TETRA_HALF: f64 = 0.35;
/// Rectangle half-extents for the stacked-copies space, meters.
const RECT_HALF: [f64; 2] = [0.5, 0.25];

/// A benchmark object: shape family plus the parameter that fixes its
/// symmetry group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    /// Regular triangle, C3.
    Triangle,
    /// Regular pentagon, C5.
    Pentagon,
    /// Regular octagon, C8.
    Octagon,
    /// Right pyramid over a regular n-gon, Cn about the apex axis.
    Pyramid(usize),
    /// Right prism over a regular n-gon, dihedral of order 2n.
    Prism(usize),
    /// Regular tetrahedron, rotation group of order 12.
    Tetrahedron,
    /// Cube, rotation group of order 24.
    Cube,
    /// m independent copies of a rectangle, (C2)^m, planning in 2D.
    RectangleStack(usize),
}

impl ObjectKind {
    /// Ambient dimension the object plans in.
    pub fn dimension(&self) -> Dim {
        match self {
            ObjectKind::Triangle
            | ObjectKind::Pentagon
            | ObjectKind::Octagon
            | ObjectKind::RectangleStack(_) => Dim::Two,
            ObjectKind::Pyramid(_)
            | ObjectKind::Prism(_)
            | ObjectKind::Tetrahedron
            | ObjectKind::Cube => Dim::Three,
        }
    }

    /// Order of the full symmetry group (product over objects).
    pub fn group_order(&self) -> usize {
        match self {
            ObjectKind::Triangle => 3,
            ObjectKind::Pentagon => 5,
            ObjectKind::Octagon => 8,
            ObjectKind::Pyramid(n) => *n,
            ObjectKind::Prism(n) => 2 * n,
            ObjectKind::Tetrahedron => 12,
            ObjectKind::Cube => 24,
            ObjectKind::RectangleStack(m) => 1usize << m,
        }
    }

    /// Number of independently moving bodies.
    pub fn object_count(&self) -> usize {
        match self {
            ObjectKind::RectangleStack(m) => *m,
            _ => 1,
        }
    }

    /// Builds the moving objects with their symmetry groups attached.
    pub fn objects(&self) -> Result<Vec<MovingObject>> {
        match *self {
            ObjectKind::Triangle => polygon_object(3),
            ObjectKind::Pentagon => polygon_object(5),
            ObjectKind::Octagon => polygon_object(8),
            ObjectKind::Pyramid(n) => pyramid_object(n),
            ObjectKind::Prism(n) => prism_object(n),
            ObjectKind::Tetrahedron => {
                let s = TETRA_HALF;
                let shape = ConvexShape::hull_3d(&[
                    [s, s, s],
                    [s, -s, -s],
                    [-s, s, -s],
                    [-s, -s, s],
                ])?;
                Ok(vec![MovingObject::new(shape, SymmetryGroup::tetrahedral()?)?])
            }
            ObjectKind::Cube => {
                let shape = ConvexShape::cuboid([CUBE_HALF; 3])?;
                Ok(vec![MovingObject::new(shape, SymmetryGroup::octahedral()?)?])
            }
            ObjectKind::RectangleStack(m) => {
                if m < 1 {
                    return Err(Error::InvalidArgument(
                        "rectangle-stack needs at least one copy".into(),
                    ));
                }
                (0..m)
                    .map(|_| {
                        MovingObject::new(
                            ConvexShape::rectangle(RECT_HALF[0], RECT_HALF[1])?,
                            SymmetryGroup::cyclic_2d(2)?,
                        )
                    })
                    .collect()
            }
        }
    }
}

fn polygon_object(n: usize) -> Result<Vec<MovingObject>> {
    Ok(vec![MovingObject::new(
        ConvexShape::regular_polygon(n, POLYGON_RADIUS)?,
        SymmetryGroup::cyclic_2d(n)?,
    )?])
}

/// Base n-gon at z = -h plus an apex on the axis; the vertex centroid lies
/// on the axis, so centering preserves the cyclic symmetry.
fn pyramid_object(n: usize) -> Result<Vec<MovingObject>> {
    if n < 3 {
        return Err(Error::InvalidArgument(
            "pyramid base needs at least 3 sides".into(),
        ));
    }
    let mut pts: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            [SOLID_RADIUS * a.cos(), SOLID_RADIUS * a.sin(), -0.3]
        })
        .collect();
    pts.push([0.0, 0.0, 0.5]);
    let shape = ConvexShape::hull_3d(&pts)?;
    let group = SymmetryGroup::cyclic_3d(n, [0.0, 0.0, 1.0])?;
    Ok(vec![MovingObject::new(shape, group)?])
}

/// Regular n-gon extruded along z. A base vertex sits at angle zero, so the
/// half-turn about the x axis maps the vertex set to itself and the full
/// dihedral rotation group (order 2n) applies.
fn prism_object(n: usize) -> Result<Vec<MovingObject>> {
    if n < 3 {
        return Err(Error::InvalidArgument(
            "prism base needs at least 3 sides".into(),
        ));
    }
    let mut pts = Vec::with_capacity(2 * n);
    for i in 0..n {
        let a = std::f64::consts::TAU * i as f64 / n as f64;
        let (x, y) = (SOLID_RADIUS * a.cos(), SOLID_RADIUS * a.sin());
        pts.push([x, y, PRISM_HALF_HEIGHT]);
        pts.push([x, y, -PRISM_HALF_HEIGHT]);
    }
    let shape = ConvexShape::hull_3d(&pts)?;
    let group = SymmetryGroup::dihedral_3d(n, [0.0, 0.0, 1.0], [1.0, 0.0, 0.0])?;
    Ok(vec![MovingObject::new(shape, group)?])
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectKind::Triangle => write!(f, "triangle"),
            ObjectKind::Pentagon => write!(f, "pentagon"),
            ObjectKind::Octagon => write!(f, "octagon"),
            ObjectKind::Pyramid(n) => write!(f, "{n}-pyramid"),
            ObjectKind::Prism(n) => write!(f, "{n}-prism"),
            ObjectKind::Tetrahedron => write!(f, "tetrahedron"),
            ObjectKind::Cube => write!(f, "cube"),
            ObjectKind::RectangleStack(m) => write!(f, "rectangle-stack({m})"),
        }
    }
}

impl FromStr for ObjectKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ObjectKind> {
        let s = s.trim();
        match s {
            "triangle" => return Ok(ObjectKind::Triangle),
            "pentagon" => return Ok(ObjectKind::Pentagon),
            "octagon" => return Ok(ObjectKind::Octagon),
            "tetrahedron" => return Ok(ObjectKind::Tetrahedron),
            "cube" => return Ok(ObjectKind::Cube),
            _ => {}
        }
        if let Some(n) = s.strip_suffix("-pyramid").and_then(|p| p.parse().ok()) {
            return Ok(ObjectKind::Pyramid(n));
        }
        if let Some(n) = s.strip_suffix("-prism").and_then(|p| p.parse().ok()) {
            return Ok(ObjectKind::Prism(n));
        }
        if let Some(m) = s
            .strip_prefix("rectangle-stack(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|m| m.parse().ok())
        {
            return Ok(ObjectKind::RectangleStack(m));
        }
        Err(Error::InvalidArgument(format!(
            "unknown object {s:?}; expected triangle, pentagon, octagon, \
             N-pyramid, N-prism, tetrahedron, cube, or rectangle-stack(M)"
        )))
    }
}

impl Serialize for ObjectKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ObjectKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use symplan::collision::object_group;

    #[test]
    fn names_round_trip() {
        let kinds = [
            ObjectKind::Triangle,
            ObjectKind::Pentagon,
            ObjectKind::Octagon,
            ObjectKind::Pyramid(4),
            ObjectKind::Prism(6),
            ObjectKind::Tetrahedron,
            ObjectKind::Cube,
            ObjectKind::RectangleStack(3),
        ];
        for kind in kinds {
            let back: ObjectKind = kind.to_string().parse().unwrap();
            assert_eq!(back, kind);
            let json = serde_json::to_string(&kind).unwrap();
            let from_json: ObjectKind = serde_json::from_str(&json).unwrap();
            assert_eq!(from_json, kind);
        }
        assert!("hexagon".parse::<ObjectKind>().is_err());
        assert!("2-prism".parse::<ObjectKind>().is_ok());
        assert!("x-pyramid".parse::<ObjectKind>().is_err());
        assert!("rectangle-stack(0)".parse::<ObjectKind>().unwrap().objects().is_err());
    }

    #[test]
    fn every_catalog_entry_builds_with_its_stated_group_order() {
        let kinds = [
            ObjectKind::Triangle,
            ObjectKind::Pentagon,
            ObjectKind::Octagon,
            ObjectKind::Pyramid(4),
            ObjectKind::Pyramid(6),
            ObjectKind::Prism(3),
            ObjectKind::Prism(4),
            ObjectKind::Prism(6),
            ObjectKind::Tetrahedron,
            ObjectKind::Cube,
            ObjectKind::RectangleStack(1),
            ObjectKind::RectangleStack(5),
        ];
        for kind in kinds {
            let objects = kind.objects().unwrap();
            assert_eq!(objects.len(), kind.object_count(), "{kind}");
            let group = object_group(&objects).unwrap();
            assert_eq!(group.order(), kind.group_order(), "{kind}");
            assert_eq!(group.dim(), kind.dimension(), "{kind}");
            for object in &objects {
                let check = object.check_symmetry();
                assert!(check.passes, "{kind}: deviation {}", check.max_deviation);
            }
        }
    }
}
