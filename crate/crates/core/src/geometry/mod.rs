//! Planar-polygon computational geometry.
//!
//! Scenes are built from simple planar polygons in a right-handed coordinate
//! frame (x east, y north, z up, lengths in meters).  The kernel provides the
//! operations the lighting model needs: signed point/plane distances, polygon
//! area and perimeter, point-in-polygon location, projection of a polygon
//! along a direction onto a plane (sunspot casting), coplanar polygon
//! clipping, and the solid angle a polygon subtends at a viewpoint.

mod clip;
mod polygon;
mod project;
mod solid_angle;

pub use clip::{clip_polygon, subtract_polygon};
pub use polygon::{Polygon, PointLocation};
pub use project::project_polygon;
pub use solid_angle::solid_angle;

use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Maximum out-of-plane distance (m) for a set of vertices to count as planar,
/// and for a query point to count as lying in a polygon's plane.
pub const PLANARITY_TOL: f64 = 1e-6;

/// Distance (m) within which a point counts as lying on a polygon edge, and
/// within which two consecutive vertices count as coincident.
pub const EDGE_TOL: f64 = 1e-9;

/// |cos| threshold below which a projection direction counts as parallel to
/// the target plane.
pub const PARALLEL_TOL: f64 = 1e-9;

/// Errors raised by the geometry kernel.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("non-finite coordinate at vertex {0}")]
    NonFiniteCoordinate(usize),
    #[error("vertices {0} and {1} coincide (closer than {EDGE_TOL} m)")]
    DuplicateVertices(usize, usize),
    #[error("vertices are collinear or enclose zero area")]
    DegeneratePolygon,
    #[error("vertex {index} is {distance:.3e} m out of the best-fit plane (tolerance {PLANARITY_TOL:.0e} m)")]
    NonPlanar { index: usize, distance: f64 },
    #[error("polygon edges self-intersect")]
    SelfIntersecting,
    #[error("point is {distance:.3e} m out of the polygon plane (tolerance {PLANARITY_TOL:.0e} m)")]
    OffPlane { distance: f64 },
    #[error("polygons are not coplanar (vertex deviates {distance:.3e} m from the subject plane)")]
    NotCoplanar { distance: f64 },
    #[error("viewpoint lies in the polygon plane; solid angle is degenerate")]
    DegenerateViewpoint,
    #[error("direction has near-zero length")]
    ZeroDirection,
}

/// Free 3-vector (m).  Displacements, normals and cross products live here;
/// positions are [`Point3`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Position in the scene frame (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn to_vec(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Sub for Point3 {
    type Output = Vec3;
    fn sub(self, o: Point3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Add<Vec3> for Point3 {
    type Output = Point3;
    fn add(self, v: Vec3) -> Point3 {
        Point3::new(self.x + v.x, self.y + v.y, self.z + v.z)
    }
}

/// Unit direction.  The constructor normalizes, so the length-one invariant
/// holds for every value of this type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction3(Vec3);

impl Direction3 {
    /// Normalizes `v`; errors when `v` is shorter than 1e-12 or non-finite.
    pub fn try_new(v: Vec3) -> Result<Self, GeometryError> {
        let n = v.norm();
        if !n.is_finite() || n < 1e-12 {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Direction3(v * (1.0 / n)))
    }

    pub fn from_components(dx: f64, dy: f64, dz: f64) -> Result<Self, GeometryError> {
        Self::try_new(Vec3::new(dx, dy, dz))
    }

    pub fn as_vec(self) -> Vec3 {
        self.0
    }

    pub fn dx(self) -> f64 {
        self.0.x
    }

    pub fn dy(self) -> f64 {
        self.0.y
    }

    pub fn dz(self) -> f64 {
        self.0.z
    }

    pub fn flipped(self) -> Self {
        Direction3(-self.0)
    }
}

/// Oriented plane `{ q : normal · q = offset }`; `offset` is the signed
/// distance of the plane from the origin along its unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    normal: Direction3,
    offset: f64,
}

impl Plane {
    pub fn new(normal: Direction3, offset: f64) -> Self {
        Plane { normal, offset }
    }

    pub fn from_normal_and_point(normal: Direction3, p: Point3) -> Self {
        Plane { normal, offset: normal.as_vec().dot(p.to_vec()) }
    }

    pub fn normal(&self) -> Direction3 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed distance from `q` to the plane: positive on the normal side,
    /// zero on the plane, negative behind it.
    pub fn signed_distance(&self, q: Point3) -> f64 {
        self.normal.as_vec().dot(q.to_vec()) - self.offset
    }

    /// Orthogonal (closest-point) projection of `q` onto the plane.
    pub fn project_point(&self, q: Point3) -> Point3 {
        q + self.normal.as_vec() * (-self.signed_distance(q))
    }
}
