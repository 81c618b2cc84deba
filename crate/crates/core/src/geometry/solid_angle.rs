//! Solid angle subtended by a polygon at a viewpoint.

use super::{GeometryError, Point3, Polygon, Vec3, PLANARITY_TOL};

/// Solid angle (sr) that `p` subtends at `q`, in (0, 2π).
///
/// The polygon is triangulated and the per-triangle solid angles (Van
/// Oosterom–Strackee) are summed; because the triangles partition the polygon
/// their view cones from `q` partition its view cone, so the sum is exact up
/// to rounding.  Errors when `q` lies in the polygon plane, where the
/// subtended angle degenerates.
pub fn solid_angle(q: Point3, p: &Polygon) -> Result<f64, GeometryError> {
    if p.plane().signed_distance(q).abs() <= PLANARITY_TOL {
        return Err(GeometryError::DegenerateViewpoint);
    }
    let verts = p.vertices();
    let mut total = 0.0;
    for t in p.triangulate() {
        total += triangle_solid_angle(q, verts[t[0]], verts[t[1]], verts[t[2]]);
    }
    Ok(total.abs())
}

/// Signed solid angle of triangle abc seen from q (Van Oosterom–Strackee).
fn triangle_solid_angle(q: Point3, a: Point3, b: Point3, c: Point3) -> f64 {
    let ra: Vec3 = a - q;
    let rb: Vec3 = b - q;
    let rc: Vec3 = c - q;
    let la = ra.norm();
    let lb = rb.norm();
    let lc = rc.norm();
    let numer = ra.dot(rb.cross(rc));
    let denom = la * lb * lc + ra.dot(rb) * lc + ra.dot(rc) * lb + rb.dot(rc) * la;
    2.0 * numer.atan2(denom)
}
