//! Projection of a polygon along a direction onto a plane (shadow casting).

use super::{Direction3, Plane, Polygon, PARALLEL_TOL};

/// Translates every vertex of `p` along `d` until it reaches `target` and
/// rebuilds the polygon there.
///
/// Returns `None` when the image is empty or undefined: `d` parallel to the
/// target plane (|d·n| < [`PARALLEL_TOL`]), any vertex requiring a negative
/// travel distance (the plane lies behind the polygon along `d`), or an
/// image collapsed below the degeneracy thresholds.  For convex polygons and
/// non-grazing directions the image keeps the vertex count.
pub fn project_polygon(p: &Polygon, d: Direction3, target: &Plane) -> Option<Polygon> {
    let n = target.normal().as_vec();
    let denom = d.as_vec().dot(n);
    if denom.abs() < PARALLEL_TOL {
        return None;
    }
    let mut image = Vec::with_capacity(p.vertices().len());
    for v in p.vertices() {
        let t = (target.offset() - n.dot(v.to_vec())) / denom;
        if t < 0.0 {
            return None;
        }
        image.push(*v + d.as_vec() * t);
    }
    Polygon::new(image).ok()
}
