//! Simple planar polygons with a derived plane and in-plane 2D chart.

use super::{Direction3, GeometryError, Plane, Point3, Vec3, EDGE_TOL, PLANARITY_TOL};

/// Result of locating a point relative to a polygon, evaluated in the
/// polygon's plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLocation {
    Inside,
    /// Within [`EDGE_TOL`] of an edge or vertex.
    OnBoundary,
    Outside,
}

/// Simple (non-self-intersecting) planar polygon with at least three
/// vertices.
///
/// Construction derives the best-fit plane by Newell's method, requires every
/// vertex to lie within [`PLANARITY_TOL`] of it, rejects consecutive
/// duplicate vertices and self-intersections, and builds an orthonormal
/// in-plane chart in which the vertex loop is counter-clockwise.  The unit
/// normal therefore always points toward the side from which the loop reads
/// counter-clockwise; [`Polygon::flipped`] reverses both together.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point3>,
    plane: Plane,
    origin: Point3,
    u: Vec3,
    v: Vec3,
    local: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point3>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        for (i, p) in vertices.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFiniteCoordinate(i));
            }
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if (vertices[j] - vertices[i]).norm() <= EDGE_TOL {
                return Err(GeometryError::DuplicateVertices(i, j));
            }
        }

        // Newell's method: the accumulated vector is normal to the best-fit
        // plane and its magnitude is twice the enclosed area, so a near-zero
        // result means collinear vertices.
        let mut newell = Vec3::ZERO;
        for i in 0..n {
            let p = vertices[i];
            let q = vertices[(i + 1) % n];
            newell.x += (p.y - q.y) * (p.z + q.z);
            newell.y += (p.z - q.z) * (p.x + q.x);
            newell.z += (p.x - q.x) * (p.y + q.y);
        }
        let scale = vertices
            .iter()
            .map(|p| p.to_vec().norm())
            .fold(1.0_f64, f64::max);
        if newell.norm() <= 1e-12 * scale * scale {
            return Err(GeometryError::DegeneratePolygon);
        }
        let normal = Direction3::try_new(newell)?;

        let mean = vertices
            .iter()
            .fold(Vec3::ZERO, |acc, p| acc + p.to_vec())
            * (1.0 / n as f64);
        let plane = Plane::new(normal, normal.as_vec().dot(mean));
        for (i, p) in vertices.iter().enumerate() {
            let d = plane.signed_distance(*p).abs();
            if d > PLANARITY_TOL {
                return Err(GeometryError::NonPlanar { index: i, distance: d });
            }
        }

        // In-plane chart: u along the first edge (squared into the plane),
        // v = normal × u, origin at the on-plane projection of the mean.
        let origin = plane.project_point(Point3::new(mean.x, mean.y, mean.z));
        let e = vertices[1] - vertices[0];
        let e_in = e - normal.as_vec() * normal.as_vec().dot(e);
        let u = Direction3::try_new(e_in)?.as_vec();
        let v = normal.as_vec().cross(u);
        let local: Vec<[f64; 2]> = vertices
            .iter()
            .map(|p| {
                let d = *p - origin;
                [d.dot(u), d.dot(v)]
            })
            .collect();

        // With the Newell normal and a right-handed chart the loop is
        // counter-clockwise by construction.
        debug_assert!(signed_area_2d(&local) > 0.0);

        // Simplicity: no two non-adjacent edges may cross or touch.
        let tol = 1e-12 * scale * scale;
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (local[i], local[(i + 1) % n]);
                let (c, d) = (local[j], local[(j + 1) % n]);
                if segments_intersect(a, b, c, d, tol) {
                    return Err(GeometryError::SelfIntersecting);
                }
            }
        }

        Ok(Polygon { vertices, plane, origin, u, v, local })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn normal(&self) -> Direction3 {
        self.plane.normal()
    }

    /// Vertex loop reversed; the derived normal flips with it.
    pub fn flipped(&self) -> Polygon {
        let mut rev = self.vertices.clone();
        rev.reverse();
        Polygon::new(rev).expect("reversing a valid polygon preserves validity")
    }

    /// Enclosed area (m²), always positive.
    pub fn area(&self) -> f64 {
        signed_area_2d(&self.local)
    }

    /// Sum of edge lengths (m).
    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| (self.vertices[(i + 1) % n] - self.vertices[i]).norm())
            .sum()
    }

    /// Area centroid, on the polygon plane.
    pub fn centroid(&self) -> Point3 {
        self.from_local(centroid_2d(&self.local))
    }

    /// Chart coordinates of the vertex loop (counter-clockwise).
    pub fn local_vertices(&self) -> &[[f64; 2]] {
        &self.local
    }

    /// In-plane chart coordinates of `q` (its off-plane component is dropped).
    pub fn to_local(&self, q: Point3) -> [f64; 2] {
        let d = q - self.origin;
        [d.dot(self.u), d.dot(self.v)]
    }

    /// Maps chart coordinates back onto the polygon plane.
    pub fn from_local(&self, p: [f64; 2]) -> Point3 {
        self.origin + self.u * p[0] + self.v * p[1]
    }

    /// Locates `q` relative to the polygon.  `q` must lie in the polygon
    /// plane within [`PLANARITY_TOL`]; boundary proximity is measured
    /// in-plane against [`EDGE_TOL`].
    pub fn locate_point(&self, q: Point3) -> Result<PointLocation, GeometryError> {
        let d = self.plane.signed_distance(q).abs();
        if d > PLANARITY_TOL {
            return Err(GeometryError::OffPlane { distance: d });
        }
        Ok(self.locate_local(self.to_local(q)))
    }

    pub(crate) fn locate_local(&self, p: [f64; 2]) -> PointLocation {
        let n = self.local.len();
        for i in 0..n {
            let a = self.local[i];
            let b = self.local[(i + 1) % n];
            if point_segment_distance(p, a, b) <= EDGE_TOL {
                return PointLocation::OnBoundary;
            }
        }
        if parity_inside(p, &self.local) {
            PointLocation::Inside
        } else {
            PointLocation::Outside
        }
    }

    /// Fan-free triangulation (ear clipping) as vertex index triples, all
    /// wound the same way as the polygon.
    pub fn triangulate(&self) -> Vec<[usize; 3]> {
        triangulate_2d(&self.local)
    }
}

// ─── 2D kernel shared with the clipping module ───────────────────────────────

pub(crate) fn cross2(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Shoelace signed area; positive for counter-clockwise loops.
pub(crate) fn signed_area_2d(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * acc
}

pub(crate) fn centroid_2d(pts: &[[f64; 2]]) -> [f64; 2] {
    let n = pts.len();
    let mut a = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = p[0] * q[1] - q[0] * p[1];
        a += w;
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    if a.abs() < 1e-300 {
        // Degenerate loop: fall back to the vertex mean.
        let inv = 1.0 / n as f64;
        return [
            pts.iter().map(|p| p[0]).sum::<f64>() * inv,
            pts.iter().map(|p| p[1]).sum::<f64>() * inv,
        ];
    }
    [cx / (3.0 * a), cy / (3.0 * a)]
}

pub(crate) fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let dx = ap[0] - t * ab[0];
    let dy = ap[1] - t * ab[1];
    (dx * dx + dy * dy).sqrt()
}

/// Even-odd ray cast with the half-open edge rule, robust against rays
/// passing through vertices.  Boundary points must be filtered out first.
pub(crate) fn parity_inside(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let a = poly[j];
        let b = poly[i];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x_int = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x_int {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// True when the segments cross properly or touch within [`EDGE_TOL`].
pub(crate) fn segments_intersect(
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
    tol: f64,
) -> bool {
    let d1 = cross2(c, d, a);
    let d2 = cross2(c, d, b);
    let d3 = cross2(a, b, c);
    let d4 = cross2(a, b, d);
    if ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol))
        && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))
    {
        return true;
    }
    point_segment_distance(a, c, d) <= EDGE_TOL
        || point_segment_distance(b, c, d) <= EDGE_TOL
        || point_segment_distance(c, a, b) <= EDGE_TOL
        || point_segment_distance(d, a, b) <= EDGE_TOL
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
pub(crate) fn triangulate_2d(pts: &[[f64; 2]]) -> Vec<[usize; 3]> {
    let n = pts.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tris = Vec::with_capacity(n.saturating_sub(2));
    let scale = pts
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1e-30_f64, f64::max);
    let eps = 1e-12 * scale * scale;

    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        // First pass wants strictly convex corners; the second accepts
        // collinear ones so flat spikes still clip off.
        'passes: for pass in 0..2 {
            let thr = if pass == 0 { eps } else { -eps };
            for k in 0..m {
                let ia = idx[(k + m - 1) % m];
                let ib = idx[k];
                let ic = idx[(k + 1) % m];
                if cross2(pts[ia], pts[ib], pts[ic]) <= thr {
                    continue;
                }
                // A candidate ear is invalid if any remaining non-convex
                // vertex lies in it — boundary included, so a reflex
                // vertex sitting exactly on the ear chord still blocks.
                let blocked = (0..m).any(|t| {
                    let j = idx[t];
                    if j == ia || j == ib || j == ic {
                        return false;
                    }
                    let jp = pts[idx[(t + m - 1) % m]];
                    let jn = pts[idx[(t + 1) % m]];
                    if cross2(jp, pts[j], jn) > eps {
                        return false; // strictly convex vertices cannot pinch
                    }
                    in_or_on_triangle(pts[j], pts[ia], pts[ib], pts[ic], eps)
                });
                if !blocked {
                    tris.push([ia, ib, ic]);
                    idx.remove(k);
                    clipped = true;
                    break 'passes;
                }
            }
        }
        if !clipped {
            // Numeric dead end (should not happen for valid input): fan out.
            for k in 1..idx.len() - 1 {
                tris.push([idx[0], idx[k], idx[k + 1]]);
            }
            return tris;
        }
    }
    tris.push([idx[0], idx[1], idx[2]]);
    tris
}

fn in_or_on_triangle(p: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2], eps: f64) -> bool {
    cross2(a, b, p) >= -eps && cross2(b, c, p) >= -eps && cross2(c, a, p) >= -eps
}
