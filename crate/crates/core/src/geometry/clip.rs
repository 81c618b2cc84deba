//! Coplanar polygon clipping (intersection and difference).

use super::polygon::{cross2, signed_area_2d, triangulate_2d, Polygon};
use super::{GeometryError, EDGE_TOL, PLANARITY_TOL};

/// Pieces smaller than this (m²) are numerical slivers and are dropped.
const AREA_EPS: f64 = 1e-12;

/// Intersects `subject` with `clip`, both lying in the same plane within
/// [`PLANARITY_TOL`].  The intersection region is returned as a list of
/// simple polygons whose areas sum to the area of the overlap; an empty list
/// means the polygons do not overlap.
///
/// Convex pairs clip directly (Sutherland–Hodgman); when either polygon is
/// non-convex it is triangulated first and the region is returned as the
/// per-triangle pieces, which partition the same overlap.
pub fn clip_polygon(subject: &Polygon, clip: &Polygon) -> Result<Vec<Polygon>, GeometryError> {
    let clip_local = check_coplanar_and_chart(subject, clip)?;
    let subject_local = subject.local_vertices().to_vec();

    let mut pieces_2d: Vec<Vec<[f64; 2]>> = Vec::new();
    if is_convex(&subject_local) && is_convex(&clip_local) {
        push_piece(&mut pieces_2d, sh_clip(&subject_local, &clip_local));
    } else {
        for st in triangles_of(&subject_local) {
            for ct in triangles_of(&clip_local) {
                push_piece(&mut pieces_2d, sh_clip(&st, &ct));
            }
        }
    }
    lift_pieces(subject, pieces_2d)
}

/// Subtracts `mask` from every piece in `pieces` (all coplanar within
/// [`PLANARITY_TOL`]).  The remainder is returned as disjoint simple
/// polygons; convex pieces untouched by the mask pass through unchanged,
/// while non-convex pieces may come back as their triangulation.
pub fn subtract_polygon(
    pieces: &[Polygon],
    mask: &Polygon,
) -> Result<Vec<Polygon>, GeometryError> {
    let mut out = Vec::new();
    for piece in pieces {
        let mask_local = check_coplanar_and_chart(piece, mask)?;
        // Half-plane clipping of a concave loop can return a disconnected
        // region stitched into one self-intersecting loop, which would then
        // be dropped as invalid and lose area.  Convex loops stay convex
        // under every half-plane cut, so concave pieces are subtracted per
        // triangle.
        let mut remainder: Vec<Vec<[f64; 2]>> = triangles_of(piece.local_vertices());
        for tri in triangles_of(&mask_local) {
            let mut next = Vec::new();
            for part in remainder {
                subtract_convex(&part, &tri, &mut next);
            }
            remainder = next;
        }
        out.extend(lift_pieces(piece, remainder)?);
    }
    Ok(out)
}

/// Verifies `other` lies in `reference`'s plane and returns its vertex loop
/// in `reference`'s chart, wound counter-clockwise.
fn check_coplanar_and_chart(
    reference: &Polygon,
    other: &Polygon,
) -> Result<Vec<[f64; 2]>, GeometryError> {
    for v in other.vertices() {
        let d = reference.plane().signed_distance(*v).abs();
        if d > PLANARITY_TOL {
            return Err(GeometryError::NotCoplanar { distance: d });
        }
    }
    let mut local: Vec<[f64; 2]> = other.vertices().iter().map(|v| reference.to_local(*v)).collect();
    if signed_area_2d(&local) < 0.0 {
        local.reverse();
    }
    Ok(local)
}

fn is_convex(pts: &[[f64; 2]]) -> bool {
    let n = pts.len();
    let scale = pts
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1e-30_f64, f64::max);
    let eps = 1e-12 * scale * scale;
    (0..n).all(|i| cross2(pts[i], pts[(i + 1) % n], pts[(i + 2) % n]) >= -eps)
}

fn triangles_of(pts: &[[f64; 2]]) -> Vec<Vec<[f64; 2]>> {
    if is_convex(pts) {
        return vec![pts.to_vec()];
    }
    triangulate_2d(pts)
        .into_iter()
        .map(|t| vec![pts[t[0]], pts[t[1]], pts[t[2]]])
        .filter(|t| signed_area_2d(t) > AREA_EPS)
        .collect()
}

fn push_piece(pieces: &mut Vec<Vec<[f64; 2]>>, piece: Vec<[f64; 2]>) {
    if piece.len() >= 3 && signed_area_2d(&piece) > AREA_EPS {
        pieces.push(piece);
    }
}

fn lift_pieces(
    reference: &Polygon,
    pieces_2d: Vec<Vec<[f64; 2]>>,
) -> Result<Vec<Polygon>, GeometryError> {
    let mut out = Vec::new();
    for piece in pieces_2d {
        let verts = piece.iter().map(|p| reference.from_local(*p)).collect();
        // Numerically collapsed slivers fail polygon validation; skip them.
        if let Ok(poly) = Polygon::new(verts) {
            out.push(poly);
        }
    }
    Ok(out)
}

/// Sutherland–Hodgman: clips `subject` against convex counter-clockwise
/// `clip`.  Points exactly on a clip edge count as inside, so clipping a
/// polygon against itself returns it unchanged.
fn sh_clip(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let scale = subject
        .iter()
        .chain(clip.iter())
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1e-30_f64, f64::max);
    let eps = 1e-12 * scale * scale;

    let mut output = subject.to_vec();
    let m = clip.len();
    for k in 0..m {
        if output.is_empty() {
            break;
        }
        let a = clip[k];
        let b = clip[(k + 1) % m];
        let input = std::mem::take(&mut output);
        let mut prev = *input.last().unwrap();
        let mut prev_in = cross2(a, b, prev) >= -eps;
        for cur in input {
            let cur_in = cross2(a, b, cur) >= -eps;
            if cur_in != prev_in {
                output.push(line_intersection(prev, cur, a, b));
            }
            if cur_in {
                output.push(cur);
            }
            prev = cur;
            prev_in = cur_in;
        }
    }
    dedup_loop(output)
}

/// Keeps the part of `piece` outside convex `mask`, appending the disjoint
/// remainder parts to `out`.  Sweeps the mask edges: at each edge the portion
/// outside that edge (but inside all previous ones) splits off as one part.
fn subtract_convex(piece: &[[f64; 2]], mask: &[[f64; 2]], out: &mut Vec<Vec<[f64; 2]>>) {
    let m = mask.len();
    let mut remaining = piece.to_vec();
    for k in 0..m {
        if remaining.is_empty() {
            return;
        }
        let a = mask[k];
        let b = mask[(k + 1) % m];
        let outside = clip_half(&remaining, a, b, false);
        if outside.len() >= 3 && signed_area_2d(&outside) > AREA_EPS {
            out.push(outside);
        }
        remaining = clip_half(&remaining, a, b, true);
    }
    // Whatever remains is inside the mask and is discarded.
}

/// Clips a loop against the single directed line a→b, keeping the left side
/// when `keep_left`, the right side otherwise.
fn clip_half(poly: &[[f64; 2]], a: [f64; 2], b: [f64; 2], keep_left: bool) -> Vec<[f64; 2]> {
    let scale = poly
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1e-30_f64, f64::max);
    let eps = 1e-12 * scale * scale;
    let side = |p: [f64; 2]| {
        let c = cross2(a, b, p);
        if keep_left {
            c >= -eps
        } else {
            c <= eps
        }
    };

    let mut output = Vec::with_capacity(poly.len() + 2);
    let mut prev = *poly.last().unwrap();
    let mut prev_in = side(prev);
    for &cur in poly {
        let cur_in = side(cur);
        if cur_in != prev_in {
            output.push(line_intersection(prev, cur, a, b));
        }
        if cur_in {
            output.push(cur);
        }
        prev = cur;
        prev_in = cur_in;
    }
    dedup_loop(output)
}

/// Intersection of segment p→q with the infinite line a→b.
fn line_intersection(p: [f64; 2], q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let dp = [q[0] - p[0], q[1] - p[1]];
    let dl = [b[0] - a[0], b[1] - a[1]];
    let denom = dp[0] * dl[1] - dp[1] * dl[0];
    if denom.abs() < 1e-300 {
        return p;
    }
    let t = ((a[0] - p[0]) * dl[1] - (a[1] - p[1]) * dl[0]) / denom;
    [p[0] + t * dp[0], p[1] + t * dp[1]]
}

fn dedup_loop(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.dedup_by(|a, b| {
        let dx = a[0] - b[0];
        let dy = a[1] - b[1];
        (dx * dx + dy * dy).sqrt() <= EDGE_TOL
    });
    while pts.len() > 1 {
        let first = pts[0];
        let last = *pts.last().unwrap();
        let d = ((first[0] - last[0]).powi(2) + (first[1] - last[1]).powi(2)).sqrt();
        if d <= EDGE_TOL {
            pts.pop();
        } else {
            break;
        }
    }
    pts
}
