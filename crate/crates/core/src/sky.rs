//! Sky luminance models and the daylight-factor components.
//!
//! The diffuse illuminance at an interior point is expressed as a daylight
//! factor: a percentage of the simultaneous exterior diffuse horizontal
//! illuminance E_dh.  It decomposes into
//!
//! - **SC**, the sky component: luminance of the sky patches visible through
//!   glazing, integrated over their solid angles with the work-plane cosine;
//! - **ERC**, the externally reflected component: the same integral over
//!   patches where the view line ends on an obstruction or the ground, which
//!   re-emit a fixed fraction of the mean sky luminance scaled by their
//!   reflectance;
//! - **IRC**, the internally reflected component: a split-flux estimate of
//!   inter-reflected light, uniform over the room.
//!
//! Because every luminance in the model is proportional to E_dh, all three
//! components are pure ratios: they are computed from luminances normalized
//! to E_dh = 1 and are bit-for-bit independent of the sky brightness.

use crate::geometry::{
    clip_polygon, solid_angle, GeometryError, Point3, PointLocation, Polygon, PLANARITY_TOL,
};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkyError {
    #[error("evaluation point lies in the glazing plane")]
    DegenerateViewpoint,
    #[error("transmittance {0} outside [0, 1]")]
    TransmittanceOutOfRange(f64),
    #[error("reflectance {0} outside [0, 1]")]
    ReflectanceOutOfRange(f64),
    #[error("mean surface reflectance {0} must be below 1 for inter-reflection to converge")]
    ReflectanceNotBelowOne(f64),
    #[error("room surface area {0} m² must be positive")]
    NonPositiveArea(f64),
    #[error("patch grid must have at least one cell per side")]
    EmptyPatchGrid,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Sky luminance distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkyModel {
    /// Standard overcast gradation: L(γ) = L_z·(1 + 2·sin γ)/3.
    CieOvercast,
    /// Constant luminance over the hemisphere.
    Uniform,
}

/// Sky state: a luminance model plus the exterior diffuse horizontal
/// illuminance it is scaled to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkyCondition {
    pub model: SkyModel,
    /// Exterior diffuse horizontal illuminance (lux), ≥ 0.
    pub diffuse_horizontal_lux: f64,
}

/// Daylight-factor decomposition at one point (all percent of E_dh).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DaylightComponents {
    pub sc_pct: f64,
    pub erc_pct: f64,
    pub irc_pct: f64,
    /// Total daylight factor; always exactly `sc + erc + irc`.
    pub df_pct: f64,
}

impl DaylightComponents {
    pub fn new(sc_pct: f64, erc_pct: f64, irc_pct: f64) -> Self {
        DaylightComponents { sc_pct, erc_pct, irc_pct, df_pct: sc_pct + erc_pct + irc_pct }
    }
}

/// Zenith luminance (cd/m²) that makes the model integrate to `e_dh` lux on
/// the horizontal: E_dh = ∫ L(γ)·sin γ dΩ over the hemisphere gives
/// L_z = 9·E_dh/(7π) for the overcast gradation and E_dh/π for the uniform
/// sky.
pub fn zenith_luminance(model: SkyModel, e_dh: f64) -> f64 {
    match model {
        SkyModel::CieOvercast => 9.0 * e_dh / (7.0 * PI),
        SkyModel::Uniform => e_dh / PI,
    }
}

/// Sky luminance (cd/m²) at elevation `gamma_deg` above the horizon, given
/// the zenith luminance.
pub fn sky_luminance(model: SkyModel, gamma_deg: f64, zenith: f64) -> f64 {
    match model {
        SkyModel::CieOvercast => zenith * (1.0 + 2.0 * gamma_deg.to_radians().sin()) / 3.0,
        SkyModel::Uniform => zenith,
    }
}

/// Luminance at elevation with sin γ given, normalized to E_dh = 1.
fn relative_luminance(model: SkyModel, sin_gamma: f64) -> f64 {
    match model {
        SkyModel::CieOvercast => 3.0 * (1.0 + 2.0 * sin_gamma) / (7.0 * PI),
        SkyModel::Uniform => 1.0 / PI,
    }
}

/// Hemispheric mean luminance normalized to E_dh = 1: 6/(7π) for the
/// overcast gradation, 1/π for the uniform sky.
pub fn mean_relative_luminance(model: SkyModel) -> f64 {
    match model {
        SkyModel::CieOvercast => 6.0 / (7.0 * PI),
        SkyModel::Uniform => 1.0 / PI,
    }
}

/// An exterior surface that can block the view of sky through a window.
#[derive(Debug, Clone, Copy)]
pub struct Blocker<'a> {
    pub polygon: &'a Polygon,
    /// Diffuse reflectance in [0, 1].
    pub reflectance: f64,
}

/// Quadrature controls for the window patch integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkyOptions {
    /// The window is subdivided into `patch_n × patch_n` cells.
    pub patch_n: usize,
    /// Fraction of the mean sky luminance that obstructed or ground patches
    /// re-emit before their reflectance is applied.
    pub obstruction_luminance_factor: f64,
}

impl Default for SkyOptions {
    fn default() -> Self {
        SkyOptions { patch_n: 16, obstruction_luminance_factor: 0.2 }
    }
}

/// Sky component (percent of E_dh) at `q` for one window.
///
/// The window is subdivided into an N×N grid; each patch whose center ray
/// from `q` climbs above the horizon and is not blocked by an obstruction
/// contributes its luminance times the work-plane cosine times its exact
/// solid angle.  The result is independent of the sky brightness in the
/// condition — only the model matters.
pub fn sky_component(
    q: Point3,
    window: &Polygon,
    transmittance: f64,
    blockers: &[Blocker<'_>],
    sky: &SkyCondition,
    opts: &SkyOptions,
) -> Result<f64, SkyError> {
    let sums = patch_sums(q, window, transmittance, blockers, opts)?;
    Ok(100.0 * transmittance
        * sums
            .sky
            .iter()
            .map(|&(sin_gamma, omega)| relative_luminance(sky.model, sin_gamma) * sin_gamma * omega)
            .sum::<f64>())
}

/// Externally reflected component (percent of E_dh) at `q` for one window.
///
/// Patches whose center ray ends on an obstruction take that obstruction's
/// reflectance; patches looking below the horizon see ground of reflectance
/// `ground_albedo`.  Both re-emit `obstruction_luminance_factor` times the
/// hemispheric mean sky luminance, scaled by that reflectance.
pub fn externally_reflected_component(
    q: Point3,
    window: &Polygon,
    transmittance: f64,
    blockers: &[Blocker<'_>],
    ground_albedo: f64,
    sky: &SkyCondition,
    opts: &SkyOptions,
) -> Result<f64, SkyError> {
    if !(0.0..=1.0).contains(&ground_albedo) {
        return Err(SkyError::ReflectanceOutOfRange(ground_albedo));
    }
    let sums = patch_sums(q, window, transmittance, blockers, opts)?;
    let l_mean = mean_relative_luminance(sky.model);
    let reflected = sums.blocked + ground_albedo * sums.ground;
    Ok(100.0 * transmittance * opts.obstruction_luminance_factor * l_mean * reflected)
}

struct PatchSums {
    /// (sin γ, Ω) for clear-sky patches.
    sky: Vec<(f64, f64)>,
    /// Σ ρ·|sin γ|·Ω over obstruction-blocked patches.
    blocked: f64,
    /// Σ |sin γ|·Ω over below-horizon (ground-viewing) patches.
    ground: f64,
}

fn patch_sums(
    q: Point3,
    window: &Polygon,
    transmittance: f64,
    blockers: &[Blocker<'_>],
    opts: &SkyOptions,
) -> Result<PatchSums, SkyError> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(SkyError::TransmittanceOutOfRange(transmittance));
    }
    for b in blockers {
        if !(0.0..=1.0).contains(&b.reflectance) {
            return Err(SkyError::ReflectanceOutOfRange(b.reflectance));
        }
    }
    if opts.patch_n == 0 {
        return Err(SkyError::EmptyPatchGrid);
    }
    if window.plane().signed_distance(q).abs() <= PLANARITY_TOL {
        return Err(SkyError::DegenerateViewpoint);
    }

    let mut sums = PatchSums { sky: Vec::new(), blocked: 0.0, ground: 0.0 };
    for piece in subdivide(window, opts.patch_n)? {
        let omega = solid_angle(q, &piece)?;
        if omega <= 0.0 {
            continue;
        }
        let ray = piece.centroid() - q;
        let sin_gamma = ray.z / ray.norm();
        match nearest_blocker(q, &piece, blockers) {
            Some(reflectance) => sums.blocked += reflectance * sin_gamma.abs() * omega,
            None if sin_gamma > 0.0 => sums.sky.push((sin_gamma, omega)),
            None => sums.ground += sin_gamma.abs() * omega,
        }
    }
    Ok(sums)
}

/// Reflectance of the nearest obstruction hit by the ray from `q` through
/// the patch centroid, or `None` for a clear line of sight.
fn nearest_blocker(q: Point3, piece: &Polygon, blockers: &[Blocker<'_>]) -> Option<f64> {
    let dir = {
        let r = piece.centroid() - q;
        r * (1.0 / r.norm())
    };
    let mut best: Option<(f64, f64)> = None;
    for b in blockers {
        let n = b.polygon.plane().normal().as_vec();
        let denom = n.dot(dir);
        if denom.abs() < 1e-12 {
            continue;
        }
        let s = (b.polygon.plane().offset() - n.dot(q.to_vec())) / denom;
        if s <= 1e-9 {
            continue;
        }
        let hit = q + dir * s;
        match b.polygon.locate_point(hit) {
            Ok(PointLocation::Inside) | Ok(PointLocation::OnBoundary) => {
                if best.map_or(true, |(s0, _)| s < s0) {
                    best = Some((s, b.reflectance));
                }
            }
            _ => {}
        }
    }
    best.map(|(_, r)| r)
}

/// Cuts the window into grid-cell pieces (N×N over its in-plane bounding
/// box, intersected with the window outline).
fn subdivide(window: &Polygon, n: usize) -> Result<Vec<Polygon>, SkyError> {
    let local = window.local_vertices();
    let (mut min_a, mut min_b) = (f64::MAX, f64::MAX);
    let (mut max_a, mut max_b) = (f64::MIN, f64::MIN);
    for p in local {
        min_a = min_a.min(p[0]);
        max_a = max_a.max(p[0]);
        min_b = min_b.min(p[1]);
        max_b = max_b.max(p[1]);
    }
    let da = (max_a - min_a) / n as f64;
    let db = (max_b - min_b) / n as f64;
    let mut pieces = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let a0 = min_a + da * i as f64;
            let b0 = min_b + db * j as f64;
            let corners = vec![
                window.from_local([a0, b0]),
                window.from_local([a0 + da, b0]),
                window.from_local([a0 + da, b0 + db]),
                window.from_local([a0, b0 + db]),
            ];
            let Ok(cell) = Polygon::new(corners) else {
                continue;
            };
            pieces.extend(clip_polygon(&cell, window)?);
        }
    }
    Ok(pieces)
}

// ─── Internally reflected component ─────────────────────────────────────────

/// Tabulated conversion coefficient for the split-flux formula as a function
/// of the external obstruction angle (deg above the horizon at the window
/// mid-height); 39 with no obstruction, interpolated linearly in between.
const C_TABLE: [(f64, f64); 9] = [
    (0.0, 39.0),
    (10.0, 35.0),
    (20.0, 31.0),
    (30.0, 25.0),
    (40.0, 20.0),
    (50.0, 14.0),
    (60.0, 10.0),
    (70.0, 7.0),
    (80.0, 5.0),
];

/// Split-flux conversion coefficient C for an obstruction rising
/// `angle_deg` above the horizon; clamped to the tabulated range.
pub fn obstruction_coefficient(angle_deg: f64) -> f64 {
    let a = angle_deg.clamp(C_TABLE[0].0, C_TABLE[C_TABLE.len() - 1].0);
    for w in C_TABLE.windows(2) {
        let (a0, c0) = w[0];
        let (a1, c1) = w[1];
        if a <= a1 {
            return c0 + (c1 - c0) * (a - a0) / (a1 - a0);
        }
    }
    C_TABLE[C_TABLE.len() - 1].1
}

/// Internally reflected component (percent of E_dh) by the split-flux
/// method:
///
/// IRC = τ·W / (A·(1 − R)) · (C·R_fw + 5·R_cw)
///
/// with `W` the glazing area, `A` the total room surface area, `R` the
/// area-weighted mean reflectance, `R_fw` the mean reflectance of the floor
/// and walls below the window mid-height, `R_cw` of the ceiling and walls
/// above it, and `C` the obstruction coefficient.
pub fn split_flux_irc(
    transmittance: f64,
    window_area: f64,
    total_area: f64,
    mean_reflectance: f64,
    r_floor_walls: f64,
    r_ceiling_walls: f64,
    c: f64,
) -> Result<f64, SkyError> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(SkyError::TransmittanceOutOfRange(transmittance));
    }
    if !(total_area > 0.0) || window_area < 0.0 {
        return Err(SkyError::NonPositiveArea(total_area.min(window_area)));
    }
    if !(0.0..1.0).contains(&mean_reflectance) {
        return Err(SkyError::ReflectanceNotBelowOne(mean_reflectance));
    }
    for r in [r_floor_walls, r_ceiling_walls] {
        if !(0.0..=1.0).contains(&r) {
            return Err(SkyError::ReflectanceOutOfRange(r));
        }
    }
    Ok(transmittance * window_area / (total_area * (1.0 - mean_reflectance))
        * (c * r_floor_walls + 5.0 * r_ceiling_walls))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;

    fn vertical_window(x0: f64, x1: f64, z0: f64, z1: f64, y: f64) -> Polygon {
        Polygon::new(vec![
            Point3::new(x0, y, z0),
            Point3::new(x1, y, z0),
            Point3::new(x1, y, z1),
            Point3::new(x0, y, z1),
        ])
        .unwrap()
    }

    fn overcast(e_dh: f64) -> SkyCondition {
        SkyCondition { model: SkyModel::CieOvercast, diffuse_horizontal_lux: e_dh }
    }

    #[test]
    fn zenith_luminance_closures() {
        // Overcast: L_z = 9·E/(7π); uniform: E/π.
        let lz = zenith_luminance(SkyModel::CieOvercast, 10_000.0);
        assert!((lz - 90_000.0 / (7.0 * PI)).abs() < 1e-9);
        assert!((lz - 4092.0).abs() < 1.0);
        assert!((zenith_luminance(SkyModel::Uniform, PI) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overcast_horizon_is_a_third_of_zenith() {
        let lz = 300.0;
        assert!((sky_luminance(SkyModel::CieOvercast, 0.0, lz) - 100.0).abs() < 1e-12);
        assert!((sky_luminance(SkyModel::CieOvercast, 90.0, lz) - 300.0).abs() < 1e-12);
        assert!((sky_luminance(SkyModel::Uniform, 17.0, lz) - 300.0).abs() < 1e-12);
    }

    #[test]
    fn components_sum_into_the_daylight_factor() {
        let c = DaylightComponents::new(3.25, 0.5, 1.125);
        assert_eq!(c.df_pct, 3.25 + 0.5 + 1.125);
    }

    #[test]
    fn sky_component_is_independent_of_sky_brightness() {
        let w = vertical_window(0.0, 1.0, 1.0, 2.0, 2.0);
        let q = Point3::new(0.5, 0.0, 0.0);
        let opts = SkyOptions::default();
        let a = sky_component(q, &w, 0.8, &[], &overcast(1.0), &opts).unwrap();
        let b = sky_component(q, &w, 0.8, &[], &overcast(10_000.0), &opts).unwrap();
        assert_eq!(a, b, "daylight factors are ratios");
        assert!(a > 0.0 && a < 100.0);
    }

    #[test]
    fn tiny_window_has_negligible_sky_component() {
        let w = vertical_window(0.0, 1e-3, 1.0, 1.001, 2.0);
        let q = Point3::new(0.0, 0.0, 0.0);
        let sc = sky_component(q, &w, 1.0, &[], &overcast(1.0), &SkyOptions::default()).unwrap();
        assert!(sc < 1e-4, "sc = {sc}");
    }

    #[test]
    fn viewpoint_in_window_plane_is_an_error() {
        let w = vertical_window(0.0, 1.0, 1.0, 2.0, 2.0);
        let q = Point3::new(5.0, 2.0, 0.5);
        assert!(matches!(
            sky_component(q, &w, 1.0, &[], &overcast(1.0), &SkyOptions::default()),
            Err(SkyError::DegenerateViewpoint)
        ));
    }

    #[test]
    fn full_cover_turns_all_sky_into_reflection() {
        // An obstruction congruent with the window but 0.5 m outside it
        // blocks every patch: SC drops to zero and ERC equals
        // factor × ρ × (uniform-sky SC at the mean luminance).
        let w = vertical_window(0.0, 2.0, 0.5, 2.0, 3.0);
        let cover = vertical_window(-5.0, 7.0, -2.0, 7.0, 3.5);
        let q = Point3::new(1.0, 0.0, 0.0);
        let rho = 0.6;
        let blockers = [Blocker { polygon: &cover, reflectance: rho }];
        let opts = SkyOptions::default();
        let sky = overcast(500.0);

        let sc = sky_component(q, &w, 0.9, &blockers, &sky, &opts).unwrap();
        assert_eq!(sc, 0.0);

        let erc = externally_reflected_component(q, &w, 0.9, &blockers, 0.2, &sky, &opts).unwrap();
        // Same quadrature with every patch at the mean overcast luminance.
        let uniform_at_mean = {
            let unobstructed =
                sky_component(q, &w, 0.9, &[], &overcast(1.0), &opts).unwrap();
            // Uniform relative luminance is 1/π; rescale to the overcast
            // hemispheric mean 6/(7π).
            let uniform = sky_component(
                q,
                &w,
                0.9,
                &[],
                &SkyCondition { model: SkyModel::Uniform, diffuse_horizontal_lux: 1.0 },
                &opts,
            )
            .unwrap();
            assert!(uniform > 0.0 && unobstructed > 0.0);
            uniform * mean_relative_luminance(SkyModel::CieOvercast) * PI
        };
        let want = opts.obstruction_luminance_factor * rho * uniform_at_mean;
        assert!(
            (erc - want).abs() / want < 1e-9,
            "erc {erc} vs factor·ρ·SC_mean {want}"
        );
    }

    #[test]
    fn clear_view_has_no_erc() {
        let w = vertical_window(0.0, 1.0, 1.0, 2.0, 2.0);
        let q = Point3::new(0.5, 0.0, 0.0);
        let erc = externally_reflected_component(
            q,
            &w,
            0.9,
            &[],
            0.3,
            &overcast(1.0),
            &SkyOptions::default(),
        )
        .unwrap();
        assert_eq!(erc, 0.0);
    }

    #[test]
    fn growing_obstruction_only_reduces_the_sky_component() {
        let w = vertical_window(0.0, 2.0, 0.5, 2.5, 3.0);
        let q = Point3::new(1.0, 0.0, 0.0);
        let opts = SkyOptions::default();
        let sky = overcast(1.0);
        let small = vertical_window(0.5, 1.5, 0.0, 3.0, 4.0);
        let large = vertical_window(-1.0, 3.0, 0.0, 6.0, 4.0);
        let free = sky_component(q, &w, 1.0, &[], &sky, &opts).unwrap();
        let with_small =
            sky_component(q, &w, 1.0, &[Blocker { polygon: &small, reflectance: 0.3 }], &sky, &opts)
                .unwrap();
        let with_large =
            sky_component(q, &w, 1.0, &[Blocker { polygon: &large, reflectance: 0.3 }], &sky, &opts)
                .unwrap();
        assert!(free > with_small, "{free} > {with_small}");
        assert!(with_small > with_large, "{with_small} > {with_large}");
    }

    #[test]
    fn obstruction_coefficient_table() {
        assert_eq!(obstruction_coefficient(0.0), 39.0);
        assert_eq!(obstruction_coefficient(-5.0), 39.0);
        assert_eq!(obstruction_coefficient(80.0), 5.0);
        assert_eq!(obstruction_coefficient(89.0), 5.0);
        assert!((obstruction_coefficient(15.0) - 33.0).abs() < 1e-12);
        // Monotone non-increasing over the whole range.
        let mut prev = f64::MAX;
        for a in 0..=90 {
            let c = obstruction_coefficient(a as f64);
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn split_flux_worked_example() {
        // τ 0.85, W 2 m², A 50 m², R 0.5, R_fw 0.3, R_cw 0.7, C 39:
        // 0.85·2/25 · (11.7 + 3.5) = 1.0336 %.
        let irc = split_flux_irc(0.85, 2.0, 50.0, 0.5, 0.3, 0.7, 39.0).unwrap();
        assert!((irc - 1.0336).abs() < 1e-9, "irc = {irc}");
    }

    #[test]
    fn split_flux_degenerate_cases() {
        // No glazing → no inter-reflected light.
        assert_eq!(split_flux_irc(0.85, 0.0, 50.0, 0.5, 0.3, 0.7, 39.0).unwrap(), 0.0);
        // Black room absorbs everything.
        assert_eq!(split_flux_irc(0.85, 2.0, 50.0, 0.0, 0.0, 0.0, 39.0).unwrap(), 0.0);
        // Perfect mirror room never converges.
        assert!(matches!(
            split_flux_irc(0.85, 2.0, 50.0, 1.0, 0.3, 0.7, 39.0),
            Err(SkyError::ReflectanceNotBelowOne(_))
        ));
    }
}
