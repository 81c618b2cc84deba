//! Scene description: site, zone enclosure, glazings, obstructions,
//! sensors, and simulation options.
//!
//! Scenes are loaded from a TOML file into the raw structures in
//! [`file`], then validated into the types here.  Validation is strict:
//! every polygon must be a proper planar loop, the zone must close (every
//! surface edge shared with another surface), glazings must lie inside
//! their host surface, and all photometric quantities must be physical.
//! Errors carry the TOML path of the offending field.

mod file;
mod weather;

pub use file::{load_scene, parse_scene, serialize_scene};
pub use weather::{
    load_measurements, load_weather, parse_measurements, parse_weather, MeasurementSample,
    WeatherSample,
};
pub(crate) use weather::TIMESTAMP_FORMAT;

use crate::geometry::{Direction3, Point3, PointLocation, Polygon};
use crate::photometry::EfficacySet;
use crate::solar::Site;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    /// The input could not be read or decoded at all.
    #[error("parse error: {0}")]
    Parse(String),
    /// The input decoded but describes an unusable scene.
    #[error("invalid input at `{path}`: {message}")]
    Invalid { path: String, message: String },
}

impl SceneError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        SceneError::Invalid { path: path.into(), message: message.into() }
    }
}

/// Role a surface plays in the enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    Floor,
    Ceiling,
    Wall,
}

/// One opaque interior surface of the zone.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub id: String,
    pub kind: SurfaceKind,
    pub polygon: Polygon,
    /// Diffuse reflectance in [0, 1].
    pub reflectance: f64,
}

/// A transparent opening embedded in a host surface.
#[derive(Debug, Clone, PartialEq)]
pub struct Glazing {
    pub id: String,
    pub polygon: Polygon,
    /// Visible transmittance in [0, 1].
    pub transmittance: f64,
    /// `id` of the surface this glazing sits in.
    pub host_surface: String,
    /// Unit normal of the glazing plane pointing out of the zone.
    pub outward_normal: Direction3,
}

/// An exterior shading body (overhang, mask, neighbouring building).
#[derive(Debug, Clone, PartialEq)]
pub struct Obstruction {
    pub id: String,
    pub polygon: Polygon,
    /// Diffuse reflectance in [0, 1].
    pub reflectance: f64,
}

/// The closed room being simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct Zone {
    pub name: String,
    pub surfaces: Vec<Surface>,
    pub glazings: Vec<Glazing>,
    /// Index into `surfaces` of the (unique) floor.
    floor_idx: usize,
    /// Σ area over all surfaces (m²).
    pub total_surface_area_m2: f64,
    /// Area-weighted mean reflectance of all surfaces.
    pub mean_reflectance: f64,
}

impl Zone {
    pub(crate) fn new(name: String, surfaces: Vec<Surface>, glazings: Vec<Glazing>) -> Self {
        let floor_idx = surfaces
            .iter()
            .position(|s| s.kind == SurfaceKind::Floor)
            .expect("validated zones have a floor");
        let total: f64 = surfaces.iter().map(|s| s.polygon.area()).sum();
        let weighted: f64 = surfaces.iter().map(|s| s.polygon.area() * s.reflectance).sum();
        Zone {
            name,
            floor_idx,
            total_surface_area_m2: total,
            mean_reflectance: weighted / total,
            surfaces,
            glazings,
        }
    }

    pub fn floor(&self) -> &Surface {
        &self.surfaces[self.floor_idx]
    }

    /// True when the vertical through `(x, y)` lands in the floor polygon.
    pub fn footprint_contains(&self, x: f64, y: f64) -> bool {
        self.drop_to_floor(x, y).is_some()
    }

    /// The floor point directly under `(x, y)`, or `None` when the
    /// vertical misses the floor polygon.
    pub fn drop_to_floor(&self, x: f64, y: f64) -> Option<Point3> {
        let floor = self.floor();
        let z = drop_to_plane(floor, x, y)?;
        let p = Point3::new(x, y, z);
        match floor.polygon.locate_point(p) {
            Ok(PointLocation::Inside) | Ok(PointLocation::OnBoundary) => Some(p),
            _ => None,
        }
    }
}

/// z of the surface's plane under `(x, y)`, or `None` for a vertical plane.
fn drop_to_plane(surface: &Surface, x: f64, y: f64) -> Option<f64> {
    let n = surface.polygon.normal().as_vec();
    if n.z.abs() < 1e-9 {
        return None;
    }
    Some((surface.polygon.plane().offset() - n.x * x - n.y * y) / n.z)
}

/// How the work-plane sensors were specified.
#[derive(Debug, Clone, PartialEq)]
pub enum SensorSpec {
    /// Explicit named points.
    Points(Vec<SensorPoint>),
    /// Regular grid over the floor.
    Grid { spacing_m: f64, height_m: f64, margin_m: f64 },
}

/// One work-plane evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorPoint {
    pub id: String,
    pub position: Point3,
}

/// Tunable simulation behaviour.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Side count of the window patch grid for the sky integrals.
    pub patch_n: usize,
    /// Luminance of a patch hidden behind an obstruction, as a fraction of
    /// the mean sky luminance (before the obstruction's own reflectance).
    pub obstruction_luminance_factor: f64,
    /// When false, exterior obstructions are ignored everywhere: sky
    /// masking, reflected light, sunspot shadows, and the split-flux
    /// obstruction coefficient.
    pub enable_overhang_shading: bool,
    pub efficacies: EfficacySet,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            patch_n: 16,
            obstruction_luminance_factor: 0.2,
            enable_overhang_shading: false,
            efficacies: EfficacySet::default(),
        }
    }
}

/// A fully validated scene, ready for the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub site: Site,
    pub zone: Zone,
    pub obstructions: Vec<Obstruction>,
    /// The sensor layout as written in the file (kept for re-serialization).
    pub sensor_spec: SensorSpec,
    /// The expanded, validated evaluation points.
    pub sensors: Vec<SensorPoint>,
    pub options: SimOptions,
    /// Non-fatal findings from validation (e.g. a zone that only closes at
    /// relaxed tolerance).
    pub warnings: Vec<String>,
}

/// Expands a floor grid: axis-aligned rows/columns over the floor's
/// bounding box, inset by `margin_m`, keeping points whose vertical lands
/// inside the floor, at `height_m` above it.  Ids are `P_<row>_<col>`.
pub fn expand_grid(
    zone: &Zone,
    spacing_m: f64,
    height_m: f64,
    margin_m: f64,
) -> Result<Vec<SensorPoint>, SceneError> {
    let path = "sensors";
    if !(spacing_m > 0.0) || !spacing_m.is_finite() {
        return Err(SceneError::invalid(format!("{path}.spacing_m"), "must be > 0"));
    }
    if !(height_m >= 0.0) || !height_m.is_finite() {
        return Err(SceneError::invalid(format!("{path}.height_m"), "must be ≥ 0"));
    }
    if !(margin_m >= 0.0) || !margin_m.is_finite() {
        return Err(SceneError::invalid(format!("{path}.margin_m"), "must be ≥ 0"));
    }
    let floor = zone.floor();
    let (mut min_x, mut min_y) = (f64::MAX, f64::MAX);
    let (mut max_x, mut max_y) = (f64::MIN, f64::MIN);
    for v in floor.polygon.vertices() {
        min_x = min_x.min(v.x);
        max_x = max_x.max(v.x);
        min_y = min_y.min(v.y);
        max_y = max_y.max(v.y);
    }
    let mut sensors = Vec::new();
    let mut row = 0usize;
    let mut y = min_y + margin_m;
    while y <= max_y - margin_m + 1e-12 {
        let mut col = 0usize;
        let mut x = min_x + margin_m;
        while x <= max_x - margin_m + 1e-12 {
            if zone.footprint_contains(x, y) {
                let z = drop_to_plane(floor, x, y).expect("floor is not vertical");
                sensors.push(SensorPoint {
                    id: format!("P_{row}_{col}"),
                    position: Point3::new(x, y, z + height_m),
                });
            }
            col += 1;
            x = min_x + margin_m + spacing_m * col as f64;
        }
        row += 1;
        y = min_y + margin_m + spacing_m * row as f64;
    }
    if sensors.is_empty() {
        return Err(SceneError::invalid(path, "grid produced no points inside the floor"));
    }
    Ok(sensors)
}
