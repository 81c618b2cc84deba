//! TOML scene file reading, validation, and writing.

use super::{
    Glazing, Obstruction, Scene, SceneError, SensorPoint, SensorSpec, SimOptions, Surface,
    SurfaceKind, Zone,
};
use crate::geometry::{Point3, PointLocation, Polygon, PLANARITY_TOL};
use crate::photometry::EfficacySet;
use crate::solar::Site;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Surface edges must coincide within this distance for the zone to count
/// as closed (m).
const CLOSURE_TOL: f64 = 1e-3;
/// Edges matching only within this looser distance close the zone with a
/// warning (m).
const CLOSURE_TOL_RELAXED: f64 = 1e-2;

// ─── Raw (serde) layer ──────────────────────────────────────────────────────

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    site: RawSite,
    zone: RawZone,
    #[serde(default)]
    obstructions: Vec<RawObstruction>,
    sensors: RawSensors,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    efficacy: Option<RawEfficacy>,
    #[serde(default)]
    options: RawOptions,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSite {
    latitude_deg: f64,
    longitude_deg: f64,
    tz_offset_h: f64,
    albedo: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawZone {
    name: String,
    surfaces: Vec<RawSurface>,
    #[serde(default)]
    glazings: Vec<RawGlazing>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    id: String,
    kind: String,
    reflectance: f64,
    vertices: Vec<[f64; 3]>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGlazing {
    id: String,
    host_surface: String,
    transmittance: f64,
    vertices: Vec<[f64; 3]>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawObstruction {
    id: String,
    reflectance: f64,
    vertices: Vec<[f64; 3]>,
}

/// Either explicit `points` or a `grid` spec — exactly one.
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSensors {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<RawSensorPoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<RawGrid>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSensorPoint {
    id: String,
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    height_m: f64,
    spacing_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    margin_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawEfficacy {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k_diffuse: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k_beam: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k_global: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    patch_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    obstruction_luminance_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    enable_overhang_shading: Option<bool>,
}

// ─── Parse & validate ───────────────────────────────────────────────────────

/// Reads and validates a scene from a TOML string.
pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let raw: RawScene = toml::from_str(text).map_err(|e| SceneError::Parse(e.to_string()))?;
    validate(raw)
}

/// Reads and validates a scene from a file on disk.
pub fn load_scene(path: &Path) -> Result<Scene, SceneError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SceneError::Parse(format!("{}: {e}", path.display())))?;
    parse_scene(&text)
}

fn validate(raw: RawScene) -> Result<Scene, SceneError> {
    let mut warnings = Vec::new();
    let site = validate_site(&raw.site)?;
    let zone = validate_zone(&raw.zone, &mut warnings)?;
    let obstructions = validate_obstructions(&raw.obstructions)?;
    let options = validate_options(&raw.options, raw.efficacy.as_ref())?;
    let sensor_spec = validate_sensor_spec(&raw.sensors)?;
    let sensors = expand_sensors(&zone, &sensor_spec)?;
    Ok(Scene { site, zone, obstructions, sensor_spec, sensors, options, warnings })
}

fn validate_site(raw: &RawSite) -> Result<Site, SceneError> {
    if !(-90.0..=90.0).contains(&raw.latitude_deg) {
        return Err(SceneError::invalid("site.latitude_deg", "must be within ±90"));
    }
    if !(-180.0..=180.0).contains(&raw.longitude_deg) {
        return Err(SceneError::invalid("site.longitude_deg", "must be within ±180"));
    }
    if !(-14.0..=14.0).contains(&raw.tz_offset_h) {
        return Err(SceneError::invalid("site.tz_offset_h", "must be within ±14 h"));
    }
    if !(0.0..=1.0).contains(&raw.albedo) {
        return Err(SceneError::invalid("site.albedo", "must be within [0, 1]"));
    }
    Ok(Site {
        latitude_deg: raw.latitude_deg,
        longitude_deg: raw.longitude_deg,
        tz_offset_h: raw.tz_offset_h,
        albedo: raw.albedo,
    })
}

fn polygon_at(path: &str, vertices: &[[f64; 3]]) -> Result<Polygon, SceneError> {
    let pts: Vec<Point3> = vertices.iter().map(|v| Point3::new(v[0], v[1], v[2])).collect();
    Polygon::new(pts).map_err(|e| SceneError::invalid(format!("{path}.vertices"), e.to_string()))
}

fn check_fraction(path: String, value: f64) -> Result<f64, SceneError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(SceneError::invalid(path, "must be within [0, 1]"));
    }
    Ok(value)
}

fn validate_zone(raw: &RawZone, warnings: &mut Vec<String>) -> Result<Zone, SceneError> {
    if raw.name.is_empty() {
        return Err(SceneError::invalid("zone.name", "must not be empty"));
    }
    if raw.surfaces.len() < 4 {
        return Err(SceneError::invalid(
            "zone.surfaces",
            "a closed zone needs at least 4 surfaces",
        ));
    }

    let mut surfaces = Vec::with_capacity(raw.surfaces.len());
    for (i, s) in raw.surfaces.iter().enumerate() {
        let path = format!("zone.surfaces[{i}]");
        if s.id.is_empty() {
            return Err(SceneError::invalid(format!("{path}.id"), "must not be empty"));
        }
        let kind = match s.kind.as_str() {
            "floor" => SurfaceKind::Floor,
            "ceiling" => SurfaceKind::Ceiling,
            "wall" => SurfaceKind::Wall,
            other => {
                return Err(SceneError::invalid(
                    format!("{path}.kind"),
                    format!("unknown kind `{other}` (expected floor, ceiling, or wall)"),
                ))
            }
        };
        surfaces.push(Surface {
            id: s.id.clone(),
            kind,
            polygon: polygon_at(&path, &s.vertices)?,
            reflectance: check_fraction(format!("{path}.reflectance"), s.reflectance)?,
        });
    }

    let mut seen = std::collections::BTreeSet::new();
    for (i, s) in surfaces.iter().enumerate() {
        if !seen.insert(s.id.as_str()) {
            return Err(SceneError::invalid(
                format!("zone.surfaces[{i}].id"),
                format!("duplicate id `{}`", s.id),
            ));
        }
    }
    let floors: Vec<_> =
        surfaces.iter().filter(|s| s.kind == SurfaceKind::Floor).collect();
    if floors.len() != 1 {
        return Err(SceneError::invalid(
            "zone.surfaces",
            format!("exactly one floor surface is required, found {}", floors.len()),
        ));
    }
    check_closure(&surfaces, warnings)?;

    // Interior reference point for orienting glazing normals.
    let interior = {
        let mut acc = crate::geometry::Vec3::ZERO;
        for s in &surfaces {
            acc = acc + s.polygon.centroid().to_vec();
        }
        Point3::new(
            acc.x / surfaces.len() as f64,
            acc.y / surfaces.len() as f64,
            acc.z / surfaces.len() as f64,
        )
    };

    let mut glazings = Vec::with_capacity(raw.glazings.len());
    for (i, g) in raw.glazings.iter().enumerate() {
        let path = format!("zone.glazings[{i}]");
        if g.id.is_empty() {
            return Err(SceneError::invalid(format!("{path}.id"), "must not be empty"));
        }
        if glazings.iter().any(|p: &Glazing| p.id == g.id) || seen.contains(g.id.as_str()) {
            return Err(SceneError::invalid(
                format!("{path}.id"),
                format!("duplicate id `{}`", g.id),
            ));
        }
        let polygon = polygon_at(&path, &g.vertices)?;
        let transmittance =
            check_fraction(format!("{path}.transmittance"), g.transmittance)?;
        let host = surfaces.iter().find(|s| s.id == g.host_surface).ok_or_else(|| {
            SceneError::invalid(
                format!("{path}.host_surface"),
                format!("no surface named `{}`", g.host_surface),
            )
        })?;
        // The glazing must lie in the host plane…
        for (vi, v) in polygon.vertices().iter().enumerate() {
            let d = host.polygon.plane().signed_distance(*v).abs();
            if d > PLANARITY_TOL {
                return Err(SceneError::invalid(
                    format!("{path}.vertices[{vi}]"),
                    format!("lies {d:.2e} m off the `{}` plane", host.id),
                ));
            }
        }
        // …and inside the host outline (vertices and edge midpoints).
        let verts = polygon.vertices();
        for vi in 0..verts.len() {
            let a = verts[vi];
            let b = verts[(vi + 1) % verts.len()];
            let mid = Point3::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0, (a.z + b.z) / 2.0);
            for (what, p) in [("vertex", a), ("edge midpoint", mid)] {
                match host.polygon.locate_point(p) {
                    Ok(PointLocation::Inside) | Ok(PointLocation::OnBoundary) => {}
                    _ => {
                        return Err(SceneError::invalid(
                            format!("{path}.vertices"),
                            format!("{what} outside host surface `{}`", host.id),
                        ))
                    }
                }
            }
        }
        let n = host.polygon.normal();
        let to_interior = interior - host.polygon.centroid();
        let outward_normal =
            if n.as_vec().dot(to_interior) > 0.0 { n.flipped() } else { n };
        glazings.push(Glazing {
            id: g.id.clone(),
            polygon,
            transmittance,
            host_surface: g.host_surface.clone(),
            outward_normal,
        });
    }

    Ok(Zone::new(raw.name.clone(), surfaces, glazings))
}

/// Every surface edge must be shared with another surface.  Edges pairing
/// only at the relaxed tolerance add a warning; edges that never pair make
/// the zone invalid.
fn check_closure(surfaces: &[Surface], warnings: &mut Vec<String>) -> Result<(), SceneError> {
    struct Edge {
        owner: usize,
        a: Point3,
        b: Point3,
    }
    let mut edges = Vec::new();
    for (si, s) in surfaces.iter().enumerate() {
        let v = s.polygon.vertices();
        for i in 0..v.len() {
            edges.push(Edge { owner: si, a: v[i], b: v[(i + 1) % v.len()] });
        }
    }
    let matches = |e: &Edge, f: &Edge, tol: f64| -> bool {
        let d = |p: Point3, q: Point3| (p - q).norm();
        (d(e.a, f.a) <= tol && d(e.b, f.b) <= tol) || (d(e.a, f.b) <= tol && d(e.b, f.a) <= tol)
    };
    for (i, e) in edges.iter().enumerate() {
        let paired = |tol: f64| {
            edges
                .iter()
                .enumerate()
                .any(|(j, f)| j != i && f.owner != e.owner && matches(e, f, tol))
        };
        if paired(CLOSURE_TOL) {
            continue;
        }
        if paired(CLOSURE_TOL_RELAXED) {
            warnings.push(format!(
                "zone closes only at {CLOSURE_TOL_RELAXED} m tolerance near edge \
                 ({:.3}, {:.3}, {:.3})–({:.3}, {:.3}, {:.3}) of `{}`",
                e.a.x, e.a.y, e.a.z, e.b.x, e.b.y, e.b.z, surfaces[e.owner].id
            ));
            continue;
        }
        return Err(SceneError::invalid(
            "zone.surfaces",
            format!(
                "zone is not closed: edge ({:.3}, {:.3}, {:.3})–({:.3}, {:.3}, {:.3}) of `{}` \
                 is not shared with any other surface",
                e.a.x, e.a.y, e.a.z, e.b.x, e.b.y, e.b.z, surfaces[e.owner].id
            ),
        ));
    }
    Ok(())
}

fn validate_obstructions(raw: &[RawObstruction]) -> Result<Vec<Obstruction>, SceneError> {
    let mut out = Vec::with_capacity(raw.len());
    for (i, o) in raw.iter().enumerate() {
        let path = format!("obstructions[{i}]");
        if o.id.is_empty() {
            return Err(SceneError::invalid(format!("{path}.id"), "must not be empty"));
        }
        if out.iter().any(|p: &Obstruction| p.id == o.id) {
            return Err(SceneError::invalid(
                format!("{path}.id"),
                format!("duplicate id `{}`", o.id),
            ));
        }
        out.push(Obstruction {
            id: o.id.clone(),
            polygon: polygon_at(&path, &o.vertices)?,
            reflectance: check_fraction(format!("{path}.reflectance"), o.reflectance)?,
        });
    }
    Ok(out)
}

fn validate_options(
    raw: &RawOptions,
    efficacy: Option<&RawEfficacy>,
) -> Result<SimOptions, SceneError> {
    let defaults = SimOptions::default();
    let patch_n = raw.patch_n.unwrap_or(defaults.patch_n);
    if patch_n == 0 || patch_n > 512 {
        return Err(SceneError::invalid("options.patch_n", "must be in 1..=512"));
    }
    let obstruction_luminance_factor = raw
        .obstruction_luminance_factor
        .unwrap_or(defaults.obstruction_luminance_factor);
    if !(0.0..=1.0).contains(&obstruction_luminance_factor) {
        return Err(SceneError::invalid(
            "options.obstruction_luminance_factor",
            "must be within [0, 1]",
        ));
    }
    let efficacies = match efficacy {
        Some(e) => EfficacySet {
            k_diffuse: e.k_diffuse.unwrap_or(defaults.efficacies.k_diffuse),
            k_beam: e.k_beam.unwrap_or(defaults.efficacies.k_beam),
            k_global: e.k_global.unwrap_or(defaults.efficacies.k_global),
        },
        None => defaults.efficacies,
    };
    efficacies
        .validate()
        .map_err(|e| SceneError::invalid("efficacy", e.to_string()))?;
    Ok(SimOptions {
        patch_n,
        obstruction_luminance_factor,
        enable_overhang_shading: raw
            .enable_overhang_shading
            .unwrap_or(defaults.enable_overhang_shading),
        efficacies,
    })
}

fn validate_sensor_spec(raw: &RawSensors) -> Result<SensorSpec, SceneError> {
    match (&raw.points, &raw.grid) {
        (Some(_), Some(_)) => Err(SceneError::invalid(
            "sensors",
            "give either `points` or `grid`, not both",
        )),
        (None, None) => Err(SceneError::invalid(
            "sensors",
            "either `points` or `grid` is required",
        )),
        (Some(pts), None) => {
            if pts.is_empty() {
                return Err(SceneError::invalid("sensors.points", "must not be empty"));
            }
            let mut out = Vec::with_capacity(pts.len());
            for (i, p) in pts.iter().enumerate() {
                let path = format!("sensors.points[{i}]");
                if p.id.is_empty() {
                    return Err(SceneError::invalid(format!("{path}.id"), "must not be empty"));
                }
                if out.iter().any(|q: &SensorPoint| q.id == p.id) {
                    return Err(SceneError::invalid(
                        format!("{path}.id"),
                        format!("duplicate id `{}`", p.id),
                    ));
                }
                let pos = Point3::new(p.x, p.y, p.z);
                if !pos.is_finite() {
                    return Err(SceneError::invalid(
                        format!("{path}"),
                        "coordinates must be finite",
                    ));
                }
                out.push(SensorPoint { id: p.id.clone(), position: pos });
            }
            Ok(SensorSpec::Points(out))
        }
        (None, Some(g)) => Ok(SensorSpec::Grid {
            spacing_m: g.spacing_m,
            height_m: g.height_m,
            margin_m: g.margin_m.unwrap_or(0.0),
        }),
    }
}

fn expand_sensors(zone: &Zone, spec: &SensorSpec) -> Result<Vec<SensorPoint>, SceneError> {
    match spec {
        SensorSpec::Points(pts) => {
            for (i, p) in pts.iter().enumerate() {
                if !zone.footprint_contains(p.position.x, p.position.y) {
                    return Err(SceneError::invalid(
                        format!("sensors.points[{i}].position"),
                        format!("sensor `{}` lies outside the zone footprint", p.id),
                    ));
                }
            }
            Ok(pts.clone())
        }
        SensorSpec::Grid { spacing_m, height_m, margin_m } => {
            super::expand_grid(zone, *spacing_m, *height_m, *margin_m)
        }
    }
}

// ─── Serialize ──────────────────────────────────────────────────────────────

/// Writes a validated scene back to TOML.  Parsing the output reproduces
/// the scene exactly.
pub fn serialize_scene(scene: &Scene) -> String {
    let verts = |p: &Polygon| p.vertices().iter().map(|v| [v.x, v.y, v.z]).collect();
    let raw = RawScene {
        site: RawSite {
            latitude_deg: scene.site.latitude_deg,
            longitude_deg: scene.site.longitude_deg,
            tz_offset_h: scene.site.tz_offset_h,
            albedo: scene.site.albedo,
        },
        zone: RawZone {
            name: scene.zone.name.clone(),
            surfaces: scene
                .zone
                .surfaces
                .iter()
                .map(|s| RawSurface {
                    id: s.id.clone(),
                    kind: match s.kind {
                        SurfaceKind::Floor => "floor",
                        SurfaceKind::Ceiling => "ceiling",
                        SurfaceKind::Wall => "wall",
                    }
                    .into(),
                    reflectance: s.reflectance,
                    vertices: verts(&s.polygon),
                })
                .collect(),
            glazings: scene
                .zone
                .glazings
                .iter()
                .map(|g| RawGlazing {
                    id: g.id.clone(),
                    host_surface: g.host_surface.clone(),
                    transmittance: g.transmittance,
                    vertices: verts(&g.polygon),
                })
                .collect(),
        },
        obstructions: scene
            .obstructions
            .iter()
            .map(|o| RawObstruction {
                id: o.id.clone(),
                reflectance: o.reflectance,
                vertices: verts(&o.polygon),
            })
            .collect(),
        sensors: match &scene.sensor_spec {
            SensorSpec::Points(pts) => RawSensors {
                points: Some(
                    pts.iter()
                        .map(|p| RawSensorPoint {
                            id: p.id.clone(),
                            x: p.position.x,
                            y: p.position.y,
                            z: p.position.z,
                        })
                        .collect(),
                ),
                grid: None,
            },
            SensorSpec::Grid { spacing_m, height_m, margin_m } => RawSensors {
                points: None,
                grid: Some(RawGrid {
                    height_m: *height_m,
                    spacing_m: *spacing_m,
                    margin_m: Some(*margin_m),
                }),
            },
        },
        efficacy: Some(RawEfficacy {
            k_diffuse: Some(scene.options.efficacies.k_diffuse),
            k_beam: Some(scene.options.efficacies.k_beam),
            k_global: Some(scene.options.efficacies.k_global),
        }),
        options: RawOptions {
            patch_n: Some(scene.options.patch_n),
            obstruction_luminance_factor: Some(scene.options.obstruction_luminance_factor),
            enable_overhang_shading: Some(scene.options.enable_overhang_shading),
        },
    };
    toml::to_string_pretty(&raw).expect("scene serialization cannot fail")
}
