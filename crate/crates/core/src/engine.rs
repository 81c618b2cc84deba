//! The simulation engine: daylight factors, sunspot tracking, time-series
//! illuminance, and comparison against measured data.
//!
//! For each work-plane point the engine computes a daylight factor (sky,
//! externally reflected, and internally reflected components) that depends
//! only on geometry and photometric properties.  A weather time series
//! then scales it: diffuse interior illuminance is `DF/100 × E_dh`, where
//! `E_dh` is the exterior diffuse horizontal illuminance obtained from the
//! diffuse irradiance through a luminous efficacy.  Direct sun is handled
//! separately by projecting each glazing along the beam direction onto the
//! floor — the sunspot — and crediting `τ × E_bn × sin(altitude)` to the
//! points inside it.

use crate::geometry::{
    clip_polygon, project_polygon, subtract_polygon, Direction3, GeometryError, Point3,
    PointLocation, Polygon,
};
use crate::photometry::{split_weather, PhotometryError};
use crate::scene::{
    Glazing, MeasurementSample, Scene, SensorPoint, WeatherSample, Zone,
    TIMESTAMP_FORMAT,
};
use crate::sky::{
    externally_reflected_component, obstruction_coefficient, sky_component, split_flux_irc,
    Blocker, DaylightComponents, SkyCondition, SkyError, SkyModel, SkyOptions,
};
use crate::solar::{solar_position, sun_direction, SolarError, SunState};
use chrono::NaiveDateTime;
use std::collections::BTreeMap;
use std::io;
use thiserror::Error;

/// A simulated sample and a measured reading pair up when their
/// timestamps differ by at most this much.
pub const MEASUREMENT_MATCH_TOLERANCE_S: i64 = 30;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("point `{0}` lies outside the zone footprint")]
    PointOutsideZone(String),
    #[error("weather series is empty")]
    EmptyWeather,
    #[error(
        "no measurement matched a simulated sample (same point id, \
         timestamps within {MEASUREMENT_MATCH_TOLERANCE_S} s)"
    )]
    NoMatchedPairs,
    #[error(transparent)]
    Sky(#[from] SkyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solar(#[from] SolarError),
    #[error(transparent)]
    Photometry(#[from] PhotometryError),
}

/// One simulated work-plane sample.
#[derive(Debug, Clone, PartialEq)]
pub struct IlluminanceResult {
    pub timestamp: NaiveDateTime,
    pub point_id: String,
    /// Daylight-factor decomposition at the point (time-invariant).
    pub components: DaylightComponents,
    /// Diffuse-sky share of the interior illuminance (lux).
    pub e_diffuse_lux: f64,
    /// Beam share of the interior illuminance (lux).
    pub e_direct_lux: f64,
    /// `e_diffuse_lux + e_direct_lux`.
    pub e_total_lux: f64,
}

/// Simulation-vs-measurement agreement statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    /// Number of matched pairs.
    pub n: usize,
    /// Mean bias error, mean(sim − meas) (lux); positive when the
    /// simulation over-predicts.
    pub mbe_lux: f64,
    /// Root-mean-square error (lux).
    pub rmse_lux: f64,
    /// RMSE divided by the mean measured value; `None` when the mean
    /// measurement is not positive.
    pub rmse_rel: Option<f64>,
}

/// Outcome of comparing a simulation run against measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub per_point: BTreeMap<String, ErrorMetrics>,
    /// Metrics pooled over every matched pair.
    pub overall: ErrorMetrics,
    /// Measurements with no simulated sample within the match tolerance.
    pub unmatched_measured: usize,
}

/// The beam print of one glazing on the floor.
#[derive(Debug, Clone)]
pub struct GlazingSunspot {
    /// Id of the glazing that admits the beam.
    pub glazing_id: String,
    /// Index into `scene.zone.glazings`.
    pub glazing_idx: usize,
    /// Lit floor regions (the projected glazing, clipped to the floor,
    /// minus obstruction shadows).
    pub pieces: Vec<Polygon>,
}

/// Daylight factor at `q` under the standard overcast sky.
pub fn daylight_factor_at(scene: &Scene, q: Point3) -> Result<DaylightComponents, EngineError> {
    daylight_factor_at_model(scene, q, SkyModel::CieOvercast)
}

/// Daylight factor at `q` under a chosen sky luminance model.
///
/// Sums the sky, externally reflected, and internally reflected
/// components over every glazing.  When obstruction shading is disabled in
/// the scene options, exterior obstructions are ignored for all three.
pub fn daylight_factor_at_model(
    scene: &Scene,
    q: Point3,
    model: SkyModel,
) -> Result<DaylightComponents, EngineError> {
    if scene.zone.drop_to_floor(q.x, q.y).is_none() {
        return Err(EngineError::PointOutsideZone(format!("({:.3}, {:.3}, {:.3})", q.x, q.y, q.z)));
    }
    let blockers: Vec<Blocker<'_>> = if scene.options.enable_overhang_shading {
        scene
            .obstructions
            .iter()
            .map(|o| Blocker { polygon: &o.polygon, reflectance: o.reflectance })
            .collect()
    } else {
        Vec::new()
    };
    let opts = SkyOptions {
        patch_n: scene.options.patch_n,
        obstruction_luminance_factor: scene.options.obstruction_luminance_factor,
    };
    // Daylight factors are ratios: evaluate against a unit-brightness sky.
    let sky = SkyCondition { model, diffuse_horizontal_lux: 1.0 };

    let (mut sc, mut erc, mut irc) = (0.0, 0.0, 0.0);
    for g in &scene.zone.glazings {
        sc += sky_component(q, &g.polygon, g.transmittance, &blockers, &sky, &opts)?;
        erc += externally_reflected_component(
            q,
            &g.polygon,
            g.transmittance,
            &blockers,
            scene.site.albedo,
            &sky,
            &opts,
        )?;
        let c = obstruction_coefficient(obstruction_angle_deg(scene, g));
        let (r_fw, r_cw) = split_reflectances(&scene.zone, g);
        irc += split_flux_irc(
            g.transmittance,
            g.polygon.area(),
            scene.zone.total_surface_area_m2,
            scene.zone.mean_reflectance,
            r_fw,
            r_cw,
            c,
        )?;
    }
    Ok(DaylightComponents::new(sc, erc, irc))
}

/// Highest elevation (degrees above the glazing centroid's horizon) at
/// which an exterior obstruction vertex appears; 0 with shading disabled
/// or nothing outside the glazing.
pub fn obstruction_angle_deg(scene: &Scene, glazing: &Glazing) -> f64 {
    if !scene.options.enable_overhang_shading {
        return 0.0;
    }
    let c = glazing.polygon.centroid();
    let out = glazing.outward_normal.as_vec();
    let mut angle: f64 = 0.0;
    for o in &scene.obstructions {
        for v in o.polygon.vertices() {
            let r = *v - c;
            if r.dot(out) <= 0.0 {
                continue; // not on the exterior side of the glazing
            }
            angle = angle.max((r.z / r.norm()).asin().to_degrees());
        }
    }
    angle.clamp(0.0, 80.0)
}

/// Mean reflectances of the lower half (floor + walls below the glazing
/// mid-height) and upper half (ceiling + walls above it), excluding the
/// glazing's host surface.  Surfaces straddling the mid-height contribute
/// to both in proportion to their vertical extent.
fn split_reflectances(zone: &Zone, glazing: &Glazing) -> (f64, f64) {
    let mid_z = glazing.polygon.centroid().z;
    let (mut area_lo, mut flux_lo, mut area_hi, mut flux_hi) = (0.0, 0.0, 0.0, 0.0);
    for s in &zone.surfaces {
        if s.id == glazing.host_surface {
            continue;
        }
        let (mut z0, mut z1) = (f64::MAX, f64::MIN);
        for v in s.polygon.vertices() {
            z0 = z0.min(v.z);
            z1 = z1.max(v.z);
        }
        let below = if z1 <= mid_z {
            1.0
        } else if z0 >= mid_z {
            0.0
        } else {
            (mid_z - z0) / (z1 - z0)
        };
        let a = s.polygon.area();
        area_lo += a * below;
        flux_lo += a * below * s.reflectance;
        area_hi += a * (1.0 - below);
        flux_hi += a * (1.0 - below) * s.reflectance;
    }
    let r_lo = if area_lo > 0.0 { flux_lo / area_lo } else { 0.0 };
    let r_hi = if area_hi > 0.0 { flux_hi / area_hi } else { 0.0 };
    (r_lo, r_hi)
}

/// Sunspots for a sun state: empty when the sun is at or below the
/// horizon, otherwise the beam prints of every glazing the beam enters.
pub fn sunspot(scene: &Scene, sun: &SunState) -> Result<Vec<GlazingSunspot>, EngineError> {
    if sun.altitude_deg <= 0.0 {
        return Ok(Vec::new());
    }
    sunspot_patches(scene, sun_direction(sun.altitude_deg, sun.azimuth_deg))
}

/// Projects every glazing along the beam direction onto the floor plane,
/// clips to the floor outline, and (with shading enabled) subtracts the
/// shadows cast by obstructions.
pub fn sunspot_patches(
    scene: &Scene,
    sun_dir: Direction3,
) -> Result<Vec<GlazingSunspot>, EngineError> {
    let floor = scene.zone.floor();
    let mut out = Vec::new();
    for (glazing_idx, g) in scene.zone.glazings.iter().enumerate() {
        // The beam must travel into the zone through this glazing.
        if sun_dir.as_vec().dot(g.outward_normal.as_vec()) >= 0.0 {
            continue;
        }
        let Some(print) = project_polygon(&g.polygon, sun_dir, floor.polygon.plane()) else {
            continue;
        };
        let mut pieces = clip_polygon(&print, &floor.polygon)?;
        if scene.options.enable_overhang_shading {
            for o in &scene.obstructions {
                if pieces.is_empty() {
                    break;
                }
                let Some(shadow) = project_polygon(&o.polygon, sun_dir, floor.polygon.plane())
                else {
                    continue;
                };
                pieces = subtract_polygon(&pieces, &shadow)?;
            }
        }
        if !pieces.is_empty() {
            out.push(GlazingSunspot { glazing_id: g.id.clone(), glazing_idx, pieces });
        }
    }
    Ok(out)
}

/// True when the vertical footprint of `q` lies in any piece of the spot.
///
/// Work planes sit close to the floor, so a sensor is attributed to the
/// sunspot computed on the floor plane directly below it.
fn in_sunspot(zone: &Zone, spot: &GlazingSunspot, q: Point3) -> bool {
    let Some(foot) = zone.drop_to_floor(q.x, q.y) else { return false };
    spot.pieces.iter().any(|p| {
        matches!(
            p.locate_point(foot),
            Ok(PointLocation::Inside) | Ok(PointLocation::OnBoundary)
        )
    })
}

/// Beam illuminance landing on the work plane at `q`: each sunspot
/// containing `q` contributes `τ × E_bn × sin(altitude)` through its
/// glazing.
fn beam_credit(
    scene: &Scene,
    spots: &[GlazingSunspot],
    q: Point3,
    e_bn_lux: f64,
    sin_alt: f64,
) -> f64 {
    let mut e = 0.0;
    for spot in spots {
        if in_sunspot(&scene.zone, spot, q) {
            e += scene.zone.glazings[spot.glazing_idx].transmittance * e_bn_lux * sin_alt;
        }
    }
    e
}

/// Illuminance at one named point for a single weather sample and sun
/// state.  [`simulate`] is the batched form, caching daylight factors
/// across timestamps.
pub fn illuminance_at(
    scene: &Scene,
    point: &SensorPoint,
    sample: &WeatherSample,
    sun: &SunState,
) -> Result<IlluminanceResult, EngineError> {
    let components = daylight_factor_at(scene, point.position).map_err(|e| match e {
        EngineError::PointOutsideZone(_) => EngineError::PointOutsideZone(point.id.clone()),
        other => other,
    })?;
    let (e_dh_lux, e_bn_lux) = split_weather(
        sample.ghi_wm2,
        sample.dhi_wm2,
        sun.altitude_deg,
        &scene.options.efficacies,
    )?;
    let spots = if e_bn_lux > 0.0 { sunspot(scene, sun)? } else { Vec::new() };
    let e_diffuse_lux = components.df_pct / 100.0 * e_dh_lux;
    let e_direct_lux = beam_credit(
        scene,
        &spots,
        point.position,
        e_bn_lux,
        sun.altitude_deg.to_radians().sin(),
    );
    Ok(IlluminanceResult {
        timestamp: sample.timestamp,
        point_id: point.id.clone(),
        components,
        e_diffuse_lux,
        e_direct_lux,
        e_total_lux: e_diffuse_lux + e_direct_lux,
    })
}

/// Runs the full weather series over every sensor.
///
/// Daylight factors are computed once per sensor and reused for all
/// timestamps; results are ordered by timestamp, then by sensor order.
/// The run is deterministic: identical inputs give bit-identical output.
pub fn simulate(
    scene: &Scene,
    weather: &[WeatherSample],
) -> Result<Vec<IlluminanceResult>, EngineError> {
    if weather.is_empty() {
        return Err(EngineError::EmptyWeather);
    }
    let factors: Vec<DaylightComponents> = scene
        .sensors
        .iter()
        .map(|s| {
            daylight_factor_at(scene, s.position).map_err(|e| match e {
                EngineError::PointOutsideZone(_) => EngineError::PointOutsideZone(s.id.clone()),
                other => other,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut results = Vec::with_capacity(weather.len() * scene.sensors.len());
    for w in weather {
        let (alt_deg, az_deg) = solar_position(&scene.site, w.timestamp)?;
        let (e_dh_lux, e_bn_lux) =
            split_weather(w.ghi_wm2, w.dhi_wm2, alt_deg, &scene.options.efficacies)?;
        let sun = SunState {
            altitude_deg: alt_deg,
            azimuth_deg: az_deg,
            direct_normal_illuminance_lux: e_bn_lux,
        };
        let spots = if e_bn_lux > 0.0 { sunspot(scene, &sun)? } else { Vec::new() };
        let sin_alt = alt_deg.to_radians().sin();
        for (sensor, df) in scene.sensors.iter().zip(&factors) {
            let e_diffuse_lux = df.df_pct / 100.0 * e_dh_lux;
            let e_direct_lux = beam_credit(scene, &spots, sensor.position, e_bn_lux, sin_alt);
            results.push(IlluminanceResult {
                timestamp: w.timestamp,
                point_id: sensor.id.clone(),
                components: *df,
                e_diffuse_lux,
                e_direct_lux,
                e_total_lux: e_diffuse_lux + e_direct_lux,
            });
        }
    }
    Ok(results)
}

/// Daylight-factor map over arbitrary points under a fixed sky: each point
/// gets its components and the implied interior illuminance at `e_dh_lux`.
pub fn grid_snapshot(
    scene: &Scene,
    points: &[SensorPoint],
    e_dh_lux: f64,
    model: SkyModel,
) -> Result<Vec<GridCell>, EngineError> {
    points
        .iter()
        .map(|p| {
            let components =
                daylight_factor_at_model(scene, p.position, model).map_err(|e| match e {
                    EngineError::PointOutsideZone(_) => EngineError::PointOutsideZone(p.id.clone()),
                    other => other,
                })?;
            Ok(GridCell {
                point: p.clone(),
                e_lux: components.df_pct / 100.0 * e_dh_lux,
                components,
            })
        })
        .collect()
}

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct GridCell {
    pub point: SensorPoint,
    pub components: DaylightComponents,
    pub e_lux: f64,
}

/// Pairs each measurement with the nearest simulated sample of the same
/// point within [`MEASUREMENT_MATCH_TOLERANCE_S`] and reduces the pairs to
/// bias/RMSE statistics, per point and pooled.  Errors when nothing
/// matches at all.
pub fn validate_against(
    results: &[IlluminanceResult],
    measured: &[MeasurementSample],
) -> Result<ValidationReport, EngineError> {
    let mut by_point: BTreeMap<&str, Vec<(NaiveDateTime, f64)>> = BTreeMap::new();
    for r in results {
        by_point.entry(&r.point_id).or_default().push((r.timestamp, r.e_total_lux));
    }
    for series in by_point.values_mut() {
        series.sort_by_key(|(t, _)| *t);
    }

    let mut pairs: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    let mut all_pairs: Vec<(f64, f64)> = Vec::new();
    let mut unmatched = 0usize;
    for m in measured {
        let Some(series) = by_point.get(m.point_id.as_str()) else {
            unmatched += 1;
            continue;
        };
        let idx = series.partition_point(|(t, _)| *t < m.timestamp);
        let candidates = idx.checked_sub(1).into_iter().chain(idx..series.len().min(idx + 1));
        let nearest = candidates
            .map(|i| {
                let (t, sim) = series[i];
                ((t - m.timestamp).num_seconds().abs(), sim)
            })
            .min_by_key(|(dt, _)| *dt);
        match nearest {
            Some((dt, sim)) if dt <= MEASUREMENT_MATCH_TOLERANCE_S => {
                pairs.entry(m.point_id.as_str()).or_default().push((sim, m.illuminance_lux));
                all_pairs.push((sim, m.illuminance_lux));
            }
            _ => unmatched += 1,
        }
    }

    if all_pairs.is_empty() {
        return Err(EngineError::NoMatchedPairs);
    }
    Ok(ValidationReport {
        per_point: pairs.into_iter().map(|(k, v)| (k.to_string(), metrics(&v))).collect(),
        overall: metrics(&all_pairs),
        unmatched_measured: unmatched,
    })
}

fn metrics(pairs: &[(f64, f64)]) -> ErrorMetrics {
    let n = pairs.len();
    if n == 0 {
        return ErrorMetrics { n: 0, mbe_lux: 0.0, rmse_lux: 0.0, rmse_rel: None };
    }
    let nf = n as f64;
    let mbe_lux = pairs.iter().map(|(s, m)| s - m).sum::<f64>() / nf;
    let rmse_lux = (pairs.iter().map(|(s, m)| (s - m) * (s - m)).sum::<f64>() / nf).sqrt();
    let mean_meas = pairs.iter().map(|(_, m)| m).sum::<f64>() / nf;
    let rmse_rel = (mean_meas > 0.0).then(|| rmse_lux / mean_meas);
    ErrorMetrics { n, mbe_lux, rmse_lux, rmse_rel }
}

/// Writes simulated samples as CSV
/// (`timestamp,point_id,sc_pct,erc_pct,irc_pct,df_pct,e_diffuse_lux,e_direct_lux,e_total_lux`),
/// fixed 4-decimal formatting.
pub fn write_results_csv<W: io::Write>(
    w: W,
    results: &[IlluminanceResult],
) -> io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "timestamp",
        "point_id",
        "sc_pct",
        "erc_pct",
        "irc_pct",
        "df_pct",
        "e_diffuse_lux",
        "e_direct_lux",
        "e_total_lux",
    ])?;
    for r in results {
        wtr.write_record([
            r.timestamp.format(TIMESTAMP_FORMAT).to_string(),
            r.point_id.clone(),
            format!("{:.4}", r.components.sc_pct),
            format!("{:.4}", r.components.erc_pct),
            format!("{:.4}", r.components.irc_pct),
            format!("{:.4}", r.components.df_pct),
            format!("{:.4}", r.e_diffuse_lux),
            format!("{:.4}", r.e_direct_lux),
            format!("{:.4}", r.e_total_lux),
        ])?;
    }
    wtr.flush()
}

/// Writes a validation report as CSV, one row per point plus an `ALL`
/// row (`point_id,n,mbe_lux,rmse_lux,rmse_rel`); `rmse_rel` is a plain
/// fraction of the measured mean, left empty when that mean is not
/// positive.
pub fn write_metrics_csv<W: io::Write>(w: W, report: &ValidationReport) -> io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["point_id", "n", "mbe_lux", "rmse_lux", "rmse_rel"])?;
    let row = |id: &str, m: &ErrorMetrics| {
        [
            id.to_string(),
            m.n.to_string(),
            format!("{:.4}", m.mbe_lux),
            format!("{:.4}", m.rmse_lux),
            m.rmse_rel.map_or_else(String::new, |r| format!("{:.4}", r)),
        ]
    };
    for (id, m) in &report.per_point {
        wtr.write_record(row(id, m))?;
    }
    wtr.write_record(row("ALL", &report.overall))?;
    wtr.flush()
}
