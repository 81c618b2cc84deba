//! End-to-end behaviour of the engine over the bundled test-cell fixture:
//! spatial daylight-factor structure, overcast and clear-day time series,
//! the effect of the sunshade, and the statistical validation layer.

use daylight_core::engine::{
    daylight_factor_at, simulate, sunspot, validate_against, IlluminanceResult,
};
use daylight_core::geometry::PointLocation;
use daylight_core::scene::{
    load_scene, load_weather, MeasurementSample, Scene, WeatherSample,
};
use daylight_core::sky::DaylightComponents;
use daylight_core::solar::SunState;
use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::Path;

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn lgi() -> Scene {
    load_scene(&fixture("lgi.scene")).expect("fixture scene parses")
}

fn overcast_day() -> Vec<WeatherSample> {
    load_weather(&fixture("lgi_overcast_2008-02-10.csv")).expect("overcast weather parses")
}

fn beam_day() -> Vec<WeatherSample> {
    load_weather(&fixture("lgi_beam_2008-06-16.csv")).expect("beam weather parses")
}

#[test]
fn fixture_has_the_documented_layout() {
    let scene = lgi();
    let ids: Vec<&str> = scene.sensors.iter().map(|s| s.id.as_str()).collect();
    assert_eq!(ids, ["A1", "A2", "A3", "A4"]);
    for pair in scene.sensors.windows(2) {
        let step = pair[0].position.y - pair[1].position.y;
        assert!((step - 0.5).abs() < 1e-12, "sensor spacing {step}");
    }
    // First sensor 0.73 m in from the glazing plane at y = 3.
    assert!((3.0 - scene.sensors[0].position.y - 0.73).abs() < 1e-12);
    assert!(scene.sensors.iter().all(|s| (s.position.z - 0.01).abs() < 1e-12));

    // 2 × 9 m² horizontal + 4 × 7.5 m² walls.
    assert!((scene.zone.total_surface_area_m2 - 48.0).abs() < 1e-9);
    let want_r = (9.0 * 0.3 + 9.0 * 0.8 + 30.0 * 0.6) / 48.0;
    assert!((scene.zone.mean_reflectance - want_r).abs() < 1e-12);
    assert!((scene.zone.glazings[0].polygon.area() - 1.8).abs() < 1e-12);
    // The sunshade is present but disabled by default.
    assert_eq!(scene.obstructions.len(), 1);
    assert!(!scene.options.enable_overhang_shading);
}

#[test]
fn daylight_factor_declines_along_the_sensor_line() {
    let scene = lgi();
    let dfs: Vec<DaylightComponents> = scene
        .sensors
        .iter()
        .map(|s| daylight_factor_at(&scene, s.position).unwrap())
        .collect();
    for w in dfs.windows(2) {
        assert!(
            w[0].df_pct > w[1].df_pct,
            "df must fall with distance: {} vs {}",
            w[0].df_pct,
            w[1].df_pct
        );
        assert!(w[0].sc_pct > w[1].sc_pct);
    }
    assert!(dfs.last().unwrap().df_pct > 0.0);
    // IRC is a room-average term, constant along the line.
    for d in &dfs {
        assert_eq!(d.irc_pct, dfs[0].irc_pct);
    }
}

#[test]
fn overcast_day_keeps_a1_above_a3_with_no_beam() {
    let scene = lgi();
    let results = simulate(&scene, &overcast_day()).unwrap();
    assert_eq!(results.len(), 13 * 4);
    let mut by_time: BTreeMap<chrono::NaiveDateTime, BTreeMap<&str, &IlluminanceResult>> =
        BTreeMap::new();
    for r in &results {
        assert_eq!(r.e_direct_lux, 0.0, "fully diffuse day must have no beam");
        by_time.entry(r.timestamp).or_default().insert(&r.point_id, r);
    }
    for (t, row) in &by_time {
        let a1 = row["A1"].e_total_lux;
        let a3 = row["A3"].e_total_lux;
        assert!(a1 > a3, "at {t}: A1 {a1} must exceed A3 {a3}");
        assert!(a1 > 0.0);
    }
}

#[test]
fn clear_day_beam_reaches_the_sensor_line() {
    let scene = lgi();
    let results = simulate(&scene, &beam_day()).unwrap();
    let beam_rows: Vec<&IlluminanceResult> =
        results.iter().filter(|r| r.e_direct_lux > 0.0).collect();
    assert!(
        !beam_rows.is_empty(),
        "a clear winter day must land direct sun on at least one sensor"
    );
    // Beam credit follows the admitted-beam formula: τ·E_bn·sin(alt) is
    // hundreds of lux here, far above any diffuse level.
    for r in &beam_rows {
        assert!(r.e_direct_lux > 100.0, "beam credit is {:.1} lx", r.e_direct_lux);
    }
}

#[test]
fn sunshade_only_ever_removes_beam_light() {
    let mut shaded = lgi();
    shaded.options.enable_overhang_shading = true;
    let free = lgi();
    let weather = beam_day();
    let with = simulate(&shaded, &weather).unwrap();
    let without = simulate(&free, &weather).unwrap();
    assert_eq!(with.len(), without.len());

    let mut strict_midday_drop = false;
    for (a, b) in with.iter().zip(&without) {
        assert_eq!(a.timestamp, b.timestamp);
        assert_eq!(a.point_id, b.point_id);
        assert!(
            a.e_direct_lux <= b.e_direct_lux + 1e-12,
            "shading added beam at {} {}: {} > {}",
            a.timestamp,
            a.point_id,
            a.e_direct_lux,
            b.e_direct_lux
        );
        let hour = chrono::Timelike::hour(&a.timestamp);
        if (11..=14).contains(&hour) && a.e_direct_lux < b.e_direct_lux - 1e-9 {
            strict_midday_drop = true;
        }
    }
    assert!(
        strict_midday_drop,
        "the sunshade must strictly cut direct sun at some midday step"
    );
}

#[test]
fn simulation_is_stateless_across_row_order() {
    let scene = lgi();
    let ordered = overcast_day();
    let mut shuffled = ordered.clone();
    // Deterministic scramble.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in (1..shuffled.len()).rev() {
        shuffled.swap(i, rng.gen_range(0..=i));
    }
    let mut a = simulate(&scene, &ordered).unwrap();
    let mut b = simulate(&scene, &shuffled).unwrap();
    let key = |r: &IlluminanceResult| (r.timestamp, r.point_id.clone());
    a.sort_by_key(key);
    b.sort_by_key(key);
    assert_eq!(a, b);
}

#[test]
fn totals_are_monotone_in_each_irradiance() {
    let scene = lgi();
    let noon = NaiveDate::from_ymd_opt(2008, 6, 16).unwrap().and_hms_opt(12, 0, 0).unwrap();
    let sample = |ghi: f64, dhi: f64| {
        vec![WeatherSample { timestamp: noon, ghi_wm2: ghi, dhi_wm2: dhi, eg_lux: None }]
    };
    let totals = |ghi: f64, dhi: f64| -> Vec<f64> {
        simulate(&scene, &sample(ghi, dhi))
            .unwrap()
            .iter()
            .map(|r| r.e_total_lux)
            .collect()
    };
    // Growing GHI with DHI fixed only adds beam.
    let mut prev = totals(200.0, 180.0);
    for ghi in [300.0, 450.0, 700.0] {
        let next = totals(ghi, 180.0);
        for (p, n) in prev.iter().zip(&next) {
            assert!(n + 1e-12 >= *p, "e_total fell when GHI grew: {p} -> {n}");
        }
        prev = next;
    }
    // Growing DHI with GHI fixed converts beam into diffuse.  At a point
    // the beam reaches, the trade is lossy (τ·k_beam per W/m² of beam dwarfs
    // DF/100·k_diffuse per W/m² of diffuse), so monotonicity holds only
    // where no beam lands.
    let direct = |ghi: f64, dhi: f64| -> Vec<f64> {
        simulate(&scene, &sample(ghi, dhi))
            .unwrap()
            .iter()
            .map(|r| r.e_direct_lux)
            .collect()
    };
    let dhis = [100.0, 250.0, 450.0, 700.0];
    for pair in dhis.windows(2) {
        let (lo, hi) = (totals(700.0, pair[0]), totals(700.0, pair[1]));
        let (d_lo, d_hi) = (direct(700.0, pair[0]), direct(700.0, pair[1]));
        for i in 0..lo.len() {
            if d_lo[i] == 0.0 && d_hi[i] == 0.0 {
                assert!(
                    hi[i] + 1e-12 >= lo[i],
                    "beam-free e_total fell when DHI grew: {} -> {}",
                    lo[i],
                    hi[i]
                );
            }
        }
    }
    // Scaling an overcast sky up is monotone everywhere.
    let mut prev = totals(150.0, 150.0);
    for x in [300.0, 500.0, 800.0] {
        let next = totals(x, x);
        for (p, n) in prev.iter().zip(&next) {
            assert!(*n >= *p, "overcast e_total fell when the sky brightened");
        }
        prev = next;
    }
}

#[test]
fn dark_room_reports_exact_zeros() {
    let mut scene = lgi();
    scene.zone.glazings.clear();
    for s in &scene.sensors {
        let d = daylight_factor_at(&scene, s.position).unwrap();
        assert_eq!((d.sc_pct, d.erc_pct, d.irc_pct, d.df_pct), (0.0, 0.0, 0.0, 0.0));
    }
    let results = simulate(&scene, &overcast_day()).unwrap();
    assert!(results.iter().all(|r| r.e_total_lux == 0.0));
}

#[test]
fn sunspots_stay_inside_the_floor_for_random_suns() {
    let scene = lgi();
    let floor = &scene.zone.floor().polygon;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let sun = SunState {
            altitude_deg: rng.gen_range(0.5..89.5),
            azimuth_deg: rng.gen_range(0.0..360.0),
            direct_normal_illuminance_lux: 1.0,
        };
        for spot in sunspot(&scene, &sun).unwrap() {
            let mut area = 0.0;
            for piece in &spot.pieces {
                area += piece.area();
                for v in piece.vertices() {
                    assert!(v.z.abs() < 1e-9, "spot must lie in the floor plane");
                    assert!(
                        !matches!(floor.locate_point(*v), Ok(PointLocation::Outside)),
                        "spot vertex {v:?} escaped the floor"
                    );
                }
            }
            assert!(area <= floor.area() + 1e-9);
        }
    }
}

#[test]
fn validation_recovers_known_bias_and_spread() {
    // Synthetic residuals check rmse² = mbe² + var(residuals) exactly.
    let t = NaiveDate::from_ymd_opt(2008, 2, 10).unwrap().and_hms_opt(12, 0, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut results = Vec::new();
    let mut measured = Vec::new();
    let mut residuals = Vec::new();
    for i in 0..500 {
        let meas = rng.gen_range(50.0..5000.0);
        let resid = rng.gen_range(-80.0..120.0);
        residuals.push(resid);
        let id = format!("S{i}");
        results.push(IlluminanceResult {
            timestamp: t,
            point_id: id.clone(),
            components: DaylightComponents::new(1.0, 0.0, 0.0),
            e_diffuse_lux: meas + resid,
            e_direct_lux: 0.0,
            e_total_lux: meas + resid,
        });
        measured.push(MeasurementSample { timestamp: t, point_id: id, illuminance_lux: meas });
    }
    let report = validate_against(&results, &measured).unwrap();
    let n = residuals.len() as f64;
    let mean = residuals.iter().sum::<f64>() / n;
    let var = residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
    let o = report.overall;
    assert_eq!(o.n, 500);
    assert!((o.mbe_lux - mean).abs() < 1e-9);
    assert!(
        (o.rmse_lux * o.rmse_lux - (mean * mean + var)).abs() < 1e-6,
        "rmse² must decompose into bias² + variance"
    );
    assert!(o.rmse_lux >= o.mbe_lux.abs());
    for m in report.per_point.values() {
        assert!(m.n >= 1);
        assert!(m.rmse_lux >= m.mbe_lux.abs());
    }
}
