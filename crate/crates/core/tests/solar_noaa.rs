//! Solar positions checked hourly against an independent almanac oracle
//! implemented from the published spreadsheet equations (Julian-century
//! polynomials for mean longitude, anomaly, obliquity, and the equation of
//! time).

use chrono::{NaiveDate, NaiveDateTime, Timelike};
use daylight_core::solar::{solar_position, Site};

/// Geometric solar elevation and azimuth (degrees, azimuth clockwise from
/// north) from the almanac polynomial equations, with no refraction.
fn almanac_position(utc: NaiveDateTime, lat_deg: f64, lon_deg: f64) -> (f64, f64) {
    let jd = 2440587.5 + utc.and_utc().timestamp() as f64 / 86400.0;
    let t = (jd - 2451545.0) / 36525.0;

    let l0 = (280.46646 + t * (36000.76983 + 0.0003032 * t)).rem_euclid(360.0);
    let m = 357.52911 + t * (35999.05029 - 0.0001537 * t);
    let ecc = 0.016708634 - t * (0.000042037 + 0.0000001267 * t);
    let mr = m.to_radians();
    let center = mr.sin() * (1.914602 - t * (0.004817 + 0.000014 * t))
        + (2.0 * mr).sin() * (0.019993 - 0.000101 * t)
        + (3.0 * mr).sin() * 0.000289;
    let true_long = l0 + center;
    let omega = (125.04 - 1934.136 * t).to_radians();
    let app_long = true_long - 0.00569 - 0.00478 * omega.sin();

    let eps0 = 23.0
        + (26.0 + (21.448 - t * (46.815 + t * (0.00059 - t * 0.001813))) / 60.0) / 60.0;
    let eps = (eps0 + 0.00256 * omega.cos()).to_radians();

    let decl = (eps.sin() * app_long.to_radians().sin()).asin();

    let y = (eps / 2.0).tan().powi(2);
    let l0r = l0.to_radians();
    let eot_min = 4.0
        * (y * (2.0 * l0r).sin() - 2.0 * ecc * mr.sin()
            + 4.0 * ecc * y * mr.sin() * (2.0 * l0r).cos()
            - 0.5 * y * y * (4.0 * l0r).sin()
            - 1.25 * ecc * ecc * (2.0 * mr).sin())
        .to_degrees();

    let minutes_utc = utc.time().num_seconds_from_midnight() as f64 / 60.0;
    let tst = (minutes_utc + eot_min + 4.0 * lon_deg).rem_euclid(1440.0);
    let ha = (tst / 4.0 - 180.0).to_radians();

    let phi = lat_deg.to_radians();
    let cos_zen = (phi.sin() * decl.sin() + phi.cos() * decl.cos() * ha.cos()).clamp(-1.0, 1.0);
    let zen = cos_zen.acos();
    let elevation = 90.0 - zen.to_degrees();

    let denom = phi.cos() * zen.sin();
    let azimuth = if denom.abs() < 1e-12 {
        0.0
    } else {
        let a = ((phi.sin() * cos_zen - decl.sin()) / denom).clamp(-1.0, 1.0).acos();
        if ha > 0.0 {
            (a.to_degrees() + 180.0).rem_euclid(360.0)
        } else {
            (540.0 - a.to_degrees()).rem_euclid(360.0)
        }
    };
    (elevation, azimuth)
}

fn circular_diff_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Compares hourly positions for one site and date; returns the number of
/// hours both routes call daylight.
fn compare_day(site: &Site, date: chrono::NaiveDate) -> usize {
    let mut daylight = 0;
    for hour in 0..24 {
        let local = date.and_hms_opt(hour, 0, 0).unwrap();
        let (alt, az) = solar_position(site, local).unwrap();
        let utc = local
            - chrono::Duration::milliseconds((site.tz_offset_h * 3.6e6).round() as i64);
        let (alt_o, az_o) = almanac_position(utc, site.latitude_deg, site.longitude_deg);
        if alt > 0.0 && alt_o > 0.0 {
            daylight += 1;
            assert!(
                (alt - alt_o).abs() <= 0.5,
                "{date} {hour:02}:00 altitude {alt:.3} vs almanac {alt_o:.3}"
            );
            assert!(
                circular_diff_deg(az, az_o) <= 0.5,
                "{date} {hour:02}:00 azimuth {az:.3} vs almanac {az_o:.3} (alt {alt:.2})"
            );
        }
    }
    daylight
}

#[test]
fn hourly_positions_match_the_almanac_on_the_island_validation_day() {
    let site = Site {
        latitude_deg: -21.316667,
        longitude_deg: 55.466667,
        tz_offset_h: 4.0,
        albedo: 0.2,
    };
    let daylight = compare_day(&site, NaiveDate::from_ymd_opt(2008, 2, 10).unwrap());
    assert!(daylight >= 10, "expected a long tropical summer day, got {daylight} h");
}

#[test]
fn positions_match_the_almanac_across_seasons_and_hemispheres() {
    let cases = [
        (48.85, 2.35, 1.0, NaiveDate::from_ymd_opt(2008, 6, 21).unwrap()),
        (39.74, -105.0, -7.0, NaiveDate::from_ymd_opt(2010, 6, 21).unwrap()),
        (0.0, 0.0, 0.0, NaiveDate::from_ymd_opt(2009, 3, 20).unwrap()),
        (-33.87, 151.21, 10.0, NaiveDate::from_ymd_opt(2008, 12, 21).unwrap()),
        (64.13, -21.9, 0.0, NaiveDate::from_ymd_opt(2008, 12, 21).unwrap()),
    ];
    for (lat, lon, tz, date) in cases {
        let site = Site { latitude_deg: lat, longitude_deg: lon, tz_offset_h: tz, albedo: 0.2 };
        let daylight = compare_day(&site, date);
        assert!(daylight >= 1, "no daylight hours compared at ({lat}, {lon}) on {date}");
    }
}
