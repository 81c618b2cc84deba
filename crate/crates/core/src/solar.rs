//! Solar position from civil time and site coordinates.
//!
//! Altitude and azimuth come from a compact ecliptic-coordinate algorithm:
//! the sun's ecliptic longitude and the obliquity are evaluated from short
//! trigonometric series in days since J2000, converted to right ascension
//! and declination, and the hour angle follows from Greenwich mean sidereal
//! time and the site longitude.  Accuracy is a few hundredths of a degree in
//! the contemporary era — far inside the half-degree budget the daylighting
//! model needs — without dragging in a full ephemeris.
//!
//! Conventions: latitude north-positive, longitude east-positive, azimuth
//! clockwise from north (east = 90°), altitude above the horizon.  Civil
//! timestamps are naive local times interpreted with the site's fixed UTC
//! offset; daylight-saving rules are deliberately out of scope.

use crate::geometry::Direction3;
use chrono::{Datelike, NaiveDate, NaiveDateTime, Timelike};
use thiserror::Error;

/// First year for which the position series are trusted.
pub const MIN_YEAR: i32 = 1950;
/// Last year for which the position series are trusted.
pub const MAX_YEAR: i32 = 2100;

/// Altitude of the apparent horizon (deg) used to flag sunrise/sunset,
/// accounting for average refraction and the solar radius.
pub const HORIZON_DIP_DEG: f64 = -0.833;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolarError {
    #[error("timestamp year {0} outside supported range {MIN_YEAR}..={MAX_YEAR}")]
    TimestampOutOfRange(i32),
    #[error("latitude {0} outside [-90, 90]")]
    InvalidLatitude(f64),
    #[error("longitude {0} outside [-180, 180]")]
    InvalidLongitude(f64),
}

/// Geographic site.  `albedo` is the diffuse reflectance of the surrounding
/// ground, used for light entering windows after ground reflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    /// North-positive latitude (deg).
    pub latitude_deg: f64,
    /// East-positive longitude (deg).
    pub longitude_deg: f64,
    /// Fixed civil-time offset from UTC (h), east-positive.
    pub tz_offset_h: f64,
    /// Ground reflectance in [0, 1].
    pub albedo: f64,
}

/// Sun state for one timestep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SunState {
    /// Altitude above the horizon (deg); negative at night.
    pub altitude_deg: f64,
    /// Azimuth clockwise from north (deg), in [0, 360).
    pub azimuth_deg: f64,
    /// Beam illuminance on a plane normal to the sun (lux).
    pub direct_normal_illuminance_lux: f64,
}

/// Altitude and azimuth of the sun at local civil time `t` for `site`.
pub fn solar_position(site: &Site, t: NaiveDateTime) -> Result<(f64, f64), SolarError> {
    if !(-90.0..=90.0).contains(&site.latitude_deg) {
        return Err(SolarError::InvalidLatitude(site.latitude_deg));
    }
    if !(-180.0..=180.0).contains(&site.longitude_deg) {
        return Err(SolarError::InvalidLongitude(site.longitude_deg));
    }
    if t.year() < MIN_YEAR || t.year() > MAX_YEAR {
        return Err(SolarError::TimestampOutOfRange(t.year()));
    }

    // Civil → UTC with the site's fixed offset.
    let utc = t - chrono::Duration::milliseconds((site.tz_offset_h * 3.6e6).round() as i64);
    let (decl, hour_angle) = declination_and_hour_angle(utc, site.longitude_deg);

    let phi = site.latitude_deg.to_radians();
    let sin_alt = phi.sin() * decl.sin() + phi.cos() * decl.cos() * hour_angle.cos();
    let altitude = sin_alt.clamp(-1.0, 1.0).asin();

    // Local east/north components of the unit vector toward the sun.
    let east = -decl.cos() * hour_angle.sin();
    let north = phi.cos() * decl.sin() - phi.sin() * decl.cos() * hour_angle.cos();
    let azimuth = east.atan2(north).to_degrees().rem_euclid(360.0);

    Ok((altitude.to_degrees(), azimuth))
}

/// Solar declination and local hour angle (rad) at `utc`.
///
/// Ecliptic longitude, obliquity and sidereal time follow the compact series
/// of the Blanco-Muriel PSA formulation; right ascension and declination are
/// derived from them exactly.
fn declination_and_hour_angle(utc: NaiveDateTime, longitude_deg: f64) -> (f64, f64) {
    use std::f64::consts::TAU;

    let j2000 = NaiveDate::from_ymd_opt(2000, 1, 1)
        .unwrap()
        .and_hms_opt(12, 0, 0)
        .unwrap();
    let ejd = (utc - j2000).num_milliseconds() as f64 / 86_400_000.0;

    let omega = 2.1429 - 0.001_039_459_4 * ejd;
    let mean_longitude = 4.895_063_0 + 0.017_202_791_698 * ejd;
    let mean_anomaly = 6.240_060_0 + 0.017_201_969_9 * ejd;
    let ecliptic_longitude = mean_longitude
        + 0.033_416_07 * mean_anomaly.sin()
        + 0.000_348_94 * (2.0 * mean_anomaly).sin()
        - 0.000_113_4
        - 0.000_020_3 * omega.sin();
    let obliquity = 0.409_092_8 - 6.214_0e-9 * ejd + 0.000_039_6 * omega.cos();

    let sin_l = ecliptic_longitude.sin();
    let right_ascension = (obliquity.cos() * sin_l)
        .atan2(ecliptic_longitude.cos())
        .rem_euclid(TAU);
    let declination = (obliquity.sin() * sin_l).asin();

    let hours = utc.num_seconds_from_midnight() as f64 / 3600.0
        + utc.nanosecond() as f64 / 3.6e12;
    let gmst_hours = 6.697_424_324_2 + 0.065_709_828_3 * ejd + hours;
    let lmst = (gmst_hours * 15.0 + longitude_deg).to_radians();
    let mut hour_angle = (lmst - right_ascension) % TAU;
    if hour_angle > std::f64::consts::PI {
        hour_angle -= TAU;
    } else if hour_angle < -std::f64::consts::PI {
        hour_angle += TAU;
    }
    (declination, hour_angle)
}

/// Unit propagation direction of sunlight (from the sun toward the scene)
/// in the scene frame (x east, y north, z up).
pub fn sun_direction(altitude_deg: f64, azimuth_deg: f64) -> Direction3 {
    let alt = altitude_deg.to_radians();
    let az = azimuth_deg.to_radians();
    // Unit vector pointing at the sun, then negated.
    Direction3::from_components(
        -az.sin() * alt.cos(),
        -az.cos() * alt.cos(),
        -alt.sin(),
    )
    .expect("sun direction is always unit length")
}

/// Altitude and azimuth (deg) recovered from a propagation direction;
/// inverse of [`sun_direction`].
pub fn direction_to_altaz(d: Direction3) -> (f64, f64) {
    let altitude = (-d.dz()).clamp(-1.0, 1.0).asin().to_degrees();
    let azimuth = (-d.dx()).atan2(-d.dy()).to_degrees().rem_euclid(360.0);
    (altitude, azimuth)
}
