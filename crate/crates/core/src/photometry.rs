//! Luminous-efficacy conversion between irradiance and illuminance, plus the
//! inverse-square law for point sources.
//!
//! Weather files carry broadband irradiance (W/m²); the lighting model works
//! in illuminance (lux).  The bridge is a luminous efficacy k (lm/W) chosen
//! per radiation component — diffuse sky light, direct beam and global each
//! get their own coefficient because their spectra differ.

use crate::geometry::{Direction3, Point3};
use thiserror::Error;

/// Solar altitude (deg) below which beam radiation is treated as zero: near
/// the horizon the geometric conversion to beam-normal irradiance divides by
/// a vanishing sine and measured values are dominated by noise.
pub const BEAM_ALTITUDE_CUTOFF_DEG: f64 = 3.0;

/// Highest luminous efficacy (lm/W) accepted for any component; the
/// theoretical monochromatic limit is 683 lm/W but broadband daylight never
/// exceeds ~150, so anything beyond this is a data error.
pub const MAX_EFFICACY: f64 = 250.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhotometryError {
    #[error("efficacy {0} lm/W outside [0, {MAX_EFFICACY}]")]
    EfficacyOutOfRange(f64),
    #[error("irradiance {0} W/m² is negative")]
    NegativeIrradiance(f64),
    #[error("diffuse irradiance {dhi} W/m² exceeds global {ghi} W/m²")]
    DiffuseExceedsGlobal { ghi: f64, dhi: f64 },
    #[error("point source coincides with the evaluation point")]
    CoincidentSource,
}

/// Luminous efficacies (lm/W) for the three radiation components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficacySet {
    pub k_diffuse: f64,
    pub k_beam: f64,
    pub k_global: f64,
}

impl Default for EfficacySet {
    /// Mid-range broadband values for overcast-to-clear daylight.
    fn default() -> Self {
        EfficacySet { k_diffuse: 120.0, k_beam: 105.0, k_global: 110.0 }
    }
}

impl EfficacySet {
    pub fn validate(&self) -> Result<(), PhotometryError> {
        for k in [self.k_diffuse, self.k_beam, self.k_global] {
            if !(0.0..=MAX_EFFICACY).contains(&k) || !k.is_finite() {
                return Err(PhotometryError::EfficacyOutOfRange(k));
            }
        }
        Ok(())
    }
}

/// Point light source emitting `intensity_cd` candela isotropically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub position: Point3,
    pub intensity_cd: f64,
}

/// Converts irradiance (W/m²) to illuminance (lux) with efficacy `k` (lm/W).
pub fn to_illuminance(irradiance_wm2: f64, k: f64) -> Result<f64, PhotometryError> {
    if !(0.0..=MAX_EFFICACY).contains(&k) || !k.is_finite() {
        return Err(PhotometryError::EfficacyOutOfRange(k));
    }
    if irradiance_wm2 < 0.0 || !irradiance_wm2.is_finite() {
        return Err(PhotometryError::NegativeIrradiance(irradiance_wm2));
    }
    Ok(k * irradiance_wm2)
}

/// Splits a weather sample into photometric sky and beam parts.
///
/// Returns `(e_diffuse_horizontal_lux, e_beam_normal_lux)`: the diffuse
/// horizontal illuminance is `k_diffuse · DHI`, and the beam-normal
/// illuminance is `k_beam · (GHI − DHI) / sin(altitude)` — the horizontal
/// beam irradiance tilted back to normal incidence — or zero at or below
/// [`BEAM_ALTITUDE_CUTOFF_DEG`].
pub fn split_weather(
    ghi_wm2: f64,
    dhi_wm2: f64,
    sun_altitude_deg: f64,
    k: &EfficacySet,
) -> Result<(f64, f64), PhotometryError> {
    k.validate()?;
    if dhi_wm2 < 0.0 || !dhi_wm2.is_finite() {
        return Err(PhotometryError::NegativeIrradiance(dhi_wm2));
    }
    if ghi_wm2 < 0.0 || !ghi_wm2.is_finite() {
        return Err(PhotometryError::NegativeIrradiance(ghi_wm2));
    }
    if dhi_wm2 > ghi_wm2 {
        return Err(PhotometryError::DiffuseExceedsGlobal { ghi: ghi_wm2, dhi: dhi_wm2 });
    }
    let e_diffuse = k.k_diffuse * dhi_wm2;
    let e_beam_normal = if sun_altitude_deg > BEAM_ALTITUDE_CUTOFF_DEG {
        k.k_beam * (ghi_wm2 - dhi_wm2) / sun_altitude_deg.to_radians().sin()
    } else {
        0.0
    };
    Ok((e_diffuse, e_beam_normal))
}

/// Illuminance (lux) at `q` on a surface with unit normal `normal`, from an
/// isotropic point source: E = I·cosθ/d², zero when the source is behind the
/// surface.  Errors when source and evaluation point coincide.
pub fn point_source_illuminance(
    source: &PointSource,
    q: Point3,
    normal: Direction3,
) -> Result<f64, PhotometryError> {
    let r = source.position - q;
    let d2 = r.dot(r);
    if d2 < 1e-18 {
        return Err(PhotometryError::CoincidentSource);
    }
    let cos_theta = r.dot(normal.as_vec()) / d2.sqrt();
    if cos_theta <= 0.0 {
        return Ok(0.0);
    }
    Ok(source.intensity_cd * cos_theta / d2)
}
