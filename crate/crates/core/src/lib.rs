//! Indoor daylighting simulation engine.
//!
//! The crate computes work-plane illuminance inside a room from exterior
//! weather data using the daylight-factor method: the diffuse part is the sum
//! of a sky component (direct view of sky through glazing), an externally
//! reflected component (obstructions and ground seen through glazing) and an
//! internally reflected component (split-flux inter-reflection estimate),
//! all expressed as percentages of the exterior diffuse horizontal
//! illuminance.  The beam part is resolved geometrically by projecting each
//! glazing along the sun direction onto the floor (the "sunspot") and testing
//! sensor points for membership.
//!
//! Module layout:
//! - [`geometry`] — planar polygons and the computational kernel (areas,
//!   point location, clipping, projection, solid angles);
//! - [`solar`] — sun position from civil time and site coordinates;
//! - [`sky`] — sky luminance models and the daylight-factor components;
//! - [`photometry`] — luminous-efficacy irradiance→illuminance conversion;
//! - [`scene`] — scene description files, weather and measurement series;
//! - [`engine`] — per-point simulation, time series, validation metrics.

pub mod engine;
pub mod geometry;
pub mod photometry;
pub mod scene;
pub mod sky;
pub mod solar;
