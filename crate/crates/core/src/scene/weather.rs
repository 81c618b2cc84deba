//! Weather and measurement time series (CSV).
//!
//! Weather files carry global and diffuse horizontal irradiance, plus an
//! optional measured exterior global illuminance column that may be left
//! empty on any row:
//!
//! ```csv
//! timestamp,ghi_wm2,dhi_wm2,eg_lux
//! 2008-02-10T08:00:00,420.0,180.0,45200
//! 2008-02-10T09:00:00,610.5,210.0,
//! ```
//!
//! Measurement files carry interior illuminance readings per sensor:
//!
//! ```csv
//! timestamp,point_id,e_lux
//! 2008-02-10T08:00:00,A1,152.0
//! ```
//!
//! Timestamps are local civil time, `YYYY-MM-DDTHH:MM:SS`.

use super::SceneError;
use chrono::NaiveDateTime;
use std::io::Read;
use std::path::Path;

pub(crate) const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

/// One row of exterior irradiance.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSample {
    pub timestamp: NaiveDateTime,
    /// Global horizontal irradiance (W/m²).
    pub ghi_wm2: f64,
    /// Diffuse horizontal irradiance (W/m²).
    pub dhi_wm2: f64,
    /// Measured exterior global horizontal illuminance (lux), when the
    /// station logged one.  Carried through for efficacy calibration; the
    /// simulation itself derives illuminance from irradiance.
    pub eg_lux: Option<f64>,
}

/// One interior illuminance reading.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSample {
    pub timestamp: NaiveDateTime,
    pub point_id: String,
    pub illuminance_lux: f64,
}

fn parse_timestamp(row: usize, text: &str) -> Result<NaiveDateTime, SceneError> {
    NaiveDateTime::parse_from_str(text.trim(), TIMESTAMP_FORMAT).map_err(|e| {
        SceneError::Parse(format!("row {row}: bad timestamp `{text}`: {e}"))
    })
}

fn parse_float(row: usize, field: &str, text: &str) -> Result<f64, SceneError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| SceneError::Parse(format!("row {row}: bad {field} `{text}`")))?;
    if !v.is_finite() {
        return Err(SceneError::Parse(format!("row {row}: {field} must be finite")));
    }
    Ok(v)
}

fn check_header(got: &csv::StringRecord, want: &[&str]) -> Result<(), SceneError> {
    let got: Vec<&str> = got.iter().map(str::trim).collect();
    if got != want {
        return Err(SceneError::Parse(format!(
            "expected header `{}`, found `{}`",
            want.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

/// True when the reader held nothing at all (not even a header line).
fn record_is_blank(record: &csv::StringRecord) -> bool {
    record.len() == 0 || (record.len() == 1 && record[0].trim().is_empty())
}

/// Parses a weather CSV.  Rows must be strictly increasing in time, with
/// 0 ≤ DHI ≤ GHI on every row; the `eg_lux` field may be empty.  An empty
/// file is a valid empty series.
pub fn parse_weather<R: Read>(reader: R) -> Result<Vec<WeatherSample>, SceneError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| SceneError::Parse(e.to_string()))?;
    if record_is_blank(headers) {
        return Ok(Vec::new());
    }
    check_header(headers, &["timestamp", "ghi_wm2", "dhi_wm2", "eg_lux"])?;
    let mut out: Vec<WeatherSample> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2; // 1-based, after the header
        let record = record.map_err(|e| SceneError::Parse(format!("row {row}: {e}")))?;
        if record.len() != 4 {
            return Err(SceneError::Parse(format!(
                "row {row}: expected 4 fields, found {}",
                record.len()
            )));
        }
        let timestamp = parse_timestamp(row, &record[0])?;
        let ghi_wm2 = parse_float(row, "ghi_wm2", &record[1])?;
        let dhi_wm2 = parse_float(row, "dhi_wm2", &record[2])?;
        let eg_text = record[3].trim();
        let eg_lux = if eg_text.is_empty() {
            None
        } else {
            Some(parse_float(row, "eg_lux", eg_text)?)
        };
        if ghi_wm2 < 0.0 || dhi_wm2 < 0.0 {
            return Err(SceneError::invalid(
                format!("weather row {row}"),
                "irradiance must be non-negative",
            ));
        }
        if dhi_wm2 > ghi_wm2 {
            return Err(SceneError::invalid(
                format!("weather row {row}"),
                format!("diffuse {dhi_wm2} exceeds global {ghi_wm2}"),
            ));
        }
        if let Some(eg) = eg_lux {
            if eg < 0.0 {
                return Err(SceneError::invalid(
                    format!("weather row {row}"),
                    "eg_lux must be non-negative",
                ));
            }
        }
        if let Some(prev) = out.last() {
            if timestamp <= prev.timestamp {
                return Err(SceneError::invalid(
                    format!("weather row {row}"),
                    "timestamps must be strictly increasing",
                ));
            }
        }
        out.push(WeatherSample { timestamp, ghi_wm2, dhi_wm2, eg_lux });
    }
    Ok(out)
}

/// Parses a measurement CSV.  Readings must be non-negative; any time
/// ordering is accepted (files are often grouped by sensor).
pub fn parse_measurements<R: Read>(reader: R) -> Result<Vec<MeasurementSample>, SceneError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    check_header(
        rdr.headers().map_err(|e| SceneError::Parse(e.to_string()))?,
        &["timestamp", "point_id", "e_lux"],
    )?;
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| SceneError::Parse(format!("row {row}: {e}")))?;
        if record.len() != 3 {
            return Err(SceneError::Parse(format!(
                "row {row}: expected 3 fields, found {}",
                record.len()
            )));
        }
        let timestamp = parse_timestamp(row, &record[0])?;
        let point_id = record[1].trim().to_string();
        if point_id.is_empty() {
            return Err(SceneError::Parse(format!("row {row}: empty point_id")));
        }
        let illuminance_lux = parse_float(row, "e_lux", &record[2])?;
        if illuminance_lux < 0.0 {
            return Err(SceneError::invalid(
                format!("measurement row {row}"),
                "illuminance must be non-negative",
            ));
        }
        out.push(MeasurementSample { timestamp, point_id, illuminance_lux });
    }
    if out.is_empty() {
        // An empty series can never match anything, which is a semantic
        // failure rather than a malformed file.
        return Err(SceneError::invalid("measurements", "file has no data rows"));
    }
    Ok(out)
}

pub fn load_weather(path: &Path) -> Result<Vec<WeatherSample>, SceneError> {
    let f = std::fs::File::open(path)
        .map_err(|e| SceneError::Parse(format!("{}: {e}", path.display())))?;
    parse_weather(f)
}

pub fn load_measurements(path: &Path) -> Result<Vec<MeasurementSample>, SceneError> {
    let f = std::fs::File::open(path)
        .map_err(|e| SceneError::Parse(format!("{}: {e}", path.display())))?;
    parse_measurements(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{NaiveDate, Timelike};

    const WEATHER: &str = "timestamp,ghi_wm2,dhi_wm2,eg_lux\n\
                           2008-02-10T08:00:00,420.0,180.0,45200\n\
                           2008-02-10T09:00:00,610.5,210.0,\n";

    #[test]
    fn reads_weather_rows() {
        let rows = parse_weather(WEATHER.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(
            rows[0].timestamp,
            NaiveDate::from_ymd_opt(2008, 2, 10).unwrap().and_hms_opt(8, 0, 0).unwrap()
        );
        assert_eq!(rows[0].eg_lux, Some(45200.0));
        assert_eq!(rows[1].ghi_wm2, 610.5);
        assert_eq!(rows[1].eg_lux, None);
        assert_eq!(rows[1].timestamp.hour(), 9);
    }

    #[test]
    fn empty_weather_file_is_a_valid_empty_series() {
        assert_eq!(parse_weather("".as_bytes()).unwrap(), vec![]);
        let header_only = "timestamp,ghi_wm2,dhi_wm2,eg_lux\n";
        assert_eq!(parse_weather(header_only.as_bytes()).unwrap(), vec![]);
    }

    #[test]
    fn weather_rejects_diffuse_above_global() {
        let text = "timestamp,ghi_wm2,dhi_wm2,eg_lux\n2008-02-10T08:00:00,100.0,180.0,\n";
        match parse_weather(text.as_bytes()).unwrap_err() {
            SceneError::Invalid { path, .. } => assert!(path.contains("row 2")),
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn weather_rejects_time_going_backwards() {
        let text = "timestamp,ghi_wm2,dhi_wm2,eg_lux\n\
                    2008-02-10T09:00:00,100.0,80.0,\n\
                    2008-02-10T08:00:00,100.0,80.0,\n";
        match parse_weather(text.as_bytes()).unwrap_err() {
            SceneError::Invalid { path, message } => {
                assert!(path.contains("row 3"));
                assert!(message.contains("increasing"));
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn weather_rejects_malformed_rows() {
        for bad in [
            "timestamp,ghi_wm2,dhi_wm2,eg_lux\n10/02/2008 08:00,100.0,80.0,\n",
            "timestamp,ghi_wm2,dhi_wm2,eg_lux\n2008-02-10T08:00:00,abc,80.0,\n",
            "timestamp,ghi_wm2,dhi_wm2,eg_lux\n2008-02-10T08:00:00,100.0,80.0,xyz\n",
            "timestamp,ghi_wm2\n2008-02-10T08:00:00,100.0\n",
            "timestamp,ghi_wm2,dhi_wm2\n2008-02-10T08:00:00,100.0,80.0\n",
            "timestamp,ghi_wm2,dhi_wm2,eg_lux\n2008-02-10T08:00:00,100.0,80.0\n",
        ] {
            assert!(
                matches!(parse_weather(bad.as_bytes()), Err(SceneError::Parse(_))),
                "accepted: {bad}"
            );
        }
    }

    #[test]
    fn weather_rejects_negative_values() {
        for bad in [
            "timestamp,ghi_wm2,dhi_wm2,eg_lux\n2008-02-10T08:00:00,-1.0,-2.0,\n",
            "timestamp,ghi_wm2,dhi_wm2,eg_lux\n2008-02-10T08:00:00,100.0,80.0,-5\n",
        ] {
            assert!(
                matches!(parse_weather(bad.as_bytes()), Err(SceneError::Invalid { .. })),
                "accepted: {bad}"
            );
        }
    }

    #[test]
    fn reads_measurement_rows_in_any_order() {
        let text = "timestamp,point_id,e_lux\n\
                    2008-02-10T09:00:00,A1,310.0\n\
                    2008-02-10T08:00:00,A2,152.0\n";
        let rows = parse_measurements(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].point_id, "A1");
        assert_eq!(rows[1].illuminance_lux, 152.0);
    }

    #[test]
    fn measurements_reject_negative_readings() {
        let text = "timestamp,point_id,e_lux\n2008-02-10T08:00:00,A1,-5.0\n";
        assert!(matches!(parse_measurements(text.as_bytes()), Err(SceneError::Invalid { .. })));
    }

    #[test]
    fn measurements_reject_wrong_header() {
        let text = "timestamp,point_id,illuminance_lux\n2008-02-10T08:00:00,A1,5.0\n";
        assert!(matches!(parse_measurements(text.as_bytes()), Err(SceneError::Parse(_))));
    }
}
