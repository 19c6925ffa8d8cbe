//! Best-track records and the CSV interchange format.

use std::io::Read;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Header of the track CSV format, in column order.
pub const CSV_HEADER: [&str; 7] = [
    "storm_id",
    "name",
    "timestamp",
    "lat_deg",
    "lon_deg",
    "max_wind_kt",
    "min_pressure_hpa",
];

/// Spacing between consecutive fixes of one storm.
pub const FIX_INTERVAL_HOURS: i64 = 6;

/// One best-track observation of a storm center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fix {
    pub timestamp: DateTime<Utc>,
    pub lat: f64,
    pub lon: f64,
    /// Maximum sustained surface wind, knots.
    pub max_wind: f64,
    /// Minimum sea level pressure, hPa.
    pub min_pressure: f64,
}

impl Fix {
    pub fn position(&self) -> (f64, f64) {
        (self.lat, self.lon)
    }

    /// Checks the per-fix range rules, returning a description of the first
    /// violation.
    pub fn check(&self) -> Result<(), String> {
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(format!("latitude {} outside [-90, 90]", self.lat));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return Err(format!("longitude {} outside [-180, 180]", self.lon));
        }
        if !self.max_wind.is_finite() || self.max_wind < 0.0 {
            return Err(format!("max wind {} must be a finite value >= 0", self.max_wind));
        }
        if !(self.min_pressure > 0.0 && self.min_pressure < 1100.0) {
            return Err(format!("min pressure {} outside (0, 1100)", self.min_pressure));
        }
        Ok(())
    }
}

/// The ordered fixes of a single named storm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StormTrack {
    pub storm_id: String,
    pub name: String,
    pub fixes: Vec<Fix>,
}

impl StormTrack {
    pub fn len(&self) -> usize {
        self.fixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixes.is_empty()
    }

    /// Verifies every track invariant: at least one fix, valid ranges and a
    /// strict six-hour spacing.
    pub fn validate(&self) -> Result<()> {
        if self.fixes.is_empty() {
            return Err(Error::validation(format!("storm {} has no fixes", self.storm_id)));
        }
        for (i, fix) in self.fixes.iter().enumerate() {
            fix.check().map_err(|m| {
                Error::validation(format!("storm {} fix {i}: {m}", self.storm_id))
            })?;
        }
        let step = Duration::hours(FIX_INTERVAL_HOURS);
        for (i, pair) in self.fixes.windows(2).enumerate() {
            if pair[1].timestamp - pair[0].timestamp != step {
                return Err(Error::validation(format!(
                    "storm {}: fixes {i} and {} are not {FIX_INTERVAL_HOURS} hours apart",
                    self.storm_id,
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

fn parse_number(field: &str, column: &str, line: u64) -> Result<f64> {
    let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("{column}: `{field}` is not a number"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("{column}: `{field}` is not finite"),
        });
    }
    Ok(value)
}

/// Parses the track CSV format into storms, in order of first appearance.
///
/// Rows of one storm must appear in increasing time order on the six-hour
/// grid; rows of different storms may interleave.
pub fn parse_track_csv<R: Read>(input: R) -> Result<Vec<StormTrack>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);

    let header = reader.headers()?.clone();
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }

    let mut storms: Vec<StormTrack> = Vec::new();
    let step = Duration::hours(FIX_INTERVAL_HOURS);

    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != CSV_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} columns, found {}", CSV_HEADER.len(), record.len()),
            });
        }
        let storm_id = record[0].trim().to_string();
        if storm_id.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty storm_id".into(),
            });
        }
        let timestamp = DateTime::parse_from_rfc3339(record[2].trim())
            .map_err(|e| Error::Parse {
                line,
                message: format!("timestamp `{}`: {e}", &record[2]),
            })?
            .with_timezone(&Utc);
        let fix = Fix {
            timestamp,
            lat: parse_number(&record[3], "lat_deg", line)?,
            lon: parse_number(&record[4], "lon_deg", line)?,
            max_wind: parse_number(&record[5], "max_wind_kt", line)?,
            min_pressure: parse_number(&record[6], "min_pressure_hpa", line)?,
        };
        fix.check().map_err(|message| Error::Validation {
            line: Some(line),
            message,
        })?;

        let idx = match storms.iter().position(|s| s.storm_id == storm_id) {
            Some(i) => i,
            None => {
                storms.push(StormTrack {
                    storm_id,
                    name: record[1].trim().to_string(),
                    fixes: Vec::new(),
                });
                storms.len() - 1
            }
        };
        let storm = &mut storms[idx];
        if let Some(prev) = storm.fixes.last() {
            let gap = fix.timestamp - prev.timestamp;
            if gap <= Duration::zero() {
                return Err(Error::Validation {
                    line: Some(line),
                    message: format!("storm {}: timestamps not increasing", storm.storm_id),
                });
            }
            if gap != step {
                return Err(Error::Validation {
                    line: Some(line),
                    message: format!(
                        "storm {}: gap of {} hours breaks the {FIX_INTERVAL_HOURS}-hour grid",
                        storm.storm_id,
                        gap.num_minutes() as f64 / 60.0
                    ),
                });
            }
        }
        storm.fixes.push(fix);
    }
    Ok(storms)
}

/// Renders storms back into the CSV format accepted by [`parse_track_csv`].
pub fn write_track_csv(storms: &[StormTrack]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for storm in storms {
        for fix in &storm.fixes {
            writer.write_record([
                storm.storm_id.clone(),
                storm.name.clone(),
                fix.timestamp.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                fix.lat.to_string(),
                fix.lon.to_string(),
                fix.max_wind.to_string(),
                fix.min_pressure.to_string(),
            ])?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
