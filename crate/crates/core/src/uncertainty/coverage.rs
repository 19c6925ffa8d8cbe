use std::fmt;

use serde::{Deserialize, Serialize};

use super::interval::CredibleBand;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    Lat,
    Lon,
}

impl Coordinate {
    pub const BOTH: [Coordinate; 2] = [Coordinate::Lat, Coordinate::Lon];

    pub fn index(self) -> usize {
        match self {
            Coordinate::Lat => 0,
            Coordinate::Lon => 1,
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coordinate::Lat => "lat",
            Coordinate::Lon => "lon",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub coordinate: Coordinate,
    pub level: f64,
    pub percent: f64,
    pub n: usize,
}

/// Share of truths falling inside each band, per coordinate and level.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub entries: Vec<CoverageEntry>,
}

impl CoverageReport {
    pub fn percent(&self, coordinate: Coordinate, level: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.coordinate == coordinate && e.level == level)
            .map(|e| e.percent)
    }

    /// `coordinate,level,percent,n` rows.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["coordinate", "level", "percent", "n"])?;
        for e in &self.entries {
            w.write_record([
                e.coordinate.to_string(),
                e.level.to_string(),
                e.percent.to_string(),
                e.n.to_string(),
            ])?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

/// `bands[i]` holds the bands of evaluated point `i` at every level (the same
/// levels, in the same order, for all points); `truths[i]` its true
/// position. Intervals are closed.
pub fn coverage(bands: &[Vec<CredibleBand>], truths: &[[f64; 2]]) -> Result<CoverageReport> {
    if bands.len() != truths.len() {
        return Err(Error::invalid(format!(
            "{} band sets for {} truths",
            bands.len(),
            truths.len()
        )));
    }
    let Some(first) = bands.first() else {
        return Err(Error::InsufficientData { needed: 1, given: 0 });
    };
    let levels: Vec<f64> = first.iter().map(|b| b.level).collect();
    if bands
        .iter()
        .any(|set| set.len() != levels.len() || set.iter().zip(&levels).any(|(b, l)| b.level != *l))
    {
        return Err(Error::invalid("every point must carry bands at the same levels"));
    }
    let n = truths.len();
    let mut entries = Vec::with_capacity(2 * levels.len());
    for coordinate in Coordinate::BOTH {
        let c = coordinate.index();
        for (k, &level) in levels.iter().enumerate() {
            let inside = bands
                .iter()
                .zip(truths)
                .filter(|(set, truth)| set[k].contains(c, truth[c]))
                .count();
            entries.push(CoverageEntry {
                coordinate,
                level,
                percent: 100.0 * inside as f64 / n as f64,
                n,
            });
        }
    }
    Ok(CoverageReport { entries })
}
