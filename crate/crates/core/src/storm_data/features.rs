use serde::{Deserialize, Serialize};

use super::geo::{haversine_km, initial_bearing_deg};
use super::track::StormTrack;

/// Number of model input features per timestep.
pub const N_FEATURES: usize = 6;

/// Index of latitude within [`FeatureVector::to_array`].
pub const LAT: usize = 0;
/// Index of longitude within [`FeatureVector::to_array`].
pub const LON: usize = 1;

/// Per-fix model inputs: position, intensity and the motion since the
/// previous fix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub lat: f64,
    pub lon: f64,
    pub max_wind: f64,
    pub min_pressure: f64,
    /// Kilometers travelled since the previous fix.
    pub step_distance: f64,
    /// Initial bearing of that step, degrees clockwise from north.
    pub step_bearing: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.lat,
            self.lon,
            self.max_wind,
            self.min_pressure,
            self.step_distance,
            self.step_bearing,
        ]
    }

    pub fn from_array(a: [f64; N_FEATURES]) -> Self {
        FeatureVector {
            lat: a[0],
            lon: a[1],
            max_wind: a[2],
            min_pressure: a[3],
            step_distance: a[4],
            step_bearing: a[5],
        }
    }
}

/// One feature vector per fix. The first fix has no predecessor and gets a
/// zero step distance and bearing.
pub fn derive_features(track: &StormTrack) -> Vec<FeatureVector> {
    let mut prev: Option<(f64, f64)> = None;
    track
        .fixes
        .iter()
        .map(|fix| {
            let here = fix.position();
            let (step_distance, step_bearing) = match prev {
                Some(p) => (haversine_km(p, here), initial_bearing_deg(p, here)),
                None => (0.0, 0.0),
            };
            prev = Some(here);
            FeatureVector {
                lat: fix.lat,
                lon: fix.lon,
                max_wind: fix.max_wind,
                min_pressure: fix.min_pressure,
                step_distance,
                step_bearing,
            }
        })
        .collect()
}
