//! Seeded synthetic storm tracks for experiments and tests.

use chrono::{Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::track::{Fix, StormTrack, FIX_INTERVAL_HOURS};

fn start_time(index: usize) -> chrono::DateTime<Utc> {
    Utc.with_ymd_and_hms(2000, 6, 1, 0, 0, 0).unwrap() + Duration::days(3 * index as i64)
}

fn pressure_for_wind(wind: f64) -> f64 {
    // rough Atlantic wind-pressure relationship
    (1015.0 - 0.0105 * wind * wind - 0.2 * wind).max(880.0)
}

/// Intensity shared by every constant-velocity storm.
pub const CONSTANT_VELOCITY_WIND_KT: f64 = 65.0;

/// `count` storms of `len` fixes, each moving with a constant per-step
/// latitude and longitude displacement. All storms share one intensity, so
/// only their positions and motion differ.
pub fn constant_velocity_tracks(count: usize, len: usize, seed: u64) -> Vec<StormTrack> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let lat0 = rng.gen_range(12.0..28.0);
            let lon0 = rng.gen_range(-85.0..-45.0);
            let dlat = rng.gen_range(0.1..0.6);
            let dlon = rng.gen_range(-0.9..0.3);
            let wind = CONSTANT_VELOCITY_WIND_KT;
            let t0 = start_time(i);
            StormTrack {
                storm_id: format!("CV{i:03}"),
                name: format!("LINEAR{i}"),
                fixes: (0..len)
                    .map(|k| Fix {
                        timestamp: t0 + Duration::hours(FIX_INTERVAL_HOURS * k as i64),
                        lat: lat0 + dlat * k as f64,
                        lon: lon0 + dlon * k as f64,
                        max_wind: wind,
                        min_pressure: pressure_for_wind(wind),
                    })
                    .collect(),
            }
        })
        .collect()
}

/// Knobs for [`recurving_tracks`].
#[derive(Debug, Clone)]
pub struct RecurveConfig {
    pub min_len: usize,
    pub max_len: usize,
    /// Std of the per-step random change in velocity, degrees.
    pub velocity_noise: f64,
    /// Std of the independent position error of every fix, degrees.
    pub position_noise: f64,
}

impl Default for RecurveConfig {
    fn default() -> Self {
        RecurveConfig {
            min_len: 12,
            max_len: 16,
            velocity_noise: 0.3,
            position_noise: 1.5,
        }
    }
}

/// Storms that drift west-northwest in the tropics and turn northeast as
/// they gain latitude, with random steering perturbations and noisy fixes.
pub fn recurving_tracks(count: usize, seed: u64, cfg: &RecurveConfig) -> Vec<StormTrack> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steer = Normal::new(0.0, cfg.velocity_noise.max(f64::MIN_POSITIVE)).unwrap();
    let jitter = Normal::new(0.0, cfg.position_noise.max(f64::MIN_POSITIVE)).unwrap();
    (0..count)
        .map(|i| {
            let len = rng.gen_range(cfg.min_len..=cfg.max_len);
            let mut lat: f64 = rng.gen_range(11.0..20.0);
            let mut lon: f64 = rng.gen_range(-70.0..-35.0);
            let mut vlat: f64 = rng.gen_range(0.1..0.35);
            let mut vlon: f64 = rng.gen_range(-0.9..-0.4);
            let turn_lat: f64 = rng.gen_range(22.0..30.0);
            let mut wind: f64 = rng.gen_range(30.0..50.0);
            let peak: f64 = rng.gen_range(60.0..140.0);
            let t0 = start_time(i);
            let mut fixes = Vec::with_capacity(len);
            for k in 0..len {
                let obs_lat = (lat + jitter.sample(&mut rng)).clamp(-89.0, 89.0);
                let obs_lon = (lon + jitter.sample(&mut rng)).clamp(-179.0, 179.0);
                fixes.push(Fix {
                    timestamp: t0 + Duration::hours(FIX_INTERVAL_HOURS * k as i64),
                    lat: obs_lat,
                    lon: obs_lon,
                    max_wind: wind.round(),
                    min_pressure: pressure_for_wind(wind).round(),
                });
                // beta drift plus westerlies: eastward push grows past turn_lat
                let westerly = 0.06 * (lat - turn_lat).max(-4.0);
                vlon = (vlon + westerly + steer.sample(&mut rng)).clamp(-1.2, 1.5);
                vlat = (vlat + 0.01 + steer.sample(&mut rng) * 0.5).clamp(-0.2, 0.9);
                lat += vlat;
                lon += vlon;
                // intensity relaxes toward a ceiling that falls over cooler water
                let ceiling = (peak - 6.0 * (lat - 18.0).max(0.0)).max(25.0);
                wind += 0.35 * (ceiling - wind) + steer.sample(&mut rng) * 20.0;
                wind = wind.clamp(20.0, 170.0);
            }
            StormTrack {
                storm_id: format!("RC{i:03}"),
                name: format!("RECURVE{i}"),
                fixes,
            }
        })
        .collect()
}
