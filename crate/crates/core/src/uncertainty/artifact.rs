//! The predictions file written by `predict` and read by `evaluate` and
//! `export-plot`.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::coverage::{coverage, CoverageReport};
use super::ensemble::{mc_predict_with_rng, PredictionEnsemble};
use super::interval::{credible_band, z_for_level, CredibleBand};
use super::normality::{dagostino_k2, NormalityTest};
use crate::error::{Error, Result};
use crate::fsutil;
use crate::rnn::ModelParams;
use crate::storm_data::features::{LAT, LON};
use crate::storm_data::{Sample, Scaler, Split};

pub const PREDICTIONS_FORMAT_VERSION: u64 = 1;

/// Map key of a credible level, e.g. `"67"` or `"67.5"`.
pub fn level_key(level: f64) -> String {
    level.to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandBounds {
    pub lat: [f64; 2],
    pub lon: [f64; 2],
}

impl From<&CredibleBand> for BandBounds {
    fn from(b: &CredibleBand) -> Self {
        BandBounds {
            lat: [b.lower[0], b.upper[0]],
            lon: [b.lower[1], b.upper[1]],
        }
    }
}

/// One sample's summary in one unit system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSummary {
    pub mu: [f64; 2],
    pub sigma: [f64; 2],
    pub truth: [f64; 2],
    pub bands: BTreeMap<String, BandBounds>,
}

impl UnitSummary {
    pub fn band(&self, level: f64) -> Result<&BandBounds> {
        self.bands
            .get(&level_key(level))
            .ok_or_else(|| Error::Malformed(format!("no band at level {level}")))
    }
}

/// D'Agostino-Pearson results per coordinate; absent when the ensemble is
/// too small or has no spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinateNormality {
    pub lat: Option<NormalityTest>,
    pub lon: Option<NormalityTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePrediction {
    pub storm_id: String,
    pub cutoff: usize,
    #[serde(rename = "T")]
    pub passes: usize,
    pub normalized: UnitSummary,
    pub degrees: UnitSummary,
    pub normality: CoordinateNormality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionsArtifact {
    pub format_version: u64,
    pub split: Split,
    pub passes: usize,
    pub levels: Vec<f64>,
    pub seed: u64,
    pub p_input: f64,
    pub p_recurrent: f64,
    pub pred_len: usize,
    pub samples: Vec<SamplePrediction>,
}

#[derive(Debug, Clone)]
pub struct PredictOptions {
    pub passes: usize,
    pub levels: Vec<f64>,
    pub seed: u64,
    pub p_input: f64,
    pub p_recurrent: f64,
}

fn summarize(
    ensemble: &PredictionEnsemble,
    bands: &[CredibleBand],
    truth: [f64; 2],
) -> UnitSummary {
    UnitSummary {
        mu: ensemble.mean,
        sigma: ensemble.std,
        truth,
        bands: bands.iter().map(|b| (level_key(b.level), b.into())).collect(),
    }
}

/// Runs the Monte Carlo ensemble for every sample. Sample `i` draws its masks
/// from stream `i` of a generator seeded with `options.seed`, so results do
/// not depend on evaluation order.
pub fn predict_samples(
    params: &ModelParams,
    scaler: &Scaler,
    samples: &[Sample],
    split: Split,
    pred_len: usize,
    options: &PredictOptions,
) -> Result<PredictionsArtifact> {
    if options.levels.is_empty() {
        return Err(Error::invalid("at least one credible level is required"));
    }
    for &level in &options.levels {
        z_for_level(level)?;
    }
    let mut out = Vec::with_capacity(samples.len());
    for (i, sample) in samples.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(i as u64);
        let ens = mc_predict_with_rng(
            params,
            sample.flat_input(),
            options.passes,
            options.p_input,
            options.p_recurrent,
            &mut rng,
        )?;
        let bands = options
            .levels
            .iter()
            .map(|&l| credible_band(&ens, l))
            .collect::<Result<Vec<_>>>()?;
        let degree_bands: Vec<_> = bands.iter().map(|b| b.to_degrees(scaler)).collect();
        let degree_ens = PredictionEnsemble {
            predictions: Vec::new(),
            mean: [
                scaler.denormalize(LAT, ens.mean[0]),
                scaler.denormalize(LON, ens.mean[1]),
            ],
            std: [ens.std[0] * scaler.span(LAT), ens.std[1] * scaler.span(LON)],
        };
        let degree_truth = [
            scaler.denormalize(LAT, sample.label[0]),
            scaler.denormalize(LON, sample.label[1]),
        ];
        out.push(SamplePrediction {
            storm_id: sample.storm_id.clone(),
            cutoff: sample.cutoff,
            passes: ens.passes(),
            normalized: summarize(&ens, &bands, sample.label),
            degrees: summarize(&degree_ens, &degree_bands, degree_truth),
            normality: CoordinateNormality {
                lat: dagostino_k2(&ens.column(0)).ok(),
                lon: dagostino_k2(&ens.column(1)).ok(),
            },
        });
    }
    Ok(PredictionsArtifact {
        format_version: PREDICTIONS_FORMAT_VERSION,
        split,
        passes: options.passes,
        levels: options.levels.clone(),
        seed: options.seed,
        p_input: options.p_input,
        p_recurrent: options.p_recurrent,
        pred_len,
        samples: out,
    })
}

impl PredictionsArtifact {
    pub fn to_json(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec_pretty(self)?)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        fsutil::decode_versioned(bytes, PREDICTIONS_FORMAT_VERSION)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fsutil::write_atomic(path, &self.to_json()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read(path)?)
    }

    /// Coverage of the normalized bands over every sample in the file.
    pub fn coverage(&self) -> Result<CoverageReport> {
        let mut bands = Vec::with_capacity(self.samples.len());
        let mut truths = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            let set = self
                .levels
                .iter()
                .map(|&level| {
                    let b = s.normalized.band(level)?;
                    Ok(CredibleBand {
                        level,
                        z: z_for_level(level)?,
                        lower: [b.lat[0], b.lon[0]],
                        upper: [b.lat[1], b.lon[1]],
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            bands.push(set);
            truths.push(s.normalized.truth);
        }
        coverage(&bands, &truths)
    }
}
