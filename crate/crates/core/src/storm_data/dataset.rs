use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::features::derive_features;
use super::samples::{build_samples, Sample, SampleParams};
use super::scaler::Scaler;
use super::split::shuffle_split;
use super::track::StormTrack;
use crate::error::{Error, Result};
use crate::fsutil;

pub const DATASET_FORMAT_VERSION: u64 = 1;

/// Which storm partition to read samples from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "validation" | "val" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(Error::invalid(format!(
                "unknown split `{other}` (expected train, validation or test)"
            ))),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone)]
pub struct DatasetOptions {
    pub seed: u64,
    pub min_start: usize,
    pub pred_len: usize,
    /// Padded sequence length; defaults to the longest storm.
    pub max_len: Option<usize>,
    pub test_fraction: f64,
    pub validation_fraction: f64,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        DatasetOptions {
            seed: 0,
            min_start: super::samples::DEFAULT_MIN_START,
            pred_len: super::samples::DEFAULT_PRED_LEN,
            max_len: None,
            test_fraction: super::split::DEFAULT_TEST_FRACTION,
            validation_fraction: super::split::DEFAULT_VALIDATION_FRACTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitIds {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSamples {
    pub train: Vec<Sample>,
    pub validation: Vec<Sample>,
    pub test: Vec<Sample>,
}

/// Everything the training and prediction stages need from ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetArtifact {
    pub format_version: u64,
    pub seed: u64,
    pub params: SampleParams,
    pub scaler: Scaler,
    pub splits: SplitIds,
    pub samples: SplitSamples,
}

impl DatasetArtifact {
    pub fn samples(&self, split: Split) -> &[Sample] {
        match split {
            Split::Train => &self.samples.train,
            Split::Validation => &self.samples.validation,
            Split::Test => &self.samples.test,
        }
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec(self)?)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let artifact: Self = fsutil::decode_versioned(bytes, DATASET_FORMAT_VERSION)?;
        artifact.scaler.validate()?;
        artifact.params.validate()?;
        let rows = artifact.params.input_len();
        for split in [Split::Train, Split::Validation, Split::Test] {
            if let Some(s) = artifact.samples(split).iter().find(|s| s.input.len() != rows) {
                return Err(Error::Malformed(format!(
                    "sample {}@{} has {} rows, expected {rows}",
                    s.storm_id,
                    s.cutoff,
                    s.input.len()
                )));
            }
        }
        Ok(artifact)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fsutil::write_atomic(path, &self.to_json()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read(path)?)
    }
}

fn samples_for(tracks: &[StormTrack], scaler: &Scaler, params: &SampleParams) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    for t in tracks {
        out.extend(build_samples(&t.storm_id, &derive_features(t), scaler, params)?);
    }
    Ok(out)
}

/// Splits storms, fits the scaler on the training storms only and builds the
/// padded samples of every split.
pub fn prepare_dataset(tracks: Vec<StormTrack>, options: &DatasetOptions) -> Result<DatasetArtifact> {
    for t in &tracks {
        t.validate()?;
    }
    let longest = tracks.iter().map(StormTrack::len).max().unwrap_or(0);
    let params = SampleParams {
        min_start: options.min_start,
        pred_len: options.pred_len,
        max_len: options.max_len.unwrap_or(longest),
    };
    params.validate()?;

    let split = shuffle_split(
        tracks,
        options.seed,
        options.test_fraction,
        options.validation_fraction,
    )?;
    let train_features: Vec<_> = split.train.iter().flat_map(derive_features).collect();
    let scaler = Scaler::fit(&train_features)?;

    let ids = |v: &[StormTrack]| v.iter().map(|t| t.storm_id.clone()).collect();
    Ok(DatasetArtifact {
        format_version: DATASET_FORMAT_VERSION,
        seed: options.seed,
        params,
        splits: SplitIds {
            train: ids(&split.train),
            validation: ids(&split.validation),
            test: ids(&split.test),
        },
        samples: SplitSamples {
            train: samples_for(&split.train, &scaler, &params)?,
            validation: samples_for(&split.validation, &scaler, &params)?,
            test: samples_for(&split.test, &scaler, &params)?,
        },
        scaler,
    })
}
