use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, LAT, LON, N_FEATURES};
use super::scaler::Scaler;
use crate::error::{Error, Result};

/// Observed fixes required before the first prediction (24 hours).
pub const DEFAULT_MIN_START: usize = 4;
/// Predict one fix (six hours) ahead by default.
pub const DEFAULT_PRED_LEN: usize = 1;

/// Window geometry shared by every sample of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleParams {
    /// Fixes observed before predictions begin.
    pub min_start: usize,
    /// How many fixes past the last observation the label lies.
    pub pred_len: usize,
    /// Length of the longest storm; fixes the padded input length.
    pub max_len: usize,
}

impl SampleParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_start < 1 || self.pred_len < 1 {
            return Err(Error::invalid("min_start and pred_len must be at least 1"));
        }
        if self.max_len < self.min_start + self.pred_len {
            return Err(Error::invalid(format!(
                "max_len {} shorter than min_start {} + pred_len {}",
                self.max_len, self.min_start, self.pred_len
            )));
        }
        Ok(())
    }

    /// Rows in every padded input.
    pub fn input_len(&self) -> usize {
        self.max_len - self.pred_len - self.min_start
    }

    /// Number of samples a track of `len` fixes yields.
    pub fn sample_count(&self, len: usize) -> usize {
        (len + 1).saturating_sub(self.pred_len + self.min_start)
    }
}

/// One model input with its label.
///
/// `input` is pre-padded: the first `input_len - mask_len` rows are zero and
/// the last `mask_len` rows hold the normalized features of the first
/// `cutoff` fixes. When a cutoff exceeds the input length the oldest fixes
/// are dropped, keeping the most recent ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub storm_id: String,
    /// Number of fixes observed.
    pub cutoff: usize,
    pub input: Vec<[f64; N_FEATURES]>,
    /// Normalized `(lat, lon)` at fix `cutoff + pred_len - 1`.
    pub label: [f64; 2],
    /// Rows of `input` that hold data.
    pub mask_len: usize,
}

impl Sample {
    /// Row-major view of the input matrix.
    pub fn flat_input(&self) -> &[f64] {
        self.input.as_flattened()
    }
}

/// Builds one sample per cutoff `c` in `min_start ..= L - pred_len`.
pub fn build_samples(
    storm_id: &str,
    features: &[FeatureVector],
    scaler: &Scaler,
    params: &SampleParams,
) -> Result<Vec<Sample>> {
    params.validate()?;
    let len = features.len();
    if len > params.max_len {
        return Err(Error::invalid(format!(
            "storm {storm_id} has {len} fixes, more than max_len {}",
            params.max_len
        )));
    }
    let input_len = params.input_len();
    let normalized: Vec<[f64; N_FEATURES]> = features
        .iter()
        .map(|v| scaler.apply(v, false).to_array())
        .collect();

    let Some(last_cutoff) = len.checked_sub(params.pred_len) else {
        return Ok(Vec::new());
    };
    let samples = (params.min_start..=last_cutoff)
        .map(|cutoff| {
            let mask_len = cutoff.min(input_len);
            let mut input = vec![[0.0; N_FEATURES]; input_len];
            input[input_len - mask_len..].copy_from_slice(&normalized[cutoff - mask_len..cutoff]);
            let target = &normalized[cutoff + params.pred_len - 1];
            Sample {
                storm_id: storm_id.to_string(),
                cutoff,
                input,
                label: [target[LAT], target[LON]],
                mask_len,
            }
        })
        .collect();
    Ok(samples)
}
