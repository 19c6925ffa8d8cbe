//! Lossless JSON model files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use crate::error::{Error, Result};
use crate::fsutil;
use crate::rnn::{Architecture, LayerParams, ModelParams};
use crate::storm_data::Scaler;

pub const MODEL_FORMAT_VERSION: u64 = 1;

/// A row-major matrix with its explicit shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub shape: [usize; 2],
    pub data: Vec<f64>,
}

impl MatrixRecord {
    fn new(rows: usize, cols: usize, data: &[f64]) -> Self {
        MatrixRecord {
            shape: [rows, cols],
            data: data.to_vec(),
        }
    }

    fn take(self, rows: usize, cols: usize, name: &str) -> Result<Vec<f64>> {
        if self.shape != [rows, cols] || self.data.len() != rows * cols {
            return Err(Error::Malformed(format!(
                "{name}: expected shape [{rows}, {cols}], found {:?} with {} values",
                self.shape,
                self.data.len()
            )));
        }
        Ok(self.data)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub input_weights: MatrixRecord,
    pub recurrent_weights: MatrixRecord,
    pub bias: MatrixRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRecords {
    pub layer1: LayerRecord,
    pub layer2: LayerRecord,
    pub output_weights: MatrixRecord,
    pub output_bias: MatrixRecord,
}

/// On-disk layout of a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u64,
    pub architecture: Architecture,
    pub weights: WeightRecords,
    pub training: TrainConfig,
    pub scaler: Scaler,
}

/// A model together with the configuration and scaler it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub params: ModelParams,
    pub config: TrainConfig,
    pub scaler: Scaler,
}

fn layer_record(l: &LayerParams) -> LayerRecord {
    LayerRecord {
        input_weights: MatrixRecord::new(4 * l.n_h, l.n_in, &l.input_weights),
        recurrent_weights: MatrixRecord::new(4 * l.n_h, l.n_h, &l.recurrent_weights),
        bias: MatrixRecord::new(4 * l.n_h, 1, &l.bias),
    }
}

fn layer_from(r: LayerRecord, n_in: usize, n_h: usize, name: &str) -> Result<LayerParams> {
    Ok(LayerParams {
        n_in,
        n_h,
        input_weights: r.input_weights.take(4 * n_h, n_in, &format!("{name}.input_weights"))?,
        recurrent_weights: r
            .recurrent_weights
            .take(4 * n_h, n_h, &format!("{name}.recurrent_weights"))?,
        bias: r.bias.take(4 * n_h, 1, &format!("{name}.bias"))?,
    })
}

impl ModelFile {
    pub fn from_model(model: &SavedModel) -> Self {
        let p = &model.params;
        let arch = p.architecture();
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            architecture: arch,
            weights: WeightRecords {
                layer1: layer_record(&p.layer1),
                layer2: layer_record(&p.layer2),
                output_weights: MatrixRecord::new(arch.n_y, arch.n_h2, &p.output_weights),
                output_bias: MatrixRecord::new(arch.n_y, 1, &p.output_bias),
            },
            training: model.config.clone(),
            scaler: model.scaler.clone(),
        }
    }

    pub fn into_model(self) -> Result<SavedModel> {
        let a = self.architecture;
        let w = self.weights;
        let params = ModelParams {
            layer1: layer_from(w.layer1, a.n_x, a.n_h1, "layer1")?,
            layer2: layer_from(w.layer2, a.n_h1, a.n_h2, "layer2")?,
            output_weights: w.output_weights.take(a.n_y, a.n_h2, "output_weights")?,
            output_bias: w.output_bias.take(a.n_y, 1, "output_bias")?,
        };
        if !params.is_finite() {
            return Err(Error::Malformed("non-finite parameter".into()));
        }
        self.scaler.validate()?;
        Ok(SavedModel {
            params,
            config: self.training,
            scaler: self.scaler,
        })
    }
}

pub fn model_to_json(model: &SavedModel) -> Result<Vec<u8>> {
    if !model.params.is_finite() {
        return Err(Error::NonFinite("model parameters".into()));
    }
    Ok(serde_json::to_vec_pretty(&ModelFile::from_model(model))?)
}

pub fn model_from_json(bytes: &[u8]) -> Result<SavedModel> {
    fsutil::decode_versioned::<ModelFile>(bytes, MODEL_FORMAT_VERSION)?.into_model()
}

pub fn save_model(path: &Path, model: &SavedModel) -> Result<()> {
    fsutil::write_atomic(path, &model_to_json(model)?)
}

pub fn load_model(path: &Path) -> Result<SavedModel> {
    model_from_json(&std::fs::read(path)?)
}
