use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::config::TrainConfig;
use crate::error::{Error, Result};
use crate::rnn::{backward, forward, Architecture, DropoutMasks, Gradients, ModelParams};
use crate::storm_data::Sample;

/// Mean over both coordinates of the squared error.
pub fn mse(pred: [f64; 2], label: [f64; 2]) -> f64 {
    ((pred[0] - label[0]).powi(2) + (pred[1] - label[1]).powi(2)) / 2.0
}

/// Deterministic prediction with dropout switched off.
pub fn predict(params: &ModelParams, sample: &Sample) -> [f64; 2] {
    let y = forward(sample.flat_input(), params, &DropoutMasks::none(params.architecture()));
    [y[0], y[1]]
}

/// Mean per-sample MSE of the dropout-free prediction.
pub fn evaluate_mse(params: &ModelParams, samples: &[Sample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples
        .iter()
        .map(|s| mse(predict(params, s), s.label))
        .sum::<f64>()
        / samples.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
}

impl TrainHistory {
    /// `epoch,train_mse,val_mse` rows, epochs counted from 1.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.epochs {
            w.serialize(r)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.epochs.last()
    }
}

/// Stream seeding the per-epoch shuffles and mask draws, kept apart from the
/// weight initialization stream.
const TRAIN_STREAM: u64 = 1;

/// Fits a fresh network to `train` with minibatch Adam.
///
/// Each epoch shuffles the samples, draws new variational masks for every
/// sequence, averages the gradients of a minibatch and takes one optimizer
/// step. The recorded training loss is the mean loss seen under dropout; the
/// validation loss uses dropout-free predictions.
pub fn train(
    train: &[Sample],
    validation: &[Sample],
    config: &TrainConfig,
) -> Result<(ModelParams, TrainHistory)> {
    config.validate()?;
    let arch = Architecture::STORM;
    let mut params = ModelParams::init(arch, config.seed);
    let mut history = TrainHistory::default();
    if config.epochs == 0 {
        return Ok((params, history));
    }
    if train.is_empty() || validation.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1,
            given: 0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(TRAIN_STREAM);
    let mut adam = AdamState::new(arch);
    let mut order: Vec<usize> = (0..train.len()).collect();

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut total = Gradients::zeros(arch);
            for &i in batch {
                let masks = DropoutMasks::sample(&mut rng, arch, config.p_input, config.p_recurrent)?;
                let s = &train[i];
                let (loss, g) = backward(s.flat_input(), &s.label, &params, &masks);
                if !loss.is_finite() {
                    return Err(Error::NonFinite(format!("training loss in epoch {epoch}")));
                }
                loss_sum += loss;
                total.accumulate(&g);
            }
            total.scale(1.0 / batch.len() as f64);
            adam_step(&mut params, &total, &mut adam, config)?;
        }
        let val_mse = evaluate_mse(&params, validation);
        if !val_mse.is_finite() {
            return Err(Error::NonFinite(format!("validation loss in epoch {epoch}")));
        }
        history.epochs.push(EpochRecord {
            epoch,
            train_mse: loss_sum / train.len() as f64,
            val_mse,
        });
    }
    Ok((params, history))
}
