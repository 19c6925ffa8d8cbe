use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rnn::{forward, DropoutMasks, ModelParams};

/// Outputs of `T` stochastic forward passes over one input, with their
/// per-coordinate mean and sample standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionEnsemble {
    pub predictions: Vec<[f64; 2]>,
    pub mean: [f64; 2],
    /// Sample standard deviation (denominator `T - 1`).
    pub std: [f64; 2],
}

impl PredictionEnsemble {
    pub fn from_predictions(predictions: Vec<[f64; 2]>) -> Result<Self> {
        let t = predictions.len();
        if t < 2 {
            return Err(Error::InsufficientData { needed: 2, given: t });
        }
        let mut mean = [0.0; 2];
        let mut std = [0.0; 2];
        for c in 0..2 {
            mean[c] = predictions.iter().map(|p| p[c]).sum::<f64>() / t as f64;
            let ss: f64 = predictions.iter().map(|p| (p[c] - mean[c]).powi(2)).sum();
            std[c] = (ss / (t - 1) as f64).sqrt();
        }
        Ok(PredictionEnsemble {
            predictions,
            mean,
            std,
        })
    }

    pub fn passes(&self) -> usize {
        self.predictions.len()
    }

    /// All passes of one coordinate.
    pub fn column(&self, coordinate: usize) -> Vec<f64> {
        self.predictions.iter().map(|p| p[coordinate]).collect()
    }
}

/// Monte Carlo dropout prediction drawing masks from `rng`. Masks are drawn
/// once per pass and held for every timestep of that pass.
pub fn mc_predict_with_rng<R: Rng + ?Sized>(
    params: &ModelParams,
    input: &[f64],
    passes: usize,
    p_input: f64,
    p_recurrent: f64,
    rng: &mut R,
) -> Result<PredictionEnsemble> {
    if passes < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            given: passes,
        });
    }
    let arch = params.architecture();
    if arch.n_y != 2 {
        return Err(Error::invalid("ensembles need a two-output network"));
    }
    let mut predictions = Vec::with_capacity(passes);
    for _ in 0..passes {
        let masks = DropoutMasks::sample(rng, arch, p_input, p_recurrent)?;
        let y = forward(input, params, &masks);
        predictions.push([y[0], y[1]]);
    }
    PredictionEnsemble::from_predictions(predictions)
}

/// [`mc_predict_with_rng`] seeded from `seed`.
pub fn mc_predict(
    params: &ModelParams,
    input: &[f64],
    passes: usize,
    p_input: f64,
    p_recurrent: f64,
    seed: u64,
) -> Result<PredictionEnsemble> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    mc_predict_with_rng(params, input, passes, p_input, p_recurrent, &mut rng)
}
