use crate::error::{Error, Result};
use crate::rnn::{Architecture, Gradients, ModelParams};

use super::config::TrainConfig;

/// First and second moment estimates for every parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: ModelParams,
    pub v: ModelParams,
    pub t: u64,
}

impl AdamState {
    pub fn new(arch: Architecture) -> Self {
        AdamState {
            m: ModelParams::zeros(arch),
            v: ModelParams::zeros(arch),
            t: 0,
        }
    }
}

/// Bias-corrected Adam update of one parameter block at step `t` (already
/// incremented).
#[allow(clippy::too_many_arguments)]
pub fn adam_update(
    theta: &mut [f64],
    grad: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    t: u64,
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
) {
    let bias1 = 1.0 - beta1.powi(t as i32);
    let bias2 = 1.0 - beta2.powi(t as i32);
    for k in 0..theta.len() {
        let g = grad[k];
        m[k] = beta1 * m[k] + (1.0 - beta1) * g;
        v[k] = beta2 * v[k] + (1.0 - beta2) * g * g;
        let m_hat = m[k] / bias1;
        let v_hat = v[k] / bias2;
        theta[k] -= lr * m_hat / (v_hat.sqrt() + epsilon);
    }
}

/// One optimizer step over all parameter blocks. A non-finite gradient
/// aborts before anything is modified.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &Gradients,
    state: &mut AdamState,
    config: &TrainConfig,
) -> Result<()> {
    if !grads.is_finite() {
        return Err(Error::NonFinite("gradient".into()));
    }
    state.t += 1;
    let t = state.t;
    let blocks = params
        .blocks_mut()
        .into_iter()
        .zip(grads.blocks())
        .zip(state.m.blocks_mut().into_iter().zip(state.v.blocks_mut()));
    for ((theta, g), (m, v)) in blocks {
        adam_update(
            theta,
            g,
            m,
            v,
            t,
            config.learning_rate,
            config.beta1,
            config.beta2,
            config.epsilon,
        );
    }
    Ok(())
}
