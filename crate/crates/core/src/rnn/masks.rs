//! Variational dropout masks: one Bernoulli draw per sequence, reused at
//! every timestep.

use rand::Rng;

use super::params::Architecture;
use crate::error::{Error, Result};

/// Keep-masks of one LSTM layer. Entries are exactly `0.0` or `1.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerMasks {
    pub input_keep: Vec<f64>,
    pub recurrent_keep: Vec<f64>,
    /// `1 / (1 - p_input)`
    pub input_scale: f64,
    /// `1 / (1 - p_recurrent)`
    pub recurrent_scale: f64,
}

impl LayerMasks {
    fn ones(n_in: usize, n_h: usize) -> Self {
        LayerMasks {
            input_keep: vec![1.0; n_in],
            recurrent_keep: vec![1.0; n_h],
            input_scale: 1.0,
            recurrent_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMasks {
    pub layers: [LayerMasks; 2],
    pub p_input: f64,
    pub p_recurrent: f64,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in [0, 1), got {p}")))
    }
}

impl DropoutMasks {
    /// Dropout disabled: all-ones masks, no rescaling.
    pub fn none(arch: Architecture) -> Self {
        DropoutMasks {
            layers: [
                LayerMasks::ones(arch.n_x, arch.n_h1),
                LayerMasks::ones(arch.n_h1, arch.n_h2),
            ],
            p_input: 0.0,
            p_recurrent: 0.0,
        }
    }

    /// Draws fresh masks for one sequence pass. Every entry is kept
    /// independently with probability `1 - p`.
    pub fn sample<R: Rng + ?Sized>(
        rng: &mut R,
        arch: Architecture,
        p_input: f64,
        p_recurrent: f64,
    ) -> Result<Self> {
        check_probability("input dropout", p_input)?;
        check_probability("recurrent dropout", p_recurrent)?;
        let mut draw = |n: usize, p: f64| -> Vec<f64> {
            (0..n)
                .map(|_| if rng.gen::<f64>() < p { 0.0 } else { 1.0 })
                .collect()
        };
        let mut layer = |n_in: usize, n_h: usize| LayerMasks {
            input_keep: draw(n_in, p_input),
            recurrent_keep: draw(n_h, p_recurrent),
            input_scale: 1.0 / (1.0 - p_input),
            recurrent_scale: 1.0 / (1.0 - p_recurrent),
        };
        let first = layer(arch.n_x, arch.n_h1);
        let second = layer(arch.n_h1, arch.n_h2);
        Ok(DropoutMasks {
            layers: [first, second],
            p_input,
            p_recurrent,
        })
    }

    pub fn architecture_matches(&self, arch: Architecture) -> bool {
        let [l1, l2] = &self.layers;
        l1.input_keep.len() == arch.n_x
            && l1.recurrent_keep.len() == arch.n_h1
            && l2.input_keep.len() == arch.n_h1
            && l2.recurrent_keep.len() == arch.n_h2
    }
}
