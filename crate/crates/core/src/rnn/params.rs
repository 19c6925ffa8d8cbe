use std::ops::{Deref, DerefMut};

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Layer sizes of the stacked network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub n_x: usize,
    pub n_h1: usize,
    pub n_h2: usize,
    pub n_y: usize,
}

impl Architecture {
    /// Six track features in, 32 then 16 LSTM units, latitude/longitude out.
    pub const STORM: Architecture = Architecture {
        n_x: 6,
        n_h1: 32,
        n_h2: 16,
        n_y: 2,
    };
}

/// Gate slots within the stacked `4 * n_h` rows of every weight matrix.
pub const GATE_INPUT: usize = 0;
pub const GATE_FORGET: usize = 1;
pub const GATE_CELL: usize = 2;
pub const GATE_OUTPUT: usize = 3;

/// Weights of one LSTM layer. Matrices are row-major with the four gates
/// stacked in the order input, forget, cell candidate, output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub n_in: usize,
    pub n_h: usize,
    /// `[4 n_h x n_in]`
    pub input_weights: Vec<f64>,
    /// `[4 n_h x n_h]`
    pub recurrent_weights: Vec<f64>,
    /// `[4 n_h]`
    pub bias: Vec<f64>,
}

impl LayerParams {
    pub fn zeros(n_in: usize, n_h: usize) -> Self {
        LayerParams {
            n_in,
            n_h,
            input_weights: vec![0.0; 4 * n_h * n_in],
            recurrent_weights: vec![0.0; 4 * n_h * n_h],
            bias: vec![0.0; 4 * n_h],
        }
    }

    fn check(&self, name: &str) -> Result<()> {
        let n = self.n_h;
        if self.input_weights.len() != 4 * n * self.n_in
            || self.recurrent_weights.len() != 4 * n * n
            || self.bias.len() != 4 * n
        {
            return Err(Error::Malformed(format!("{name}: shapes disagree with n_in/n_h")));
        }
        Ok(())
    }
}

/// All trainable parameters: two LSTM layers and the dense output head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub layer1: LayerParams,
    pub layer2: LayerParams,
    /// `[n_y x n_h2]`
    pub output_weights: Vec<f64>,
    pub output_bias: Vec<f64>,
}

/// Names of the parameter blocks in [`ModelParams::blocks`] order.
pub const BLOCK_NAMES: [&str; 8] = [
    "layer1.input_weights",
    "layer1.recurrent_weights",
    "layer1.bias",
    "layer2.input_weights",
    "layer2.recurrent_weights",
    "layer2.bias",
    "output_weights",
    "output_bias",
];

impl ModelParams {
    pub fn zeros(arch: Architecture) -> Self {
        ModelParams {
            layer1: LayerParams::zeros(arch.n_x, arch.n_h1),
            layer2: LayerParams::zeros(arch.n_h1, arch.n_h2),
            output_weights: vec![0.0; arch.n_y * arch.n_h2],
            output_bias: vec![0.0; arch.n_y],
        }
    }

    /// Glorot-uniform weights, zero biases except a forget-gate bias of 1.
    pub fn init(arch: Architecture, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Self::zeros(arch);
        let mut fill = |w: &mut [f64], rows: usize, cols: usize| {
            let a = glorot_bound(rows, cols);
            let dist = Uniform::new(-a, a);
            w.iter_mut().for_each(|x| *x = dist.sample(&mut rng));
        };
        for layer in [&mut p.layer1, &mut p.layer2] {
            let (n_in, n_h) = (layer.n_in, layer.n_h);
            fill(&mut layer.input_weights, 4 * n_h, n_in);
            fill(&mut layer.recurrent_weights, 4 * n_h, n_h);
            layer.bias[GATE_FORGET * n_h..(GATE_FORGET + 1) * n_h].fill(1.0);
        }
        fill(&mut p.output_weights, arch.n_y, arch.n_h2);
        p
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            n_x: self.layer1.n_in,
            n_h1: self.layer1.n_h,
            n_h2: self.layer2.n_h,
            n_y: self.output_bias.len(),
        }
    }

    /// Checks that every buffer matches the sizes it declares.
    pub fn check_shapes(&self) -> Result<()> {
        self.layer1.check("layer1")?;
        self.layer2.check("layer2")?;
        if self.layer2.n_in != self.layer1.n_h {
            return Err(Error::Malformed("layer2 input size differs from layer1 width".into()));
        }
        if self.output_weights.len() != self.output_bias.len() * self.layer2.n_h {
            return Err(Error::Malformed("output head shape mismatch".into()));
        }
        Ok(())
    }

    pub fn blocks(&self) -> [&[f64]; 8] {
        [
            &self.layer1.input_weights,
            &self.layer1.recurrent_weights,
            &self.layer1.bias,
            &self.layer2.input_weights,
            &self.layer2.recurrent_weights,
            &self.layer2.bias,
            &self.output_weights,
            &self.output_bias,
        ]
    }

    pub fn blocks_mut(&mut self) -> [&mut [f64]; 8] {
        [
            &mut self.layer1.input_weights,
            &mut self.layer1.recurrent_weights,
            &mut self.layer1.bias,
            &mut self.layer2.input_weights,
            &mut self.layer2.recurrent_weights,
            &mut self.layer2.bias,
            &mut self.output_weights,
            &mut self.output_bias,
        ]
    }

    pub fn len(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().iter().all(|b| b.iter().all(|x| x.is_finite()))
    }
}

/// `sqrt(6 / (fan_in + fan_out))` for a `rows x cols` matrix.
pub fn glorot_bound(rows: usize, cols: usize) -> f64 {
    (6.0 / (rows + cols) as f64).sqrt()
}

/// Derivative of the loss with respect to every entry of [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub ModelParams);

impl Gradients {
    pub fn zeros(arch: Architecture) -> Self {
        Gradients(ModelParams::zeros(arch))
    }

    /// `self += other`
    pub fn accumulate(&mut self, other: &Gradients) {
        for (dst, src) in self.0.blocks_mut().into_iter().zip(other.0.blocks()) {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for block in self.0.blocks_mut() {
            block.iter_mut().for_each(|x| *x *= factor);
        }
    }
}

impl Deref for Gradients {
    type Target = ModelParams;

    fn deref(&self) -> &ModelParams {
        &self.0
    }
}

impl DerefMut for Gradients {
    fn deref_mut(&mut self) -> &mut ModelParams {
        &mut self.0
    }
}
