//! Finite-difference verification of [`backward`](super::backward).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::masks::DropoutMasks;
use super::network::{backward, forward, squared_error_loss};
use super::params::{Architecture, ModelParams, BLOCK_NAMES};

/// Network used by the check: two inputs, hidden layers of 3 and 2 units.
pub const TINY: Architecture = Architecture {
    n_x: 2,
    n_h1: 3,
    n_h2: 2,
    n_y: 2,
};
pub const TINY_STEPS: usize = 4;
pub const FD_EPSILON: f64 = 1e-5;
/// Gradient magnitudes below this are compared absolutely.
pub const RELATIVE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub seed: u64,
    pub tolerance: f64,
    /// Worst relative error of each parameter block, in [`BLOCK_NAMES`] order.
    pub blocks: Vec<(&'static str, f64)>,
}

impl GradCheckReport {
    pub fn worst(&self) -> f64 {
        self.blocks.iter().map(|b| b.1).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.worst() <= self.tolerance
    }
}

/// `|a - n| / max(|a|, |n|, RELATIVE_FLOOR)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_FLOOR)
}

/// Compares analytic gradients against central differences on a random tiny
/// network without dropout.
pub fn grad_check(seed: u64, tolerance: f64) -> GradCheckReport {
    grad_check_masked(seed, tolerance, 0.0, 0.0)
}

/// [`grad_check`] with dropout masks drawn at the given rates and held fixed
/// for both the analytic and the numeric derivative.
pub fn grad_check_masked(seed: u64, tolerance: f64, p_input: f64, p_recurrent: f64) -> GradCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ModelParams::init(TINY, seed);
    for block in params.blocks_mut() {
        block.iter_mut().for_each(|x| *x += rng.gen_range(-0.5..0.5));
    }
    let input: Vec<f64> = (0..TINY_STEPS * TINY.n_x).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let label: Vec<f64> = (0..TINY.n_y).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let masks = DropoutMasks::sample(&mut rng, TINY, p_input, p_recurrent)
        .expect("dropout rates must lie in [0, 1)");

    let (_, grads) = backward(&input, &label, &params, &masks);
    let loss_at = |p: &ModelParams| squared_error_loss(&forward(&input, p, &masks), &label);

    let mut probe = params.clone();
    let mut blocks = Vec::with_capacity(BLOCK_NAMES.len());
    for (b, name) in BLOCK_NAMES.iter().enumerate() {
        let mut worst: f64 = 0.0;
        for k in 0..params.blocks()[b].len() {
            let original = params.blocks()[b][k];
            probe.blocks_mut()[b][k] = original + FD_EPSILON;
            let up = loss_at(&probe);
            probe.blocks_mut()[b][k] = original - FD_EPSILON;
            let down = loss_at(&probe);
            probe.blocks_mut()[b][k] = original;
            let numeric = (up - down) / (2.0 * FD_EPSILON);
            worst = worst.max(relative_error(grads.blocks()[b][k], numeric));
        }
        blocks.push((*name, worst));
    }
    GradCheckReport {
        seed,
        tolerance,
        blocks,
    }
}
