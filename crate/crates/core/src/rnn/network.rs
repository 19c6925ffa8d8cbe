//! Sequence evaluation of the stacked network and its exact gradient by
//! backpropagation through time.

use super::cell::{step, StepOut};
use super::masks::{DropoutMasks, LayerMasks};
use super::params::{Gradients, LayerParams, ModelParams, GATE_CELL, GATE_FORGET, GATE_INPUT, GATE_OUTPUT};

/// The mask vectors one layer applied at one timestep, as handed to an
/// observer of [`forward_observed`].
#[derive(Debug, Clone, Copy)]
pub struct MaskObservation<'a> {
    /// 0 for the first LSTM layer, 1 for the second.
    pub layer: usize,
    pub step: usize,
    pub input_keep: &'a [f64],
    pub recurrent_keep: &'a [f64],
}

/// Activations of one layer over a whole sequence, kept for the backward
/// pass. `h` and `c` hold `steps + 1` rows, row 0 being the zero initial
/// state.
struct LayerTrace {
    steps: usize,
    x_tilde: Vec<f64>,
    h_tilde: Vec<f64>,
    gates: Vec<f64>,
    c: Vec<f64>,
    tanh_c: Vec<f64>,
    h: Vec<f64>,
}

impl LayerTrace {
    fn outputs(&self, n_h: usize) -> &[f64] {
        &self.h[n_h..]
    }
}

fn run_layer(
    layer: &LayerParams,
    masks: &LayerMasks,
    index: usize,
    inputs: &[f64],
    observer: &mut Option<&mut dyn FnMut(MaskObservation<'_>)>,
) -> LayerTrace {
    let (n_in, n_h) = (layer.n_in, layer.n_h);
    let steps = inputs.len() / n_in;
    let mut tr = LayerTrace {
        steps,
        x_tilde: vec![0.0; steps * n_in],
        h_tilde: vec![0.0; steps * n_h],
        gates: vec![0.0; steps * 4 * n_h],
        c: vec![0.0; (steps + 1) * n_h],
        tanh_c: vec![0.0; steps * n_h],
        h: vec![0.0; (steps + 1) * n_h],
    };
    for t in 0..steps {
        if let Some(obs) = observer.as_mut() {
            obs(MaskObservation {
                layer: index,
                step: t,
                input_keep: &masks.input_keep,
                recurrent_keep: &masks.recurrent_keep,
            });
        }
        let (h_prev, h_next) = tr.h.split_at_mut((t + 1) * n_h);
        let (c_prev, c_next) = tr.c.split_at_mut((t + 1) * n_h);
        step(
            layer,
            masks,
            &inputs[t * n_in..(t + 1) * n_in],
            &h_prev[t * n_h..],
            &c_prev[t * n_h..],
            StepOut {
                x_tilde: &mut tr.x_tilde[t * n_in..(t + 1) * n_in],
                h_tilde: &mut tr.h_tilde[t * n_h..(t + 1) * n_h],
                gates: &mut tr.gates[t * 4 * n_h..(t + 1) * 4 * n_h],
                c: &mut c_next[..n_h],
                tanh_c: &mut tr.tanh_c[t * n_h..(t + 1) * n_h],
                h: &mut h_next[..n_h],
            },
        );
    }
    tr
}

/// Accumulates parameter gradients of one layer into `grads` given the
/// loss gradient with respect to each of its outputs (`d_out`, one row per
/// step). Returns the gradient with respect to the layer inputs when
/// `want_input_grad` is set.
fn backprop_layer(
    layer: &LayerParams,
    masks: &LayerMasks,
    tr: &LayerTrace,
    d_out: &[f64],
    grads: &mut LayerParams,
    want_input_grad: bool,
) -> Vec<f64> {
    let (n_in, n_h) = (layer.n_in, layer.n_h);
    let mut d_input = if want_input_grad {
        vec![0.0; tr.steps * n_in]
    } else {
        Vec::new()
    };
    let mut dh_carry = vec![0.0; n_h];
    let mut dc_carry = vec![0.0; n_h];
    let mut dz = vec![0.0; 4 * n_h];
    let mut dh_tilde = vec![0.0; n_h];
    let mut dx_tilde = vec![0.0; n_in];

    for t in (0..tr.steps).rev() {
        let gates = &tr.gates[t * 4 * n_h..(t + 1) * 4 * n_h];
        let c_prev = &tr.c[t * n_h..(t + 1) * n_h];
        let tanh_c = &tr.tanh_c[t * n_h..(t + 1) * n_h];
        for k in 0..n_h {
            let i = gates[GATE_INPUT * n_h + k];
            let f = gates[GATE_FORGET * n_h + k];
            let g = gates[GATE_CELL * n_h + k];
            let o = gates[GATE_OUTPUT * n_h + k];
            let dh = d_out[t * n_h + k] + dh_carry[k];
            let dc = dh * o * (1.0 - tanh_c[k] * tanh_c[k]) + dc_carry[k];
            dz[GATE_INPUT * n_h + k] = dc * g * i * (1.0 - i);
            dz[GATE_FORGET * n_h + k] = dc * c_prev[k] * f * (1.0 - f);
            dz[GATE_CELL * n_h + k] = dc * i * (1.0 - g * g);
            dz[GATE_OUTPUT * n_h + k] = dh * tanh_c[k] * o * (1.0 - o);
            dc_carry[k] = dc * f;
        }

        let x_tilde = &tr.x_tilde[t * n_in..(t + 1) * n_in];
        let h_tilde = &tr.h_tilde[t * n_h..(t + 1) * n_h];
        dh_tilde.fill(0.0);
        dx_tilde.fill(0.0);
        for (r, &d) in dz.iter().enumerate() {
            grads.bias[r] += d;
            let gu = &mut grads.input_weights[r * n_in..(r + 1) * n_in];
            let u = &layer.input_weights[r * n_in..(r + 1) * n_in];
            for j in 0..n_in {
                gu[j] += d * x_tilde[j];
                dx_tilde[j] += u[j] * d;
            }
            let gw = &mut grads.recurrent_weights[r * n_h..(r + 1) * n_h];
            let w = &layer.recurrent_weights[r * n_h..(r + 1) * n_h];
            for j in 0..n_h {
                gw[j] += d * h_tilde[j];
                dh_tilde[j] += w[j] * d;
            }
        }
        for j in 0..n_h {
            dh_carry[j] = dh_tilde[j] * masks.recurrent_keep[j] * masks.recurrent_scale;
        }
        if want_input_grad {
            for j in 0..n_in {
                d_input[t * n_in + j] = dx_tilde[j] * masks.input_keep[j] * masks.input_scale;
            }
        }
    }
    d_input
}

struct Traces {
    first: LayerTrace,
    second: LayerTrace,
    output: Vec<f64>,
}

fn run(
    input: &[f64],
    params: &ModelParams,
    masks: &DropoutMasks,
    mut observer: Option<&mut dyn FnMut(MaskObservation<'_>)>,
) -> Traces {
    let n_x = params.layer1.n_in;
    assert_eq!(input.len() % n_x, 0, "input length must be a multiple of n_x");
    debug_assert!(masks.architecture_matches(params.architecture()));
    let first = run_layer(&params.layer1, &masks.layers[0], 0, input, &mut observer);
    let second = run_layer(
        &params.layer2,
        &masks.layers[1],
        1,
        first.outputs(params.layer1.n_h),
        &mut observer,
    );
    let n_h2 = params.layer2.n_h;
    let last = &second.h[second.steps * n_h2..];
    let output = params
        .output_bias
        .iter()
        .enumerate()
        .map(|(r, b)| {
            let v = &params.output_weights[r * n_h2..(r + 1) * n_h2];
            b + v.iter().zip(last).map(|(a, h)| a * h).sum::<f64>()
        })
        .collect();
    Traces {
        first,
        second,
        output,
    }
}

/// Runs both layers over every row of `input` (row-major, `n_x` columns)
/// with the given timestep-constant masks and returns the dense head's
/// output at the last step.
pub fn forward(input: &[f64], params: &ModelParams, masks: &DropoutMasks) -> Vec<f64> {
    run(input, params, masks, None).output
}

/// [`forward`] that reports, for every layer and timestep, the mask vectors
/// actually applied.
pub fn forward_observed(
    input: &[f64],
    params: &ModelParams,
    masks: &DropoutMasks,
    observer: &mut dyn FnMut(MaskObservation<'_>),
) -> Vec<f64> {
    run(input, params, masks, Some(observer)).output
}

/// Mean squared error over the output components.
pub fn squared_error_loss(pred: &[f64], label: &[f64]) -> f64 {
    assert_eq!(pred.len(), label.len());
    pred.iter()
        .zip(label)
        .map(|(p, y)| (p - y) * (p - y))
        .sum::<f64>()
        / pred.len() as f64
}

/// Loss and its exact gradient with respect to every parameter, masks held
/// fixed.
pub fn backward(
    input: &[f64],
    label: &[f64],
    params: &ModelParams,
    masks: &DropoutMasks,
) -> (f64, Gradients) {
    let tr = run(input, params, masks, None);
    let arch = params.architecture();
    assert_eq!(label.len(), arch.n_y);
    let loss = squared_error_loss(&tr.output, label);

    let mut grads = Gradients::zeros(arch);
    let n_y = arch.n_y as f64;
    let dy: Vec<f64> = tr
        .output
        .iter()
        .zip(label)
        .map(|(p, y)| 2.0 * (p - y) / n_y)
        .collect();

    let n_h2 = arch.n_h2;
    let steps = tr.second.steps;
    let last = &tr.second.h[steps * n_h2..];
    let mut d_out2 = vec![0.0; steps * n_h2];
    for (r, &d) in dy.iter().enumerate() {
        grads.output_bias[r] = d;
        let v = &params.output_weights[r * n_h2..(r + 1) * n_h2];
        for k in 0..n_h2 {
            grads.output_weights[r * n_h2 + k] = d * last[k];
            if steps > 0 {
                d_out2[(steps - 1) * n_h2 + k] += v[k] * d;
            }
        }
    }

    let d_out1 = backprop_layer(
        &params.layer2,
        &masks.layers[1],
        &tr.second,
        &d_out2,
        &mut grads.0.layer2,
        true,
    );
    backprop_layer(
        &params.layer1,
        &masks.layers[0],
        &tr.first,
        &d_out1,
        &mut grads.0.layer1,
        false,
    );
    (loss, grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rnn::params::Architecture;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_input(rng: &mut impl Rng, steps: usize, n_x: usize) -> Vec<f64> {
        (0..steps * n_x).map(|_| rng.gen_range(0.0..1.0)).collect()
    }

    #[test]
    fn zero_params_output_bias() {
        let arch = Architecture::STORM;
        let mut p = ModelParams::zeros(arch);
        p.output_bias = vec![0.25, -0.5];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = random_input(&mut rng, 10, 6);
        assert_eq!(forward(&x, &p, &DropoutMasks::none(arch)), vec![0.25, -0.5]);
    }

    #[test]
    fn fixed_masks_repeat() {
        let arch = Architecture::STORM;
        let p = ModelParams::init(arch, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_input(&mut rng, 12, 6);
        let m = DropoutMasks::sample(&mut rng, arch, 0.3, 0.2).unwrap();
        assert_eq!(forward(&x, &p, &m), forward(&x, &p, &m));
    }

    #[test]
    fn zero_rate_masks_equal_no_dropout() {
        let arch = Architecture::STORM;
        let p = ModelParams::init(arch, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_input(&mut rng, 12, 6);
        let m = DropoutMasks::sample(&mut rng, arch, 0.0, 0.0).unwrap();
        assert_eq!(forward(&x, &p, &m), forward(&x, &p, &DropoutMasks::none(arch)));
    }

    #[test]
    fn observed_forward_matches_plain() {
        let arch = Architecture::STORM;
        let p = ModelParams::init(arch, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_input(&mut rng, 7, 6);
        let m = DropoutMasks::sample(&mut rng, arch, 0.5, 0.5).unwrap();
        let mut seen = 0;
        let y = forward_observed(&x, &p, &m, &mut |obs| {
            assert_eq!(obs.input_keep, m.layers[obs.layer].input_keep.as_slice());
            seen += 1;
        });
        assert_eq!(seen, 14);
        assert_eq!(y, forward(&x, &p, &m));
    }

    #[test]
    fn exact_prediction_has_zero_gradient() {
        let arch = Architecture::STORM;
        let p = ModelParams::init(arch, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_input(&mut rng, 9, 6);
        let m = DropoutMasks::sample(&mut rng, arch, 0.2, 0.1).unwrap();
        let label = forward(&x, &p, &m);
        let (loss, g) = backward(&x, &label, &p, &m);
        assert_eq!(loss, 0.0);
        assert!(g.blocks().iter().all(|b| b.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn output_bias_gradient_is_scaled_residual() {
        let arch = Architecture::STORM;
        let p = ModelParams::init(arch, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_input(&mut rng, 9, 6);
        let m = DropoutMasks::none(arch);
        let label = [0.3, 0.7];
        let pred = forward(&x, &p, &m);
        let (loss, g) = backward(&x, &label, &p, &m);
        assert!((loss - squared_error_loss(&pred, &label)).abs() < 1e-15);
        for r in 0..2 {
            assert!((g.output_bias[r] - (pred[r] - label[r])).abs() < 1e-15);
        }
    }

    #[test]
    fn hidden_state_is_bounded() {
        let arch = Architecture::STORM;
        let mut p = ModelParams::init(arch, 6);
        for b in p.blocks_mut() {
            b.iter_mut().for_each(|x| *x *= 25.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x: Vec<f64> = (0..60).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let m = DropoutMasks::sample(&mut rng, arch, 0.5, 0.5).unwrap();
        let tr = run(&x, &p, &m, None);
        for h in tr.first.h.iter().chain(tr.second.h.iter()) {
            assert!(h.abs() <= 1.0 && h.is_finite());
        }
    }
}
