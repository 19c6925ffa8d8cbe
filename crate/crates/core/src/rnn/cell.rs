use super::masks::LayerMasks;
use super::params::{LayerParams, GATE_CELL, GATE_FORGET, GATE_INPUT, GATE_OUTPUT};

#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl CellState {
    pub fn zeros(n_h: usize) -> Self {
        CellState {
            h: vec![0.0; n_h],
            c: vec![0.0; n_h],
        }
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Scratch outputs of one cell step, each a caller-provided slice.
pub(crate) struct StepOut<'a> {
    pub x_tilde: &'a mut [f64],
    pub h_tilde: &'a mut [f64],
    /// Activated gates `[i | f | g | o]`.
    pub gates: &'a mut [f64],
    pub c: &'a mut [f64],
    pub tanh_c: &'a mut [f64],
    pub h: &'a mut [f64],
}

/// One LSTM step with inverted variational dropout on the input and the
/// recurrent connection.
#[allow(clippy::needless_range_loop)]
pub(crate) fn step(
    layer: &LayerParams,
    masks: &LayerMasks,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    out: StepOut<'_>,
) {
    let (n_in, n_h) = (layer.n_in, layer.n_h);
    for ((t, v), keep) in out.x_tilde.iter_mut().zip(x).zip(&masks.input_keep) {
        *t = v * keep * masks.input_scale;
    }
    for ((t, v), keep) in out.h_tilde.iter_mut().zip(h_prev).zip(&masks.recurrent_keep) {
        *t = v * keep * masks.recurrent_scale;
    }
    for r in 0..4 * n_h {
        let u = &layer.input_weights[r * n_in..(r + 1) * n_in];
        let w = &layer.recurrent_weights[r * n_h..(r + 1) * n_h];
        let mut z = layer.bias[r];
        for (a, b) in u.iter().zip(out.x_tilde.iter()) {
            z += a * b;
        }
        for (a, b) in w.iter().zip(out.h_tilde.iter()) {
            z += a * b;
        }
        out.gates[r] = if r / n_h == GATE_CELL { z.tanh() } else { sigmoid(z) };
    }
    for k in 0..n_h {
        let i = out.gates[GATE_INPUT * n_h + k];
        let f = out.gates[GATE_FORGET * n_h + k];
        let g = out.gates[GATE_CELL * n_h + k];
        let o = out.gates[GATE_OUTPUT * n_h + k];
        out.c[k] = f * c_prev[k] + i * g;
        out.tanh_c[k] = out.c[k].tanh();
        out.h[k] = o * out.tanh_c[k];
    }
}

/// Advances `state` by one timestep of input `x`.
pub fn lstm_cell_forward(
    x: &[f64],
    state: &CellState,
    layer: &LayerParams,
    masks: &LayerMasks,
) -> CellState {
    let n_h = layer.n_h;
    let mut next = CellState::zeros(n_h);
    let mut x_tilde = vec![0.0; layer.n_in];
    let mut h_tilde = vec![0.0; n_h];
    let mut gates = vec![0.0; 4 * n_h];
    let mut tanh_c = vec![0.0; n_h];
    step(
        layer,
        masks,
        x,
        &state.h,
        &state.c,
        StepOut {
            x_tilde: &mut x_tilde,
            h_tilde: &mut h_tilde,
            gates: &mut gates,
            c: &mut next.c,
            tanh_c: &mut tanh_c,
            h: &mut next.h,
        },
    );
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rnn::masks::DropoutMasks;
    use crate::rnn::params::Architecture;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ones(n_in: usize, n_h: usize) -> LayerMasks {
        let arch = Architecture {
            n_x: n_in,
            n_h1: n_h,
            n_h2: 1,
            n_y: 1,
        };
        DropoutMasks::none(arch).layers[0].clone()
    }

    #[test]
    fn zero_weights_give_zero_hidden() {
        let layer = LayerParams::zeros(3, 4);
        let s = lstm_cell_forward(&[1.0, -2.0, 3.0], &CellState::zeros(4), &layer, &ones(3, 4));
        assert_eq!(s.h, vec![0.0; 4]);
        assert_eq!(s.c, vec![0.0; 4]);
    }

    #[test]
    fn unit_masks_at_zero_rate_change_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut layer = LayerParams::zeros(2, 3);
        for w in [&mut layer.input_weights, &mut layer.recurrent_weights, &mut layer.bias] {
            w.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        }
        let arch = Architecture {
            n_x: 2,
            n_h1: 3,
            n_h2: 1,
            n_y: 1,
        };
        let sampled = DropoutMasks::sample(&mut rng, arch, 0.0, 0.0).unwrap();
        let state = CellState {
            h: vec![0.1, -0.2, 0.3],
            c: vec![0.5, 0.0, -0.4],
        };
        let a = lstm_cell_forward(&[0.4, 0.9], &state, &layer, &sampled.layers[0]);
        let b = lstm_cell_forward(&[0.4, 0.9], &state, &layer, &ones(2, 3));
        assert_eq!(a, b);
    }

    /// Straight-line evaluation of the gate equations with explicit loops per
    /// gate, independent of the stacked-row layout used by `step`.
    #[allow(clippy::needless_range_loop)]
    fn oracle(
        x: &[f64],
        state: &CellState,
        layer: &LayerParams,
        masks: &LayerMasks,
        p_in: f64,
        p_rec: f64,
    ) -> CellState {
        let (n_in, n_h) = (layer.n_in, layer.n_h);
        let xt: Vec<f64> = (0..n_in)
            .map(|j| x[j] * masks.input_keep[j] / (1.0 - p_in))
            .collect();
        let ht: Vec<f64> = (0..n_h)
            .map(|j| state.h[j] * masks.recurrent_keep[j] / (1.0 - p_rec))
            .collect();
        let pre = |gate: usize, k: usize| -> f64 {
            let row = gate * n_h + k;
            let mut s = layer.bias[row];
            for j in 0..n_in {
                s += layer.input_weights[row * n_in + j] * xt[j];
            }
            for j in 0..n_h {
                s += layer.recurrent_weights[row * n_h + j] * ht[j];
            }
            s
        };
        let logistic = |v: f64| (v.exp()) / (1.0 + v.exp());
        let mut out = CellState::zeros(n_h);
        for k in 0..n_h {
            let i = logistic(pre(0, k));
            let f = logistic(pre(1, k));
            let g = pre(2, k).tanh();
            let o = logistic(pre(3, k));
            out.c[k] = f * state.c[k] + i * g;
            out.h[k] = o * out.c[k].tanh();
        }
        out
    }

    #[test]
    fn matches_straight_line_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut layer = LayerParams::zeros(2, 3);
        for w in [&mut layer.input_weights, &mut layer.recurrent_weights, &mut layer.bias] {
            w.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        }
        let arch = Architecture {
            n_x: 2,
            n_h1: 3,
            n_h2: 1,
            n_y: 1,
        };
        for p in [0.0, 0.3] {
            let masks = DropoutMasks::sample(&mut rng, arch, p, p).unwrap();
            let mut state = CellState {
                h: (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                c: (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            };
            for _ in 0..5 {
                let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let got = lstm_cell_forward(&x, &state, &layer, &masks.layers[0]);
                let want = oracle(&x, &state, &layer, &masks.layers[0], p, p);
                for k in 0..3 {
                    assert!((got.h[k] - want.h[k]).abs() < 1e-12);
                    assert!((got.c[k] - want.c[k]).abs() < 1e-12);
                }
                state = got;
            }
        }
    }
}
