//! Two-layer LSTM regressor with variational dropout.

mod cell;
pub mod gradcheck;
pub mod masks;
mod network;
pub mod params;

pub use cell::{lstm_cell_forward, CellState};
pub use gradcheck::{grad_check, grad_check_masked, GradCheckReport};
pub use masks::{DropoutMasks, LayerMasks};
pub use network::{backward, forward, forward_observed, squared_error_loss, MaskObservation};
pub use params::{Architecture, Gradients, LayerParams, ModelParams};
