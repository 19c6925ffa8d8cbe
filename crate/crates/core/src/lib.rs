//! Storm trajectory forecasting with a stacked LSTM and Monte Carlo dropout.
//!
//! The pipeline runs in four stages:
//!
//! * [`storm_data`] parses best-track CSV files, derives the six per-fix
//!   features, splits storms into train/validation/test and builds padded,
//!   min-max normalized samples.
//! * [`rnn`] holds the two-layer LSTM with variational (per-sequence) dropout
//!   masks, its forward pass and backpropagation through time.
//! * [`trainer`] fits the network with Adam on mean squared error and persists
//!   models losslessly.
//! * [`uncertainty`] runs repeated stochastic forward passes, turns them into
//!   per-coordinate credible bands and measures their coverage.
//!
//! [`cli`] wires everything together behind the `stormcast` binary.

pub mod cli;
pub mod error;
mod fsutil;
pub mod rnn;
pub mod storm_data;
pub mod trainer;
pub mod uncertainty;

pub use error::{Error, Result};
