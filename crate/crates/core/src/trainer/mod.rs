//! Minibatch Adam training on mean squared error and model persistence.

pub mod adam;
pub mod config;
pub mod persist;
mod train;

pub use adam::{adam_step, adam_update, AdamState};
pub use config::TrainConfig;
pub use persist::{load_model, model_from_json, model_to_json, save_model, SavedModel};
pub use train::{evaluate_mse, mse, predict, train, EpochRecord, TrainHistory};
