//! Monte Carlo dropout ensembles, credible bands and their coverage.

pub mod artifact;
pub mod coverage;
pub mod ensemble;
pub mod interval;
pub mod normality;

pub use artifact::{predict_samples, PredictOptions, PredictionsArtifact, SamplePrediction};
pub use coverage::{coverage, Coordinate, CoverageEntry, CoverageReport};
pub use ensemble::{mc_predict, mc_predict_with_rng, PredictionEnsemble};
pub use interval::{credible_band, z_for_level, CredibleBand, DEFAULT_LEVELS};
pub use normality::{dagostino_k2, NormalityTest};
