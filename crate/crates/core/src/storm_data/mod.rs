//! Best-track ingestion, feature derivation and sample construction.

pub mod dataset;
pub mod features;
pub mod geo;
pub mod samples;
pub mod scaler;
pub mod split;
pub mod synthetic;
pub mod track;

pub use dataset::{prepare_dataset, DatasetArtifact, DatasetOptions, Split};
pub use features::{derive_features, FeatureVector, N_FEATURES};
pub use geo::{haversine_km, initial_bearing_deg};
pub use samples::{build_samples, Sample, SampleParams};
pub use scaler::Scaler;
pub use split::{shuffle_split, SplitDataset};
pub use track::{parse_track_csv, Fix, StormTrack};
