//! Writes a synthetic best-track CSV to stdout.
//!
//! ```text
//! cargo run --example synth_tracks -- [storms] [seed] > tracks.csv
//! ```

use stormcast::storm_data::synthetic::{recurving_tracks, RecurveConfig};
use stormcast::storm_data::track::write_track_csv;

fn main() {
    let mut args = std::env::args().skip(1);
    let storms = args.next().map_or(60, |s| s.parse().expect("storm count"));
    let seed = args.next().map_or(0, |s| s.parse().expect("seed"));
    let tracks = recurving_tracks(storms, seed, &RecurveConfig::default());
    print!("{}", write_track_csv(&tracks).expect("serialize tracks"));
}
