use std::path::{Path, PathBuf};

use stormcast::cli::dispatch;
use stormcast::storm_data::synthetic::{recurving_tracks, RecurveConfig};
use stormcast::storm_data::track::write_track_csv;
use stormcast::storm_data::DatasetArtifact;
use stormcast::trainer::load_model;
use stormcast::uncertainty::PredictionsArtifact;

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new(storms: usize) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let tracks = recurving_tracks(storms, 21, &RecurveConfig::default());
        std::fs::write(dir.path().join("tracks.csv"), write_track_csv(&tracks).unwrap()).unwrap();
        Workspace { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }

    fn run(&self, args: &[&str]) -> i32 {
        dispatch(std::iter::once("stormcast").chain(args.iter().copied()))
    }

    fn ingest(&self) -> i32 {
        self.run(&[
            "ingest", "--input", &self.arg("tracks.csv"), "--out", &self.arg("dataset.json"),
            "--min-start", "4", "--pred-length", "1", "--seed", "42",
        ])
    }

    fn train(&self, out: &str) -> i32 {
        self.run(&[
            "train", "--dataset", &self.arg("dataset.json"), "--dropout", "0.2", "--recurrent-dropout", "0.1",
            "--epochs", "3", "--batch", "64", "--lr", "0.001", "--seed", "7", "--out", &self.arg(out),
        ])
    }

    fn predict(&self, out: &str) -> i32 {
        self.run(&[
            "predict", "--model", &self.arg("model.json"), "--dataset", &self.arg("dataset.json"),
            "--split", "test", "--passes", "25", "--levels", "67,90,95,98,99", "--seed", "3", "--out",
            &self.arg(out),
        ])
    }
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn full_pipeline() {
    let ws = Workspace::new(16);
    let tracks_before = read(&ws.path("tracks.csv"));
    assert_eq!(ws.ingest(), 0);
    assert_eq!(read(&ws.path("tracks.csv")), tracks_before);
    let dataset = DatasetArtifact::load(&ws.path("dataset.json")).unwrap();
    assert_eq!(dataset.splits.test.len(), 4);

    assert_eq!(ws.train("model.json"), 0);
    let history = read(&ws.path("history.csv"));
    assert_eq!(history.lines().count(), 4);
    assert!(history.starts_with("epoch,train_mse,val_mse\n"));
    let model = load_model(&ws.path("model.json")).unwrap();
    assert_eq!(model.config.p_input, 0.2);
    assert_eq!(model.scaler, dataset.scaler);

    assert_eq!(ws.predict("preds.json"), 0);
    let preds = PredictionsArtifact::load(&ws.path("preds.json")).unwrap();
    assert_eq!(preds.samples.len(), dataset.samples.test.len());
    assert_eq!(preds.passes, 25);

    assert_eq!(ws.run(&["evaluate", "--predictions", &ws.arg("preds.json"), "--out", &ws.arg("coverage.csv")]), 0);
    let coverage = read(&ws.path("coverage.csv"));
    let lines: Vec<_> = coverage.lines().collect();
    assert_eq!(lines[0], "coordinate,level,percent,n");
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("lat,67,"));

    let storm = preds.samples[0].storm_id.clone();
    let rows = preds.samples.iter().filter(|s| s.storm_id == storm).count();
    assert_eq!(
        ws.run(&["export-plot", "--predictions", &ws.arg("preds.json"), "--storm", &storm, "--out-dir", &ws.arg("plots")]),
        0
    );
    for coord in ["lat", "lon"] {
        let text = read(&ws.path(&format!("plots/{storm}_{coord}.csv")));
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "timestep,truth,mean,lo67,hi67,lo90,hi90,lo95,hi95,lo98,hi98,lo99,hi99"
        );
        let body: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(body.len(), rows);
        for r in &body {
            assert!(r[11] <= r[3] && r[3] <= r[2] && r[2] <= r[4] && r[4] <= r[12], "{r:?}");
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let ws = Workspace::new(12);
    assert_eq!(ws.ingest(), 0);
    let first = std::fs::read(ws.path("dataset.json")).unwrap();
    assert_eq!(ws.ingest(), 0);
    assert_eq!(std::fs::read(ws.path("dataset.json")).unwrap(), first);

    assert_eq!(ws.train("model.json"), 0);
    let history = read(&ws.path("history.csv"));
    assert_eq!(ws.train("model_again.json"), 0);
    assert_eq!(read(&ws.path("model.json")), read(&ws.path("model_again.json")));
    assert_eq!(read(&ws.path("history.csv")), history);

    assert_eq!(ws.predict("a.json"), 0);
    assert_eq!(ws.predict("b.json"), 0);
    assert_eq!(read(&ws.path("a.json")), read(&ws.path("b.json")));
}

#[test]
fn unknown_storm_is_a_validation_error() {
    let ws = Workspace::new(12);
    assert_eq!(ws.ingest(), 0);
    assert_eq!(ws.train("model.json"), 0);
    assert_eq!(ws.predict("preds.json"), 0);
    let code = ws.run(&["export-plot", "--predictions", &ws.arg("preds.json"), "--storm", "NOPE", "--out-dir", &ws.arg("plots")]);
    assert_eq!(code, 1);
    assert!(!ws.path("plots/NOPE_lat.csv").exists());
}

#[test]
fn bad_inputs_exit_one() {
    let ws = Workspace::new(12);
    std::fs::write(ws.path("bad.csv"), "storm_id,name\nA,B\n").unwrap();
    let code = ws.run(&["ingest", "--input", &ws.arg("bad.csv"), "--out", &ws.arg("dataset.json")]);
    assert_eq!(code, 1);
    assert!(!ws.path("dataset.json").exists());

    assert_eq!(ws.ingest(), 0);
    let text = read(&ws.path("dataset.json")).replacen("\"format_version\":1", "\"format_version\":9", 1);
    std::fs::write(ws.path("future.json"), text).unwrap();
    let code = ws.run(&[
        "train", "--dataset", &ws.arg("future.json"), "--epochs", "1", "--out", &ws.arg("model.json"),
    ]);
    assert_eq!(code, 1);
    assert!(!ws.path("model.json").exists());

    let code = ws.run(&[
        "train", "--dataset", &ws.arg("dataset.json"), "--dropout", "1.5", "--out", &ws.arg("model.json"),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_two() {
    let ws = Workspace::new(4);
    assert_eq!(ws.run(&["ingest", "--input", &ws.arg("tracks.csv")]), 2);
    assert_eq!(ws.run(&["frobnicate"]), 2);
    assert_eq!(ws.run(&["train", "--dataset", "d.json", "--out", "m.json", "--epochs", "many"]), 2);
}
