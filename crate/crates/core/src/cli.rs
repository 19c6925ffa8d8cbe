//! The `stormcast` command line: ingest, train, predict, evaluate and
//! export-plot.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::storm_data::{parse_track_csv, prepare_dataset, DatasetArtifact, DatasetOptions, Split};
use crate::trainer::{model_from_json, model_to_json, train, SavedModel, TrainConfig};
use crate::uncertainty::artifact::level_key;
use crate::uncertainty::{predict_samples, PredictOptions, PredictionsArtifact, DEFAULT_LEVELS};

#[derive(Debug, Parser)]
#[command(name = "stormcast", version, about = "Storm track forecasting with Monte Carlo dropout intervals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a track CSV and write a normalized, split sample dataset.
    Ingest(IngestArgs),
    /// Train the LSTM on a dataset's train split.
    Train(TrainArgs),
    /// Run Monte Carlo dropout over one split and write credible bands.
    Predict(PredictArgs),
    /// Compute interval coverage from a predictions file.
    Evaluate(EvaluateArgs),
    /// Write per-timestep series for one storm, in degrees.
    ExportPlot(ExportPlotArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub min_start: usize,
    #[arg(long = "pred-length", default_value_t = 1)]
    pub pred_length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Padded sequence length; defaults to the longest track.
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long, default_value_t = 0.25)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0.25)]
    pub validation_fraction: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Input-connection dropout rate.
    #[arg(long, default_value_t = 0.2)]
    pub dropout: f64,
    #[arg(long, default_value_t = 0.1)]
    pub recurrent_dropout: f64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 64)]
    pub batch: usize,
    #[arg(long, default_value_t = 0.001)]
    pub lr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-epoch losses; defaults to `history.csv` beside the model.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value = "test")]
    pub split: Split,
    #[arg(long, default_value_t = 100)]
    pub passes: usize,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LEVELS)]
    pub levels: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportPlotArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub storm: String,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn ingest(args: &IngestArgs) -> Result<()> {
    let tracks = parse_track_csv(read(&args.input)?.as_slice())?;
    let options = DatasetOptions {
        seed: args.seed,
        min_start: args.min_start,
        pred_len: args.pred_length,
        max_len: args.max_len,
        test_fraction: args.test_fraction,
        validation_fraction: args.validation_fraction,
    };
    prepare_dataset(tracks, &options)?.save(&args.out)
}

fn run_train(args: &TrainArgs) -> Result<()> {
    let dataset = DatasetArtifact::from_json(&read(&args.dataset)?)?;
    let config = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch,
        learning_rate: args.lr,
        p_input: args.dropout,
        p_recurrent: args.recurrent_dropout,
        seed: args.seed,
        ..TrainConfig::default()
    };
    let (params, history) = train(
        dataset.samples(Split::Train),
        dataset.samples(Split::Validation),
        &config,
    )?;
    let model = SavedModel {
        params,
        config,
        scaler: dataset.scaler,
    };
    let history_path = args.history.clone().unwrap_or_else(|| {
        args.out
            .parent()
            .unwrap_or_else(|| Path::new(""))
            .join("history.csv")
    });
    write_atomic(&args.out, &model_to_json(&model)?)?;
    write_atomic(&history_path, &history.to_csv()?)
}

fn run_predict(args: &PredictArgs) -> Result<()> {
    let model = model_from_json(&read(&args.model)?)?;
    let dataset = DatasetArtifact::from_json(&read(&args.dataset)?)?;
    if model.scaler != dataset.scaler {
        return Err(Error::validation(
            "model and dataset were normalized with different scalers",
        ));
    }
    let options = PredictOptions {
        passes: args.passes,
        levels: args.levels.clone(),
        seed: args.seed,
        p_input: model.config.p_input,
        p_recurrent: model.config.p_recurrent,
    };
    let artifact = predict_samples(
        &model.params,
        &dataset.scaler,
        dataset.samples(args.split),
        args.split,
        dataset.params.pred_len,
        &options,
    )?;
    artifact.save(&args.out)
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let artifact = PredictionsArtifact::from_json(&read(&args.predictions)?)?;
    write_atomic(&args.out, &artifact.coverage()?.to_csv()?)
}

/// Builds the latitude and longitude series for one storm, in degrees.
pub fn plot_series(artifact: &PredictionsArtifact, storm: &str) -> Result<[String; 2]> {
    let rows: Vec<_> = artifact
        .samples
        .iter()
        .filter(|s| s.storm_id == storm)
        .collect();
    if rows.is_empty() {
        let mut available: Vec<String> = artifact.samples.iter().map(|s| s.storm_id.clone()).collect();
        available.dedup();
        return Err(Error::UnknownStorm {
            id: storm.to_string(),
            available,
        });
    }
    let mut header = String::from("timestep,truth,mean");
    for &level in &artifact.levels {
        let key = level_key(level);
        write!(header, ",lo{key},hi{key}").unwrap();
    }
    let mut out = [header.clone() + "\n", header + "\n"];
    for s in rows {
        let timestep = s.cutoff + artifact.pred_len - 1;
        for (c, text) in out.iter_mut().enumerate() {
            write!(text, "{timestep},{},{}", s.degrees.truth[c], s.degrees.mu[c]).unwrap();
            for &level in &artifact.levels {
                let band = s.degrees.band(level)?;
                let [lo, hi] = if c == 0 { band.lat } else { band.lon };
                write!(text, ",{lo},{hi}").unwrap();
            }
            text.push('\n');
        }
    }
    Ok(out)
}

fn export_plot(args: &ExportPlotArgs) -> Result<()> {
    let artifact = PredictionsArtifact::from_json(&read(&args.predictions)?)?;
    let [lat, lon] = plot_series(&artifact, &args.storm)?;
    std::fs::create_dir_all(&args.out_dir)?;
    write_atomic(&args.out_dir.join(format!("{}_lat.csv", args.storm)), lat.as_bytes())?;
    write_atomic(&args.out_dir.join(format!("{}_lon.csv", args.storm)), lon.as_bytes())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Train(a) => run_train(a),
        Command::Predict(a) => run_predict(a),
        Command::Evaluate(a) => evaluate(a),
        Command::ExportPlot(a) => export_plot(a),
    }
}

/// Parses `argv` (program name first) and runs it. Returns the process exit
/// code: 0 on success, 1 on a data or validation failure, 2 on bad usage.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {msg}");
            1
        }
    }
}
