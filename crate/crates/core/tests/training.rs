use stormcast::rnn::ModelParams;
use stormcast::storm_data::synthetic::constant_velocity_tracks;
use stormcast::storm_data::{prepare_dataset, DatasetOptions, Split};
use stormcast::trainer::{evaluate_mse, model_from_json, model_to_json, train, SavedModel, TrainConfig};

fn config(seed: u64) -> TrainConfig {
    TrainConfig {
        epochs: 15,
        batch_size: 8,
        seed,
        ..TrainConfig::default()
    }
}

#[test]
fn training_is_deterministic_and_learns() {
    let dataset = prepare_dataset(constant_velocity_tracks(12, 12, 4), &DatasetOptions::default()).unwrap();
    let (tr, val) = (dataset.samples(Split::Train), dataset.samples(Split::Validation));
    let (a, ha) = train(tr, val, &config(3)).unwrap();
    let (b, hb) = train(tr, val, &config(3)).unwrap();
    assert_eq!(a, b);
    assert_eq!(ha, hb);
    let (c, _) = train(tr, val, &config(4)).unwrap();
    assert_ne!(a, c);

    let untrained = ModelParams::init(a.architecture(), 3);
    assert!(evaluate_mse(&a, val) < evaluate_mse(&untrained, val));
    let first = ha.epochs.first().unwrap().train_mse;
    assert!(ha.last().unwrap().train_mse < first);
}

#[test]
fn trained_model_round_trips() {
    let dataset = prepare_dataset(constant_velocity_tracks(8, 10, 5), &DatasetOptions::default()).unwrap();
    let cfg = TrainConfig {
        epochs: 2,
        ..config(1)
    };
    let (params, _) = train(dataset.samples(Split::Train), dataset.samples(Split::Validation), &cfg).unwrap();
    let model = SavedModel {
        params,
        config: cfg,
        scaler: dataset.scaler,
    };
    let bytes = model_to_json(&model).unwrap();
    let back = model_from_json(&bytes).unwrap();
    assert_eq!(back.params, model.params);
    assert_eq!(model_to_json(&back).unwrap(), bytes);
}
