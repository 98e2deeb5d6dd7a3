use pedalpower::dataset::LabeledStroke;
use pedalpower::signal::ModelInput;
use pedalpower::train::{mse, split_dataset, train, TrainConfig};
use pedalpower::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn linear_set(n: usize, seed: u64) -> Vec<LabeledStroke<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y = 10.0 * x[0] - 5.0 * x[1] + 3.0 * x[2];
            LabeledStroke::new(ModelInput::new(x), y)
        })
        .collect()
}

fn small(epochs: usize, seed: u64) -> TrainConfig {
    TrainConfig {
        dims: vec![3, 16, 8, 1],
        max_epochs: epochs,
        batch_size: 16,
        seed,
        ..TrainConfig::default()
    }
}

#[test]
fn learns_a_linear_target() {
    let data = linear_set(800, 1);
    let (model, history) = train(&data, &small(50, 3)).unwrap();
    assert!(history.epochs.len() <= 50);
    assert!(history.best_val_mse() < 1.0, "val mse {}", history.best_val_mse());
    assert!(history.epochs[0].train_mse >= 10.0 * history.epochs[history.best_epoch].train_mse);

    let fresh = linear_set(200, 2);
    let pairs: Vec<(&[f64], f64)> = fresh.iter().map(|s| (s.input.as_slice(), s.label_power_w)).collect();
    assert!(mse(&model, &pairs).unwrap() < 1.5);
}

#[test]
fn constant_label_is_reproduced() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let data: Vec<LabeledStroke<f64>> = (0..300)
        .map(|_| LabeledStroke::new(ModelInput::new((0..3).map(|_| rng.gen_range(0.0..1.0)).collect()), 150.0))
        .collect();
    let (model, _) = train(&data, &small(30, 5)).unwrap();
    for s in data.iter().take(50) {
        let p = model.forward(s.input.as_slice()).unwrap();
        assert!((p - 150.0).abs() <= 1.0, "{p}");
    }
}

#[test]
fn same_seed_same_weights() {
    let data = linear_set(300, 6);
    let a = train(&data, &small(8, 9)).unwrap();
    let b = train(&data, &small(8, 9)).unwrap();
    assert_eq!(a, b);
    let c = train(&data, &small(8, 10)).unwrap();
    assert_ne!(a.0, c.0);
}

#[test]
fn returned_model_is_the_best_epoch() {
    let data = linear_set(400, 7);
    let cfg = small(40, 2);
    let (model, history) = train(&data, &cfg).unwrap();
    assert_eq!(history.epochs.len(), history.stopped_epoch + 1);
    let (_, val) = split_dataset(&data, cfg.val_fraction, cfg.seed).unwrap();
    let pairs: Vec<(&[f64], f64)> = val.iter().map(|s| (s.input.as_slice(), s.label_power_w)).collect();
    let recomputed = mse(&model, &pairs).unwrap();
    let best = history.best_val_mse();
    assert!((recomputed - best).abs() <= 1e-9 * best.max(1.0), "{recomputed} vs {best}");
}

#[test]
fn divergence_names_the_epoch() {
    let mut data = linear_set(400, 8);
    for s in &mut data {
        s.label_power_w = s.label_power_w * 100.0 + 5000.0;
    }
    let cfg = TrainConfig {
        lr0: 0.5,
        standardize_targets: false,
        ..small(20, 1)
    };
    match train(&data, &cfg) {
        Err(e @ Error::Training { .. }) => assert!(e.to_string().contains("epoch 0"), "{e}"),
        other => panic!("expected a training error, got {other:?}"),
    }
}

#[test]
fn rejects_bad_input() {
    assert!(matches!(train::<f64>(&[], &small(5, 0)), Err(Error::Training { epoch: 0, .. })));
    let data = linear_set(50, 1);
    let cfg = TrainConfig {
        dims: vec![4, 8, 1],
        ..small(5, 0)
    };
    assert!(matches!(train(&data, &cfg), Err(Error::Shape { expected: 4, actual: 3 })));
}
