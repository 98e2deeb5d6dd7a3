//! Mini-batch SGD training of [`DenseModel`] on MSE loss with a time-decay
//! learning rate and early stopping.

mod backprop;

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use backprop::{backprop_gradients, mse, Gradients, Workspace};

use crate::dataset::LabeledStroke;
use crate::error::{Error, Result};
use crate::nn::{DenseModel, DEFAULT_DIMS};
use crate::scalar::Real;
use crate::signal::NormalizationBounds;

/// Losses above this are treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dims: Vec<usize>,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub lr0: f64,
    /// Per-epoch decay in `lr0 / (1 + decay * epoch)`.
    pub decay: f64,
    pub patience: usize,
    pub val_fraction: f64,
    pub seed: u64,
    /// Take SGD steps on `(label - mean) / std` of the training split and
    /// fold the affine map back into the output layer afterwards. Plain
    /// watt-scale steps at `lr0 = 0.01` blow up within a few batches.
    pub standardize_targets: bool,
    /// Recorded in the model so inference normalizes identically.
    pub bounds: NormalizationBounds,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dims: DEFAULT_DIMS.to_vec(),
            max_epochs: 256,
            batch_size: 128,
            lr0: 0.01,
            decay: 0.05,
            patience: 5,
            val_fraction: 0.15,
            seed: 0,
            standardize_targets: true,
            bounds: NormalizationBounds::default(),
        }
    }
}

impl TrainConfig {
    pub fn check(&self) -> Result<()> {
        if self.max_epochs == 0 || self.batch_size == 0 || self.patience == 0 {
            return Err(Error::config("max_epochs, batch_size and patience must be positive"));
        }
        if !(self.lr0 > 0.0) || !(self.decay >= 0.0) {
            return Err(Error::config("lr0 must be positive and decay non-negative"));
        }
        if !(self.val_fraction > 0.0 && self.val_fraction < 0.5) {
            return Err(Error::config(format!("val_fraction {} outside (0, 0.5)", self.val_fraction)));
        }
        if self.dims.len() < 2 || self.dims.last() != Some(&1) {
            return Err(Error::config("dims must end in a single output"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub lr: f64,
    pub train_mse: f64,
    pub val_mse: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    pub stopped_epoch: usize,
    pub best_epoch: usize,
}

impl TrainHistory {
    pub fn best_val_mse(&self) -> f64 {
        self.epochs[self.best_epoch].val_mse
    }

    /// `epoch,lr,train_mse,val_mse`, one row per epoch.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "epoch,lr,train_mse,val_mse")?;
        for r in &self.epochs {
            writeln!(out, "{},{},{},{}", r.epoch, r.lr, r.train_mse, r.val_mse)?;
        }
        Ok(())
    }
}

/// `lr0 / (1 + decay * epoch)`
pub fn lr_schedule(lr0: f64, decay: f64, epoch: usize) -> f64 {
    lr0 / (1.0 + decay * epoch as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EarlyStop {
    Continue,
    Stop { best_epoch: usize },
}

/// Stops once `patience` epochs have passed since the strictly lowest
/// validation loss (earliest epoch on ties).
pub fn early_stop_check(val_losses: &[f64], patience: usize) -> EarlyStop {
    let Some(best) = argmin_first(val_losses) else {
        return EarlyStop::Continue;
    };
    if val_losses.len() - 1 - best >= patience.max(1) {
        EarlyStop::Stop { best_epoch: best }
    } else {
        EarlyStop::Continue
    }
}

fn argmin_first(v: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in v.iter().enumerate() {
        if best.is_none_or(|b| x < v[b]) {
            best = Some(i);
        }
    }
    best
}

/// Seeded shuffle, then the first `round(n * val_fraction)` items become the
/// validation set.
pub fn split_dataset<S: Clone>(data: &[S], val_fraction: f64, seed: u64) -> Result<(Vec<S>, Vec<S>)> {
    if data.len() < 10 {
        return Err(Error::config(format!("dataset of {} is too small to split (need 10)", data.len())));
    }
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::config(format!("val_fraction {val_fraction} outside (0, 1)")));
    }
    let idx = split_indices(data.len(), seed);
    let n_val = (data.len() as f64 * val_fraction).round() as usize;
    let val = idx[..n_val].iter().map(|&i| data[i].clone()).collect();
    let train = idx[n_val..].iter().map(|&i| data[i].clone()).collect();
    Ok((train, val))
}

fn split_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    idx
}

fn pairs<'a, T: Real>(data: &'a [LabeledStroke<T>], scale: &TargetScale) -> Vec<(&'a [T], T)> {
    data.iter()
        .map(|s| (s.input.as_slice(), T::lit(scale.to_unit(s.label_power_w.as_f64()))))
        .collect()
}

/// Affine map between watts and the training target space.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TargetScale {
    mean: f64,
    std: f64,
}

impl TargetScale {
    const IDENTITY: TargetScale = TargetScale { mean: 0.0, std: 1.0 };

    fn fit<T: Real>(data: &[LabeledStroke<T>]) -> Self {
        let n = data.len() as f64;
        let mean = data.iter().map(|s| s.label_power_w.as_f64()).sum::<f64>() / n;
        let var = data.iter().map(|s| (s.label_power_w.as_f64() - mean).powi(2)).sum::<f64>() / n;
        // constant labels: shift only
        let std = if var.sqrt() > 1e-6 { var.sqrt() } else { 1.0 };
        Self { mean, std }
    }

    fn to_unit(self, w: f64) -> f64 {
        (w - self.mean) / self.std
    }

    /// Rescales the output layer so the model predicts watts.
    fn fold_into<T: Real>(self, model: &mut DenseModel<T>) {
        let out = model.layers_mut().last_mut().expect("at least one layer");
        out.weights.iter_mut().for_each(|w| *w = T::lit(w.as_f64() * self.std));
        out.biases.iter_mut().for_each(|b| *b = T::lit(b.as_f64() * self.std + self.mean));
    }
}

fn sgd_step<T: Real>(model: &mut DenseModel<T>, grads: &Gradients<T>, lr: T) {
    for (l, g) in model.layers_mut().iter_mut().zip(&grads.layers) {
        for (w, d) in l.weights.iter_mut().zip(&g.weights) {
            *w -= lr * *d;
        }
        for (b, d) in l.biases.iter_mut().zip(&g.biases) {
            *b -= lr * *d;
        }
    }
}

/// Trains from He-uniform initialization and returns the weights of the
/// best validation epoch. Deterministic for a given dataset and config.
pub fn train<T: Real>(dataset: &[LabeledStroke<T>], config: &TrainConfig) -> Result<(DenseModel<T>, TrainHistory)> {
    config.check()?;
    if dataset.is_empty() {
        return Err(Error::Training {
            epoch: 0,
            reason: "empty dataset".into(),
        });
    }
    if let Some(bad) = dataset.iter().find(|s| s.input.len() != config.dims[0]) {
        return Err(Error::Shape {
            expected: config.dims[0],
            actual: bad.input.len(),
        });
    }
    let (train_set, val_set) = split_dataset(dataset, config.val_fraction, config.seed)?;
    let scale = if config.standardize_targets {
        TargetScale::fit(&train_set)
    } else {
        TargetScale::IDENTITY
    };
    let to_watts2 = scale.std * scale.std;
    let train_pairs = pairs(&train_set, &scale);
    let val_pairs = pairs(&val_set, &scale);

    let mut init_rng = ChaCha8Rng::seed_from_u64(config.seed);
    init_rng.set_stream(2);
    let mut model = DenseModel::<T>::he_uniform(&config.dims, &mut init_rng)?.with_bounds(config.bounds);
    let mut order_rng = ChaCha8Rng::seed_from_u64(config.seed);
    order_rng.set_stream(3);

    let mut ws = Workspace::new(&model);
    let mut history = TrainHistory::default();
    let mut val_losses = Vec::new();
    let mut best_model = model.clone();
    let mut order: Vec<usize> = (0..train_pairs.len()).collect();
    let mut batch: Vec<(&[T], T)> = Vec::with_capacity(config.batch_size);

    for epoch in 0..config.max_epochs {
        let lr = lr_schedule(config.lr0, config.decay, epoch);
        order.shuffle(&mut order_rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| train_pairs[i]));
            let loss = backprop::backprop_into(&model, &batch, &mut ws).map_err(|e| Error::Training {
                epoch,
                reason: e.to_string(),
            })?;
            let loss = loss.as_f64() * to_watts2;
            if !loss.is_finite() || loss > DIVERGENCE_LIMIT {
                return Err(Error::Training {
                    epoch,
                    reason: format!("training diverged (batch loss {loss})"),
                });
            }
            loss_sum += loss * chunk.len() as f64;
            sgd_step(&mut model, ws.gradients(), T::lit(lr));
        }
        let train_mse = loss_sum / train_pairs.len() as f64;
        let val_mse = mse(&model, &val_pairs)?.as_f64() * to_watts2;
        if !val_mse.is_finite() || val_mse > DIVERGENCE_LIMIT {
            return Err(Error::Training {
                epoch,
                reason: format!("validation loss diverged ({val_mse})"),
            });
        }
        history.epochs.push(EpochRecord {
            epoch,
            lr,
            train_mse,
            val_mse,
        });
        if argmin_first(&val_losses).is_none_or(|b| val_mse < val_losses[b]) {
            best_model = model.clone();
        }
        val_losses.push(val_mse);
        history.stopped_epoch = epoch;
        match early_stop_check(&val_losses, config.patience) {
            EarlyStop::Continue => {}
            EarlyStop::Stop { .. } => break,
        }
    }
    history.best_epoch = argmin_first(&val_losses).unwrap_or(0);
    scale.fold_into(&mut best_model);
    Ok((best_model, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule() {
        assert_eq!(lr_schedule(0.01, 0.01, 0), 0.01);
        assert!((lr_schedule(0.01, 0.01, 100) - 0.005).abs() < 1e-15);
        let s: Vec<f64> = (0..256).map(|e| lr_schedule(0.01, 0.01, e)).collect();
        assert!(s.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn early_stopping_rules() {
        let l = [1.0, 0.9, 0.95, 0.96, 0.97, 0.98, 0.99];
        assert_eq!(early_stop_check(&l[..6], 5), EarlyStop::Continue);
        assert_eq!(early_stop_check(&l, 5), EarlyStop::Stop { best_epoch: 1 });
        let dec: Vec<f64> = (0..300).map(|i| 1.0 / (1.0 + i as f64)).collect();
        for k in 1..=dec.len() {
            assert_eq!(early_stop_check(&dec[..k], 5), EarlyStop::Continue);
        }
        assert_eq!(early_stop_check(&[2.0, 2.0], 1), EarlyStop::Stop { best_epoch: 0 });
        assert_eq!(early_stop_check(&[], 1), EarlyStop::Continue);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let data: Vec<u32> = (0..100).collect();
        let (t, v) = split_dataset(&data, 0.15, 4).unwrap();
        assert_eq!((t.len(), v.len()), (85, 15));
        let mut all: Vec<u32> = t.iter().chain(&v).copied().collect();
        all.sort();
        assert_eq!(all, data);
        assert_eq!(split_dataset(&data, 0.15, 4).unwrap(), (t, v));
        assert!(split_dataset(&data[..9], 0.15, 4).is_err());
    }

    #[test]
    fn different_seeds_different_permutations() {
        assert_ne!(split_indices(1000, 1), split_indices(1000, 2));
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().check().is_ok());
        let c = TrainConfig {
            val_fraction: 0.5,
            ..TrainConfig::default()
        };
        assert!(c.check().is_err());
        let c = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(c.check().is_err());
    }

    #[test]
    fn history_csv() {
        let h = TrainHistory {
            epochs: vec![EpochRecord {
                epoch: 0,
                lr: 0.01,
                train_mse: 4.5,
                val_mse: 5.25,
            }],
            stopped_epoch: 0,
            best_epoch: 0,
        };
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "epoch,lr,train_mse,val_mse\n0,0.01,4.5,5.25\n");
    }
}
