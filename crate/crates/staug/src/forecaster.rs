//! Direct multi-horizon linear forecaster trained by mini-batch SGD on the
//! mean-squared reconstruction error, consuming augmented windows each
//! iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::RandomSource;
use crate::series::WindowPair;

/// Affine map from flattened history (c*d) to flattened future (c*h).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearForecastModel {
    /// (c*h) x (c*d) matrix, row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub channels: usize,
    pub history_len: usize,
    pub future_len: usize,
}

impl LinearForecastModel {
    pub fn zeros(channels: usize, history_len: usize, future_len: usize) -> Self {
        let rows = channels * future_len;
        let cols = channels * history_len;
        Self {
            weights: vec![0.0; rows * cols],
            bias: vec![0.0; rows],
            channels,
            history_len,
            future_len,
        }
    }

    fn in_dim(&self) -> usize {
        self.channels * self.history_len
    }

    fn out_dim(&self) -> usize {
        self.channels * self.future_len
    }
}

/// Flatten a channel-major matrix into one vector, channel by channel.
pub fn flatten(matrix: &[Vec<f64>]) -> Vec<f64> {
    matrix.iter().flat_map(|ch| ch.iter().copied()).collect()
}

fn unflatten(flat: &[f64], channels: usize, steps: usize) -> Vec<Vec<f64>> {
    (0..channels)
        .map(|c| flat[c * steps..(c + 1) * steps].to_vec())
        .collect()
}

/// Predict the future window for one history matrix.
pub fn predict(model: &LinearForecastModel, history: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if history.len() != model.channels || history.iter().any(|ch| ch.len() != model.history_len) {
        return Err(Error::Shape(format!(
            "history shape mismatch: model expects {} x {}",
            model.channels, model.history_len
        )));
    }
    let x = flatten(history);
    let y = affine(model, &x);
    Ok(unflatten(&y, model.channels, model.future_len))
}

fn affine(model: &LinearForecastModel, x: &[f64]) -> Vec<f64> {
    let cols = model.in_dim();
    model
        .bias
        .iter()
        .enumerate()
        .map(|(r, b)| {
            let row = &model.weights[r * cols..(r + 1) * cols];
            b + row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>()
        })
        .collect()
}

fn check_same_shape(pred: &[Vec<f64>], target: &[Vec<f64>]) -> Result<()> {
    if pred.len() != target.len()
        || pred
            .iter()
            .zip(target)
            .any(|(a, b)| a.len() != b.len())
    {
        return Err(Error::Shape("prediction and target shapes differ".into()));
    }
    Ok(())
}

/// Mean over all c*h elements of squared differences.
pub fn mse(pred: &[Vec<f64>], target: &[Vec<f64>]) -> Result<f64> {
    check_same_shape(pred, target)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for (pc, tc) in pred.iter().zip(target) {
        for (p, t) in pc.iter().zip(tc) {
            sum += (p - t) * (p - t);
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Mean over all c*h elements of absolute differences.
pub fn mae(pred: &[Vec<f64>], target: &[Vec<f64>]) -> Result<f64> {
    check_same_shape(pred, target)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for (pc, tc) in pred.iter().zip(target) {
        for (p, t) in pc.iter().zip(tc) {
            sum += (p - t).abs();
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Produces the (possibly augmented) training window for an index.
pub trait Augmenter {
    fn augment(&mut self, index: usize) -> Result<WindowPair>;
}

/// Passes training windows through unchanged.
pub struct IdentityAugmenter<'a> {
    pub windows: &'a [WindowPair],
}

impl Augmenter for IdentityAugmenter<'_> {
    fn augment(&mut self, index: usize) -> Result<WindowPair> {
        Ok(self.windows[index].clone())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Multiplicative learning-rate decay applied after each epoch.
    pub decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-4,
            decay: 0.5,
            epochs: 10,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if self.decay <= 0.0 {
            return Err(Error::Config("decay must be positive".into()));
        }
        Ok(())
    }
}

/// Mini-batch SGD over shuffled window indices; every index is mapped through
/// the augmenter before the gradient step. Returns the per-epoch loss trace.
pub fn train(
    model: &mut LinearForecastModel,
    n_windows: usize,
    augmenter: &mut dyn Augmenter,
    cfg: &TrainConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if n_windows == 0 {
        return Err(Error::Config("training set must be non-empty".into()));
    }
    let rows = model.out_dim();
    let cols = model.in_dim();
    let mut lr = cfg.learning_rate;
    let mut shuffle_rng = RandomSource::new(cfg.seed);
    let mut trace = Vec::with_capacity(cfg.epochs);

    let mut grad_w = vec![0.0; rows * cols];
    let mut grad_b = vec![0.0; rows];

    for epoch in 0..cfg.epochs {
        let mut indices: Vec<usize> = (0..n_windows).collect();
        shuffle_rng.shuffle(&mut indices);
        let mut epoch_loss = 0.0;

        for batch in indices.chunks(cfg.batch_size) {
            grad_w.iter_mut().for_each(|g| *g = 0.0);
            grad_b.iter_mut().for_each(|g| *g = 0.0);
            let scale = 2.0 / (batch.len() * rows) as f64;

            for &idx in batch {
                let wp = augmenter.augment(idx)?;
                let x = flatten(&wp.history);
                let target = flatten(&wp.future);
                if x.len() != cols || target.len() != rows {
                    return Err(Error::Shape(format!(
                        "window shape ({}, {}) does not match model ({}, {})",
                        x.len(),
                        target.len(),
                        cols,
                        rows
                    )));
                }
                let pred = affine(model, &x);
                for r in 0..rows {
                    let diff = pred[r] - target[r];
                    epoch_loss += diff * diff;
                    grad_b[r] += scale * diff;
                    let row = &mut grad_w[r * cols..(r + 1) * cols];
                    let d = scale * diff;
                    for (g, xi) in row.iter_mut().zip(&x) {
                        *g += d * xi;
                    }
                }
            }

            for (w, g) in model.weights.iter_mut().zip(&grad_w) {
                *w -= lr * g;
            }
            for (b, g) in model.bias.iter_mut().zip(&grad_b) {
                *b -= lr * g;
            }
        }

        let mean_loss = epoch_loss / (n_windows * rows) as f64;
        if !mean_loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        trace.push(mean_loss);
        lr *= cfg.decay;
    }
    Ok(trace)
}

/// Forecast quality on a window set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mse: f64,
    pub mae: f64,
}

/// Metrics over un-augmented windows; never applies augmentation.
pub fn evaluate(model: &LinearForecastModel, windows: &[WindowPair]) -> Result<Metrics> {
    if windows.is_empty() {
        return Err(Error::Config("evaluation set must be non-empty".into()));
    }
    let mut total_mse = 0.0;
    let mut total_mae = 0.0;
    for wp in windows {
        let pred = predict(model, &wp.history)?;
        total_mse += mse(&pred, &wp.future)?;
        total_mae += mae(&pred, &wp.future)?;
    }
    Ok(Metrics {
        mse: total_mse / windows.len() as f64,
        mae: total_mae / windows.len() as f64,
    })
}
