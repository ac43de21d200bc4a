//! Training protocol: contiguous splits, train-fitted min-max normalization,
//! lag windowing, Adam, grid search with stability runs, and retraining on
//! the blended train+validation partition.

mod adam;
mod grid;
mod trainer;

pub use adam::{adam_step, AdamState};
pub use grid::{grid_search, retrain_and_test, select_best, ConfigStat, GridOutcome, GridSpec};
pub use trainer::{predict, train, RunResult, RunStatus, TrainOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Contiguous partition lengths, in temporal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl SplitSpec {
    /// The published protocol: 2000 / 500 / 500.
    pub fn paper() -> Self {
        SplitSpec {
            train: 2000,
            validation: 500,
            test: 500,
        }
    }

    pub fn total(&self) -> usize {
        self.train + self.validation + self.test
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec::paper()
    }
}

/// Slice a series into (train, validation, test).
pub fn split<'a>(series: &'a [f64], spec: &SplitSpec) -> Result<(&'a [f64], &'a [f64], &'a [f64])> {
    if spec.total() != series.len() {
        return Err(Error::Config(format!(
            "split {}+{}+{} does not cover series of length {}",
            spec.train,
            spec.validation,
            spec.test,
            series.len()
        )));
    }
    let (train, rest) = series.split_at(spec.train);
    let (val, test) = rest.split_at(spec.validation);
    Ok((train, val, test))
}

/// Min-max scaler fitted on the training partition only; validation and
/// test values may legitimately map outside [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub min: f64,
    pub max: f64,
}

impl Normalizer {
    pub fn fit(train: &[f64]) -> Result<Self> {
        let min = train.iter().copied().fold(f64::INFINITY, f64::min);
        let max = train.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(max > min) {
            return Err(Error::DegenerateScale);
        }
        Ok(Normalizer { min, max })
    }

    pub fn apply_one(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }

    pub fn invert_one(&self, y: f64) -> f64 {
        y * (self.max - self.min) + self.min
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&x| self.apply_one(x)).collect()
    }

    pub fn invert(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&y| self.invert_one(y)).collect()
    }
}

/// Supervised lag windows over one partition: `inputs[i]` holds
/// `values[i .. i+w)` and `targets[i] = values[i + w + horizon - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    pub inputs: Tensor,
    pub targets: Vec<f64>,
    pub window: usize,
    pub horizon: usize,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

pub fn make_windows(values: &[f64], window: usize, horizon: usize) -> Result<WindowedDataset> {
    assert!(window >= 1 && horizon >= 1, "window and horizon must be >= 1");
    if values.len() <= window + horizon - 1 {
        return Err(Error::Config(format!(
            "partition of {} values is too short for window {} and horizon {}",
            values.len(),
            window,
            horizon
        )));
    }
    let m = values.len() - window - horizon + 1;
    let mut inputs = Tensor::zeros(m, window);
    let mut targets = Vec::with_capacity(m);
    for i in 0..m {
        for j in 0..window {
            inputs.set(i, j, values[i + j]);
        }
        targets.push(values[i + window + horizon - 1]);
    }
    Ok(WindowedDataset {
        inputs,
        targets,
        window,
        horizon,
    })
}

/// Root mean square error over paired observations.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> f64 {
    assert_eq!(actual.len(), predicted.len(), "rmse length mismatch");
    let n = actual.len() as f64;
    let sse: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, yh)| (y - yh) * (y - yh))
        .sum();
    (sse / n).sqrt()
}

/// Optimizer and loop hyper-parameters; defaults follow the published
/// training table (batch 100, 500 epochs, Adam at 0.01).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 100,
            max_epochs: 500,
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }
}
