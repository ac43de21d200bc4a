//! Mini-batch training of one cell configuration, plus batched prediction.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::{rmse, TrainConfig, WindowedDataset};
use crate::autodiff::Tape;
use crate::cells::{bind, init_params, readout, unroll, CellDims, CellKind, CellParams};
use crate::error::Result;
use crate::seeds;
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    Ok,
    Diverged { epoch: usize, message: String },
}

/// Outcome of one training run at a fixed (hidden width, window) config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    pub kind: CellKind,
    pub n_h: usize,
    pub window: usize,
    pub seed: u64,
    pub epochs_run: usize,
    /// Mean training loss per epoch, on the normalized scale.
    pub train_curve: Vec<f64>,
    pub val_rmse: Option<f64>,
    pub test_rmse: Option<f64>,
    /// Observations in the partition this run trained on.
    pub train_len: usize,
    pub wall_time_s: f64,
    pub status: RunStatus,
}

pub struct TrainOutcome {
    pub run: RunResult,
    pub params: CellParams,
}

/// Batched forward pass: one prediction per window row.
pub fn predict(params: &CellParams, inputs: &Tensor) -> Result<Vec<f64>> {
    let mut tape = Tape::new();
    let bound = bind(&mut tape, params);
    let x = tape.leaf(inputs.clone());
    let state = unroll(&mut tape, &bound, x)?;
    let pred = readout(&mut tape, &bound, &state)?;
    Ok(tape.value(pred).values().to_vec())
}

fn gather_batch(ds: &WindowedDataset, idx: &[usize]) -> (Tensor, Tensor) {
    let w = ds.window;
    let mut x = Tensor::zeros(idx.len(), w);
    let mut y = Tensor::zeros(idx.len(), 1);
    for (r, &i) in idx.iter().enumerate() {
        for j in 0..w {
            x.set(r, j, ds.inputs.get(i, j));
        }
        y.set(r, 0, ds.targets[i]);
    }
    (x, y)
}

/// Train `kind` on `train_ds` for exactly `cfg.max_epochs` epochs of
/// shuffled mini-batches, then score on `val_ds` when given. Numeric
/// divergence marks the run failed instead of tearing down the caller.
pub fn train(
    kind: CellKind,
    n_h: usize,
    train_ds: &WindowedDataset,
    val_ds: Option<&WindowedDataset>,
    cfg: &TrainConfig,
) -> TrainOutcome {
    let started = Instant::now();
    let dims = CellDims::forecasting(n_h);
    let mut params = init_params(kind, &dims, seeds::derive(cfg.seed, "init"));
    let mut adam = AdamState::new(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(cfg.seed, "shuffle"));

    let m = train_ds.len();
    let mut order: Vec<usize> = (0..m).collect();
    let mut curve = Vec::with_capacity(cfg.max_epochs);
    let mut status = RunStatus::Ok;
    let mut epochs_run = 0;

    'epochs: for epoch in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_sse = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let (x, y) = gather_batch(train_ds, chunk);
            match train_batch(&mut params, &mut adam, cfg, x, y) {
                Ok(loss) => epoch_sse += loss * chunk.len() as f64,
                Err(err) => {
                    status = RunStatus::Diverged {
                        epoch,
                        message: err.to_string(),
                    };
                    break 'epochs;
                }
            }
        }
        let epoch_loss = epoch_sse / m as f64;
        if !epoch_loss.is_finite() {
            status = RunStatus::Diverged {
                epoch,
                message: "non-finite epoch loss".into(),
            };
            break;
        }
        curve.push(epoch_loss);
        epochs_run = epoch + 1;
    }

    let val_rmse = match (&status, val_ds) {
        (RunStatus::Ok, Some(ds)) => match predict(&params, &ds.inputs) {
            Ok(pred) => Some(rmse(&ds.targets, &pred)),
            Err(err) => {
                status = RunStatus::Diverged {
                    epoch: epochs_run,
                    message: err.to_string(),
                };
                None
            }
        },
        _ => None,
    };

    TrainOutcome {
        run: RunResult {
            kind,
            n_h,
            window: train_ds.window,
            seed: cfg.seed,
            epochs_run,
            train_curve: curve,
            val_rmse,
            test_rmse: None,
            train_len: train_ds.len() + train_ds.window + train_ds.horizon - 1,
            wall_time_s: started.elapsed().as_secs_f64(),
            status,
        },
        params,
    }
}

fn train_batch(
    params: &mut CellParams,
    adam: &mut AdamState,
    cfg: &TrainConfig,
    x: Tensor,
    y: Tensor,
) -> Result<f64> {
    let mut tape = Tape::new();
    let bound = bind(&mut tape, params);
    let x_var = tape.leaf(x);
    let y_var = tape.leaf(y);
    let state = unroll(&mut tape, &bound, x_var)?;
    let pred = readout(&mut tape, &bound, &state)?;
    let loss = tape.mse_loss(pred, y_var)?;
    let grads = tape.backward(loss)?;
    let grad_tensors: Vec<Tensor> = bound
        .entries()
        .iter()
        .map(|(_, var, _)| grads.get(&tape, *var))
        .collect();
    adam_step(params, &grad_tensors, adam, cfg);
    Ok(tape.value(loss).get(0, 0))
}
