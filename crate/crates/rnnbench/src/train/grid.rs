//! Grid search over (hidden width, window) with stability runs, and the
//! retrain-on-blended-partitions test pass.

use serde::{Deserialize, Serialize};

use super::trainer::{predict, train, RunResult, RunStatus, TrainOutcome};
use super::{make_windows, rmse, split, Normalizer, SplitSpec, TrainConfig};
use crate::cells::{param_count, CellDims, CellKind};
use crate::error::{Error, Result};
use crate::seeds;

/// Hyper-parameter grid; each config is run `runs_per_config` times to
/// probe stability, and configs compete on their mean validation RMSE.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub hidden: Vec<usize>,
    pub windows: Vec<usize>,
    pub runs_per_config: usize,
}

impl GridSpec {
    pub fn new(hidden: impl IntoIterator<Item = usize>, windows: impl IntoIterator<Item = usize>, runs_per_config: usize) -> Self {
        GridSpec {
            hidden: hidden.into_iter().collect(),
            windows: windows.into_iter().collect(),
            runs_per_config,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigStat {
    pub n_h: usize,
    pub window: usize,
    /// Mean validation RMSE over successful runs; `None` when the config is
    /// disqualified for too many divergent runs.
    pub mean_val_rmse: Option<f64>,
    pub successes: usize,
    pub runs: usize,
}

#[derive(Debug)]
pub struct GridOutcome {
    pub best_n_h: usize,
    pub best_window: usize,
    pub stats: Vec<ConfigStat>,
    pub runs: Vec<RunResult>,
}

/// Lowest mean validation RMSE wins; ties break toward fewer parameters,
/// then a smaller window, then a smaller hidden width.
pub fn select_best(kind: CellKind, stats: &[ConfigStat]) -> Result<(usize, usize)> {
    stats
        .iter()
        .filter_map(|s| s.mean_val_rmse.map(|m| (m, s)))
        .min_by(|(ma, sa), (mb, sb)| {
            let ca = param_count(kind, &CellDims::forecasting(sa.n_h)).params;
            let cb = param_count(kind, &CellDims::forecasting(sb.n_h)).params;
            ma.partial_cmp(mb)
                .expect("validation means are finite")
                .then(ca.cmp(&cb))
                .then(sa.window.cmp(&sb.window))
                .then(sa.n_h.cmp(&sb.n_h))
        })
        .map(|(_, s)| (s.n_h, s.window))
        .ok_or_else(|| {
            Error::Experiment(format!(
                "every grid configuration for {} was disqualified",
                kind.name()
            ))
        })
}

/// A config keeps its mean only when at least 80% of its runs succeed
/// (8 of the paper's 10); otherwise divergence disqualifies it.
fn config_mean(results: &[&RunResult]) -> (Option<f64>, usize) {
    let successes: Vec<f64> = results
        .iter()
        .filter(|r| matches!(r.status, RunStatus::Ok))
        .filter_map(|r| r.val_rmse)
        .collect();
    let needed = (results.len() * 4).div_ceil(5);
    if successes.len() >= needed && !successes.is_empty() {
        (
            Some(successes.iter().sum::<f64>() / successes.len() as f64),
            successes.len(),
        )
    } else {
        (None, successes.len())
    }
}

pub fn grid_search(
    kind: CellKind,
    series: &[f64],
    split_spec: &SplitSpec,
    grid: &GridSpec,
    cfg: &TrainConfig,
) -> Result<GridOutcome> {
    if grid.hidden.is_empty() || grid.windows.is_empty() || grid.runs_per_config == 0 {
        return Err(Error::Config("grid must be non-empty".into()));
    }
    let (train_part, val_part, _) = split(series, split_spec)?;
    let normalizer = Normalizer::fit(train_part)?;
    let train_norm = normalizer.apply(train_part);
    let val_norm = normalizer.apply(val_part);

    let mut stats = Vec::new();
    let mut all_runs = Vec::new();
    for &w in &grid.windows {
        let train_ds = make_windows(&train_norm, w, 1)?;
        let val_ds = make_windows(&val_norm, w, 1)?;
        for &n_h in &grid.hidden {
            let mut config_runs = Vec::with_capacity(grid.runs_per_config);
            for run_idx in 0..grid.runs_per_config {
                let run_cfg = TrainConfig {
                    seed: seeds::derive(cfg.seed, &format!("grid|nh={n_h}|w={w}|run={run_idx}")),
                    ..*cfg
                };
                let TrainOutcome { run, .. } = train(kind, n_h, &train_ds, Some(&val_ds), &run_cfg);
                config_runs.push(run);
            }
            let (mean, successes) = config_mean(&config_runs.iter().collect::<Vec<_>>());
            stats.push(ConfigStat {
                n_h,
                window: w,
                mean_val_rmse: mean,
                successes,
                runs: grid.runs_per_config,
            });
            all_runs.extend(config_runs);
        }
    }
    let (best_n_h, best_window) = select_best(kind, &stats)?;
    Ok(GridOutcome {
        best_n_h,
        best_window,
        stats,
        runs: all_runs,
    })
}

/// Blend train+validation, refit the normalizer there, retrain from a fresh
/// initialization for the full epoch budget, and score on the test windows.
pub fn retrain_and_test(
    kind: CellKind,
    n_h: usize,
    window: usize,
    series: &[f64],
    split_spec: &SplitSpec,
    cfg: &TrainConfig,
) -> Result<RunResult> {
    let (_, _, test_part) = split(series, split_spec)?;
    let blended = &series[..split_spec.train + split_spec.validation];
    let normalizer = Normalizer::fit(blended)?;
    let blended_norm = normalizer.apply(blended);
    let test_norm = normalizer.apply(test_part);

    let train_ds = make_windows(&blended_norm, window, 1)?;
    let test_ds = make_windows(&test_norm, window, 1)?;

    let retrain_cfg = TrainConfig {
        seed: seeds::derive(cfg.seed, "retrain"),
        ..*cfg
    };
    let TrainOutcome { mut run, params } = train(kind, n_h, &train_ds, None, &retrain_cfg);
    if matches!(run.status, RunStatus::Ok) {
        let pred = predict(&params, &test_ds.inputs)?;
        run.test_rmse = Some(rmse(&test_ds.targets, &pred));
    }
    Ok(run)
}
