//! Experiment orchestration over the (cell, process, replicate) grid,
//! Monte Carlo aggregation, and report emission.

mod figures;
mod presets;
mod report;
mod stars;

pub use figures::write_figures;
pub use presets::{grid_spec, window_max, Scale};
pub use report::{emit_report, recommend, write_summary, SummaryRow};
pub use stars::{select_stars, Star, StarCandidate, DEFAULT_STAR_TOL};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cells::{param_count, CellDims, CellKind, EXPERIMENT1_CELLS, EXPERIMENT2_CELLS};
use crate::dgp::{generate, Behavior, DgpKind, DgpSpec, NoiseSpec};
use crate::error::{Error, Result};
use crate::seeds;
use crate::train::{grid_search, retrain_and_test, RunResult, RunStatus, TrainConfig};

/// What to run: an experiment roster over processes and replicates at a
/// given scale, all seeded from one top-level seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: u8,
    pub cells: Vec<CellKind>,
    pub dgps: Vec<DgpKind>,
    pub reps: usize,
    pub scale: Scale,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(experiment: u8, scale: Scale, seed: u64) -> Result<Self> {
        let cells = match experiment {
            1 => EXPERIMENT1_CELLS.to_vec(),
            2 => EXPERIMENT2_CELLS.to_vec(),
            other => {
                return Err(Error::Config(format!(
                    "experiment must be 1 or 2, got {other}"
                )))
            }
        };
        Ok(ExperimentSpec {
            experiment,
            cells,
            dgps: DgpKind::ALL.to_vec(),
            reps: scale.replicates(),
            scale,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        for cell in &self.cells {
            if !cell.in_experiment(self.experiment) {
                return Err(Error::Config(format!(
                    "{} is not part of experiment {}",
                    cell.name(),
                    self.experiment
                )));
            }
        }
        Ok(())
    }
}

/// One line of `results.jsonl`. Wall time is intentionally absent: it goes
/// to the run log so the artifact stays byte-identical across reruns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub kind: CellKind,
    pub dgp: DgpKind,
    pub replicate: usize,
    pub phase: String,
    #[serde(rename = "n_H")]
    pub n_h: usize,
    pub w: usize,
    pub seed: u64,
    pub val_rmse: Option<f64>,
    pub test_rmse: Option<f64>,
    pub epochs: usize,
    pub status: String,
}

impl RunRecord {
    fn from_run(run: &RunResult, dgp: DgpKind, replicate: usize, phase: &str) -> Self {
        RunRecord {
            kind: run.kind,
            dgp,
            replicate,
            phase: phase.to_string(),
            n_h: run.n_h,
            w: run.window,
            seed: run.seed,
            val_rmse: run.val_rmse,
            test_rmse: run.test_rmse,
            epochs: run.epochs_run,
            status: match &run.status {
                RunStatus::Ok => "ok".to_string(),
                RunStatus::Diverged { epoch, .. } => format!("diverged@{epoch}"),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureRecord {
    pub kind: CellKind,
    pub dgp: DgpKind,
    pub replicate: usize,
    pub error: String,
}

/// Aggregated outcome for one (cell, process) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub cell: CellKind,
    pub dgp: DgpKind,
    pub mean_test_rmse: f64,
    pub std_test_rmse: f64,
    pub chosen_n_h: usize,
    pub chosen_window: usize,
    /// Parameter count at the chosen hidden width.
    pub empirical_complexity: usize,
    pub reps: usize,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub spec: ExperimentSpec,
    pub results: Vec<BenchmarkResult>,
    pub records: Vec<RunRecord>,
    pub failures: Vec<FailureRecord>,
    pub wall_time_s: f64,
}

struct JobOutput {
    cell: CellKind,
    dgp: DgpKind,
    replicate: usize,
    records: Vec<RunRecord>,
    chosen: Option<(usize, usize)>,
    test_rmse: Option<f64>,
    failure: Option<String>,
}

/// Replicate `rep` of `dgp` under top-level seed `top_seed`: the noise base
/// seed hashes (seed, dgp) and the replicate index adds on top, so `generate`
/// and `bench` runs with one seed see identical series.
pub fn replicate_series(
    top_seed: u64,
    dgp: DgpKind,
    length: usize,
    rep: usize,
) -> Result<crate::dgp::SeriesReplicate> {
    let base = seeds::derive(top_seed, &format!("generate|dgp={}", dgp.name()));
    let spec = DgpSpec::new(
        dgp,
        length,
        NoiseSpec {
            seed: base.wrapping_add(rep as u64),
            ..NoiseSpec::paper(0)
        },
    );
    let mut series = generate(&spec)?;
    series.replicate_index = rep;
    Ok(series)
}

fn run_job(spec: &ExperimentSpec, cell: CellKind, dgp: DgpKind, rep: usize) -> JobOutput {
    let mut out = JobOutput {
        cell,
        dgp,
        replicate: rep,
        records: Vec::new(),
        chosen: None,
        test_rmse: None,
        failure: None,
    };
    let series = match replicate_series(spec.seed, dgp, spec.scale.series_length(), rep) {
        Ok(s) => s,
        Err(err) => {
            out.failure = Some(err.to_string());
            return out;
        }
    };
    let job_seed = seeds::derive(
        spec.seed,
        &format!("job|cell={}|dgp={}|rep={rep}", cell.name(), dgp.name()),
    );
    let cfg = TrainConfig {
        seed: job_seed,
        ..spec.scale.train_config()
    };
    let grid = grid_spec(dgp, spec.scale);
    let split = spec.scale.split_spec();

    match grid_search(cell, &series.values, &split, &grid, &cfg) {
        Ok(outcome) => {
            for run in &outcome.runs {
                out.records.push(RunRecord::from_run(run, dgp, rep, "grid"));
            }
            match retrain_and_test(
                cell,
                outcome.best_n_h,
                outcome.best_window,
                &series.values,
                &split,
                &cfg,
            ) {
                Ok(run) => {
                    out.chosen = Some((outcome.best_n_h, outcome.best_window));
                    out.test_rmse = run.test_rmse;
                    if run.test_rmse.is_none() {
                        out.failure = Some("retraining diverged".to_string());
                    }
                    out.records
                        .push(RunRecord::from_run(&run, dgp, rep, "retrain"));
                }
                Err(err) => out.failure = Some(err.to_string()),
            }
        }
        Err(err) => out.failure = Some(err.to_string()),
    }
    out
}

/// Population mean and standard deviation (single replicate gives std 0).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    assert!(!values.is_empty(), "mean_std needs at least one value");
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Run grid search + retrain for every (cell, dgp, replicate) and aggregate
/// test RMSE over replicates. Per-job failures land in the failure manifest
/// instead of aborting the experiment.
pub fn run_experiment(spec: &ExperimentSpec, jobs: Option<usize>) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let started = std::time::Instant::now();
    let mut job_list = Vec::new();
    for cell in &spec.cells {
        for dgp in &spec.dgps {
            for rep in 0..spec.reps {
                job_list.push((*cell, *dgp, rep));
            }
        }
    }

    let run_all = || {
        job_list
            .par_iter()
            .map(|&(cell, dgp, rep)| run_job(spec, cell, dgp, rep))
            .collect::<Vec<_>>()
    };
    let outputs = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Experiment(e.to_string()))?
            .install(run_all),
        None => run_all(),
    };

    let mut samples: BTreeMap<(CellKind, DgpKind), Vec<(f64, (usize, usize))>> = BTreeMap::new();
    for output in &outputs {
        if let (Some(rmse), Some(chosen)) = (output.test_rmse, output.chosen) {
            samples
                .entry((output.cell, output.dgp))
                .or_default()
                .push((rmse, chosen));
        }
    }
    let results = aggregate_pairs(&samples);

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for output in outputs {
        if let Some(error) = &output.failure {
            failures.push(FailureRecord {
                kind: output.cell,
                dgp: output.dgp,
                replicate: output.replicate,
                error: error.clone(),
            });
        }
        records.extend(output.records);
    }

    Ok(ExperimentOutcome {
        spec: spec.clone(),
        results,
        records,
        failures,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

fn aggregate_pairs(
    samples: &BTreeMap<(CellKind, DgpKind), Vec<(f64, (usize, usize))>>,
) -> Vec<BenchmarkResult> {
    let mut results = Vec::new();
    for ((cell, dgp), group) in samples {
        if group.is_empty() {
            continue;
        }
        let rmses: Vec<f64> = group.iter().map(|(r, _)| *r).collect();
        let (mean, std) = mean_std(&rmses);
        let mut configs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (_, chosen) in group {
            *configs.entry(*chosen).or_insert(0) += 1;
        }
        // most frequent chosen config; ties toward fewer parameters, then
        // the smaller window
        let (&(n_h, w), _) = configs
            .iter()
            .max_by(|(ka, va), (kb, vb)| {
                let ca = param_count(*cell, &CellDims::forecasting(ka.0)).params;
                let cb = param_count(*cell, &CellDims::forecasting(kb.0)).params;
                va.cmp(vb).then(cb.cmp(&ca)).then(kb.1.cmp(&ka.1))
            })
            .expect("non-empty config set");
        results.push(BenchmarkResult {
            cell: *cell,
            dgp: *dgp,
            mean_test_rmse: mean,
            std_test_rmse: std,
            chosen_n_h: n_h,
            chosen_window: w,
            empirical_complexity: param_count(*cell, &CellDims::forecasting(n_h)).params,
            reps: rmses.len(),
        });
    }
    results
}

/// Rebuild an outcome from persisted run records (the `report` command's
/// path); only successful retrain records feed the aggregates.
pub fn outcome_from_records(
    spec: &ExperimentSpec,
    records: Vec<RunRecord>,
    failures: Vec<FailureRecord>,
) -> ExperimentOutcome {
    let mut samples: BTreeMap<(CellKind, DgpKind), Vec<(f64, (usize, usize))>> = BTreeMap::new();
    for record in &records {
        if record.phase == "retrain" && record.status == "ok" {
            if let Some(rmse) = record.test_rmse {
                samples
                    .entry((record.kind, record.dgp))
                    .or_default()
                    .push((rmse, (record.n_h, record.w)));
            }
        }
    }
    let results = aggregate_pairs(&samples);
    ExperimentOutcome {
        spec: spec.clone(),
        results,
        records,
        failures,
        wall_time_s: 0.0,
    }
}

/// Unweighted mean over the per-process means of one behavior; every
/// process of the behavior must be present.
pub fn behavior_mean(per_dgp: &BTreeMap<DgpKind, f64>, behavior: Behavior) -> Result<f64> {
    let dgps = behavior.dgps();
    let mut sum = 0.0;
    for dgp in dgps {
        match per_dgp.get(dgp) {
            Some(v) => sum += v,
            None => {
                return Err(Error::IncompleteBehavior {
                    behavior: behavior.label().to_string(),
                    missing: dgp.name().to_string(),
                })
            }
        }
    }
    Ok(sum / dgps.len() as f64)
}
