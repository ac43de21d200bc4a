//! Command implementations. Every command derives its randomness from the
//! single top-level seed and writes only under the resolved output directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rnnbench::bench::{
    emit_report, outcome_from_records, replicate_series, run_experiment, ExperimentSpec,
    FailureRecord, RunRecord, Scale,
};
use rnnbench::cells::{
    bind_from_vars, catalog_json, init_params, param_layout, readout, unroll, CellDims, CellKind,
};
use rnnbench::dgp::{replicate, write_replicates, DgpKind, DgpSpec, NoiseSpec};
use rnnbench::train::{
    grid_search, make_windows, retrain_and_test, split, GridSpec, Normalizer, RunStatus,
    TrainConfig,
};
use rnnbench::{autodiff, seeds, Tensor};

use crate::config::{parse_range, RunConfig};

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut cur = vec![i + 1];
        for (j, cb) in b.iter().enumerate() {
            let cost = if ca == cb { 0 } else { 1 };
            cur.push((prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1));
        }
        prev = cur;
    }
    prev[b.len()]
}

fn suggest<'a>(input: &str, names: impl Iterator<Item = &'a str>) -> Option<&'a str> {
    names
        .map(|n| (levenshtein(&input.to_ascii_uppercase(), n), n))
        .min()
        .filter(|(d, _)| *d <= 3)
        .map(|(_, n)| n)
}

pub fn parse_cell(name: &str) -> Result<CellKind> {
    CellKind::parse(name).ok_or_else(|| {
        let hint = suggest(name, CellKind::all().into_iter().map(|k| k.name()))
            .map(|s| format!("; did you mean {s}?"))
            .unwrap_or_default();
        anyhow!(
            "unknown cell {name:?}{hint} (valid: {})",
            cell_name_list()
        )
    })
}

pub fn parse_dgp(name: &str) -> Result<DgpKind> {
    DgpKind::parse(name).ok_or_else(|| {
        let hint = suggest(name, DgpKind::ALL.iter().map(|k| k.name()))
            .map(|s| format!("; did you mean {s}?"))
            .unwrap_or_default();
        anyhow!("unknown DGP {name:?}{hint} (valid: {})", dgp_name_list())
    })
}

pub fn cell_name_list() -> String {
    CellKind::all()
        .iter()
        .map(|k| k.name())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn dgp_name_list() -> String {
    DgpKind::ALL
        .iter()
        .map(|k| k.name())
        .collect::<Vec<_>>()
        .join(", ")
}

fn scale_of(config: &RunConfig) -> Result<Scale> {
    Scale::parse(&config.scale)
        .ok_or_else(|| anyhow!("unknown scale {:?} (valid: paper, desk)", config.scale))
}

fn train_config_of(config: &RunConfig, scale: Scale, seed: u64) -> TrainConfig {
    let mut cfg = scale.train_config();
    cfg.seed = seed;
    if let Some(b) = config.train.batch_size {
        cfg.batch_size = b;
    }
    if let Some(e) = config.train.max_epochs {
        cfg.max_epochs = e;
    }
    if let Some(lr) = config.train.learning_rate {
        cfg.learning_rate = lr;
    }
    cfg
}

fn grid_of(config: &RunConfig, dgp: DgpKind, scale: Scale) -> Result<GridSpec> {
    let mut grid = rnnbench::bench::grid_spec(dgp, scale);
    if let Some(h) = &config.grid.hidden_range {
        grid.hidden = parse_range(&h.0)?;
    }
    if let Some(w) = &config.grid.window_range {
        grid.windows = parse_range(&w.0)?;
    }
    if let Some(r) = config.grid.runs_per_config {
        grid.runs_per_config = r;
    }
    Ok(grid)
}

fn write_jsonl(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut text = String::new();
    for r in records {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

/// `generate`: write CSV + sidecar replicates for the selected processes.
pub fn generate(config: &RunConfig, out_dir: &Path) -> Result<()> {
    let kinds: Vec<DgpKind> = if config.dgps.is_empty() {
        DgpKind::ALL.to_vec()
    } else {
        config
            .dgps
            .iter()
            .map(|n| parse_dgp(n))
            .collect::<Result<_>>()?
    };
    let length = config.length.unwrap_or(3000);
    let reps = config.reps.unwrap_or(30);
    for kind in kinds {
        let base = seeds::derive(config.seed, &format!("generate|dgp={}", kind.name()));
        let mut spec = DgpSpec::new(kind, length, NoiseSpec::paper(base));
        spec.noise.mean = config.noise.mean;
        if let Some(std) = config.noise.std {
            spec.noise.std = std;
        }
        let series = replicate(&spec, reps, base)?;
        let paths = write_replicates(out_dir, &series)?;
        println!(
            "{}: wrote {} replicates of length {length} under {}",
            kind.name(),
            paths.len(),
            out_dir.display()
        );
    }
    Ok(())
}

/// `train`: one cell, one process, one configuration.
pub fn train_one(config: &RunConfig, out_dir: &Path) -> Result<()> {
    let cell = parse_cell(config.cell.as_deref().context("train needs cell=<name>")?)?;
    let dgp = parse_dgp(config.dgp.as_deref().context("train needs dgp=<name>")?)?;
    let scale = scale_of(config)?;
    let n_h = config.hidden.unwrap_or(1);
    let window = config.window.unwrap_or(1);

    let series = replicate_series(config.seed, dgp, scale.series_length(), 0)?;
    let split_spec = scale.split_spec();
    let (train_part, val_part, _) = split(&series.values, &split_spec)?;
    let normalizer = Normalizer::fit(train_part)?;
    let train_ds = make_windows(&normalizer.apply(train_part), window, 1)?;
    let val_ds = make_windows(&normalizer.apply(val_part), window, 1)?;

    let job_seed = seeds::derive(
        config.seed,
        &format!("job|cell={}|dgp={}|rep=0", cell.name(), dgp.name()),
    );
    let cfg = train_config_of(config, scale, job_seed);
    let outcome = rnnbench::train::train(cell, n_h, &train_ds, Some(&val_ds), &cfg);
    let record = RunRecord {
        kind: cell,
        dgp,
        replicate: 0,
        phase: "train".into(),
        n_h,
        w: window,
        seed: cfg.seed,
        val_rmse: outcome.run.val_rmse,
        test_rmse: None,
        epochs: outcome.run.epochs_run,
        status: match &outcome.run.status {
            RunStatus::Ok => "ok".into(),
            RunStatus::Diverged { epoch, .. } => format!("diverged@{epoch}"),
        },
    };
    write_jsonl(&out_dir.join("results.jsonl"), &[record])?;
    match outcome.run.status {
        RunStatus::Ok => {
            println!(
                "{} on {}: n_H={n_h} w={window} val RMSE {:.6} ({} epochs)",
                cell.name(),
                dgp.name(),
                outcome.run.val_rmse.unwrap_or(f64::NAN),
                outcome.run.epochs_run
            );
            Ok(())
        }
        RunStatus::Diverged { epoch, message } => {
            bail!("run diverged at epoch {epoch}: {message}")
        }
    }
}

/// `grid`: full grid search plus retrain on one (cell, process) pair.
pub fn grid_one(config: &RunConfig, out_dir: &Path) -> Result<()> {
    let cell = parse_cell(config.cell.as_deref().context("grid needs cell=<name>")?)?;
    let dgp = parse_dgp(config.dgp.as_deref().context("grid needs dgp=<name>")?)?;
    let scale = scale_of(config)?;
    let series = replicate_series(config.seed, dgp, scale.series_length(), 0)?;
    let split_spec = scale.split_spec();
    let grid = grid_of(config, dgp, scale)?;
    let job_seed = seeds::derive(
        config.seed,
        &format!("job|cell={}|dgp={}|rep=0", cell.name(), dgp.name()),
    );
    let cfg = train_config_of(config, scale, job_seed);

    let outcome = grid_search(cell, &series.values, &split_spec, &grid, &cfg)?;
    let mut records: Vec<RunRecord> = Vec::new();
    for run in &outcome.runs {
        records.push(RunRecord {
            kind: run.kind,
            dgp,
            replicate: 0,
            phase: "grid".into(),
            n_h: run.n_h,
            w: run.window,
            seed: run.seed,
            val_rmse: run.val_rmse,
            test_rmse: None,
            epochs: run.epochs_run,
            status: match &run.status {
                RunStatus::Ok => "ok".into(),
                RunStatus::Diverged { epoch, .. } => format!("diverged@{epoch}"),
            },
        });
    }
    let retrain = retrain_and_test(
        cell,
        outcome.best_n_h,
        outcome.best_window,
        &series.values,
        &split_spec,
        &cfg,
    )?;
    records.push(RunRecord {
        kind: cell,
        dgp,
        replicate: 0,
        phase: "retrain".into(),
        n_h: retrain.n_h,
        w: retrain.window,
        seed: retrain.seed,
        val_rmse: None,
        test_rmse: retrain.test_rmse,
        epochs: retrain.epochs_run,
        status: "ok".into(),
    });
    write_jsonl(&out_dir.join("results.jsonl"), &records)?;
    println!(
        "{} on {}: best n_H={} w={}; test RMSE {:.6}",
        cell.name(),
        dgp.name(),
        outcome.best_n_h,
        outcome.best_window,
        retrain.test_rmse.unwrap_or(f64::NAN)
    );
    Ok(())
}

fn experiment_spec(config: &RunConfig) -> Result<ExperimentSpec> {
    let scale = scale_of(config)?;
    let mut spec = ExperimentSpec::new(config.experiment, scale, config.seed)
        .map_err(|e| anyhow!(e.to_string()))?;
    if !config.cells.is_empty() {
        spec.cells = config
            .cells
            .iter()
            .map(|n| parse_cell(n))
            .collect::<Result<_>>()?;
    }
    if !config.dgps.is_empty() {
        spec.dgps = config
            .dgps
            .iter()
            .map(|n| parse_dgp(n))
            .collect::<Result<_>>()?;
    }
    if let Some(reps) = config.reps {
        spec.reps = reps;
    }
    spec.validate()?;
    Ok(spec)
}

/// `bench`: the full experiment pipeline plus report emission.
pub fn bench(config: &RunConfig, out_dir: &Path) -> Result<()> {
    let spec = experiment_spec(config)?;
    let outcome = run_experiment(&spec, config.jobs)?;
    emit_report(out_dir, &[&outcome], config.star_tol)?;
    // timings stay out of the deterministic artifacts
    fs::write(
        out_dir.join("run.log"),
        format!(
            "experiment={} scale={} jobs={} wall_time_s={:.3}\n",
            spec.experiment,
            spec.scale.name(),
            config.jobs.map(|j| j.to_string()).unwrap_or_else(|| "auto".into()),
            outcome.wall_time_s
        ),
    )?;
    println!(
        "experiment {} at {} scale: {} results, {} failures -> {}",
        spec.experiment,
        spec.scale.name(),
        outcome.results.len(),
        outcome.failures.len(),
        out_dir.display()
    );
    Ok(())
}

/// `report`: rebuild reports from persisted run directories.
pub fn report(config: &RunConfig, out_dir: &Path) -> Result<()> {
    if config.results.is_empty() {
        bail!("report needs results=[\"<run dir>\", ...] pointing at earlier runs");
    }
    let mut outcomes = Vec::new();
    for dir in &config.results {
        let dir = PathBuf::from(dir);
        let resolved: RunConfig = serde_json::from_str(
            &fs::read_to_string(dir.join("resolved_config.json"))
                .with_context(|| format!("{} has no resolved_config.json", dir.display()))?,
        )?;
        let spec = experiment_spec(&resolved)?;
        let text = fs::read_to_string(dir.join("results.jsonl"))
            .with_context(|| format!("{} has no results.jsonl", dir.display()))?;
        let records: Vec<RunRecord> = text
            .lines()
            .map(serde_json::from_str)
            .collect::<std::result::Result<_, _>>()?;
        let failures: Vec<FailureRecord> = match fs::read_to_string(dir.join("failures.json")) {
            Ok(t) => serde_json::from_str(&t)?,
            Err(_) => Vec::new(),
        };
        outcomes.push(outcome_from_records(&spec, records, failures));
    }
    let refs: Vec<&_> = outcomes.iter().collect();
    let written = emit_report(out_dir, &refs, config.star_tol)?;
    println!("wrote {} report files under {}", written.len(), out_dir.display());
    Ok(())
}

/// `gradcheck`: exact-BPTT verification over 5-step unrolls.
pub fn gradcheck(config: &RunConfig, cells: &[String], all: bool) -> Result<()> {
    let kinds: Vec<CellKind> = if all || cells.is_empty() {
        CellKind::all()
    } else {
        cells.iter().map(|n| parse_cell(n)).collect::<Result<_>>()?
    };
    let mut worst: f64 = 0.0;
    let mut failed = false;
    for kind in kinds {
        let dims = CellDims::forecasting(3);
        let params = init_params(kind, &dims, seeds::derive(config.seed, "gradcheck"));
        let layout_len = param_layout(kind).len();
        let mut tensors: Vec<Tensor> = params.iter().map(|p| p.tensor.clone()).collect();
        tensors.push(Tensor::from_vec(1, 5, vec![0.2, -0.4, 0.5, 0.1, -0.3]));
        tensors.push(Tensor::from_vec(1, 1, vec![0.6]));
        let err = autodiff::grad_check(
            |tape, vars| {
                let bound = bind_from_vars(kind, dims, &vars[..layout_len]);
                let state = unroll(tape, &bound, vars[layout_len])?;
                let pred = readout(tape, &bound, &state)?;
                tape.mse_loss(pred, vars[layout_len + 1])
            },
            &tensors,
            1e-5,
        )?;
        let ok = err < 1e-5;
        failed |= !ok;
        worst = worst.max(err);
        println!(
            "{:<13} max relative error {:.3e}  {}",
            kind.name(),
            err,
            if ok { "ok" } else { "FAIL" }
        );
    }
    if failed {
        bail!("gradient check failed (worst {worst:.3e} >= 1e-5)");
    }
    println!("all gradient checks passed (worst {worst:.3e})");
    Ok(())
}

/// `catalog`: machine-readable description of all 31 cells.
pub fn catalog(out_dir: &Path) -> Result<()> {
    let json = catalog_json()?;
    fs::write(out_dir.join("cell_catalog.json"), format!("{json}\n"))?;
    println!("{json}");
    Ok(())
}
