//! Run configuration: JSON file, dotted-path overrides, and the resolved
//! echo written next to every run's outputs so any run can be replayed from
//! its own artifact.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub mean: f64,
    pub std: Option<f64>,
}

/// Range text that also accepts a bare integer in JSON.
#[derive(Debug, Clone, Serialize)]
pub struct RangeText(pub String);

impl<'de> Deserialize<'de> for RangeText {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(de)?;
        match value {
            serde_json::Value::String(s) => Ok(RangeText(s)),
            serde_json::Value::Number(n) => Ok(RangeText(n.to_string())),
            other => Err(serde::de::Error::custom(format!(
                "expected a range string like \"1..10\", got {other}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Inclusive range such as "1..10", or a single value "4".
    pub hidden_range: Option<RangeText>,
    pub window_range: Option<RangeText>,
    pub runs_per_config: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub batch_size: Option<usize>,
    pub max_epochs: Option<usize>,
    pub learning_rate: Option<f64>,
}

/// Everything a run needs; unknown keys are rejected at parse time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<String>,
    pub seed: u64,
    pub out_dir: Option<String>,
    pub jobs: Option<usize>,
    pub experiment: u8,
    pub scale: String,
    pub cells: Vec<String>,
    pub dgps: Vec<String>,
    pub reps: Option<usize>,
    pub length: Option<usize>,
    pub noise: NoiseSection,
    pub cell: Option<String>,
    pub dgp: Option<String>,
    pub hidden: Option<usize>,
    pub window: Option<usize>,
    pub grid: GridSection,
    pub train: TrainSection,
    pub star_tol: f64,
    pub results: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            seed: 0,
            out_dir: None,
            jobs: None,
            experiment: 2,
            scale: "desk".to_string(),
            cells: Vec::new(),
            dgps: Vec::new(),
            reps: None,
            length: None,
            noise: NoiseSection::default(),
            cell: None,
            dgp: None,
            hidden: None,
            window: None,
            grid: GridSection::default(),
            train: TrainSection::default(),
            star_tol: rnnbench::bench::DEFAULT_STAR_TOL,
            results: Vec::new(),
        }
    }
}

/// Set `path` (dot-separated) to `raw` inside a JSON tree. Values parse as
/// JSON when possible, otherwise as strings, so `seed=7`, `scale=desk` and
/// `grid.hidden_range=1..4` all do the obvious thing.
fn apply_override(tree: &mut serde_json::Value, path: &str, raw: &str) -> Result<()> {
    let value = serde_json::from_str::<serde_json::Value>(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut cursor = tree;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            bail!("override path {path:?} has an empty segment");
        }
        let obj = cursor
            .as_object_mut()
            .with_context(|| format!("override path {path:?} crosses a non-object"))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            break;
        }
        cursor = obj
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    Ok(())
}

/// Load the optional config file, apply `key=value` overrides in order, and
/// reject unknown keys.
pub fn resolve(config_path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut tree: serde_json::Value = match config_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => serde_json::Value::Object(Default::default()),
    };
    for entry in overrides {
        let (path, raw) = entry
            .split_once('=')
            .with_context(|| format!("override {entry:?} is not key=value"))?;
        apply_override(&mut tree, path.trim(), raw)?;
    }
    let config: RunConfig =
        serde_json::from_value(tree).context("config has unknown or ill-typed keys")?;
    Ok(config)
}

/// Inclusive "a..b" range, or a single "n".
pub fn parse_range(text: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = text.split_once("..") {
        let lo: usize = a.trim().parse().context("range start")?;
        let hi: usize = b.trim().parse().context("range end")?;
        if lo == 0 || hi < lo {
            bail!("range {text:?} must be 1-based and non-decreasing");
        }
        Ok((lo..=hi).collect())
    } else {
        let v: usize = text.trim().parse().context("range value")?;
        if v == 0 {
            bail!("range value must be at least 1");
        }
        Ok(vec![v])
    }
}

/// Echo the effective config (with the command filled in) to
/// `resolved_config.json` under `out_dir`; feeding that file back via
/// `--config` reproduces the run.
pub fn echo_resolved(out_dir: &Path, config: &RunConfig, command: &str) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let mut resolved = config.clone();
    resolved.command = Some(command.to_string());
    resolved.out_dir = Some(out_dir.to_string_lossy().into_owned());
    let path = out_dir.join("resolved_config.json");
    fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&resolved)?))?;
    Ok(path)
}
