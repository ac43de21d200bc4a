//! Dataset persistence: one `t,value` CSV per replicate plus a JSON sidecar
//! carrying the full spec and seed. Values print with Rust's shortest
//! round-trip float formatting, so files are byte-stable across runs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{DgpSpec, SeriesReplicate};
use crate::error::{Error, Result};

/// Sidecar payload: the spec and seed, not the values (those live in the CSV).
#[derive(Serialize)]
struct Sidecar<'a> {
    dgp: &'a DgpSpec,
    replicate_index: usize,
    seed: u64,
}

fn base_name(rep: &SeriesReplicate) -> String {
    format!("{}_rep{:02}", rep.dgp.kind.name(), rep.replicate_index)
}

/// Write every replicate as `<kind>_rep<ii>.csv` + `.json` under `dir`;
/// returns the CSV paths.
pub fn write_replicates(dir: &Path, reps: &[SeriesReplicate]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(reps.len());
    for rep in reps {
        let base = base_name(rep);
        let csv_path = dir.join(format!("{base}.csv"));
        let mut out = String::with_capacity(rep.values.len() * 20);
        out.push_str("t,value\n");
        for (i, v) in rep.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, v));
        }
        fs::write(&csv_path, out)?;

        let mut sidecar = fs::File::create(dir.join(format!("{base}.json")))?;
        serde_json::to_writer_pretty(
            &mut sidecar,
            &Sidecar {
                dgp: &rep.dgp,
                replicate_index: rep.replicate_index,
                seed: rep.seed,
            },
        )?;
        sidecar.write_all(b"\n")?;
        paths.push(csv_path);
    }
    Ok(paths)
}

/// Read a `t,value` CSV back into the value vector.
pub fn read_series_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("t,value") => {}
        other => {
            return Err(Error::Config(format!(
                "{}: expected 't,value' header, got {:?}",
                path.display(),
                other
            )))
        }
    }
    let mut values = Vec::new();
    for (n, line) in lines.enumerate() {
        let (_, v) = line.split_once(',').ok_or_else(|| {
            Error::Config(format!("{}: malformed row {}", path.display(), n + 2))
        })?;
        values.push(v.parse::<f64>().map_err(|e| {
            Error::Config(format!("{}: row {}: {}", path.display(), n + 2, e))
        })?);
    }
    Ok(values)
}
