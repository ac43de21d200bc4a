//! Report emission: run records, guideline tables, the cross-experiment
//! summary, figure data, and the failure manifest. All output is
//! deterministic for identical inputs; wall times never reach these files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::figures::write_figures;
use crate::bench::stars::{select_stars, Star, StarCandidate};
use crate::bench::{BenchmarkResult, ExperimentOutcome};
use crate::cells::{param_count, CellDims, CellKind};
use crate::dgp::{Behavior, DgpKind};
use crate::error::{Error, Result};

/// Reference dims for cross-cell complexity comparisons where no tuned
/// hidden width exists (summary recommendations, figure ordering).
pub(crate) const REFERENCE_HIDDEN: usize = 10;

pub(crate) fn reference_complexity(cell: CellKind) -> usize {
    param_count(cell, &CellDims::forecasting(REFERENCE_HIDDEN)).params
}

/// One behavior line of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub behavior: Behavior,
    pub exp1: Option<(CellKind, f64)>,
    pub exp2: Option<(CellKind, f64)>,
    pub recommended: CellKind,
}

/// Recommend across experiments: strictly lower RMSE wins; an exact tie
/// goes to the structurally simpler cell.
pub fn recommend(exp1: Option<(CellKind, f64)>, exp2: Option<(CellKind, f64)>) -> CellKind {
    match (exp1, exp2) {
        (Some((c1, r1)), Some((c2, r2))) => {
            if r1 < r2 {
                c1
            } else if r2 < r1 {
                c2
            } else {
                let (k1, k2) = (reference_complexity(c1), reference_complexity(c2));
                if k1 < k2 || (k1 == k2 && c1.name() <= c2.name()) {
                    c1
                } else {
                    c2
                }
            }
        }
        (Some((c, _)), None) => c,
        (None, Some((c, _))) => c,
        (None, None) => panic!("summary row needs at least one experiment"),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write `summary.csv` and `summary.md` from prepared rows.
pub fn write_summary(dir: &Path, rows: &[SummaryRow]) -> Result<Vec<PathBuf>> {
    let mut csv = String::from("behavior,exp1_cell,exp1_rmse,exp2_cell,exp2_rmse,recommended\n");
    let mut md = String::from(
        "| Behavior | Exp. 1 best | RMSE | Exp. 2 best | RMSE | Recommended |\n\
         |---|---|---|---|---|---|\n",
    );
    for row in rows {
        let (c1, r1) = row
            .exp1
            .map(|(c, r)| (c.name().to_string(), Some(r)))
            .unwrap_or_default();
        let (c2, r2) = row
            .exp2
            .map(|(c, r)| (c.name().to_string(), Some(r)))
            .unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.behavior.label(),
            c1,
            fmt_opt(r1),
            c2,
            fmt_opt(r2),
            row.recommended.name()
        ));
        md.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            row.behavior.label(),
            c1,
            fmt_opt(r1),
            c2,
            fmt_opt(r2),
            row.recommended.name()
        ));
    }
    let csv_path = dir.join("summary.csv");
    let md_path = dir.join("summary.md");
    fs::write(&csv_path, csv)?;
    fs::write(&md_path, md)?;
    Ok(vec![csv_path, md_path])
}

/// Per-cell map of (dgp -> mean test RMSE) for one experiment outcome.
fn per_cell_dgp_means(
    results: &[BenchmarkResult],
) -> BTreeMap<CellKind, BTreeMap<DgpKind, f64>> {
    let mut map: BTreeMap<CellKind, BTreeMap<DgpKind, f64>> = BTreeMap::new();
    for r in results {
        map.entry(r.cell).or_default().insert(r.dgp, r.mean_test_rmse);
    }
    map
}

/// DGPs of `behavior` that appear anywhere in the results.
fn present_dgps(results: &[BenchmarkResult], behavior: Behavior) -> Vec<DgpKind> {
    behavior
        .dgps()
        .iter()
        .copied()
        .filter(|d| results.iter().any(|r| r.dgp == *d))
        .collect()
}

/// Behavior mean over the DGPs present in this run, per cell; a cell must
/// cover every present DGP of the behavior to get a mean.
fn behavior_means_present(
    results: &[BenchmarkResult],
    cells: &[CellKind],
    behavior: Behavior,
) -> BTreeMap<CellKind, f64> {
    let dgps = present_dgps(results, behavior);
    let by_cell = per_cell_dgp_means(results);
    let mut out = BTreeMap::new();
    if dgps.is_empty() {
        return out;
    }
    for cell in cells {
        if let Some(per_dgp) = by_cell.get(cell) {
            if dgps.iter().all(|d| per_dgp.contains_key(d)) {
                let sum: f64 = dgps.iter().map(|d| per_dgp[d]).sum();
                out.insert(*cell, sum / dgps.len() as f64);
            }
        }
    }
    out
}

struct GuidelineRow {
    behavior: Behavior,
    label: String,
    /// Aligned with the cell roster; `None` when the cell has no data.
    entries: Vec<Option<StarCandidate>>,
}

fn guideline_rows(outcome: &ExperimentOutcome) -> Vec<GuidelineRow> {
    let cells = &outcome.spec.cells;
    let by_cell = per_cell_dgp_means(&outcome.results);
    let complexity: BTreeMap<(CellKind, DgpKind), f64> = outcome
        .results
        .iter()
        .map(|r| ((r.cell, r.dgp), r.empirical_complexity as f64))
        .collect();

    let mut rows = Vec::new();
    for behavior in Behavior::ALL {
        let dgps = present_dgps(&outcome.results, behavior);
        if dgps.is_empty() {
            continue;
        }
        for dgp in &dgps {
            let entries = cells
                .iter()
                .map(|cell| {
                    by_cell.get(cell).and_then(|m| m.get(dgp)).map(|rmse| StarCandidate {
                        cell: *cell,
                        rmse: *rmse,
                        empirical_complexity: complexity[&(*cell, *dgp)],
                    })
                })
                .collect();
            rows.push(GuidelineRow {
                behavior,
                label: dgp.label().to_string(),
                entries,
            });
        }
        // behavior mean row: mean RMSE and mean empirical complexity over
        // the behavior's processes
        let means = behavior_means_present(&outcome.results, cells, behavior);
        let entries = cells
            .iter()
            .map(|cell| {
                means.get(cell).map(|rmse| {
                    let k = dgps
                        .iter()
                        .map(|d| complexity[&(*cell, *d)])
                        .sum::<f64>()
                        / dgps.len() as f64;
                    StarCandidate {
                        cell: *cell,
                        rmse: *rmse,
                        empirical_complexity: k,
                    }
                })
            })
            .collect();
        rows.push(GuidelineRow {
            behavior,
            label: "Mean".to_string(),
            entries,
        });
    }
    rows
}

fn stars_for_row(row: &GuidelineRow, tol: f64) -> Vec<Star> {
    let present: Vec<StarCandidate> = row.entries.iter().flatten().copied().collect();
    if present.is_empty() {
        return vec![Star::None; row.entries.len()];
    }
    let starred = select_stars(&present, tol);
    let mut by_cell: BTreeMap<CellKind, Star> = BTreeMap::new();
    for (cand, star) in present.iter().zip(starred) {
        by_cell.insert(cand.cell, star);
    }
    row.entries
        .iter()
        .map(|e| match e {
            Some(c) => by_cell[&c.cell],
            None => Star::None,
        })
        .collect()
}

fn write_guideline(
    dir: &Path,
    outcome: &ExperimentOutcome,
    tol: f64,
) -> Result<Vec<PathBuf>> {
    let cells = &outcome.spec.cells;
    let rows = guideline_rows(outcome);

    let mut csv = String::from("behavior,dgp");
    for cell in cells {
        csv.push(',');
        csv.push_str(cell.name());
    }
    csv.push('\n');

    let mut md = String::from("| Behavior | DGP |");
    for cell in cells {
        md.push_str(&format!(" {} |", cell.name()));
    }
    md.push('\n');
    md.push_str("|---|---|");
    md.push_str(&"---|".repeat(cells.len()));
    md.push('\n');

    for row in &rows {
        let stars = stars_for_row(row, tol);
        csv.push_str(&format!("{},{}", row.behavior.label(), row.label));
        md.push_str(&format!("| {} | {} |", row.behavior.label(), row.label));
        for star in &stars {
            csv.push(',');
            csv.push_str(star.csv_label());
            md.push_str(&format!(" {} |", star.markdown_label()));
        }
        csv.push('\n');
        md.push('\n');
    }
    md.push_str("\n`*` smallest error and smallest empirical complexity; `(*)` error-tied, heavier.\n");

    let n = outcome.spec.experiment;
    let csv_path = dir.join(format!("guideline_exp{n}.csv"));
    let md_path = dir.join(format!("guideline_exp{n}.md"));
    fs::write(&csv_path, csv)?;
    fs::write(&md_path, md)?;
    Ok(vec![csv_path, md_path])
}

fn best_cell_for_behavior(
    outcome: &ExperimentOutcome,
    behavior: Behavior,
) -> Option<(CellKind, f64)> {
    let means = behavior_means_present(&outcome.results, &outcome.spec.cells, behavior);
    means
        .iter()
        .min_by(|(ca, ra), (cb, rb)| {
            ra.partial_cmp(rb)
                .expect("finite behavior means")
                .then_with(|| reference_complexity(**ca).cmp(&reference_complexity(**cb)))
                .then_with(|| ca.name().cmp(cb.name()))
        })
        .map(|(c, r)| (*c, *r))
}

/// Write the full report file set for one or two experiment outcomes.
pub fn emit_report(dir: &Path, outcomes: &[&ExperimentOutcome], tol: f64) -> Result<Vec<PathBuf>> {
    if outcomes.is_empty() || outcomes.iter().all(|o| o.results.is_empty()) {
        return Err(Error::Experiment(
            "no results to report; refusing to emit an empty report".into(),
        ));
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    // results.jsonl over all outcomes, in order
    let jsonl_path = dir.join("results.jsonl");
    let mut jsonl = String::new();
    for outcome in outcomes {
        for record in &outcome.records {
            jsonl.push_str(&serde_json::to_string(record)?);
            jsonl.push('\n');
        }
    }
    fs::write(&jsonl_path, jsonl)?;
    written.push(jsonl_path);

    // failure manifest
    let failures: Vec<_> = outcomes.iter().flat_map(|o| o.failures.iter()).collect();
    let failures_path = dir.join("failures.json");
    fs::write(&failures_path, serde_json::to_string_pretty(&failures)?)?;
    written.push(failures_path);

    for outcome in outcomes {
        if !outcome.results.is_empty() {
            written.extend(write_guideline(dir, outcome, tol)?);
            let suffix = if outcomes.len() > 1 {
                format!("_exp{}", outcome.spec.experiment)
            } else {
                String::new()
            };
            written.extend(write_figures(dir, outcome, &suffix)?);
        }
    }

    // cross-experiment summary
    let find = |n: u8| outcomes.iter().find(|o| o.spec.experiment == n);
    let mut rows = Vec::new();
    for behavior in Behavior::ALL {
        let exp1 = find(1).and_then(|o| best_cell_for_behavior(o, behavior));
        let exp2 = find(2).and_then(|o| best_cell_for_behavior(o, behavior));
        if exp1.is_none() && exp2.is_none() {
            continue;
        }
        rows.push(SummaryRow {
            behavior,
            exp1,
            exp2,
            recommended: recommend(exp1, exp2),
        });
    }
    if !rows.is_empty() {
        written.extend(write_summary(dir, &rows)?);
    }
    Ok(written)
}
