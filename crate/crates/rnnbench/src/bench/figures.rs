//! Per-behavior figure data (CSV) and a rendered grouped-bar SVG, with cells
//! ordered by theoretic complexity as in the published figures.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::report::reference_complexity;
use crate::bench::ExperimentOutcome;
use crate::cells::CellKind;
use crate::dgp::{Behavior, DgpKind};
use crate::error::Result;

const PALETTE: [&str; 6] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2",
];

fn ordered_cells(cells: &[CellKind]) -> Vec<CellKind> {
    let mut ordered = cells.to_vec();
    ordered.sort_by(|a, b| {
        reference_complexity(*a)
            .cmp(&reference_complexity(*b))
            .then_with(|| a.name().cmp(b.name()))
    });
    ordered
}

/// Write `figures/<behavior><suffix>.csv` and `.svg` for every behavior
/// present in the outcome; CSV rows are (cell, dgp, mean_rmse).
pub fn write_figures(
    dir: &Path,
    outcome: &ExperimentOutcome,
    suffix: &str,
) -> Result<Vec<PathBuf>> {
    let fig_dir = dir.join("figures");
    fs::create_dir_all(&fig_dir)?;
    let cells = ordered_cells(&outcome.spec.cells);
    let mut by_pair: BTreeMap<(CellKind, DgpKind), f64> = BTreeMap::new();
    for r in &outcome.results {
        by_pair.insert((r.cell, r.dgp), r.mean_test_rmse);
    }

    let mut written = Vec::new();
    for behavior in Behavior::ALL {
        let dgps: Vec<DgpKind> = behavior
            .dgps()
            .iter()
            .copied()
            .filter(|d| outcome.results.iter().any(|r| r.dgp == *d))
            .collect();
        if dgps.is_empty() {
            continue;
        }
        let mut csv = String::from("cell,dgp,mean_rmse\n");
        let mut bars: Vec<(CellKind, Vec<Option<f64>>)> = Vec::new();
        for cell in &cells {
            let mut values = Vec::new();
            for dgp in &dgps {
                let v = by_pair.get(&(*cell, *dgp)).copied();
                if let Some(v) = v {
                    csv.push_str(&format!("{},{},{}\n", cell.name(), dgp.name(), v));
                }
                values.push(v);
            }
            bars.push((*cell, values));
        }
        let base = format!("{}{}", behavior.label().to_ascii_lowercase(), suffix);
        let csv_path = fig_dir.join(format!("{base}.csv"));
        fs::write(&csv_path, csv)?;
        written.push(csv_path);

        let svg_path = fig_dir.join(format!("{base}.svg"));
        fs::write(&svg_path, render_svg(behavior, &dgps, &bars))?;
        written.push(svg_path);
    }
    Ok(written)
}

fn render_svg(behavior: Behavior, dgps: &[DgpKind], bars: &[(CellKind, Vec<Option<f64>>)]) -> String {
    let margin_left = 60.0;
    let margin_bottom = 70.0;
    let margin_top = 30.0;
    let plot_h = 260.0;
    let group_w = (dgps.len() as f64) * 9.0 + 14.0;
    let plot_w = group_w * bars.len() as f64;
    let width = margin_left + plot_w + 20.0;
    let height = margin_top + plot_h + margin_bottom;

    let max_v = bars
        .iter()
        .flat_map(|(_, vs)| vs.iter().flatten().copied())
        .fold(f64::MIN_POSITIVE, f64::max);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\" font-size=\"10\">\n"
    ));
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"18\" font-size=\"13\">Mean test RMSE by cell ({} behavior)</text>\n",
        margin_left,
        behavior.label()
    ));
    // axes
    let y0 = margin_top + plot_h;
    s.push_str(&format!(
        "<line x1=\"{margin_left:.1}\" y1=\"{y0:.1}\" x2=\"{:.1}\" y2=\"{y0:.1}\" stroke=\"#333\"/>\n",
        margin_left + plot_w
    ));
    s.push_str(&format!(
        "<line x1=\"{margin_left:.1}\" y1=\"{margin_top:.1}\" x2=\"{margin_left:.1}\" y2=\"{y0:.1}\" stroke=\"#333\"/>\n"
    ));
    for tick in 0..=4 {
        let v = max_v * tick as f64 / 4.0;
        let y = y0 - plot_h * tick as f64 / 4.0;
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{:.3}</text>\n",
            margin_left - 4.0,
            y + 3.0,
            v
        ));
    }
    // grouped bars
    for (gi, (cell, values)) in bars.iter().enumerate() {
        let gx = margin_left + gi as f64 * group_w + 7.0;
        for (di, v) in values.iter().enumerate() {
            if let Some(v) = v {
                let h = (v / max_v) * plot_h;
                let x = gx + di as f64 * 9.0;
                s.push_str(&format!(
                    "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"8\" height=\"{h:.1}\" fill=\"{}\"/>\n",
                    y0 - h,
                    PALETTE[di % PALETTE.len()]
                ));
            }
        }
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" transform=\"rotate(-45 {:.1} {:.1})\">{}</text>\n",
            gx + group_w / 2.0 - 7.0,
            y0 + 12.0,
            gx + group_w / 2.0 - 7.0,
            y0 + 12.0,
            cell.name()
        ));
    }
    // legend
    for (di, dgp) in dgps.iter().enumerate() {
        let x = margin_left + di as f64 * 110.0;
        let y = height - 12.0;
        s.push_str(&format!(
            "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"8\" height=\"8\" fill=\"{}\"/>\n",
            y - 8.0,
            PALETTE[di % PALETTE.len()]
        ));
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{y:.1}\">{}</text>\n",
            x + 11.0,
            dgp.label()
        ));
    }
    s.push_str("</svg>\n");
    s
}
