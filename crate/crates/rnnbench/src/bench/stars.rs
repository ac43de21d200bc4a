//! Star selection: within a guideline row, the yellow star marks the cell
//! with the smallest forecasting error and, among error-tied cells, the
//! smallest empirical complexity; the remaining tied cells earn gray stars.

use serde::{Deserialize, Serialize};

use crate::cells::CellKind;

/// Half a unit in the last reported decimal of the published tables.
pub const DEFAULT_STAR_TOL: f64 = 5e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Star {
    None,
    Gray,
    Yellow,
}

impl Star {
    pub fn csv_label(self) -> &'static str {
        match self {
            Star::None => "",
            Star::Gray => "gray",
            Star::Yellow => "yellow",
        }
    }

    pub fn markdown_label(self) -> &'static str {
        match self {
            Star::None => "",
            Star::Gray => "(*)",
            Star::Yellow => "*",
        }
    }
}

/// One cell's entry in a guideline row.
#[derive(Debug, Clone, Copy)]
pub struct StarCandidate {
    pub cell: CellKind,
    pub rmse: f64,
    pub empirical_complexity: f64,
}

/// Assign stars to a row. Cells within `tol` of the row minimum are tied;
/// the tied cell with the smallest empirical complexity (name-lexicographic
/// on a further tie) turns yellow, the rest of the tied set gray.
pub fn select_stars(row: &[StarCandidate], tol: f64) -> Vec<Star> {
    assert!(!row.is_empty(), "star selection needs at least one cell");
    let min = row
        .iter()
        .map(|c| c.rmse)
        .fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = (0..row.len())
        .filter(|&i| row[i].rmse <= min + tol)
        .collect();
    let yellow = *tied
        .iter()
        .min_by(|&&a, &&b| {
            row[a]
                .empirical_complexity
                .partial_cmp(&row[b].empirical_complexity)
                .expect("finite complexity")
                .then_with(|| row[a].cell.name().cmp(row[b].cell.name()))
        })
        .expect("tied set is non-empty");
    (0..row.len())
        .map(|i| {
            if i == yellow {
                Star::Yellow
            } else if tied.contains(&i) {
                Star::Gray
            } else {
                Star::None
            }
        })
        .collect()
}
