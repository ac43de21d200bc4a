//! Machine-readable cell catalog: kinds, parameter symbols, and complexity
//! terms, as consumed by docs and the report layer.

use std::collections::BTreeMap;

use serde::Serialize;

use super::layout::param_layout;
use super::{CellKind, EXPERIMENT1_CELLS, EXPERIMENT2_CELLS};
use crate::error::Result;

#[derive(Debug, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub experiments: Vec<u8>,
    /// Cell parameter symbols in layout order (readout excluded).
    pub symbols: Vec<String>,
    /// Frozen symbols present in the equations but not trained.
    pub frozen_symbols: Vec<String>,
    /// Complexity formula as term -> coefficient, e.g. {"n_I*n_H": 4, ...}.
    pub complexity_terms: BTreeMap<String, usize>,
    pub weight_matrices: usize,
    pub bias_vectors: usize,
    pub readout_symbols: Vec<String>,
}

pub fn catalog() -> Vec<CatalogEntry> {
    CellKind::all()
        .into_iter()
        .map(|kind| {
            let mut symbols = Vec::new();
            let mut frozen = Vec::new();
            let mut readout_symbols = Vec::new();
            let mut terms: BTreeMap<String, usize> = BTreeMap::new();
            let mut weight_matrices = 0;
            let mut bias_vectors = 0;
            for spec in param_layout(kind) {
                if spec.readout {
                    readout_symbols.push(spec.name.to_string());
                    continue;
                }
                if !spec.trainable {
                    frozen.push(spec.name.to_string());
                    continue;
                }
                symbols.push(spec.name.to_string());
                *terms.entry(spec.term()).or_insert(0) += 1;
                if spec.name.starts_with("W_") {
                    weight_matrices += 1;
                } else {
                    bias_vectors += 1;
                }
            }
            let mut experiments = Vec::new();
            if EXPERIMENT1_CELLS.contains(&kind) {
                experiments.push(1);
            }
            if EXPERIMENT2_CELLS.contains(&kind) {
                experiments.push(2);
            }
            CatalogEntry {
                name: kind.name().to_string(),
                experiments,
                symbols,
                frozen_symbols: frozen,
                complexity_terms: terms,
                weight_matrices,
                bias_vectors,
                readout_symbols,
            }
        })
        .collect()
}

pub fn catalog_json() -> Result<String> {
    Ok(serde_json::to_string_pretty(&catalog())?)
}
