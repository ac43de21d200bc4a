//! The 31 evaluated recurrent cell structures.
//!
//! Twelve cells are single-alteration variants of LSTM-Vanilla (experiment
//! one); twenty cover the wider structure space from ELMAN to the SLIM
//! families (experiment two); LSTM-Vanilla sits in both rosters. Parameter
//! layouts are the source of truth: initialization, stepping, counting and
//! the catalog all read the same table.

mod catalog;
mod layout;
mod step;

pub use catalog::{catalog, catalog_json, CatalogEntry};
pub use layout::{init_params, param_count, param_layout, ComplexityCount, Init, ParamSpec};
pub use step::{
    bind, bind_from_vars, init_state, readout, step, step_traced, unroll, BoundParams, CellState,
    StepTrace,
};

use serde::{Deserialize, Serialize};

use crate::tensor::Tensor;

/// Identity of a cell structure. Serialized forms use the canonical
/// published names (`LSTM-VANILLA`, `MGU-SLIM3`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CellKind {
    // experiment 1: LSTM-Vanilla and its single-alteration variants
    #[serde(rename = "NIG")]
    Nig,
    #[serde(rename = "NFG")]
    Nfg,
    #[serde(rename = "NOG")]
    Nog,
    #[serde(rename = "CIFG")]
    Cifg,
    #[serde(rename = "FB1")]
    Fb1,
    #[serde(rename = "NIAF")]
    Niaf,
    #[serde(rename = "NFAF")]
    Nfaf,
    #[serde(rename = "NOAF")]
    Noaf,
    #[serde(rename = "NCAF")]
    Ncaf,
    #[serde(rename = "LSTM-VANILLA")]
    LstmVanilla,
    #[serde(rename = "PC")]
    Pc,
    #[serde(rename = "FGR")]
    Fgr,
    // experiment 2 additions
    #[serde(rename = "ELMAN")]
    Elman,
    #[serde(rename = "IRNN")]
    Irnn,
    #[serde(rename = "JORDAN")]
    Jordan,
    #[serde(rename = "MRNN")]
    Mrnn,
    #[serde(rename = "SCRN")]
    Scrn,
    #[serde(rename = "MGU-SLIM3")]
    MguSlim3,
    #[serde(rename = "MGU-SLIM2")]
    MguSlim2,
    #[serde(rename = "MGU-SLIM1")]
    MguSlim1,
    #[serde(rename = "MGU")]
    Mgu,
    #[serde(rename = "GRU-SLIM3")]
    GruSlim3,
    #[serde(rename = "GRU-SLIM2")]
    GruSlim2,
    #[serde(rename = "GRU-SLIM1")]
    GruSlim1,
    #[serde(rename = "MUT1")]
    Mut1,
    #[serde(rename = "MUT2")]
    Mut2,
    #[serde(rename = "MUT3")]
    Mut3,
    #[serde(rename = "GRU")]
    Gru,
    #[serde(rename = "LSTM-SLIM3")]
    LstmSlim3,
    #[serde(rename = "LSTM-SLIM2")]
    LstmSlim2,
    #[serde(rename = "LSTM-SLIM1")]
    LstmSlim1,
}

/// Experiment-1 roster in the published column order.
pub const EXPERIMENT1_CELLS: [CellKind; 12] = [
    CellKind::Nig,
    CellKind::Nfg,
    CellKind::Nog,
    CellKind::Cifg,
    CellKind::Fb1,
    CellKind::Niaf,
    CellKind::Nfaf,
    CellKind::Noaf,
    CellKind::Ncaf,
    CellKind::LstmVanilla,
    CellKind::Pc,
    CellKind::Fgr,
];

/// Experiment-2 roster in the published column order.
pub const EXPERIMENT2_CELLS: [CellKind; 20] = [
    CellKind::Elman,
    CellKind::Irnn,
    CellKind::Jordan,
    CellKind::Mrnn,
    CellKind::Scrn,
    CellKind::MguSlim3,
    CellKind::MguSlim2,
    CellKind::MguSlim1,
    CellKind::Mgu,
    CellKind::GruSlim3,
    CellKind::GruSlim2,
    CellKind::GruSlim1,
    CellKind::Mut1,
    CellKind::Mut2,
    CellKind::Mut3,
    CellKind::Gru,
    CellKind::LstmSlim3,
    CellKind::LstmSlim2,
    CellKind::LstmSlim1,
    CellKind::LstmVanilla,
];

impl CellKind {
    /// All 31 distinct kinds (LSTM-Vanilla listed once).
    pub fn all() -> Vec<CellKind> {
        let mut v: Vec<CellKind> = EXPERIMENT1_CELLS.to_vec();
        v.extend(
            EXPERIMENT2_CELLS
                .iter()
                .copied()
                .filter(|k| *k != CellKind::LstmVanilla),
        );
        v
    }

    /// Canonical name used by the CLI, configs and reports.
    pub fn name(self) -> &'static str {
        match self {
            CellKind::Nig => "NIG",
            CellKind::Nfg => "NFG",
            CellKind::Nog => "NOG",
            CellKind::Cifg => "CIFG",
            CellKind::Fb1 => "FB1",
            CellKind::Niaf => "NIAF",
            CellKind::Nfaf => "NFAF",
            CellKind::Noaf => "NOAF",
            CellKind::Ncaf => "NCAF",
            CellKind::LstmVanilla => "LSTM-VANILLA",
            CellKind::Pc => "PC",
            CellKind::Fgr => "FGR",
            CellKind::Elman => "ELMAN",
            CellKind::Irnn => "IRNN",
            CellKind::Jordan => "JORDAN",
            CellKind::Mrnn => "MRNN",
            CellKind::Scrn => "SCRN",
            CellKind::MguSlim3 => "MGU-SLIM3",
            CellKind::MguSlim2 => "MGU-SLIM2",
            CellKind::MguSlim1 => "MGU-SLIM1",
            CellKind::Mgu => "MGU",
            CellKind::GruSlim3 => "GRU-SLIM3",
            CellKind::GruSlim2 => "GRU-SLIM2",
            CellKind::GruSlim1 => "GRU-SLIM1",
            CellKind::Mut1 => "MUT1",
            CellKind::Mut2 => "MUT2",
            CellKind::Mut3 => "MUT3",
            CellKind::Gru => "GRU",
            CellKind::LstmSlim3 => "LSTM-SLIM3",
            CellKind::LstmSlim2 => "LSTM-SLIM2",
            CellKind::LstmSlim1 => "LSTM-SLIM1",
        }
    }

    pub fn parse(s: &str) -> Option<CellKind> {
        let norm = s.trim().to_ascii_uppercase().replace('_', "-");
        CellKind::all().into_iter().find(|k| k.name() == norm)
    }

    pub fn in_experiment(self, experiment: u8) -> bool {
        match experiment {
            1 => EXPERIMENT1_CELLS.contains(&self),
            2 => EXPERIMENT2_CELLS.contains(&self),
            _ => false,
        }
    }
}

/// Width configuration of one cell instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellDims {
    /// Inputs per step.
    pub n_i: usize,
    /// Hidden width.
    pub n_h: usize,
    /// Context width (SCRN only); defaults to `n_h`.
    pub n_s: usize,
    /// Output width.
    pub n_o: usize,
    /// SCRN context leak rate.
    pub scrn_alpha: f64,
}

impl CellDims {
    pub fn new(n_i: usize, n_h: usize, n_o: usize) -> Self {
        assert!(n_i >= 1 && n_h >= 1 && n_o >= 1, "cell dims must be >= 1");
        CellDims {
            n_i,
            n_h,
            n_s: n_h,
            n_o,
            scrn_alpha: 0.95,
        }
    }

    /// Scalar-in, scalar-out forecasting shape: lags enter one per step.
    pub fn forecasting(n_h: usize) -> Self {
        CellDims::new(1, n_h, 1)
    }
}

/// A named learnable (or frozen) tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub tensor: Tensor,
    pub trainable: bool,
    /// Readout parameters train but stay outside the cell complexity count.
    pub readout: bool,
}

/// Full parameter set of one cell instance, in layout order.
#[derive(Debug, Clone, PartialEq)]
pub struct CellParams {
    pub kind: CellKind,
    pub dims: CellDims,
    params: Vec<Parameter>,
}

impl CellParams {
    pub(crate) fn from_parts(kind: CellKind, dims: CellDims, params: Vec<Parameter>) -> Self {
        CellParams { kind, dims, params }
    }

    pub fn get(&self, name: &str) -> Option<&Parameter> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Parameter> {
        self.params.iter_mut().find(|p| p.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Parameter> {
        self.params.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Parameter> {
        self.params.iter_mut()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total trainable scalar count excluding the readout layer.
    pub fn trainable_cell_scalars(&self) -> usize {
        self.params
            .iter()
            .filter(|p| p.trainable && !p.readout)
            .map(|p| p.tensor.len())
            .sum()
    }
}
