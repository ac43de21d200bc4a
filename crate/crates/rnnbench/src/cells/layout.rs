//! Parameter layout table: which tensors each cell owns, their symbolic
//! shapes, and how they initialize. Counting and allocation both read this
//! table, so the complexity numbers always describe what actually trains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{CellDims, CellKind, CellParams, Parameter};
use crate::tensor::Tensor;

/// Symbolic dimension resolved against [`CellDims`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dim {
    One,
    In,
    Hid,
    Ctx,
    Out,
}

impl Dim {
    pub fn resolve(self, dims: &CellDims) -> usize {
        match self {
            Dim::One => 1,
            Dim::In => dims.n_i,
            Dim::Hid => dims.n_h,
            Dim::Ctx => dims.n_s,
            Dim::Out => dims.n_o,
        }
    }

    fn symbol(self) -> Option<&'static str> {
        match self {
            Dim::One => None,
            Dim::In => Some("n_I"),
            Dim::Hid => Some("n_H"),
            Dim::Ctx => Some("n_S"),
            Dim::Out => Some("n_O"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Init {
    Glorot,
    Zero,
    One,
    Identity,
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub rows: Dim,
    pub cols: Dim,
    pub trainable: bool,
    pub init: Init,
    pub readout: bool,
}

impl ParamSpec {
    pub fn shape(&self, dims: &CellDims) -> (usize, usize) {
        (self.rows.resolve(dims), self.cols.resolve(dims))
    }

    pub fn size(&self, dims: &CellDims) -> usize {
        let (r, c) = self.shape(dims);
        r * c
    }

    /// Algebraic size of this tensor, e.g. `n_I*n_H`, `n_H^2`, `n_H`.
    pub fn term(&self) -> String {
        match (self.rows.symbol(), self.cols.symbol()) {
            (Some(a), Some(b)) if a == b => format!("{a}^2"),
            (Some(a), Some(b)) => format!("{a}*{b}"),
            (None, Some(b)) => b.to_string(),
            (Some(a), None) => a.to_string(),
            (None, None) => "1".to_string(),
        }
    }
}

fn mat(name: &'static str, rows: Dim, cols: Dim) -> ParamSpec {
    ParamSpec {
        name,
        rows,
        cols,
        trainable: true,
        init: Init::Glorot,
        readout: false,
    }
}

fn bias(name: &'static str, cols: Dim) -> ParamSpec {
    ParamSpec {
        name,
        rows: Dim::One,
        cols,
        trainable: true,
        init: Init::Zero,
        readout: false,
    }
}

/// Gate parameterization shared by the LSTM/GRU/MGU families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum GateStyle {
    /// `x.W_x* + h.W_h* + b_*`
    Full,
    /// `h.W_h* + b_*`
    Slim1,
    /// `h.W_h*`
    Slim2,
    /// `b_*`
    Slim3,
}

fn gate(style: GateStyle, w_x: &'static str, w_h: &'static str, b: &'static str) -> Vec<ParamSpec> {
    match style {
        GateStyle::Full => vec![
            mat(w_x, Dim::In, Dim::Hid),
            mat(w_h, Dim::Hid, Dim::Hid),
            bias(b, Dim::Hid),
        ],
        GateStyle::Slim1 => vec![mat(w_h, Dim::Hid, Dim::Hid), bias(b, Dim::Hid)],
        GateStyle::Slim2 => vec![mat(w_h, Dim::Hid, Dim::Hid)],
        GateStyle::Slim3 => vec![bias(b, Dim::Hid)],
    }
}

pub(super) fn lstm_gate_style(kind: CellKind) -> GateStyle {
    match kind {
        CellKind::LstmSlim1 => GateStyle::Slim1,
        CellKind::LstmSlim2 => GateStyle::Slim2,
        CellKind::LstmSlim3 => GateStyle::Slim3,
        _ => GateStyle::Full,
    }
}

pub(super) fn gru_gate_style(kind: CellKind) -> GateStyle {
    match kind {
        CellKind::GruSlim1 => GateStyle::Slim1,
        CellKind::GruSlim2 => GateStyle::Slim2,
        CellKind::GruSlim3 => GateStyle::Slim3,
        _ => GateStyle::Full,
    }
}

pub(super) fn mgu_gate_style(kind: CellKind) -> GateStyle {
    match kind {
        CellKind::MguSlim1 => GateStyle::Slim1,
        CellKind::MguSlim2 => GateStyle::Slim2,
        CellKind::MguSlim3 => GateStyle::Slim3,
        _ => GateStyle::Full,
    }
}

/// Cell-owned tensors for `kind`, followed by the shared readout
/// (`W_hy`, `b_y`, plus `W_sy` for SCRN).
pub fn param_layout(kind: CellKind) -> Vec<ParamSpec> {
    use CellKind::*;
    let mut specs: Vec<ParamSpec> = Vec::new();

    let lstm_candidate = [
        mat("W_xc~", Dim::In, Dim::Hid),
        mat("W_hc~", Dim::Hid, Dim::Hid),
        bias("b_c~", Dim::Hid),
    ];
    let gru_candidate = [
        mat("W_xh~", Dim::In, Dim::Hid),
        mat("W_hh~", Dim::Hid, Dim::Hid),
        bias("b_h~", Dim::Hid),
    ];

    match kind {
        LstmVanilla | Niaf | Nfaf | Noaf | Ncaf | Fb1 | Pc | Fgr | LstmSlim1 | LstmSlim2
        | LstmSlim3 => {
            let style = lstm_gate_style(kind);
            specs.extend(lstm_candidate);
            specs.extend(gate(style, "W_xi", "W_hi", "b_i"));
            specs.extend(gate(style, "W_xf", "W_hf", "b_f"));
            specs.extend(gate(style, "W_xo", "W_ho", "b_o"));
            if kind == Fb1 {
                let b_f = specs.iter_mut().find(|s| s.name == "b_f").unwrap();
                b_f.trainable = false;
                b_f.init = Init::One;
            }
            if kind == Pc {
                specs.push(mat("W_ci", Dim::Hid, Dim::Hid));
                specs.push(mat("W_cf", Dim::Hid, Dim::Hid));
                specs.push(mat("W_co", Dim::Hid, Dim::Hid));
            }
            if kind == Fgr {
                for name in [
                    "W_ii", "W_fi", "W_oi", "W_if", "W_ff", "W_of", "W_io", "W_fo", "W_oo",
                ] {
                    specs.push(mat(name, Dim::Hid, Dim::Hid));
                }
            }
        }
        Nig => {
            specs.extend(lstm_candidate);
            specs.extend(gate(GateStyle::Full, "W_xf", "W_hf", "b_f"));
            specs.extend(gate(GateStyle::Full, "W_xo", "W_ho", "b_o"));
        }
        Nfg => {
            specs.extend(lstm_candidate);
            specs.extend(gate(GateStyle::Full, "W_xi", "W_hi", "b_i"));
            specs.extend(gate(GateStyle::Full, "W_xo", "W_ho", "b_o"));
        }
        Nog => {
            specs.extend(lstm_candidate);
            specs.extend(gate(GateStyle::Full, "W_xi", "W_hi", "b_i"));
            specs.extend(gate(GateStyle::Full, "W_xf", "W_hf", "b_f"));
        }
        Cifg => {
            specs.extend(lstm_candidate);
            specs.extend(gate(GateStyle::Full, "W_xi", "W_hi", "b_i"));
            specs.extend(gate(GateStyle::Full, "W_xo", "W_ho", "b_o"));
        }
        Gru | GruSlim1 | GruSlim2 | GruSlim3 => {
            let style = gru_gate_style(kind);
            specs.extend(gate(style, "W_xu", "W_hu", "b_u"));
            specs.extend(gate(style, "W_xr", "W_hr", "b_r"));
            specs.extend(gru_candidate);
        }
        Mut1 => {
            specs.push(mat("W_xu", Dim::In, Dim::Hid));
            specs.push(bias("b_u", Dim::Hid));
            specs.extend(gate(GateStyle::Full, "W_xr", "W_hr", "b_r"));
            // candidate takes tanh(x) directly: no W_xh~
            specs.push(mat("W_hh~", Dim::Hid, Dim::Hid));
            specs.push(bias("b_h~", Dim::Hid));
        }
        Mut2 => {
            specs.extend(gate(GateStyle::Full, "W_xu", "W_hu", "b_u"));
            // relevance gate takes raw x directly: no W_xr
            specs.push(mat("W_hr", Dim::Hid, Dim::Hid));
            specs.push(bias("b_r", Dim::Hid));
            specs.extend(gru_candidate);
        }
        Mut3 => {
            specs.extend(gate(GateStyle::Full, "W_xu", "W_hu", "b_u"));
            specs.extend(gate(GateStyle::Full, "W_xr", "W_hr", "b_r"));
            specs.extend(gru_candidate);
        }
        Mgu | MguSlim1 | MguSlim2 | MguSlim3 => {
            let style = mgu_gate_style(kind);
            specs.extend(gate(style, "W_xf", "W_hf", "b_f"));
            specs.extend(gru_candidate);
        }
        Elman => {
            specs.push(mat("W_xh", Dim::In, Dim::Hid));
            specs.push(mat("W_hh", Dim::Hid, Dim::Hid));
            specs.push(bias("b_h", Dim::Hid));
        }
        Irnn => {
            specs.push(mat("W_xh", Dim::In, Dim::Hid));
            let mut w_hh = mat("W_hh", Dim::Hid, Dim::Hid);
            w_hh.init = Init::Identity;
            specs.push(w_hh);
            specs.push(bias("b_h", Dim::Hid));
        }
        Jordan => {
            specs.push(mat("W_xh", Dim::In, Dim::Hid));
            specs.push(mat("W_yh", Dim::Out, Dim::Hid));
            specs.push(bias("b_h", Dim::Hid));
        }
        Mrnn => {
            specs.push(mat("W_xh", Dim::In, Dim::Hid));
            specs.push(mat("W_hh", Dim::Hid, Dim::Hid));
            specs.push(mat("W_yh", Dim::Out, Dim::Hid));
            specs.push(bias("b_h", Dim::Hid));
        }
        Scrn => {
            specs.push(mat("W_xs", Dim::In, Dim::Ctx));
            specs.push(mat("W_xh", Dim::In, Dim::Hid));
            specs.push(mat("W_hh", Dim::Hid, Dim::Hid));
            specs.push(mat("W_sh", Dim::Ctx, Dim::Hid));
            specs.push(bias("b_h", Dim::Hid));
        }
    }

    let mut w_hy = mat("W_hy", Dim::Hid, Dim::Out);
    w_hy.readout = true;
    specs.push(w_hy);
    if kind == Scrn {
        let mut w_sy = mat("W_sy", Dim::Ctx, Dim::Out);
        w_sy.readout = true;
        specs.push(w_sy);
    }
    let mut b_y = bias("b_y", Dim::Out);
    b_y.readout = true;
    specs.push(b_y);

    specs
}

/// Trainable cell-parameter totals, excluding the readout layer and frozen
/// tensors (so FB1 counts three bias vectors).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComplexityCount {
    pub params: usize,
    pub weight_matrices: usize,
    pub bias_vectors: usize,
}

pub fn param_count(kind: CellKind, dims: &CellDims) -> ComplexityCount {
    let mut count = ComplexityCount {
        params: 0,
        weight_matrices: 0,
        bias_vectors: 0,
    };
    for spec in param_layout(kind) {
        if spec.readout || !spec.trainable {
            continue;
        }
        count.params += spec.size(dims);
        if spec.name.starts_with("W_") {
            count.weight_matrices += 1;
        } else {
            count.bias_vectors += 1;
        }
    }
    count
}

/// Materialize parameters: Glorot-uniform weights, zero biases, with the
/// published exceptions (IRNN identity recurrence, FB1 frozen unit forget
/// bias). One seeded stream in layout order keeps this reproducible.
pub fn init_params(kind: CellKind, dims: &CellDims, seed: u64) -> CellParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = Vec::new();
    for spec in param_layout(kind) {
        let (rows, cols) = spec.shape(dims);
        let tensor = match spec.init {
            Init::Glorot => {
                let a = (6.0 / (rows + cols) as f64).sqrt();
                let data = (0..rows * cols)
                    .map(|_| rng.gen::<f64>() * 2.0 * a - a)
                    .collect();
                Tensor::from_vec(rows, cols, data)
            }
            Init::Zero => Tensor::zeros(rows, cols),
            Init::One => Tensor::filled(rows, cols, 1.0),
            Init::Identity => {
                debug_assert_eq!(rows, cols);
                Tensor::identity(rows)
            }
        };
        params.push(Parameter {
            name: spec.name.to_string(),
            tensor,
            trainable: spec.trainable,
            readout: spec.readout,
        });
    }
    CellParams::from_parts(kind, *dims, params)
}
