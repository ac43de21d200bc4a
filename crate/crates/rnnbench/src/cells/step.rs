//! Cell forward passes recorded on the autodiff tape.
//!
//! States are row-batched: `h`, `c`, `s` are `B x width` tensors so one tape
//! can run a whole mini-batch of windows; `B = 1` recovers the single-sequence
//! shape. Gates follow the published equation sets verbatim, including the
//! asymmetric MUT variants and the bias-only SLIM3 gates.

use super::layout::{gru_gate_style, lstm_gate_style, mgu_gate_style, GateStyle};
use super::{CellDims, CellKind, CellParams};
use crate::autodiff::{Tape, Var};
use crate::error::Result;
use crate::tensor::Tensor;

/// Cell parameters registered as tape leaves for one forward/backward pass.
pub struct BoundParams {
    pub kind: CellKind,
    pub dims: CellDims,
    vars: Vec<(String, Var, bool)>,
}

/// Register every parameter of `params` on `tape`, in layout order.
pub fn bind(tape: &mut Tape, params: &CellParams) -> BoundParams {
    let vars = params
        .iter()
        .map(|p| (p.name.clone(), tape.leaf(p.tensor.clone()), p.trainable))
        .collect();
    BoundParams {
        kind: params.kind,
        dims: params.dims,
        vars,
    }
}

/// Wrap already-registered tape vars as a parameter binding, in layout
/// order. Lets gradient checkers own the leaves they perturb.
pub fn bind_from_vars(kind: CellKind, dims: CellDims, vars: &[Var]) -> BoundParams {
    let layout = super::layout::param_layout(kind);
    assert_eq!(layout.len(), vars.len(), "var count must match the layout");
    BoundParams {
        kind,
        dims,
        vars: layout
            .iter()
            .zip(vars)
            .map(|(spec, var)| (spec.name.to_string(), *var, spec.trainable))
            .collect(),
    }
}

impl BoundParams {
    pub fn var(&self, name: &str) -> Var {
        self.vars
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, v, _)| *v)
            .unwrap_or_else(|| panic!("{} has no parameter {name}", self.kind.name()))
    }

    /// `(name, var, trainable)` triples in layout order.
    pub fn entries(&self) -> &[(String, Var, bool)] {
        &self.vars
    }
}

/// Recurrent carry between steps. Unused components stay `None`.
#[derive(Debug, Clone)]
pub struct CellState {
    pub h: Var,
    pub c: Option<Var>,
    pub s: Option<Var>,
    pub y_prev: Option<Var>,
    /// Previous (input, forget, output) gate values, FGR only.
    pub gate_prev: Option<[Var; 3]>,
}

/// One gate activation captured during a step.
#[derive(Debug, Clone, Copy)]
pub struct GateTrace {
    pub name: &'static str,
    pub var: Var,
    /// False for the linearized NIAF/NFAF/NOAF gates.
    pub sigmoid: bool,
}

/// Intermediate values of one step, for inspection and tests.
#[derive(Debug, Clone, Default)]
pub struct StepTrace {
    pub gates: Vec<GateTrace>,
    pub candidate: Option<Var>,
}

fn uses_cell_state(kind: CellKind) -> bool {
    use CellKind::*;
    matches!(
        kind,
        LstmVanilla
            | Nig
            | Nfg
            | Nog
            | Cifg
            | Fb1
            | Niaf
            | Nfaf
            | Noaf
            | Ncaf
            | Pc
            | Fgr
            | LstmSlim1
            | LstmSlim2
            | LstmSlim3
    )
}

fn is_lstm_family(kind: CellKind) -> bool {
    uses_cell_state(kind)
}

fn is_gru_family(kind: CellKind) -> bool {
    use CellKind::*;
    matches!(
        kind,
        Gru | GruSlim1 | GruSlim2 | GruSlim3 | Mut1 | Mut2 | Mut3
    )
}

fn is_mgu_family(kind: CellKind) -> bool {
    use CellKind::*;
    matches!(kind, Mgu | MguSlim1 | MguSlim2 | MguSlim3)
}

/// Fresh all-zero state sized for a batch of `batch` sequences.
pub fn init_state(tape: &mut Tape, bound: &BoundParams, batch: usize) -> CellState {
    let n_h = bound.dims.n_h;
    let zero_h = tape.leaf(Tensor::zeros(batch, n_h));
    let c = uses_cell_state(bound.kind).then(|| tape.leaf(Tensor::zeros(batch, n_h)));
    let s = (bound.kind == CellKind::Scrn)
        .then(|| tape.leaf(Tensor::zeros(batch, bound.dims.n_s)));
    let y_prev = matches!(bound.kind, CellKind::Jordan | CellKind::Mrnn)
        .then(|| tape.leaf(Tensor::zeros(batch, bound.dims.n_o)));
    let gate_prev = (bound.kind == CellKind::Fgr).then(|| {
        [
            tape.leaf(Tensor::zeros(batch, n_h)),
            tape.leaf(Tensor::zeros(batch, n_h)),
            tape.leaf(Tensor::zeros(batch, n_h)),
        ]
    });
    CellState {
        h: zero_h,
        c,
        s,
        y_prev,
        gate_prev,
    }
}

/// Replicate a `1 x n` row to `rows` rows (no-op when already matching).
fn broadcast_rows(tape: &mut Tape, v: Var, rows: usize) -> Result<Var> {
    if tape.value(v).rows() == rows {
        return Ok(v);
    }
    let cols = tape.value(v).cols();
    let zeros = tape.leaf(Tensor::zeros(rows, cols));
    tape.add(zeros, v)
}

/// `x.W_x* + h.W_h* + b_*` restricted per the gate style.
fn gate_pre(
    tape: &mut Tape,
    bound: &BoundParams,
    style: GateStyle,
    x: Var,
    h: Var,
    w_x: &str,
    w_h: &str,
    b: &str,
    batch: usize,
) -> Result<Var> {
    match style {
        GateStyle::Full => {
            let xs = tape.matmul(x, bound.var(w_x))?;
            let hs = tape.matmul(h, bound.var(w_h))?;
            let sum = tape.add(xs, hs)?;
            tape.add(sum, bound.var(b))
        }
        GateStyle::Slim1 => {
            let hs = tape.matmul(h, bound.var(w_h))?;
            tape.add(hs, bound.var(b))
        }
        GateStyle::Slim2 => tape.matmul(h, bound.var(w_h)),
        GateStyle::Slim3 => broadcast_rows(tape, bound.var(b), batch),
    }
}

/// Advance one step, returning the new state and the gate trace.
pub fn step_traced(
    tape: &mut Tape,
    bound: &BoundParams,
    state: &CellState,
    x: Var,
) -> Result<(CellState, StepTrace)> {
    let kind = bound.kind;
    if is_lstm_family(kind) {
        lstm_step(tape, bound, state, x)
    } else if is_gru_family(kind) {
        gru_step(tape, bound, state, x)
    } else if is_mgu_family(kind) {
        mgu_step(tape, bound, state, x)
    } else {
        simple_step(tape, bound, state, x)
    }
}

/// Advance one step (trace discarded).
pub fn step(tape: &mut Tape, bound: &BoundParams, state: &CellState, x: Var) -> Result<CellState> {
    step_traced(tape, bound, state, x).map(|(s, _)| s)
}

fn lstm_step(
    tape: &mut Tape,
    bound: &BoundParams,
    state: &CellState,
    x: Var,
) -> Result<(CellState, StepTrace)> {
    use CellKind::*;
    let kind = bound.kind;
    let style = lstm_gate_style(kind);
    let batch = tape.value(state.h).rows();
    let h = state.h;
    let c_prev = state.c.expect("LSTM-family state carries c");

    let fgr = |tape: &mut Tape, pre: Var, col: usize| -> Result<Var> {
        // col selects the W_*i / W_*f / W_*o column of the gate-recurrence block
        let names = [
            ["W_ii", "W_fi", "W_oi"],
            ["W_if", "W_ff", "W_of"],
            ["W_io", "W_fo", "W_oo"],
        ];
        let prev = state.gate_prev.expect("FGR state carries previous gates");
        let mut acc = pre;
        for (g, w) in prev.iter().zip(names[col]) {
            let term = tape.matmul(*g, bound.var(w))?;
            acc = tape.add(acc, term)?;
        }
        Ok(acc)
    };

    // candidate
    let cand_pre = gate_pre(tape, bound, style_full_candidate(), x, h, "W_xc~", "W_hc~", "b_c~", batch)?;
    let candidate = if kind == Ncaf {
        cand_pre
    } else {
        tape.tanh(cand_pre)?
    };

    let mut trace = StepTrace {
        candidate: Some(candidate),
        ..Default::default()
    };

    // input gate
    let gamma_i = if kind == Nig {
        None
    } else {
        let mut pre = gate_pre(tape, bound, style, x, h, "W_xi", "W_hi", "b_i", batch)?;
        if kind == Pc {
            let peep = tape.matmul(c_prev, bound.var("W_ci"))?;
            pre = tape.add(pre, peep)?;
        }
        if kind == Fgr {
            pre = fgr(tape, pre, 0)?;
        }
        let g = if kind == Niaf { pre } else { tape.sigmoid(pre)? };
        trace.gates.push(GateTrace {
            name: "i",
            var: g,
            sigmoid: kind != Niaf,
        });
        Some(g)
    };

    // forget gate (absent for NFG; coupled to the input gate for CIFG)
    let gamma_f = if matches!(kind, Nfg | Cifg) {
        None
    } else {
        let mut pre = gate_pre(tape, bound, style, x, h, "W_xf", "W_hf", "b_f", batch)?;
        if kind == Pc {
            let peep = tape.matmul(c_prev, bound.var("W_cf"))?;
            pre = tape.add(pre, peep)?;
        }
        if kind == Fgr {
            pre = fgr(tape, pre, 1)?;
        }
        let g = if kind == Nfaf { pre } else { tape.sigmoid(pre)? };
        trace.gates.push(GateTrace {
            name: "f",
            var: g,
            sigmoid: kind != Nfaf,
        });
        Some(g)
    };

    // cell state
    let retained = match (kind, gamma_f) {
        (Nfg, _) => c_prev,
        (Cifg, _) => {
            let coeff = tape.one_minus(gamma_i.expect("CIFG has an input gate"))?;
            tape.hadamard(coeff, c_prev)?
        }
        (_, Some(f)) => tape.hadamard(f, c_prev)?,
        (_, None) => unreachable!("only NFG and CIFG drop the forget term"),
    };
    let injected = match gamma_i {
        Some(i) => tape.hadamard(i, candidate)?,
        None => candidate,
    };
    let c_t = tape.add(retained, injected)?;

    // output gate (PC inspects the current cell state)
    let h_t = if kind == Nog {
        tape.tanh(c_t)?
    } else {
        let mut pre = gate_pre(tape, bound, style, x, h, "W_xo", "W_ho", "b_o", batch)?;
        if kind == Pc {
            let peep = tape.matmul(c_t, bound.var("W_co"))?;
            pre = tape.add(pre, peep)?;
        }
        if kind == Fgr {
            pre = fgr(tape, pre, 2)?;
        }
        let gamma_o = if kind == Noaf { pre } else { tape.sigmoid(pre)? };
        trace.gates.push(GateTrace {
            name: "o",
            var: gamma_o,
            sigmoid: kind != Noaf,
        });
        let tc = tape.tanh(c_t)?;
        tape.hadamard(gamma_o, tc)?
    };

    let gate_prev = if kind == Fgr {
        let find = |n: &str| trace.gates.iter().find(|g| g.name == n).unwrap().var;
        Some([find("i"), find("f"), find("o")])
    } else {
        None
    };

    Ok((
        CellState {
            h: h_t,
            c: Some(c_t),
            s: None,
            y_prev: None,
            gate_prev,
        },
        trace,
    ))
}

// the candidate always keeps its full parameterization, SLIM variants only
// strip the gates
fn style_full_candidate() -> GateStyle {
    GateStyle::Full
}

fn gru_step(
    tape: &mut Tape,
    bound: &BoundParams,
    state: &CellState,
    x: Var,
) -> Result<(CellState, StepTrace)> {
    use CellKind::*;
    let kind = bound.kind;
    let style = gru_gate_style(kind);
    let batch = tape.value(state.h).rows();
    let h = state.h;
    let n_h = bound.dims.n_h;

    // update gate
    let u_pre = match kind {
        Mut1 => {
            let xs = tape.matmul(x, bound.var("W_xu"))?;
            tape.add(xs, bound.var("b_u"))?
        }
        Mut3 => {
            let th = tape.tanh(h)?;
            let xs = tape.matmul(x, bound.var("W_xu"))?;
            let hs = tape.matmul(th, bound.var("W_hu"))?;
            let sum = tape.add(xs, hs)?;
            tape.add(sum, bound.var("b_u"))?
        }
        _ => gate_pre(tape, bound, style, x, h, "W_xu", "W_hu", "b_u", batch)?,
    };
    let gamma_u = tape.sigmoid(u_pre)?;

    // relevance gate
    let r_pre = match kind {
        Mut2 => {
            let xw = tape.fit_width(x, n_h)?;
            let hs = tape.matmul(h, bound.var("W_hr"))?;
            let sum = tape.add(hs, xw)?;
            tape.add(sum, bound.var("b_r"))?
        }
        _ => gate_pre(tape, bound, style, x, h, "W_xr", "W_hr", "b_r", batch)?,
    };
    let gamma_r = tape.sigmoid(r_pre)?;

    // candidate hidden state
    let gated_h = tape.hadamard(gamma_r, h)?;
    let rec = tape.matmul(gated_h, bound.var("W_hh~"))?;
    let cand_pre = match kind {
        Mut1 => {
            let xw = tape.fit_width(x, n_h)?;
            let tx = tape.tanh(xw)?;
            let sum = tape.add(rec, tx)?;
            tape.add(sum, bound.var("b_h~"))?
        }
        _ => {
            let xs = tape.matmul(x, bound.var("W_xh~"))?;
            let sum = tape.add(xs, rec)?;
            tape.add(sum, bound.var("b_h~"))?
        }
    };
    let h_tilde = tape.tanh(cand_pre)?;

    // h_t = u (.) h~ + (1 - u) (.) h_{t-1}
    let keep = tape.one_minus(gamma_u)?;
    let new_part = tape.hadamard(gamma_u, h_tilde)?;
    let old_part = tape.hadamard(keep, h)?;
    let h_t = tape.add(new_part, old_part)?;

    Ok((
        CellState {
            h: h_t,
            c: None,
            s: None,
            y_prev: None,
            gate_prev: None,
        },
        StepTrace {
            gates: vec![
                GateTrace {
                    name: "u",
                    var: gamma_u,
                    sigmoid: true,
                },
                GateTrace {
                    name: "r",
                    var: gamma_r,
                    sigmoid: true,
                },
            ],
            candidate: Some(h_tilde),
        },
    ))
}

fn mgu_step(
    tape: &mut Tape,
    bound: &BoundParams,
    state: &CellState,
    x: Var,
) -> Result<(CellState, StepTrace)> {
    let style = mgu_gate_style(bound.kind);
    let batch = tape.value(state.h).rows();
    let h = state.h;

    let f_pre = gate_pre(tape, bound, style, x, h, "W_xf", "W_hf", "b_f", batch)?;
    let gamma_f = tape.sigmoid(f_pre)?;

    let gated_h = tape.hadamard(gamma_f, h)?;
    let rec = tape.matmul(gated_h, bound.var("W_hh~"))?;
    let xs = tape.matmul(x, bound.var("W_xh~"))?;
    let sum = tape.add(xs, rec)?;
    let cand_pre = tape.add(sum, bound.var("b_h~"))?;
    let h_tilde = tape.tanh(cand_pre)?;

    let keep = tape.one_minus(gamma_f)?;
    let new_part = tape.hadamard(gamma_f, h_tilde)?;
    let old_part = tape.hadamard(keep, h)?;
    let h_t = tape.add(new_part, old_part)?;

    Ok((
        CellState {
            h: h_t,
            c: None,
            s: None,
            y_prev: None,
            gate_prev: None,
        },
        StepTrace {
            gates: vec![GateTrace {
                name: "f",
                var: gamma_f,
                sigmoid: true,
            }],
            candidate: Some(h_tilde),
        },
    ))
}

fn simple_step(
    tape: &mut Tape,
    bound: &BoundParams,
    state: &CellState,
    x: Var,
) -> Result<(CellState, StepTrace)> {
    use CellKind::*;
    let kind = bound.kind;
    let h = state.h;

    let mut pre = tape.matmul(x, bound.var("W_xh"))?;
    if matches!(kind, Elman | Irnn | Mrnn | Scrn) {
        let hs = tape.matmul(h, bound.var("W_hh"))?;
        pre = tape.add(pre, hs)?;
    }
    if matches!(kind, Jordan | Mrnn) {
        let y = state.y_prev.expect("JORDAN/MRNN state carries y_prev");
        let ys = tape.matmul(y, bound.var("W_yh"))?;
        pre = tape.add(pre, ys)?;
    }
    let mut s_t = None;
    if kind == Scrn {
        // h_t sees the previous context state; the context then leaks toward
        // the current input projection
        let s_prev = state.s.expect("SCRN state carries s");
        let ss = tape.matmul(s_prev, bound.var("W_sh"))?;
        pre = tape.add(pre, ss)?;
        let alpha = bound.dims.scrn_alpha;
        let xs = tape.matmul(x, bound.var("W_xs"))?;
        let fresh = tape.scalar_mul(1.0 - alpha, xs)?;
        let kept = tape.scalar_mul(alpha, s_prev)?;
        s_t = Some(tape.add(fresh, kept)?);
    }
    pre = tape.add(pre, bound.var("b_h"))?;
    let h_t = if kind == Irnn {
        tape.relu(pre)?
    } else {
        tape.tanh(pre)?
    };

    let mut next = CellState {
        h: h_t,
        c: None,
        s: s_t,
        y_prev: None,
        gate_prev: None,
    };
    if matches!(kind, Jordan | Mrnn) {
        // free-running: the cell feeds back its own readout
        next.y_prev = Some(readout(tape, bound, &next)?);
    }
    Ok((next, StepTrace::default()))
}

/// Run `step` across the columns of `window` (a `B x w` tensor of lag
/// values, oldest first) from a fresh zero state.
pub fn unroll(tape: &mut Tape, bound: &BoundParams, window: Var) -> Result<CellState> {
    let (batch, w) = tape.value(window).shape();
    assert!(w >= 1, "unroll needs at least one lag");
    let mut state = init_state(tape, bound, batch);
    for t in 0..w {
        let x_t = tape.col(window, t)?;
        state = step(tape, bound, &state, x_t)?;
    }
    Ok(state)
}

/// Prediction head: `y = h.W_hy + b_y`, identity output activation; SCRN
/// additionally reads its context state through `W_sy`.
pub fn readout(tape: &mut Tape, bound: &BoundParams, state: &CellState) -> Result<Var> {
    let mut y = tape.matmul(state.h, bound.var("W_hy"))?;
    if bound.kind == CellKind::Scrn {
        let s = state.s.expect("SCRN state carries s");
        let ys = tape.matmul(s, bound.var("W_sy"))?;
        y = tape.add(y, ys)?;
    }
    tape.add(y, bound.var("b_y"))
}
