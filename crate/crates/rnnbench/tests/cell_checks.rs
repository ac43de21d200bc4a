//! Cell-zoo checks: complexity formulas against the published table,
//! initialization rules, hand-evaluated step values, gate behavior, and
//! exact BPTT through 5-step unrolls for every kind.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnnbench::autodiff::{grad_check, Tape};
use rnnbench::cells::{
    bind, bind_from_vars, catalog, init_params, init_state, param_count, param_layout, readout,
    step, step_traced, unroll, CellDims, CellKind, CellParams,
};
use rnnbench::Tensor;

/// Theoretic complexity exactly as published, per kind.
fn published_formula(kind: CellKind, ni: usize, nh: usize, ns: usize, no: usize) -> usize {
    use CellKind::*;
    match kind {
        LstmVanilla | Niaf | Nfaf | Noaf | Ncaf => 4 * ni * nh + 4 * nh * nh + 4 * nh,
        Nig | Nfg | Nog | Cifg => 3 * ni * nh + 3 * nh * nh + 3 * nh,
        Fb1 => 4 * ni * nh + 4 * nh * nh + 3 * nh,
        Pc => 4 * ni * nh + 7 * nh * nh + 4 * nh,
        Fgr => 4 * ni * nh + 13 * nh * nh + 4 * nh,
        Elman | Irnn => ni * nh + nh * nh + nh,
        Jordan => ni * nh + no * nh + nh,
        Mrnn => ni * nh + nh * nh + no * nh + nh,
        Scrn => ni * ns + ni * nh + nh * nh + ns * nh + nh,
        MguSlim3 => ni * nh + nh * nh + 2 * nh,
        MguSlim2 => ni * nh + 2 * nh * nh + nh,
        MguSlim1 => ni * nh + 2 * nh * nh + 2 * nh,
        Mgu => 2 * ni * nh + 2 * nh * nh + 2 * nh,
        GruSlim3 => ni * nh + nh * nh + 3 * nh,
        GruSlim2 => ni * nh + 3 * nh * nh + nh,
        GruSlim1 => ni * nh + 3 * nh * nh + 3 * nh,
        Mut1 => 2 * ni * nh + 2 * nh * nh + 3 * nh,
        Mut2 => 2 * ni * nh + 3 * nh * nh + 3 * nh,
        Mut3 | Gru => 3 * ni * nh + 3 * nh * nh + 3 * nh,
        LstmSlim3 => ni * nh + nh * nh + 4 * nh,
        LstmSlim2 => ni * nh + 4 * nh * nh + nh,
        LstmSlim1 => ni * nh + 4 * nh * nh + 4 * nh,
    }
}

#[test]
fn kind_roster_has_31_distinct_cells() {
    let all = CellKind::all();
    assert_eq!(all.len(), 31);
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            assert_ne!(a, b);
        }
    }
}

#[test]
fn complexity_matches_published_formulas_and_allocation() {
    for kind in CellKind::all() {
        for ni in 1..=6 {
            for nh in 1..=6 {
                let mut dims = CellDims::new(ni, nh, 1);
                dims.n_s = nh;
                let count = param_count(kind, &dims);
                let formula = published_formula(kind, ni, nh, dims.n_s, dims.n_o);
                assert_eq!(
                    count.params,
                    formula,
                    "{} at n_I={ni}, n_H={nh}",
                    kind.name()
                );
                let allocated = init_params(kind, &dims, 1).trainable_cell_scalars();
                assert_eq!(
                    count.params,
                    allocated,
                    "{} allocation disagrees at n_I={ni}, n_H={nh}",
                    kind.name()
                );
            }
        }
    }
}

#[test]
fn complexity_spec_examples() {
    let lstm = param_count(CellKind::LstmVanilla, &CellDims::new(3, 5, 1));
    assert_eq!(lstm.params, 180);
    assert_eq!((lstm.weight_matrices, lstm.bias_vectors), (8, 4));
    let elman = param_count(CellKind::Elman, &CellDims::new(1, 1, 1));
    assert_eq!(elman.params, 3);
    let mgu3 = param_count(CellKind::MguSlim3, &CellDims::new(2, 4, 1));
    assert_eq!(mgu3.params, 32);
    assert_eq!((mgu3.weight_matrices, mgu3.bias_vectors), (2, 2));
}

#[test]
fn irnn_initializes_identity_recurrence_and_zero_bias() {
    let params = init_params(CellKind::Irnn, &CellDims::forecasting(3), 7);
    assert_eq!(params.get("W_hh").unwrap().tensor, Tensor::identity(3));
    assert_eq!(params.get("b_h").unwrap().tensor, Tensor::zeros(1, 3));
}

#[test]
fn fb1_forget_bias_is_frozen_at_one() {
    let params = init_params(CellKind::Fb1, &CellDims::forecasting(4), 7);
    let b_f = params.get("b_f").unwrap();
    assert!(!b_f.trainable);
    assert_eq!(b_f.tensor, Tensor::filled(1, 4, 1.0));
}

#[test]
fn init_is_seed_deterministic() {
    for kind in CellKind::all() {
        let dims = CellDims::forecasting(3);
        let a = init_params(kind, &dims, 99);
        let b = init_params(kind, &dims, 99);
        assert_eq!(a, b, "{}", kind.name());
        let c = init_params(kind, &dims, 100);
        assert_ne!(a, c, "{} should vary with the seed", kind.name());
    }
}

fn zeroed_params(kind: CellKind, dims: &CellDims) -> CellParams {
    let mut params = init_params(kind, dims, 1);
    for p in params.iter_mut() {
        if p.trainable {
            let (r, c) = p.tensor.shape();
            p.tensor = Tensor::zeros(r, c);
        }
    }
    params
}

#[test]
fn zero_params_zero_state_zero_input_is_a_fixed_point() {
    for kind in CellKind::all() {
        let dims = CellDims::forecasting(3);
        let params = zeroed_params(kind, &dims);
        let mut tape = Tape::new();
        let bound = bind(&mut tape, &params);
        let state = init_state(&mut tape, &bound, 1);
        let x = tape.leaf(Tensor::zeros(1, 1));
        let next = step(&mut tape, &bound, &state, x).unwrap();
        assert_eq!(
            tape.value(next.h),
            &Tensor::zeros(1, 3),
            "{} hidden state moved",
            kind.name()
        );
        if let Some(c) = next.c {
            assert_eq!(tape.value(c), &Tensor::zeros(1, 3), "{}", kind.name());
        }
        if let Some(s) = next.s {
            assert_eq!(tape.value(s), &Tensor::zeros(1, 3), "{}", kind.name());
        }
    }
}

#[test]
fn nfg_hand_evaluation_with_unit_cell_state() {
    let dims = CellDims::forecasting(2);
    let params = zeroed_params(CellKind::Nfg, &dims);
    let mut tape = Tape::new();
    let bound = bind(&mut tape, &params);
    let mut state = init_state(&mut tape, &bound, 1);
    state.c = Some(tape.leaf(Tensor::filled(1, 2, 1.0)));
    let x = tape.leaf(Tensor::zeros(1, 1));
    let next = step(&mut tape, &bound, &state, x).unwrap();
    // c_t = c_{t-1} + 0.5 * 0 = 1; h_t = 0.5 * tanh(1)
    let expect_h = 0.5 * 1.0_f64.tanh();
    for &h in tape.value(next.h).values() {
        assert!((h - expect_h).abs() < 1e-12, "h = {h}");
    }
    assert!((expect_h - 0.380797).abs() < 1e-6);
    for &c in tape.value(next.c.unwrap()).values() {
        assert_eq!(c, 1.0);
    }
}

#[test]
fn cifg_couples_forget_to_one_minus_input_gate() {
    let dims = CellDims::forecasting(3);
    // hand case: zero params, c = 1 => c_t = 0.5
    let params = zeroed_params(CellKind::Cifg, &dims);
    let mut tape = Tape::new();
    let bound = bind(&mut tape, &params);
    let mut state = init_state(&mut tape, &bound, 1);
    state.c = Some(tape.leaf(Tensor::filled(1, 3, 1.0)));
    let x = tape.leaf(Tensor::zeros(1, 1));
    let next = step(&mut tape, &bound, &state, x).unwrap();
    for &c in tape.value(next.c.unwrap()).values() {
        assert!((c - 0.5).abs() < 1e-15);
    }

    // random case: c_t - Gamma_i (.) candidate must equal (1 - Gamma_i) (.) c_prev
    let params = init_params(CellKind::Cifg, &dims, 5);
    let mut tape = Tape::new();
    let bound = bind(&mut tape, &params);
    let mut state = init_state(&mut tape, &bound, 1);
    let c_prev = Tensor::row_vector(vec![0.4, -1.1, 2.2]);
    state.c = Some(tape.leaf(c_prev.clone()));
    state.h = tape.leaf(Tensor::row_vector(vec![0.3, 0.1, -0.2]));
    let x = tape.leaf(Tensor::filled(1, 1, 0.7));
    let (next, trace) = step_traced(&mut tape, &bound, &state, x).unwrap();
    let gamma_i = tape
        .value(trace.gates.iter().find(|g| g.name == "i").unwrap().var)
        .clone();
    let cand = tape.value(trace.candidate.unwrap()).clone();
    let c_t = tape.value(next.c.unwrap()).clone();
    for k in 0..3 {
        let expected =
            (1.0 - gamma_i.get(0, k)) * c_prev.get(0, k) + gamma_i.get(0, k) * cand.get(0, k);
        assert!((c_t.get(0, k) - expected).abs() < 1e-14);
    }
}

#[test]
fn mgu_slim3_is_a_convex_combination_fixed_point() {
    // with b_f = 0 the gate is exactly 1/2; pick b_h~ so the candidate
    // reproduces the previous hidden state, then h must not move
    let dims = CellDims::forecasting(3);
    let mut params = zeroed_params(CellKind::MguSlim3, &dims);
    let v: [f64; 3] = [0.3, -0.2, 0.5];
    let b = params.get_mut("b_h~").unwrap();
    for (k, &vi) in v.iter().enumerate() {
        b.tensor.set(0, k, vi.atanh());
    }
    let mut tape = Tape::new();
    let bound = bind(&mut tape, &params);
    let mut state = init_state(&mut tape, &bound, 1);
    state.h = tape.leaf(Tensor::row_vector(v.to_vec()));
    let x = tape.leaf(Tensor::zeros(1, 1));
    let next = step(&mut tape, &bound, &state, x).unwrap();
    for (k, &vi) in v.iter().enumerate() {
        assert!((tape.value(next.h).get(0, k) - vi).abs() < 1e-12);
    }
}

#[test]
fn sigmoid_gates_stay_in_the_open_unit_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for kind in CellKind::all() {
        let dims = CellDims::forecasting(4);
        let params = init_params(kind, &dims, rng.gen());
        let mut tape = Tape::new();
        let bound = bind(&mut tape, &params);
        let mut state = init_state(&mut tape, &bound, 2);
        state.h = tape.leaf(Tensor::from_vec(
            2,
            4,
            (0..8).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect(),
        ));
        let x = tape.leaf(Tensor::from_vec(
            2,
            1,
            vec![rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0],
        ));
        let (_, trace) = step_traced(&mut tape, &bound, &state, x).unwrap();
        for gate in &trace.gates {
            if !gate.sigmoid {
                continue;
            }
            for &g in tape.value(gate.var).values() {
                assert!(g > 0.0 && g < 1.0, "{} gate {} = {g}", kind.name(), gate.name);
            }
        }
    }
}

#[test]
fn slim3_gates_are_constant_across_time_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for kind in [CellKind::LstmSlim3, CellKind::GruSlim3, CellKind::MguSlim3] {
        let dims = CellDims::forecasting(3);
        let params = init_params(kind, &dims, 17);
        let mut tape = Tape::new();
        let bound = bind(&mut tape, &params);
        let mut state = init_state(&mut tape, &bound, 1);
        let mut first: Option<Vec<(String, Vec<f64>)>> = None;
        for _ in 0..4 {
            let x = tape.leaf(Tensor::filled(1, 1, rng.gen::<f64>() * 2.0 - 1.0));
            let (next, trace) = step_traced(&mut tape, &bound, &state, x).unwrap();
            let gates: Vec<(String, Vec<f64>)> = trace
                .gates
                .iter()
                .map(|g| (g.name.to_string(), tape.value(g.var).values().to_vec()))
                .collect();
            match &first {
                None => first = Some(gates),
                Some(expected) => assert_eq!(expected, &gates, "{}", kind.name()),
            }
            state = next;
        }
    }
}

#[test]
fn fgr_gate_recurrence_is_live() {
    let dims = CellDims::forecasting(3);
    let params = init_params(CellKind::Fgr, &dims, 3);
    let run = |perturb: f64| {
        let mut tape = Tape::new();
        let bound = bind(&mut tape, &params);
        let mut state = init_state(&mut tape, &bound, 1);
        let x1 = tape.leaf(Tensor::filled(1, 1, 0.4));
        state = step(&mut tape, &bound, &state, x1).unwrap();
        // nudge the step-1 output gate before stepping again
        let gates = state.gate_prev.as_mut().unwrap();
        let nudged = tape.value(gates[2]).map(|v| v + perturb);
        gates[2] = tape.leaf(nudged);
        let x2 = tape.leaf(Tensor::filled(1, 1, 0.4));
        let (_, trace) = step_traced(&mut tape, &bound, &state, x2).unwrap();
        tape.value(trace.gates.iter().find(|g| g.name == "i").unwrap().var)
            .values()
            .to_vec()
    };
    let base = run(0.0);
    let bumped = run(0.25);
    assert_ne!(base, bumped, "input gate must react to the previous output gate");
}

#[test]
fn unroll_width_one_equals_single_step() {
    let dims = CellDims::forecasting(3);
    let params = init_params(CellKind::Gru, &dims, 13);
    let mut tape = Tape::new();
    let bound = bind(&mut tape, &params);
    let window = tape.leaf(Tensor::from_vec(1, 1, vec![0.8]));
    let unrolled = unroll(&mut tape, &bound, window).unwrap();
    let state = init_state(&mut tape, &bound, 1);
    let x = tape.leaf(Tensor::from_vec(1, 1, vec![0.8]));
    let stepped = step(&mut tape, &bound, &state, x).unwrap();
    assert_eq!(tape.value(unrolled.h), tape.value(stepped.h));
}

#[test]
fn unroll_zero_window_zero_params_gives_zero_hidden_state() {
    for kind in CellKind::all() {
        let dims = CellDims::forecasting(2);
        let params = zeroed_params(kind, &dims);
        let mut tape = Tape::new();
        let bound = bind(&mut tape, &params);
        let window = tape.leaf(Tensor::zeros(1, 4));
        let state = unroll(&mut tape, &bound, window).unwrap();
        assert_eq!(tape.value(state.h), &Tensor::zeros(1, 2), "{}", kind.name());
    }
}

#[test]
fn bptt_reaches_the_first_input() {
    let dims = CellDims::forecasting(3);
    let params = init_params(CellKind::LstmVanilla, &dims, 8);
    let mut tape = Tape::new();
    let bound = bind(&mut tape, &params);
    let window = tape.leaf(Tensor::from_vec(1, 5, vec![0.1, -0.2, 0.3, 0.4, -0.5]));
    let state = unroll(&mut tape, &bound, window).unwrap();
    let pred = readout(&mut tape, &bound, &state).unwrap();
    let target = tape.leaf(Tensor::from_vec(1, 1, vec![0.7]));
    let loss = tape.mse_loss(pred, target).unwrap();
    let grads = tape.backward(loss).unwrap();
    let g = grads.get(&tape, window);
    assert!(
        g.get(0, 0).abs() > 0.0,
        "gradient w.r.t. the first lag is {}",
        g.get(0, 0)
    );
}

#[test]
fn readout_hand_values() {
    let dims = CellDims::forecasting(2);
    let mut params = zeroed_params(CellKind::Elman, &dims);
    params.get_mut("b_y").unwrap().tensor = Tensor::from_vec(1, 1, vec![0.3]);
    let mut tape = Tape::new();
    let bound = bind(&mut tape, &params);
    let state = init_state(&mut tape, &bound, 1);
    let y = readout(&mut tape, &bound, &state).unwrap();
    assert_eq!(tape.value(y).get(0, 0), 0.3);

    params.get_mut("W_hy").unwrap().tensor = Tensor::from_vec(2, 1, vec![0.5, 0.25]);
    params.get_mut("b_y").unwrap().tensor = Tensor::zeros(1, 1);
    let mut tape = Tape::new();
    let bound = bind(&mut tape, &params);
    let mut state = init_state(&mut tape, &bound, 1);
    state.h = tape.leaf(Tensor::row_vector(vec![1.0, 2.0]));
    let y = readout(&mut tape, &bound, &state).unwrap();
    assert_eq!(tape.value(y).get(0, 0), 1.0);
}

/// Exact reverse-mode gradients through a 5-step unroll for all 31 kinds.
#[test]
fn five_step_unroll_gradients_match_finite_differences() {
    for kind in CellKind::all() {
        let dims = CellDims::forecasting(3);
        let params = init_params(kind, &dims, 42);
        let layout_len = param_layout(kind).len();
        let mut tensors: Vec<Tensor> = params.iter().map(|p| p.tensor.clone()).collect();
        tensors.push(Tensor::from_vec(1, 5, vec![0.2, -0.4, 0.5, 0.1, -0.3]));
        tensors.push(Tensor::from_vec(1, 1, vec![0.6]));
        let err = grad_check(
            |tape, vars| {
                let bound = bind_from_vars(kind, dims, &vars[..layout_len]);
                let state = unroll(tape, &bound, vars[layout_len])?;
                let pred = readout(tape, &bound, &state)?;
                tape.mse_loss(pred, vars[layout_len + 1])
            },
            &tensors,
            1e-5,
        )
        .unwrap();
        assert!(err < 1e-5, "{}: max relative error {err}", kind.name());
    }
}

#[test]
fn catalog_lists_31_kinds_with_terms() {
    let entries = catalog();
    assert_eq!(entries.len(), 31);
    let fb1 = entries.iter().find(|e| e.name == "FB1").unwrap();
    assert_eq!(fb1.frozen_symbols, vec!["b_f".to_string()]);
    assert_eq!(fb1.complexity_terms["n_I*n_H"], 4);
    assert_eq!(fb1.complexity_terms["n_H^2"], 4);
    assert_eq!(fb1.complexity_terms["n_H"], 3);
    let scrn = entries.iter().find(|e| e.name == "SCRN").unwrap();
    assert_eq!(scrn.complexity_terms["n_I*n_S"], 1);
    assert_eq!(scrn.complexity_terms["n_S*n_H"], 1);
    assert!(scrn.readout_symbols.contains(&"W_sy".to_string()));
    let json = rnnbench::cells::catalog_json().unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&json).is_ok());
}
