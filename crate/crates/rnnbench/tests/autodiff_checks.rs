//! Tape correctness: primitive identities, adjoint accumulation, and
//! finite-difference agreement on random compositions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnnbench::autodiff::{grad_check, Tape, Var};
use rnnbench::error::Error;
use rnnbench::Tensor;

fn scalar(tape: &mut Tape, v: f64) -> Var {
    tape.leaf(Tensor::from_vec(1, 1, vec![v]))
}

#[test]
fn activation_identities() {
    let mut tape = Tape::new();
    let zero = scalar(&mut tape, 0.0);
    let neg = scalar(&mut tape, -1.0);
    let s = tape.sigmoid(zero).unwrap();
    let t = tape.tanh(zero).unwrap();
    let r = tape.relu(neg).unwrap();
    assert_eq!(tape.value(s).get(0, 0), 0.5);
    assert_eq!(tape.value(t).get(0, 0), 0.0);
    assert_eq!(tape.value(r).get(0, 0), 0.0);
}

#[test]
fn hadamard_by_definition() {
    let mut tape = Tape::new();
    let a = tape.leaf(Tensor::row_vector(vec![1.0, 2.0]));
    let b = tape.leaf(Tensor::row_vector(vec![3.0, 4.0]));
    let h = tape.hadamard(a, b).unwrap();
    assert_eq!(tape.value(h).values(), &[3.0, 8.0]);
}

#[test]
fn mse_loss_hand_value() {
    let mut tape = Tape::new();
    let p = tape.leaf(Tensor::row_vector(vec![1.0, 2.0, 3.0]));
    let t = tape.leaf(Tensor::row_vector(vec![2.0, 2.0, 2.0]));
    let loss = tape.mse_loss(p, t).unwrap();
    assert!((tape.value(loss).get(0, 0) - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn shape_mismatch_names_both_shapes() {
    let mut tape = Tape::new();
    let a = tape.leaf(Tensor::zeros(2, 3));
    let b = tape.leaf(Tensor::zeros(2, 2));
    let err = tape.matmul(a, b).unwrap_err();
    match err {
        Error::DimensionMismatch { lhs, rhs, .. } => {
            assert_eq!(lhs, "2x3");
            assert_eq!(rhs, "2x2");
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn backward_of_sum_of_squares_is_2x() {
    let mut tape = Tape::new();
    let x = tape.leaf(Tensor::row_vector(vec![1.0, 2.0, 3.0]));
    let sq = tape.hadamard(x, x).unwrap();
    let root = tape.sum(sq).unwrap();
    let grads = tape.backward(root).unwrap();
    assert_eq!(grads.get(&tape, x).values(), &[2.0, 4.0, 6.0]);
}

#[test]
fn unreachable_parameter_gets_zero_gradient() {
    let mut tape = Tape::new();
    let x = tape.leaf(Tensor::row_vector(vec![1.0, 2.0]));
    let p = tape.leaf(Tensor::row_vector(vec![5.0, 5.0]));
    let root = tape.sum(x).unwrap();
    let grads = tape.backward(root).unwrap();
    assert_eq!(grads.get(&tape, p).values(), &[0.0, 0.0]);
}

#[test]
fn linear_root_gradient_is_the_constant() {
    let mut tape = Tape::new();
    let p = scalar(&mut tape, 0.7);
    let root = tape.scalar_mul(3.5, p).unwrap();
    let grads = tape.backward(root).unwrap();
    assert_eq!(grads.get(&tape, p).get(0, 0), 3.5);
}

#[test]
fn fan_out_adjoints_accumulate() {
    // root = sum(x (.) x + 3x): gradient must be 2x + 3
    let mut tape = Tape::new();
    let x = tape.leaf(Tensor::row_vector(vec![1.5, -2.0]));
    let sq = tape.hadamard(x, x).unwrap();
    let tripled = tape.scalar_mul(3.0, x).unwrap();
    let s = tape.add(sq, tripled).unwrap();
    let root = tape.sum(s).unwrap();
    let grads = tape.backward(root).unwrap();
    assert_eq!(grads.get(&tape, x).values(), &[6.0, -1.0]);
}

#[test]
fn non_scalar_root_is_rejected() {
    let mut tape = Tape::new();
    let x = tape.leaf(Tensor::row_vector(vec![1.0, 2.0]));
    match tape.backward(x) {
        Err(Error::NonScalarRoot { rows: 1, cols: 2 }) => {}
        other => panic!("expected NonScalarRoot, got {other:?}"),
    }
}

#[test]
fn backward_is_bitwise_deterministic() {
    let build = |tape: &mut Tape| {
        let x = tape.leaf(Tensor::row_vector(vec![0.3, -0.8, 0.11]));
        let w = tape.leaf(Tensor::from_vec(3, 3, (0..9).map(|i| 0.1 * i as f64).collect()));
        let y = tape.matmul(x, w).unwrap();
        let t = tape.tanh(y).unwrap();
        let root = tape.sum(t).unwrap();
        let grads = tape.backward(root).unwrap();
        (grads.get(tape, x), grads.get(tape, w))
    };
    let mut t1 = Tape::new();
    let mut t2 = Tape::new();
    assert_eq!(build(&mut t1), build(&mut t2));
}

#[test]
fn grad_check_two_layer_tanh_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut rand_tensor = |r: usize, c: usize| {
        Tensor::from_vec(r, c, (0..r * c).map(|_| rng.gen::<f64>() - 0.5).collect())
    };
    let params = vec![
        rand_tensor(1, 4),  // x
        rand_tensor(4, 5),  // w1
        rand_tensor(1, 5),  // b1
        rand_tensor(5, 1),  // w2
        rand_tensor(1, 1),  // b2
        rand_tensor(1, 1),  // target
    ];
    let err = grad_check(
        |tape, vars| {
            let h = tape.matmul(vars[0], vars[1])?;
            let h = tape.add(h, vars[2])?;
            let h = tape.tanh(h)?;
            let y = tape.matmul(h, vars[3])?;
            let y = tape.add(y, vars[4])?;
            tape.mse_loss(y, vars[5])
        },
        &params,
        1e-5,
    )
    .unwrap();
    assert!(err < 1e-5, "max relative error {err}");
}

#[test]
fn grad_check_exact_for_linear_function() {
    let params = vec![Tensor::row_vector(vec![0.4, -1.2, 3.3])];
    let err = grad_check(
        |tape, vars| {
            let s = tape.scalar_mul(2.5, vars[0])?;
            tape.sum(s)
        },
        &params,
        1e-5,
    )
    .unwrap();
    assert!(err < 1e-9, "linear functions difference exactly: {err}");
}

/// Random compositions of the primitive set up to depth 20, all of which
/// must agree with central differences.
#[test]
fn grad_check_random_compositions() {
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let n = 3;
        let params = vec![
            Tensor::from_vec(1, n, (0..n).map(|_| rng.gen::<f64>() * 0.8 - 0.4).collect()),
            Tensor::from_vec(n, n, (0..n * n).map(|_| rng.gen::<f64>() * 0.8 - 0.4).collect()),
            Tensor::from_vec(1, n, (0..n).map(|_| rng.gen::<f64>() * 0.8 - 0.4).collect()),
        ];
        let depth = 2 + (seed as usize % 19);
        let mut ops: Vec<u8> = Vec::new();
        for _ in 0..depth {
            ops.push(rng.gen_range(0..6));
        }
        let err = grad_check(
            |tape, vars| {
                let mut cur = vars[0];
                for op in &ops {
                    cur = match op {
                        0 => tape.tanh(cur)?,
                        1 => tape.sigmoid(cur)?,
                        2 => tape.matmul(cur, vars[1])?,
                        3 => tape.add(cur, vars[2])?,
                        4 => tape.hadamard(cur, cur)?,
                        _ => tape.one_minus(cur)?,
                    };
                }
                tape.sum(cur)
            },
            &params,
            1e-5,
        )
        .unwrap();
        assert!(err < 1e-5, "seed {seed}: max relative error {err}");
    }
}
