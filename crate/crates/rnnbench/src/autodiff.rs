//! Tape-based reverse-mode differentiation over [`Tensor`] values.
//!
//! Every primitive records one node on an append-only tape; parents always
//! precede children, so a single reverse sweep visits each node exactly once
//! and accumulates adjoints for fan-out for free. All arithmetic is `f64`.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    /// Matrix plus a `1 x n` row vector broadcast over rows; the only
    /// broadcasting form allowed, so shape errors elsewhere stay loud.
    AddBias(Var, Var),
    Sub(Var, Var),
    Hadamard(Var, Var),
    ScalarMul(f64, Var),
    Sigmoid(Var),
    Tanh(Var),
    Relu(Var),
    OneMinus(Var),
    /// Derivative defined as zero everywhere; only data generators use the
    /// forward value, it must never sit on a trained path.
    Sign(#[allow(dead_code)] Var),
    Sum(Var),
    /// Extract column `j` as an `m x 1` tensor.
    Col(Var, usize),
    /// Adapt column count to a target width: pass-through when equal,
    /// broadcast when the source has one column, zero-pad/truncate otherwise.
    FitWidth(Var),
    MseLoss(Var, Var),
}

#[derive(Debug)]
struct Node {
    op: Op,
    value: Tensor,
}

#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Per-node adjoints produced by [`Tape::backward`].
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    /// Adjoint of `v`, or zeros when the root does not depend on it.
    pub fn get(&self, tape: &Tape, v: Var) -> Tensor {
        match &self.grads[v.0] {
            Some(g) => g.clone(),
            None => {
                let (r, c) = tape.value(v).shape();
                Tensor::zeros(r, c)
            }
        }
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn leaf(&mut self, value: Tensor) -> Var {
        self.push_unchecked(Op::Leaf, value)
    }

    fn push_unchecked(&mut self, op: Op, value: Tensor) -> Var {
        self.nodes.push(Node { op, value });
        Var(self.nodes.len() - 1)
    }

    fn push(&mut self, op: Op, value: Tensor, name: &'static str) -> Result<Var> {
        if !value.all_finite() {
            return Err(Error::NonFinite { op: name });
        }
        Ok(self.push_unchecked(op, value))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ar, ac) = self.value(a).shape();
        let (br, bc) = self.value(b).shape();
        if ac != br {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                lhs: format!("{ar}x{ac}"),
                rhs: format!("{br}x{bc}"),
            });
        }
        let va = self.value(a);
        let vb = self.value(b);
        let mut out = Tensor::zeros(ar, bc);
        for i in 0..ar {
            let row = va.row(i);
            for (k, &aik) in row.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                let brow = vb.row(k);
                let orow = &mut out.values_mut()[i * bc..(i + 1) * bc];
                for (o, &bkj) in orow.iter_mut().zip(brow) {
                    *o += aik * bkj;
                }
            }
        }
        self.push(Op::MatMul(a, b), out, "matmul")
    }

    /// Element-wise sum; also accepts a `1 x n` bias as `b` against an
    /// `m x n` matrix `a`.
    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ar, ac) = self.value(a).shape();
        let (br, bc) = self.value(b).shape();
        if (ar, ac) == (br, bc) {
            let mut out = self.value(a).clone();
            out.add_scaled(self.value(b), 1.0);
            return self.push(Op::Add(a, b), out, "add");
        }
        if br == 1 && bc == ac {
            let bias = self.value(b).clone();
            let mut out = self.value(a).clone();
            for r in 0..ar {
                for c in 0..ac {
                    let v = out.get(r, c) + bias.get(0, c);
                    out.set(r, c, v);
                }
            }
            return self.push(Op::AddBias(a, b), out, "add");
        }
        Err(Error::DimensionMismatch {
            op: "add",
            lhs: format!("{ar}x{ac}"),
            rhs: format!("{br}x{bc}"),
        })
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.value(a).check_same_shape(self.value(b), "sub")?;
        let mut out = self.value(a).clone();
        out.add_scaled(self.value(b), -1.0);
        self.push(Op::Sub(a, b), out, "sub")
    }

    pub fn hadamard(&mut self, a: Var, b: Var) -> Result<Var> {
        self.value(a).check_same_shape(self.value(b), "hadamard")?;
        let vb = self.value(b).clone();
        let mut out = self.value(a).clone();
        for (o, b) in out.values_mut().iter_mut().zip(vb.values()) {
            *o *= b;
        }
        self.push(Op::Hadamard(a, b), out, "hadamard")
    }

    pub fn scalar_mul(&mut self, c: f64, a: Var) -> Result<Var> {
        let out = self.value(a).map(|v| c * v);
        self.push(Op::ScalarMul(c, a), out, "scalar_mul")
    }

    pub fn sigmoid(&mut self, a: Var) -> Result<Var> {
        let out = self.value(a).map(|v| 1.0 / (1.0 + (-v).exp()));
        self.push(Op::Sigmoid(a), out, "sigmoid")
    }

    pub fn tanh(&mut self, a: Var) -> Result<Var> {
        let out = self.value(a).map(f64::tanh);
        self.push(Op::Tanh(a), out, "tanh")
    }

    pub fn relu(&mut self, a: Var) -> Result<Var> {
        let out = self.value(a).map(|v| if v > 0.0 { v } else { 0.0 });
        self.push(Op::Relu(a), out, "relu")
    }

    pub fn one_minus(&mut self, a: Var) -> Result<Var> {
        let out = self.value(a).map(|v| 1.0 - v);
        self.push(Op::OneMinus(a), out, "one_minus")
    }

    pub fn sign(&mut self, a: Var) -> Result<Var> {
        let out = self.value(a).map(|v| {
            if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }
        });
        self.push(Op::Sign(a), out, "sign")
    }

    /// Sum of all entries as a `1 x 1` tensor.
    pub fn sum(&mut self, a: Var) -> Result<Var> {
        let s: f64 = self.value(a).values().iter().sum();
        self.push(Op::Sum(a), Tensor::from_vec(1, 1, vec![s]), "sum")
    }

    pub fn col(&mut self, a: Var, j: usize) -> Result<Var> {
        let (rows, cols) = self.value(a).shape();
        if j >= cols {
            return Err(Error::DimensionMismatch {
                op: "col",
                lhs: format!("{rows}x{cols}"),
                rhs: format!("column {j}"),
            });
        }
        let va = self.value(a);
        let data: Vec<f64> = (0..rows).map(|r| va.get(r, j)).collect();
        self.push(Op::Col(a, j), Tensor::col_vector(data), "col")
    }

    /// Adapt `a` to `width` columns: identity when equal, broadcast a single
    /// column, otherwise zero-pad or truncate on the right.
    pub fn fit_width(&mut self, a: Var, width: usize) -> Result<Var> {
        let (rows, cols) = self.value(a).shape();
        if cols == width {
            return Ok(a);
        }
        let va = self.value(a);
        let mut out = Tensor::zeros(rows, width);
        for r in 0..rows {
            for c in 0..width {
                let v = if cols == 1 {
                    va.get(r, 0)
                } else if c < cols {
                    va.get(r, c)
                } else {
                    0.0
                };
                out.set(r, c, v);
            }
        }
        self.push(Op::FitWidth(a), out, "fit_width")
    }

    /// Mean squared error between same-shaped tensors, as a `1 x 1` scalar.
    pub fn mse_loss(&mut self, pred: Var, target: Var) -> Result<Var> {
        self.value(pred)
            .check_same_shape(self.value(target), "mse_loss")?;
        let p = self.value(pred);
        let t = self.value(target);
        let n = p.len() as f64;
        let sse: f64 = p
            .values()
            .iter()
            .zip(t.values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        self.push(
            Op::MseLoss(pred, target),
            Tensor::from_vec(1, 1, vec![sse / n]),
            "mse_loss",
        )
    }

    /// Reverse sweep from a scalar `root`; returns adjoints for every node
    /// the root depends on.
    pub fn backward(&self, root: Var) -> Result<Gradients> {
        let (rr, rc) = self.value(root).shape();
        if (rr, rc) != (1, 1) {
            return Err(Error::NonScalarRoot { rows: rr, cols: rc });
        }
        let mut grads: Vec<Option<Tensor>> = vec![None; self.nodes.len()];
        grads[root.0] = Some(Tensor::from_vec(1, 1, vec![1.0]));

        for id in (0..=root.0).rev() {
            let g = match &grads[id] {
                Some(g) => g.clone(),
                None => continue,
            };
            match &self.nodes[id].op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let va = self.value(*a);
                    let vb = self.value(*b);
                    // dA = g . B^T
                    let (gr, gc) = g.shape();
                    let mut da = Tensor::zeros(va.rows(), va.cols());
                    for i in 0..gr {
                        for k in 0..va.cols() {
                            let mut acc = 0.0;
                            for j in 0..gc {
                                acc += g.get(i, j) * vb.get(k, j);
                            }
                            da.set(i, k, acc);
                        }
                    }
                    // dB = A^T . g
                    let mut db = Tensor::zeros(vb.rows(), vb.cols());
                    for k in 0..vb.rows() {
                        for j in 0..gc {
                            let mut acc = 0.0;
                            for i in 0..gr {
                                acc += va.get(i, k) * g.get(i, j);
                            }
                            db.set(k, j, acc);
                        }
                    }
                    accumulate(&mut grads, *a, da);
                    accumulate(&mut grads, *b, db);
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, g.clone());
                    accumulate(&mut grads, *b, g);
                }
                Op::AddBias(a, b) => {
                    let (gr, gc) = g.shape();
                    let mut db = Tensor::zeros(1, gc);
                    for r in 0..gr {
                        for c in 0..gc {
                            let v = db.get(0, c) + g.get(r, c);
                            db.set(0, c, v);
                        }
                    }
                    accumulate(&mut grads, *a, g);
                    accumulate(&mut grads, *b, db);
                }
                Op::Sub(a, b) => {
                    accumulate(&mut grads, *a, g.clone());
                    accumulate(&mut grads, *b, g.map(|v| -v));
                }
                Op::Hadamard(a, b) => {
                    let da = pairwise_mul(&g, self.value(*b));
                    let db = pairwise_mul(&g, self.value(*a));
                    accumulate(&mut grads, *a, da);
                    accumulate(&mut grads, *b, db);
                }
                Op::ScalarMul(c, a) => {
                    let c = *c;
                    accumulate(&mut grads, *a, g.map(|v| c * v));
                }
                Op::Sigmoid(a) => {
                    let y = &self.nodes[id].value;
                    let da = combine(&g, y, |g, y| g * y * (1.0 - y));
                    accumulate(&mut grads, *a, da);
                }
                Op::Tanh(a) => {
                    let y = &self.nodes[id].value;
                    let da = combine(&g, y, |g, y| g * (1.0 - y * y));
                    accumulate(&mut grads, *a, da);
                }
                Op::Relu(a) => {
                    let x = self.value(*a);
                    let da = combine(&g, x, |g, x| if x > 0.0 { g } else { 0.0 });
                    accumulate(&mut grads, *a, da);
                }
                Op::OneMinus(a) => {
                    accumulate(&mut grads, *a, g.map(|v| -v));
                }
                Op::Sign(_) => {}
                Op::Sum(a) => {
                    let (r, c) = self.value(*a).shape();
                    accumulate(&mut grads, *a, Tensor::filled(r, c, g.get(0, 0)));
                }
                Op::Col(a, j) => {
                    let (r, c) = self.value(*a).shape();
                    let mut da = Tensor::zeros(r, c);
                    for i in 0..r {
                        da.set(i, *j, g.get(i, 0));
                    }
                    accumulate(&mut grads, *a, da);
                }
                Op::FitWidth(a) => {
                    let (r, c) = self.value(*a).shape();
                    let mut da = Tensor::zeros(r, c);
                    let gw = g.cols();
                    if c == 1 {
                        for i in 0..r {
                            da.set(i, 0, g.row(i).iter().sum());
                        }
                    } else {
                        for i in 0..r {
                            for j in 0..c.min(gw) {
                                da.set(i, j, g.get(i, j));
                            }
                        }
                    }
                    accumulate(&mut grads, *a, da);
                }
                Op::MseLoss(p, t) => {
                    let vp = self.value(*p);
                    let vt = self.value(*t);
                    let scale = 2.0 * g.get(0, 0) / vp.len() as f64;
                    let dp = combine(vp, vt, |p, t| scale * (p - t));
                    let dt = dp.map(|v| -v);
                    accumulate(&mut grads, *p, dp);
                    accumulate(&mut grads, *t, dt);
                }
            }
        }
        Ok(Gradients { grads })
    }
}

fn accumulate(grads: &mut [Option<Tensor>], v: Var, delta: Tensor) {
    match &mut grads[v.0] {
        Some(g) => g.add_scaled(&delta, 1.0),
        slot => *slot = Some(delta),
    }
}

fn pairwise_mul(a: &Tensor, b: &Tensor) -> Tensor {
    combine(a, b, |a, b| a * b)
}

fn combine(a: &Tensor, b: &Tensor, f: impl Fn(f64, f64) -> f64) -> Tensor {
    debug_assert_eq!(a.shape(), b.shape());
    let data = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| f(x, y))
        .collect();
    Tensor::from_vec(a.rows(), a.cols(), data)
}

/// Max relative error between tape gradients and central finite differences.
///
/// `build` must register one leaf per entry of `params`, in order, and
/// return a scalar root. The analytic side comes from one backward pass at
/// the base point; the numeric side re-evaluates the forward pass at
/// `x ± eps` per coordinate.
pub fn grad_check<F>(mut build: F, params: &[Tensor], eps: f64) -> Result<f64>
where
    F: FnMut(&mut Tape, &[Var]) -> Result<Var>,
{
    assert!(eps > 0.0, "grad_check eps must be positive");

    let eval = |build: &mut F, tensors: &[Tensor]| -> Result<(Tape, Vec<Var>, Var)> {
        let mut tape = Tape::new();
        let vars: Vec<Var> = tensors.iter().map(|t| tape.leaf(t.clone())).collect();
        let root = build(&mut tape, &vars)?;
        Ok((tape, vars, root))
    };

    let (tape, vars, root) = eval(&mut build, params)?;
    let grads = tape.backward(root)?;

    let mut max_err = 0.0_f64;
    let mut work: Vec<Tensor> = params.to_vec();
    for (pi, var) in vars.iter().enumerate() {
        let analytic = grads.get(&tape, *var);
        for j in 0..params[pi].len() {
            let base = params[pi].values()[j];

            work[pi].values_mut()[j] = base + eps;
            let (tp, _, rp) = eval(&mut build, &work)?;
            let f_plus = tp.value(rp).get(0, 0);

            work[pi].values_mut()[j] = base - eps;
            let (tm, _, rm) = eval(&mut build, &work)?;
            let f_minus = tm.value(rm).get(0, 0);

            work[pi].values_mut()[j] = base;

            let numeric = (f_plus - f_minus) / (2.0 * eps);
            let analytic_j = analytic.values()[j];
            let denom = 1.0_f64.max(analytic_j.abs()).max(numeric.abs());
            max_err = max_err.max((analytic_j - numeric).abs() / denom);
        }
    }
    Ok(max_err)
}
