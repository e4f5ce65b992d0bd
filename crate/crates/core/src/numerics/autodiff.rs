//! Tape-based reverse-mode differentiation over a fixed vocabulary of
//! tensor operations.
//!
//! Values are computed eagerly as nodes are recorded, so the node list
//! is always in topological order and non-finite intermediates are
//! caught at the node that produced them. [`Tape::backward`] walks the
//! list in reverse and accumulates gradients for every node reachable
//! from the scalar output.

use crate::numerics::tensor::Tensor;
use crate::numerics::NumericsError;
use crate::scalar::Scalar;

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
enum Op<S> {
    Leaf,
    /// `x · Wᵀ + b`
    Linear { x: NodeId, w: NodeId, b: NodeId },
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Neg(NodeId),
    Tanh(NodeId),
    Exp(NodeId),
    Log(NodeId),
    /// Elementwise minimum; on ties the gradient follows the first input.
    Min(NodeId, NodeId),
    Clamp { x: NodeId, lo: S, hi: S },
    AddConst { x: NodeId, c: S },
    MulConst { x: NodeId, c: S },
    Sum(NodeId),
    Mean(NodeId),
    RowSum(NodeId),
    BroadcastRows { x: NodeId, rows: usize },
    Concat(NodeId, NodeId),
}

impl<S> Op<S> {
    fn name(&self) -> &'static str {
        match self {
            Op::Leaf => "leaf",
            Op::Linear { .. } => "linear",
            Op::Add(..) => "add",
            Op::Sub(..) => "sub",
            Op::Mul(..) => "mul",
            Op::Neg(..) => "neg",
            Op::Tanh(..) => "tanh",
            Op::Exp(..) => "exp",
            Op::Log(..) => "log",
            Op::Min(..) => "min",
            Op::Clamp { .. } => "clamp",
            Op::AddConst { .. } => "add_const",
            Op::MulConst { .. } => "mul_const",
            Op::Sum(..) => "sum",
            Op::Mean(..) => "mean",
            Op::RowSum(..) => "row_sum",
            Op::BroadcastRows { .. } => "broadcast_rows",
            Op::Concat(..) => "concat",
        }
    }
}

/// Recorded computation graph with eagerly evaluated node values.
#[derive(Debug, Default)]
pub struct Tape<S> {
    ops: Vec<Op<S>>,
    vals: Vec<Tensor<S>>,
}

impl<S: Scalar> Tape<S> {
    pub fn new() -> Self {
        Self { ops: Vec::new(), vals: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Tensor<S> {
        &self.vals[id.0]
    }

    fn push(&mut self, op: Op<S>, val: Tensor<S>) -> Result<NodeId, NumericsError> {
        if !val.all_finite() {
            return Err(NumericsError::NonFinite { node: self.ops.len(), op: op.name() });
        }
        let id = NodeId(self.ops.len());
        self.ops.push(op);
        self.vals.push(val);
        Ok(id)
    }

    /// Records a leaf tensor (parameter or constant input).
    pub fn leaf(&mut self, value: Tensor<S>) -> Result<NodeId, NumericsError> {
        self.push(Op::Leaf, value)
    }

    pub fn linear(&mut self, x: NodeId, w: NodeId, b: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[x.0].linear(&self.vals[w.0], &self.vals[b.0])?;
        self.push(Op::Linear { x, w, b }, val)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[a.0].add(&self.vals[b.0])?;
        self.push(Op::Add(a, b), val)
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[a.0].sub(&self.vals[b.0])?;
        self.push(Op::Sub(a, b), val)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[a.0].mul_elem(&self.vals[b.0])?;
        self.push(Op::Mul(a, b), val)
    }

    pub fn neg(&mut self, a: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[a.0].map(|x| -x);
        self.push(Op::Neg(a), val)
    }

    pub fn tanh(&mut self, a: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[a.0].map(|x| x.tanh());
        self.push(Op::Tanh(a), val)
    }

    pub fn exp(&mut self, a: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[a.0].map(|x| x.exp());
        self.push(Op::Exp(a), val)
    }

    pub fn log(&mut self, a: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[a.0].map(|x| x.ln());
        self.push(Op::Log(a), val)
    }

    pub fn min(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[a.0].zip_min(&self.vals[b.0])?;
        self.push(Op::Min(a, b), val)
    }

    pub fn clamp(&mut self, x: NodeId, lo: S, hi: S) -> Result<NodeId, NumericsError> {
        let val = self.vals[x.0].map(|v| v.min(hi).max(lo));
        self.push(Op::Clamp { x, lo, hi }, val)
    }

    pub fn add_const(&mut self, x: NodeId, c: S) -> Result<NodeId, NumericsError> {
        let val = self.vals[x.0].map(|v| v + c);
        self.push(Op::AddConst { x, c }, val)
    }

    pub fn mul_const(&mut self, x: NodeId, c: S) -> Result<NodeId, NumericsError> {
        let val = self.vals[x.0].map(|v| v * c);
        self.push(Op::MulConst { x, c }, val)
    }

    /// Sum of all entries, as a scalar node.
    pub fn sum(&mut self, x: NodeId) -> Result<NodeId, NumericsError> {
        let val = Tensor::scalar(self.vals[x.0].sum());
        self.push(Op::Sum(x), val)
    }

    /// Mean of all entries, as a scalar node.
    pub fn mean(&mut self, x: NodeId) -> Result<NodeId, NumericsError> {
        let n = S::of(self.vals[x.0].len() as f64);
        let val = Tensor::scalar(self.vals[x.0].sum() / n);
        self.push(Op::Mean(x), val)
    }

    /// Per-row sum: `(B, n) -> (B, 1)`.
    pub fn row_sum(&mut self, x: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[x.0].row_sum();
        self.push(Op::RowSum(x), val)
    }

    /// Repeats a vector into `rows` identical rows.
    pub fn broadcast_rows(&mut self, x: NodeId, rows: usize) -> Result<NodeId, NumericsError> {
        let val = self.vals[x.0].broadcast_rows(rows)?;
        self.push(Op::BroadcastRows { x, rows }, val)
    }

    pub fn concat(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, NumericsError> {
        let val = self.vals[a.0].concat_cols(&self.vals[b.0])?;
        self.push(Op::Concat(a, b), val)
    }

    /// Reverse pass from a scalar `output`; returns a gradient per node,
    /// each congruent in shape to the node's value.
    pub fn backward(&self, output: NodeId) -> Result<Gradients<S>, NumericsError> {
        let out_val = &self.vals[output.0];
        if !out_val.is_scalar() {
            return Err(NumericsError::NonScalarOutput { len: out_val.len() });
        }
        let mut grads: Vec<Option<Tensor<S>>> = vec![None; self.ops.len()];
        grads[output.0] = Some(Tensor::scalar(S::one()));

        for idx in (0..=output.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            match &self.ops[idx] {
                Op::Leaf => {}
                Op::Linear { x, w, b } => {
                    let xv = &self.vals[x.0];
                    let wv = &self.vals[w.0];
                    let (rows, _) = xv.as_2d();
                    let (m, n) = wv.as_2d();
                    // dL/dx = g · W, dL/dW = gᵀ · x, dL/db = column sums of g.
                    let g2 = reshape2(&g, rows, m);
                    let dx = g2.matmul(wv)?;
                    let dx = match_rank(dx, xv);
                    let dw = g2.transpose().matmul(&reshape2(xv, rows, n))?;
                    let db = g2.col_sum();
                    accumulate(&mut grads, *x, dx)?;
                    accumulate(&mut grads, *w, dw)?;
                    accumulate(&mut grads, *b, db)?;
                    grads[idx] = Some(g);
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, g.clone())?;
                    accumulate(&mut grads, *b, g.clone())?;
                    grads[idx] = Some(g);
                }
                Op::Sub(a, b) => {
                    accumulate(&mut grads, *a, g.clone())?;
                    accumulate(&mut grads, *b, g.map(|v| -v))?;
                    grads[idx] = Some(g);
                }
                Op::Mul(a, b) => {
                    accumulate(&mut grads, *a, g.mul_elem(&self.vals[b.0])?)?;
                    accumulate(&mut grads, *b, g.mul_elem(&self.vals[a.0])?)?;
                    grads[idx] = Some(g);
                }
                Op::Neg(a) => {
                    accumulate(&mut grads, *a, g.map(|v| -v))?;
                    grads[idx] = Some(g);
                }
                Op::Tanh(a) => {
                    // d tanh = 1 - tanh²; reuse the stored output value.
                    let y = &self.vals[idx];
                    let da = g.mul_elem(&y.map(|t| S::one() - t * t))?;
                    accumulate(&mut grads, *a, da)?;
                    grads[idx] = Some(g);
                }
                Op::Exp(a) => {
                    let da = g.mul_elem(&self.vals[idx])?;
                    accumulate(&mut grads, *a, da)?;
                    grads[idx] = Some(g);
                }
                Op::Log(a) => {
                    let da = g.mul_elem(&self.vals[a.0].map(|v| v.recip()))?;
                    accumulate(&mut grads, *a, da)?;
                    grads[idx] = Some(g);
                }
                Op::Min(a, b) => {
                    let av = &self.vals[a.0];
                    let bv = &self.vals[b.0];
                    let mut da = g.clone();
                    let mut db = g.clone();
                    for (i, (&x, &y)) in av.data().iter().zip(bv.data()).enumerate() {
                        if x <= y {
                            db.data_mut()[i] = S::zero();
                        } else {
                            da.data_mut()[i] = S::zero();
                        }
                    }
                    accumulate(&mut grads, *a, da)?;
                    accumulate(&mut grads, *b, db)?;
                    grads[idx] = Some(g);
                }
                Op::Clamp { x, lo, hi } => {
                    let xv = &self.vals[x.0];
                    let mut dx = g.clone();
                    for (i, &v) in xv.data().iter().enumerate() {
                        if v < *lo || v > *hi {
                            dx.data_mut()[i] = S::zero();
                        }
                    }
                    accumulate(&mut grads, *x, dx)?;
                    grads[idx] = Some(g);
                }
                Op::AddConst { x, .. } => {
                    accumulate(&mut grads, *x, g.clone())?;
                    grads[idx] = Some(g);
                }
                Op::MulConst { x, c } => {
                    let c = *c;
                    accumulate(&mut grads, *x, g.map(|v| v * c))?;
                    grads[idx] = Some(g);
                }
                Op::Sum(a) => {
                    let s = g.item()?;
                    let da = self.vals[a.0].map(|_| s);
                    accumulate(&mut grads, *a, da)?;
                    grads[idx] = Some(g);
                }
                Op::Mean(a) => {
                    let n = S::of(self.vals[a.0].len() as f64);
                    let s = g.item()? / n;
                    let da = self.vals[a.0].map(|_| s);
                    accumulate(&mut grads, *a, da)?;
                    grads[idx] = Some(g);
                }
                Op::RowSum(a) => {
                    let (rows, cols) = self.vals[a.0].as_2d();
                    let mut da = Tensor::zeros(self.vals[a.0].shape().to_vec());
                    for r in 0..rows {
                        let gr = g.data()[r];
                        for c in 0..cols {
                            da.data_mut()[r * cols + c] = gr;
                        }
                    }
                    accumulate(&mut grads, *a, da)?;
                    grads[idx] = Some(g);
                }
                Op::BroadcastRows { x, .. } => {
                    accumulate(&mut grads, *x, g.col_sum())?;
                    grads[idx] = Some(g);
                }
                Op::Concat(a, b) => {
                    let (_, ca) = self.vals[a.0].as_2d();
                    let (gl, gr) = g.split_cols(ca)?;
                    accumulate(&mut grads, *a, match_rank(gl, &self.vals[a.0]))?;
                    accumulate(&mut grads, *b, match_rank(gr, &self.vals[b.0]))?;
                    grads[idx] = Some(g);
                }
            }
        }
        Ok(Gradients { grads })
    }
}

fn reshape2<S: Scalar>(t: &Tensor<S>, rows: usize, cols: usize) -> Tensor<S> {
    Tensor::from_vec(vec![rows, cols], t.data().to_vec()).expect("congruent reshape")
}

/// Gives `t` the same rank as `like` (a `(1, n)` gradient for a rank-1
/// value becomes rank-1).
fn match_rank<S: Scalar>(t: Tensor<S>, like: &Tensor<S>) -> Tensor<S> {
    if like.shape().len() == 1 && t.shape().len() == 2 {
        Tensor::vector(t.into_data())
    } else {
        t
    }
}

fn accumulate<S: Scalar>(
    grads: &mut [Option<Tensor<S>>],
    id: NodeId,
    delta: Tensor<S>,
) -> Result<(), NumericsError> {
    match grads[id.0].take() {
        Some(g) => grads[id.0] = Some(g.add(&delta)?),
        None => grads[id.0] = Some(delta),
    }
    Ok(())
}

/// Gradients produced by [`Tape::backward`], indexed by node.
#[derive(Debug)]
pub struct Gradients<S> {
    grads: Vec<Option<Tensor<S>>>,
}

impl<S: Scalar> Gradients<S> {
    /// Gradient with respect to `id`; zero if the node does not reach
    /// the output.
    pub fn wrt(&self, id: NodeId, like: &Tensor<S>) -> Tensor<S> {
        match &self.grads[id.index()] {
            Some(g) => g.clone(),
            None => Tensor::zeros(like.shape().to_vec()),
        }
    }
}

impl<S: Scalar> Tensor<S> {
    fn zip_min(&self, other: &Self) -> Result<Self, NumericsError> {
        if self.shape() != other.shape() {
            return Err(NumericsError::ShapeMismatch {
                op: "min",
                detail: format!("{:?} vs {:?}", self.shape(), other.shape()),
            });
        }
        let data = self
            .data()
            .iter()
            .zip(other.data())
            .map(|(&a, &b)| if a <= b { a } else { b })
            .collect();
        Tensor::from_vec(self.shape().to_vec(), data)
    }
}

/// Central-difference gradient of `f` at `x`, the standard independent
/// check for any tape-computed gradient.
pub fn central_difference_gradient<F>(f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut grad = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let orig = probe[i];
        probe[i] = orig + h;
        let fp = f(&probe);
        probe[i] = orig - h;
        let fm = f(&probe);
        probe[i] = orig;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    grad
}

/// Largest relative disagreement between two gradient vectors.
pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let denom = x.abs().max(y.abs()).max(1.0);
            (x - y).abs() / denom
        })
        .fold(0.0, f64::max)
}
