//! Reverse-mode differentiation over dense 2-D tensors.
//!
//! A [`Tape`] records every operation in execution order; [`Tape::backward`]
//! walks it once in reverse and accumulates gradients into the
//! [`ParamStore`]. Graph products hold a borrowed operator and use its
//! symmetry for the backward pass.

mod adam;
mod gradcheck;
mod params;

pub use adam::{Adam, GroupHyper};
pub use gradcheck::{gradcheck, GradCheckReport, GRADCHECK_FLOOR, GRADCHECK_STEP};
pub use params::{glorot_uniform, ParamGroup, ParamId, ParamStore, Tensor};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::SpectralOperator;
use crate::linalg::Matrix;

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

enum Op<'a> {
    Leaf,
    Param(ParamId),
    MatMul(Var, Var),
    AddBias(Var, Var),
    Relu(Var),
    Dropout(Var, Vec<f64>),
    Scale(Var, f64),
    Add(Var, Var),
    /// `a x + b S x`
    Graph {
        op: &'a SpectralOperator,
        x: Var,
        a: f64,
        b: f64,
    },
    /// `Σ_k scales[k] w[k] terms[k]`
    WeightedSum {
        terms: Vec<Var>,
        weights: Var,
        scales: Vec<f64>,
    },
    LogSoftmax(Var),
    /// Mean of `-logp[row, class]` over the listed pairs.
    Nll(Var, Vec<(usize, usize)>),
    Sum(Var),
}

struct Node<'a> {
    value: Matrix,
    requires_grad: bool,
    op: Op<'a>,
}

#[derive(Default)]
pub struct Tape<'a> {
    nodes: Vec<Node<'a>>,
    grads: Vec<Option<Matrix>>,
    consumed: bool,
}

impl<'a> Tape<'a> {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            grads: Vec::new(),
            consumed: false,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Matrix, requires_grad: bool, op: Op<'a>) -> Var {
        self.nodes.push(Node {
            value,
            requires_grad,
            op,
        });
        Var(self.nodes.len() - 1)
    }

    fn needs(&self, vars: &[Var]) -> bool {
        vars.iter().any(|v| self.nodes[v.0].requires_grad)
    }

    pub fn value(&self, v: Var) -> &Matrix {
        &self.nodes[v.0].value
    }

    /// The single entry of a `1 x 1` value.
    pub fn scalar(&self, v: Var) -> f64 {
        self.nodes[v.0].value.get(0, 0)
    }

    /// Gradient of the last backward pass with respect to `v`.
    pub fn grad(&self, v: Var) -> Option<&Matrix> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }

    pub fn leaf(&mut self, value: Matrix, requires_grad: bool) -> Var {
        self.push(value, requires_grad, Op::Leaf)
    }

    pub fn constant(&mut self, value: Matrix) -> Var {
        self.leaf(value, false)
    }

    pub fn param(&mut self, store: &ParamStore, id: ParamId) -> Var {
        let t = store.tensor(id);
        self.push(t.value.clone(), t.requires_grad, Op::Param(id))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).matmul(self.value(b))?;
        let rg = self.needs(&[a, b]);
        Ok(self.push(value, rg, Op::MatMul(a, b)))
    }

    /// Adds the `1 x c` row `bias` to every row of `x`.
    pub fn add_bias(&mut self, x: Var, bias: Var) -> Result<Var> {
        let (xv, bv) = (self.value(x), self.value(bias));
        if bv.rows() != 1 || bv.cols() != xv.cols() {
            return Err(Error::dim(format!("[1, {}]", xv.cols()), format!("{:?}", bv.shape())));
        }
        let b = bv.as_slice();
        let value = Matrix::from_fn(xv.rows(), xv.cols(), |i, j| xv.get(i, j) + b[j]);
        let rg = self.needs(&[x, bias]);
        Ok(self.push(value, rg, Op::AddBias(x, bias)))
    }

    pub fn relu(&mut self, x: Var) -> Var {
        let value = self.value(x).map(|v| v.max(0.0));
        let rg = self.needs(&[x]);
        self.push(value, rg, Op::Relu(x))
    }

    /// Inverted dropout: zeroes each entry with probability `p` and scales the
    /// survivors by `1 / (1 - p)`. Identity when not training or `p == 0`.
    pub fn dropout(&mut self, x: Var, p: f64, training: bool, rng: &mut impl Rng) -> Result<Var> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("dropout rate must be in [0, 1), got {p}")));
        }
        if !training || p == 0.0 {
            return Ok(x);
        }
        let keep = 1.0 / (1.0 - p);
        let mask: Vec<f64> = (0..self.value(x).len())
            .map(|_| if rng.random::<f64>() < p { 0.0 } else { keep })
            .collect();
        let xv = self.value(x);
        let data = xv.as_slice().iter().zip(&mask).map(|(v, m)| v * m).collect();
        let value = Matrix::from_vec(xv.rows(), xv.cols(), data)?;
        let rg = self.needs(&[x]);
        Ok(self.push(value, rg, Op::Dropout(x, mask)))
    }

    pub fn scale(&mut self, x: Var, s: f64) -> Var {
        let value = self.value(x).scale(s);
        let rg = self.needs(&[x]);
        self.push(value, rg, Op::Scale(x, s))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.shape() != bv.shape() {
            return Err(Error::dim(format!("{:?}", av.shape()), format!("{:?}", bv.shape())));
        }
        let mut value = av.clone();
        value.add_assign_scaled(bv, 1.0);
        let rg = self.needs(&[a, b]);
        Ok(self.push(value, rg, Op::Add(a, b)))
    }

    /// `S x` for a symmetric graph operator `S`.
    pub fn graph_matmul(&mut self, op: &'a SpectralOperator, x: Var) -> Result<Var> {
        self.graph_affine(op, x, 0.0, 1.0)
    }

    /// `a x + b S x` in one step, e.g. `(2I - L) x`.
    pub fn graph_affine(&mut self, op: &'a SpectralOperator, x: Var, a: f64, b: f64) -> Result<Var> {
        let mut value = op.apply(self.value(x))?.scale(b);
        if a != 0.0 {
            value.add_assign_scaled(self.value(x), a);
        }
        let rg = self.needs(&[x]);
        Ok(self.push(value, rg, Op::Graph { op, x, a, b }))
    }

    /// `Σ_k scales[k] · w[k] · terms[k]` where `w` is any tensor with one
    /// entry per term.
    pub fn weighted_sum(&mut self, terms: &[Var], weights: Var, scales: &[f64]) -> Result<Var> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("weighted sum of no terms".into()));
        }
        let w = self.value(weights).as_slice();
        if w.len() != terms.len() || scales.len() != terms.len() {
            return Err(Error::dim(terms.len(), format!("{} weights, {} scales", w.len(), scales.len())));
        }
        let shape = self.value(terms[0]).shape();
        let mut value = Matrix::zeros(shape[0], shape[1]);
        for ((t, &wk), &sk) in terms.iter().zip(w).zip(scales) {
            let tv = self.value(*t);
            if tv.shape() != shape {
                return Err(Error::dim(format!("{shape:?}"), format!("{:?}", tv.shape())));
            }
            value.add_assign_scaled(tv, wk * sk);
        }
        let mut inputs = terms.to_vec();
        inputs.push(weights);
        let rg = self.needs(&inputs);
        Ok(self.push(
            value,
            rg,
            Op::WeightedSum {
                terms: terms.to_vec(),
                weights,
                scales: scales.to_vec(),
            },
        ))
    }

    /// Row-wise log-softmax.
    pub fn log_softmax(&mut self, x: Var) -> Var {
        let xv = self.value(x);
        let mut value = xv.clone();
        let cols = xv.cols().max(1);
        for row in value.as_mut_slice().chunks_mut(cols) {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            row.iter_mut().for_each(|v| *v -= lse);
        }
        let rg = self.needs(&[x]);
        self.push(value, rg, Op::LogSoftmax(x))
    }

    /// Mean negative log-likelihood of `labels[i]` over the rows in `mask`.
    pub fn nll_loss(&mut self, logp: Var, labels: &[usize], mask: &[usize]) -> Result<Var> {
        let lv = self.value(logp);
        if labels.len() != lv.rows() {
            return Err(Error::dim(lv.rows(), labels.len()));
        }
        if mask.is_empty() {
            return Err(Error::InvalidArgument("loss over an empty node set".into()));
        }
        let mut pairs = Vec::with_capacity(mask.len());
        for &i in mask {
            if i >= lv.rows() {
                return Err(Error::Index { index: i, n: lv.rows() });
            }
            if labels[i] >= lv.cols() {
                return Err(Error::Label {
                    node: i,
                    label: labels[i],
                    classes: lv.cols(),
                });
            }
            pairs.push((i, labels[i]));
        }
        let loss = -pairs.iter().map(|&(i, c)| lv.get(i, c)).sum::<f64>() / pairs.len() as f64;
        let rg = self.needs(&[logp]);
        Ok(self.push(Matrix::column(&[loss]), rg, Op::Nll(logp, pairs)))
    }

    pub fn sum(&mut self, x: Var) -> Var {
        let value = Matrix::column(&[self.value(x).sum()]);
        let rg = self.needs(&[x]);
        self.push(value, rg, Op::Sum(x))
    }

    /// Back-propagates from the scalar `loss`, accumulating into `store` for
    /// every parameter read through [`Tape::param`]. A tape supports one
    /// backward pass.
    pub fn backward(&mut self, loss: Var, store: &mut ParamStore) -> Result<()> {
        if self.consumed {
            return Err(Error::StaleTape);
        }
        if self.value(loss).shape() != [1, 1] {
            return Err(Error::dim("[1, 1]", format!("{:?}", self.value(loss).shape())));
        }
        self.consumed = true;
        let mut grads: Vec<Option<Matrix>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Matrix::column(&[1.0]));

        for idx in (0..=loss.0).rev() {
            let node = &self.nodes[idx];
            if !node.requires_grad {
                continue;
            }
            let Some(g) = grads[idx].take() else { continue };
            self.propagate(idx, &g, &mut grads, store)?;
            grads[idx] = Some(g);
        }
        self.grads = grads;
        Ok(())
    }

    fn propagate(
        &self,
        idx: usize,
        g: &Matrix,
        grads: &mut [Option<Matrix>],
        store: &mut ParamStore,
    ) -> Result<()> {
        let nodes = &self.nodes;
        let mut send = |v: Var, contribution: Matrix| {
            if !nodes[v.0].requires_grad {
                return;
            }
            match &mut grads[v.0] {
                Some(acc) => acc.add_assign_scaled(&contribution, 1.0),
                slot @ None => *slot = Some(contribution),
            }
        };
        match &nodes[idx].op {
            Op::Leaf => {}
            Op::Param(id) => store.accumulate_grad(*id, g),
            Op::MatMul(a, b) => {
                if nodes[a.0].requires_grad {
                    send(*a, g.matmul_nt(&nodes[b.0].value)?);
                }
                if nodes[b.0].requires_grad {
                    send(*b, nodes[a.0].value.matmul_tn(g)?);
                }
            }
            Op::AddBias(x, bias) => {
                let cols = g.cols();
                let mut gb = vec![0.0; cols];
                for row in g.as_slice().chunks(cols.max(1)) {
                    gb.iter_mut().zip(row).for_each(|(s, v)| *s += v);
                }
                send(*bias, Matrix::from_vec(1, cols, gb)?);
                send(*x, g.clone());
            }
            Op::Relu(x) => {
                let xv = &nodes[x.0].value;
                let data = g
                    .as_slice()
                    .iter()
                    .zip(xv.as_slice())
                    .map(|(gi, &xi)| if xi > 0.0 { *gi } else { 0.0 })
                    .collect();
                send(*x, Matrix::from_vec(g.rows(), g.cols(), data)?);
            }
            Op::Dropout(x, mask) => {
                let data = g.as_slice().iter().zip(mask).map(|(gi, m)| gi * m).collect();
                send(*x, Matrix::from_vec(g.rows(), g.cols(), data)?);
            }
            Op::Scale(x, s) => send(*x, g.scale(*s)),
            Op::Add(a, b) => {
                send(*a, g.clone());
                send(*b, g.clone());
            }
            Op::Graph { op, x, a, b } => {
                let mut gx = op.apply(g)?.scale(*b);
                if *a != 0.0 {
                    gx.add_assign_scaled(g, *a);
                }
                send(*x, gx);
            }
            Op::WeightedSum {
                terms,
                weights,
                scales,
            } => {
                let w = nodes[weights.0].value.as_slice();
                if nodes[weights.0].requires_grad {
                    let gw: Vec<f64> = terms
                        .iter()
                        .zip(scales)
                        .map(|(t, s)| s * g.dot(&nodes[t.0].value))
                        .collect();
                    let [r, c] = nodes[weights.0].value.shape();
                    send(*weights, Matrix::from_vec(r, c, gw)?);
                }
                for ((t, &wk), &sk) in terms.iter().zip(w).zip(scales) {
                    if nodes[t.0].requires_grad {
                        send(*t, g.scale(wk * sk));
                    }
                }
            }
            Op::LogSoftmax(x) => {
                let out = &nodes[idx].value;
                let cols = g.cols().max(1);
                let mut gx = g.clone();
                for (grow, orow) in gx.as_mut_slice().chunks_mut(cols).zip(out.as_slice().chunks(cols)) {
                    let total: f64 = grow.iter().sum();
                    grow.iter_mut()
                        .zip(orow)
                        .for_each(|(gi, &lp)| *gi -= lp.exp() * total);
                }
                send(*x, gx);
            }
            Op::Nll(logp, pairs) => {
                let [r, c] = nodes[logp.0].value.shape();
                let mut gl = Matrix::zeros(r, c);
                let scale = -g.get(0, 0) / pairs.len() as f64;
                for &(i, k) in pairs {
                    gl.set(i, k, gl.get(i, k) + scale);
                }
                send(*logp, gl);
            }
            Op::Sum(x) => {
                let [r, c] = nodes[x.0].value.shape();
                send(*x, Matrix::from_fn(r, c, |_, _| g.get(0, 0)));
            }
        }
        Ok(())
    }
}
