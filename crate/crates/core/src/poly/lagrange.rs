//! Interpolation through arbitrary nodes: barycentric Lagrange evaluation and
//! the monomial (Vandermonde) solve.

use super::{eval_checked, Basis, FilterCoefficients};
use crate::error::{Error, Result};

/// Node-count guard for the Vandermonde solve (degree 30).
pub const MAX_VANDERMONDE_NODES: usize = 31;

/// `K + 1` equally spaced nodes `-1 + 2k/K`; a single node sits at 0.
pub fn equispaced_nodes(order: usize) -> Vec<f64> {
    if order == 0 {
        return vec![0.0];
    }
    (0..=order)
        .map(|k| -1.0 + 2.0 * k as f64 / order as f64)
        .collect()
}

fn check_distinct(nodes: &[f64]) -> Result<()> {
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            if nodes[i] == nodes[j] {
                return Err(Error::DuplicateNodes(i, j));
            }
        }
    }
    Ok(())
}

/// Barycentric form of the interpolating polynomial through `(nodes, values)`.
#[derive(Debug, Clone)]
pub struct LagrangeInterpolant {
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl LagrangeInterpolant {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("need at least one node".into()));
        }
        if nodes.len() != values.len() {
            return Err(Error::dim(nodes.len(), values.len()));
        }
        check_distinct(&nodes)?;
        let mut weights: Vec<f64> = (0..nodes.len())
            .map(|j| {
                let prod: f64 = nodes
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &xk)| nodes[j] - xk)
                    .product();
                1.0 / prod
            })
            .collect();
        // the second barycentric form is invariant to a common scale
        let peak = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        weights.iter_mut().for_each(|w| *w /= peak);
        Ok(Self {
            nodes,
            values,
            weights,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xj, &fj), &wj) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let d = x - xj;
            if d == 0.0 {
                return fj;
            }
            let t = wj / d;
            num += t * fj;
            den += t;
        }
        num / den
    }
}

/// Evaluates at `x` the polynomial interpolating `h` at `nodes`.
pub fn lagrange_interpolate(h: impl Fn(f64) -> f64, nodes: &[f64], x: f64) -> Result<f64> {
    let values = nodes
        .iter()
        .map(|&xj| eval_checked(&h, xj))
        .collect::<Result<Vec<_>>>()?;
    Ok(LagrangeInterpolant::new(nodes.to_vec(), values)?.eval(x))
}

/// Monomial coefficients `a_0..a_K` of the interpolant, from the Vandermonde
/// system solved by Gaussian elimination with partial pivoting.
pub fn vandermonde_interpolate(h: impl Fn(f64) -> f64, nodes: &[f64]) -> Result<FilterCoefficients> {
    let m = nodes.len();
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one node".into()));
    }
    if m > MAX_VANDERMONDE_NODES {
        return Err(Error::Conditioning {
            nodes: m,
            limit: MAX_VANDERMONDE_NODES,
        });
    }
    check_distinct(nodes)?;
    let mut a: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&x| (0..m).scan(1.0, |p, _| { let v = *p; *p *= x; Some(v) }).collect())
        .collect();
    let mut b = nodes
        .iter()
        .map(|&x| eval_checked(&h, x))
        .collect::<Result<Vec<_>>>()?;

    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        for row in (col + 1)..m {
            let f = a[row][col] / p;
            if f == 0.0 {
                continue;
            }
            let (top, bottom) = a.split_at_mut(row);
            for (t, s) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *t -= f * s;
            }
            b[row] -= f * b[col];
        }
    }
    let mut coeffs = vec![0.0; m];
    for row in (0..m).rev() {
        let s: f64 = ((row + 1)..m).map(|k| a[row][k] * coeffs[k]).sum();
        coeffs[row] = (b[row] - s) / a[row][row];
    }
    FilterCoefficients::new(Basis::Monomial, coeffs)
}
