//! Chebyshev polynomials of the first kind, their zeros, and interpolation at
//! those zeros.

use std::f64::consts::PI;

use super::{check_domain, eval_checked, Basis, FilterCoefficients};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `T_k(x)` by the three-term recurrence.
pub fn cheb_t(k: usize, x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(cheb_t_unchecked(k, x))
}

pub(crate) fn cheb_t_unchecked(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 2..=k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `[T_0(x), ..., T_order(x)]`
pub fn cheb_t_all(order: usize, x: f64) -> Vec<f64> {
    let mut t = Vec::with_capacity(order + 1);
    t.push(1.0);
    if order >= 1 {
        t.push(x);
    }
    for k in 2..=order {
        t.push(2.0 * x * t[k - 1] - t[k - 2]);
    }
    t
}

/// The `K + 1` zeros of `T_{K+1}`, `x_j = cos((j + 1/2) π / (K + 1))`,
/// in decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevNodes {
    order: usize,
    nodes: Vec<f64>,
}

impl ChebyshevNodes {
    pub fn new(order: usize) -> Self {
        let m = (order + 1) as f64;
        let nodes = (0..=order)
            .map(|j| ((j as f64 + 0.5) * PI / m).cos())
            .collect();
        Self { order, nodes }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

pub fn cheb_nodes(order: usize) -> ChebyshevNodes {
    ChebyshevNodes::new(order)
}

/// The linear map from node values `h(x_j)` to series coefficients:
/// `M[k][j] = 2/(K+1) T_k(x_j)`, with row 0 halved when `halve_first` is set.
pub fn interpolation_matrix(order: usize, halve_first: bool) -> Matrix {
    let nodes = ChebyshevNodes::new(order);
    let scale = 2.0 / (order + 1) as f64;
    let columns: Vec<Vec<f64>> = nodes.nodes().iter().map(|&x| cheb_t_all(order, x)).collect();
    Matrix::from_fn(order + 1, order + 1, |k, j| {
        let v = scale * columns[j][k];
        if k == 0 && halve_first {
            v / 2.0
        } else {
            v
        }
    })
}

/// Series coefficients of the interpolant taking `values[j]` at node `x_j`.
pub fn coefficients_from_node_values(values: &[f64], halve_first: bool) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("need at least one node value".into()));
    }
    let m = interpolation_matrix(values.len() - 1, halve_first);
    m.matvec(values)
}

/// Chebyshev interpolation of `h` at the zeros of `T_{K+1}`.
pub fn cheb_interpolate(h: impl Fn(f64) -> f64, order: usize) -> Result<FilterCoefficients> {
    let nodes = ChebyshevNodes::new(order);
    let values = nodes
        .nodes()
        .iter()
        .map(|&x| eval_checked(&h, x))
        .collect::<Result<Vec<_>>>()?;
    FilterCoefficients::chebyshev(coefficients_from_node_values(&values, true)?)
}

/// `Σ c_k T_k(x)` by Clenshaw's recurrence.
pub fn eval_cheb_series(coeffs: &FilterCoefficients, x: f64) -> Result<f64> {
    if coeffs.basis() != Basis::Chebyshev {
        return Err(Error::InvalidArgument(format!(
            "expected chebyshev coefficients, got {}",
            coeffs.basis().name()
        )));
    }
    check_domain(x)?;
    Ok(clenshaw(coeffs.weights(), x))
}

pub(crate) fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c[0] + x * b1 - b2
}

/// `∏_j (x - x_j)`
pub fn monic_nodal(x: f64, nodes: &[f64]) -> f64 {
    nodes.iter().map(|&xj| x - xj).product()
}
