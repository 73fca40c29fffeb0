use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    /// `L = I - D^{-1/2} A D^{-1/2}`
    NormalizedLaplacian,
    /// `(2 / lambda_max) L - I`
    ScaledLaplacian { lambda_max: f64 },
    /// `(D + I)^{-1/2} (A + I) (D + I)^{-1/2}`
    RenormalizedAdjacency,
}

impl OperatorKind {
    /// Scaled Laplacian with the spectral bound `lambda_max = 2`.
    pub const SCALED: OperatorKind = OperatorKind::ScaledLaplacian { lambda_max: 2.0 };
}

/// A symmetric sparse operator over a graph. Every kind is evaluated row by
/// row as `y_i = diag_i x_i + off * d_i * sum_{j ~ i} d_j x_j`.
#[derive(Debug, Clone)]
pub struct SpectralOperator {
    kind: OperatorKind,
    graph: Arc<Graph>,
    inv_sqrt_deg: Vec<f64>,
    diag: Vec<f64>,
    off: f64,
}

impl SpectralOperator {
    pub fn new(graph: Arc<Graph>, kind: OperatorKind) -> Result<Self> {
        let n = graph.num_nodes();
        let deg = |i: usize| graph.degree(i) as f64;
        let (inv_sqrt_deg, diag, off) = match kind {
            OperatorKind::NormalizedLaplacian => {
                (Self::laplacian_scaling(&graph), vec![1.0; n], -1.0)
            }
            OperatorKind::ScaledLaplacian { lambda_max } => {
                if !(lambda_max > 0.0 && lambda_max.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "lambda_max must be positive, got {lambda_max}"
                    )));
                }
                let s = 2.0 / lambda_max;
                (Self::laplacian_scaling(&graph), vec![s - 1.0; n], -s)
            }
            OperatorKind::RenormalizedAdjacency => {
                let d: Vec<f64> = (0..n).map(|i| 1.0 / (deg(i) + 1.0).sqrt()).collect();
                let diag = d.iter().map(|v| v * v).collect();
                (d, diag, 1.0)
            }
        };
        Ok(Self {
            kind,
            graph,
            inv_sqrt_deg,
            diag,
            off,
        })
    }

    fn laplacian_scaling(graph: &Graph) -> Vec<f64> {
        (0..graph.num_nodes())
            .map(|i| match graph.degree(i) {
                0 => 0.0,
                d => 1.0 / (d as f64).sqrt(),
            })
            .collect()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn inv_sqrt_deg(&self) -> &[f64] {
        &self.inv_sqrt_deg
    }

    #[inline]
    fn row_into(&self, i: usize, x: &[f64], width: usize, out: &mut [f64]) {
        let d = &self.inv_sqrt_deg;
        let own = &x[i * width..(i + 1) * width];
        out.fill(0.0);
        if d[i] != 0.0 {
            for &j in self.graph.neighbors(i) {
                let w = d[j];
                let src = &x[j * width..(j + 1) * width];
                for (o, &v) in out.iter_mut().zip(src) {
                    *o += w * v;
                }
            }
        }
        let scale = self.off * d[i];
        let dg = self.diag[i];
        for (o, &v) in out.iter_mut().zip(own) {
            *o = dg * v + scale * *o;
        }
    }

    fn check_rows(&self, rows: usize) -> Result<()> {
        if rows != self.n() {
            return Err(Error::dim(format!("{} rows", self.n()), rows));
        }
        Ok(())
    }

    /// Applies the operator to every column of `x` (`n x d`, row-major).
    /// Rows are computed independently, so the result is identical for any
    /// thread count.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        self.check_rows(x.rows())?;
        let width = x.cols();
        let mut out = Matrix::zeros(x.rows(), width);
        let src = x.as_slice();
        par::for_each_row(out.as_mut_slice(), width, |i, row| {
            self.row_into(i, src, width, row)
        });
        Ok(out)
    }

    pub fn apply_sequential(&self, x: &Matrix) -> Result<Matrix> {
        self.check_rows(x.rows())?;
        let width = x.cols();
        let mut out = Matrix::zeros(x.rows(), width);
        let src = x.as_slice();
        par::for_each_row_sequential(out.as_mut_slice(), width, |i, row| {
            self.row_into(i, src, width, row)
        });
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_rows(x.len())?;
        let mut out = vec![0.0; x.len()];
        par::for_each_row(&mut out, 1, |i, row| self.row_into(i, x, 1, row));
        Ok(out)
    }

    pub fn matvec_sequential(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_rows(x.len())?;
        let mut out = vec![0.0; x.len()];
        par::for_each_row_sequential(&mut out, 1, |i, row| self.row_into(i, x, 1, row));
        Ok(out)
    }

    /// Dense `n x n` form, for oracles and the eigensolver.
    pub fn to_dense(&self) -> Matrix {
        let n = self.n();
        let d = &self.inv_sqrt_deg;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, self.diag[i]);
            for &j in self.graph.neighbors(i) {
                m.set(i, j, self.off * d[i] * d[j]);
            }
        }
        m
    }
}

/// Power-iteration estimate of the largest eigenvalue of the normalized
/// Laplacian. Returns `rho + |L v - rho v|` capped at 2, and 0 for graphs
/// without edges.
pub fn estimate_lambda_max(op: &SpectralOperator, iters: usize, tol: f64) -> Result<f64> {
    if op.kind() != OperatorKind::NormalizedLaplacian {
        return Err(Error::InvalidArgument(
            "lambda_max estimation needs the normalized Laplacian".into(),
        ));
    }
    if iters == 0 {
        return Err(Error::InvalidArgument("iters must be at least 1".into()));
    }
    if op.graph().num_edges() == 0 {
        return Ok(0.0);
    }
    let n = op.n();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    normalize(&mut v);
    let mut estimate = 2.0;
    for _ in 0..iters {
        let w = op.matvec_sequential(&v)?;
        let rho: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let resid = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - rho * b).powi(2))
            .sum::<f64>()
            .sqrt();
        estimate = (rho + resid).min(2.0);
        if resid <= tol {
            break;
        }
        v = w;
        if normalize(&mut v) == 0.0 {
            break;
        }
    }
    Ok(estimate)
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}
