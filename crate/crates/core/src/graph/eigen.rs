//! Dense symmetric eigendecomposition by cyclic Jacobi rotations.

use super::SpectralOperator;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Largest operator the dense solver accepts.
pub const MAX_DENSE_NODES: usize = 3000;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Uᵀ x`
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::dim(self.n(), x.len()));
        }
        let u = &self.eigenvectors;
        let mut out = vec![0.0; self.n()];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &uij) in out.iter_mut().zip(u.row(i)) {
                *o += uij * xi;
            }
        }
        Ok(out)
    }

    /// `U c`
    pub fn expand(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.eigenvectors.matvec(coeffs)
    }

    /// `U diag(λ) Uᵀ`
    pub fn reconstruct(&self) -> Matrix {
        let u = &self.eigenvectors;
        let scaled = Matrix::from_fn(u.rows(), u.cols(), |i, j| u.get(i, j) * self.eigenvalues[j]);
        scaled
            .matmul_nt(u)
            .expect("eigenvector matrix is square")
    }
}

/// Densifies `op` and diagonalizes it.
pub fn eigendecompose(op: &SpectralOperator) -> Result<EigenDecomposition> {
    if op.n() > MAX_DENSE_NODES {
        return Err(Error::Capacity(format!(
            "dense eigendecomposition limited to {MAX_DENSE_NODES} nodes, got {}",
            op.n()
        )));
    }
    jacobi_eigen(&op.to_dense())
}

/// Cyclic Jacobi on a symmetric matrix. Eigenvectors are normalized so their
/// largest-magnitude component is positive.
pub fn jacobi_eigen(m: &Matrix) -> Result<EigenDecomposition> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::dim("square matrix", format!("{:?}", m.shape())));
    }
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let scale = m.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);

    let off_norm = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a.get(i, j).powi(2);
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    let mut off = off_norm(&a);
    for _ in 0..MAX_SWEEPS {
        if off <= OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
        off = off_norm(&a);
    }
    if !converged && off > OFF_DIAGONAL_TOL * scale {
        return Err(Error::NotConverged {
            sweeps: MAX_SWEEPS,
            off_norm: off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut eigenvectors = Matrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    for c in 0..n {
        let col = eigenvectors.col(c);
        let peak = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lead = col
            .iter()
            .position(|x| x.abs() >= peak * (1.0 - 1e-9))
            .unwrap_or(0);
        if col[lead] < 0.0 {
            for (r, v) in col.iter().enumerate() {
                eigenvectors.set(r, c, -v);
            }
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `A <- Jᵀ A J`, `V <- V J` for the rotation in the `(p, q)` plane.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for r in 0..n {
        let arp = a.get(r, p);
        let arq = a.get(r, q);
        a.set(r, p, c * arp - s * arq);
        a.set(r, q, s * arp + c * arq);
    }
    for r in 0..n {
        let apr = a.get(p, r);
        let aqr = a.get(q, r);
        a.set(p, r, c * apr - s * aqr);
        a.set(q, r, s * apr + c * aqr);
    }
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);
    for r in 0..n {
        let vrp = v.get(r, p);
        let vrq = v.get(r, q);
        v.set(r, p, c * vrp - s * vrq);
        v.set(r, q, s * vrp + c * vrq);
    }
}
