use std::sync::Arc;

use serde::Serialize;

use super::{apply_exact_filter, impulse_filter};
use crate::error::{Error, Result};
use crate::format::{csv_line, fmt_g};
use crate::graph::{eigendecompose, Graph, OperatorKind, SpectralOperator};

/// The cycle `0 - 1 - ... - (n-1) - 0`.
pub fn build_ring(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("a ring needs at least 3 nodes, got {n}")));
    }
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingDemoRow {
    pub node: usize,
    pub input: f64,
    pub low_pass: f64,
    pub high_pass: f64,
    pub band_pass: f64,
}

/// A one-hot signal at node 0 pushed through impulse filters at `λ = 0`,
/// `λ = 2` and `λ = 1` of the normalized Laplacian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingDemo {
    pub rows: Vec<RingDemoRow>,
    /// One message per impulse that selected no eigenvalue.
    pub warnings: Vec<String>,
}

impl RingDemo {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,input,low_pass,high_pass,band_pass\n");
        for r in &self.rows {
            out.push_str(&csv_line([
                r.node.to_string(),
                fmt_g(r.input),
                fmt_g(r.low_pass),
                fmt_g(r.high_pass),
                fmt_g(r.band_pass),
            ]));
            out.push('\n');
        }
        out
    }
}

pub fn ring_demo(n: usize, tol: f64) -> Result<RingDemo> {
    let ring = Arc::new(build_ring(n)?);
    let op = SpectralOperator::new(ring, OperatorKind::NormalizedLaplacian)?;
    let eig = eigendecompose(&op)?;
    let mut input = vec![0.0; n];
    input[0] = 1.0;

    let mut warnings = Vec::new();
    let mut filtered = Vec::with_capacity(3);
    for (name, target) in [("low_pass", 0.0), ("high_pass", 2.0), ("band_pass", 1.0)] {
        let h = impulse_filter(target, tol)?;
        if !eig.eigenvalues.iter().any(|&l| h(l) == 1.0) {
            warnings.push(format!(
                "{name}: no eigenvalue within {tol:e} of {target} on a ring of {n} nodes; output is zero"
            ));
        }
        filtered.push(apply_exact_filter(&eig, h, &input)?);
    }
    let rows = (0..n)
        .map(|i| RingDemoRow {
            node: i,
            input: input[i],
            low_pass: filtered[0][i],
            high_pass: filtered[1][i],
            band_pass: filtered[2][i],
        })
        .collect();
    Ok(RingDemo { rows, warnings })
}
