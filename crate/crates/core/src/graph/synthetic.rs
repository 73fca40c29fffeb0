//! Seeded two-class benchmark graphs.
//!
//! The homophilic generator plants the labels in two dense blocks and gives
//! every node a weak noisy copy of its label, so averaging over neighbors
//! (a low-pass filter) is what separates the classes.
//!
//! The heterophilic generator places nodes on a cycle and links each node to
//! the opposite-parity nodes at offsets 1 and 3, which makes the graph
//! bipartite with the label being the parity. Features carry a small label
//! offset on top of a large nuisance field built from the lowest cycle
//! harmonics. The nuisance lives in the low end of the spectrum and the
//! labels sit exactly on the eigenvalue-2 eigenvector, so only a high-pass
//! response recovers them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Dataset, Graph};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    Homophilic,
    Heterophilic,
}

impl std::str::FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "homophilic" => Ok(Self::Homophilic),
            "heterophilic" => Ok(Self::Heterophilic),
            other => Err(Error::InvalidArgument(format!("unknown synthetic kind {other:?}"))),
        }
    }
}

const FEATURES: usize = 8;

pub fn generate_synthetic(n: usize, kind: SyntheticKind, seed: u64) -> Result<Dataset> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("synthetic graphs need n >= 8, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SyntheticKind::Homophilic => homophilic(n, &mut rng),
        SyntheticKind::Heterophilic => {
            if !n.is_multiple_of(2) {
                return Err(Error::InvalidArgument(format!(
                    "heterophilic synthetic graphs need even n, got {n}"
                )));
            }
            heterophilic(n, &mut rng)
        }
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn homophilic(n: usize, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let half = n / 2;
    let labels: Vec<usize> = (0..n).map(|i| usize::from(i >= half)).collect();
    let p_in = (10.0 / (half.max(2) - 1) as f64).min(1.0);
    let p_out = 0.5 / (n - half) as f64;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    let (mu, sigma) = (0.5, 2.0);
    let features = Matrix::from_fn(n, FEATURES, |i, _| {
        let sign = if labels[i] == 0 { -1.0 } else { 1.0 };
        mu * sign + sigma * normal(rng)
    });
    Dataset::new(Graph::from_edges(n, &edges)?, features, labels, 2)
}

fn heterophilic(n: usize, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let mut edges = Vec::with_capacity(2 * n + n / 25);
    for i in 0..n {
        edges.push((i, (i + 1) % n));
        edges.push((i, (i + 3) % n));
    }
    for _ in 0..n / 25 {
        let u = rng.random_range(0..n);
        let v = (u + rng.random_range(1..n)) % n;
        edges.push((u, v));
    }

    // Ten cycle frequencies keep the nuisance below eigenvalue ~0.25 while
    // making neighboring nodes differ by more than the label offset.
    const MODES: usize = 10;
    let (amplitude, mu, sigma) = (2.0, 1.0, 0.5);
    let coeffs: Vec<[f64; 2]> = (0..FEATURES * MODES)
        .map(|_| [normal(rng), normal(rng)])
        .collect();
    let features = Matrix::from_fn(n, FEATURES, |i, d| {
        let phase = 2.0 * PI * i as f64 / n as f64;
        let nuisance: f64 = (0..MODES)
            .map(|k| {
                let [a, b] = coeffs[d * MODES + k];
                let f = (k + 1) as f64;
                a * (f * phase).cos() + b * (f * phase).sin()
            })
            .sum();
        let sign = if labels[i] == 0 { -1.0 } else { 1.0 };
        amplitude * nuisance + mu * sign + sigma * normal(rng)
    });
    Dataset::new(Graph::from_edges(n, &edges)?, features, labels, 2)
}
