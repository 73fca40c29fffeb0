//! Undirected graphs in CSR form, node-classification datasets, and the
//! operators and eigensolver built on top of them.

mod eigen;
mod io;
mod operator;
mod synthetic;

use std::sync::Arc;

pub use eigen::{eigendecompose, jacobi_eigen, EigenDecomposition, MAX_DENSE_NODES};
pub use io::{load_dataset, read_edge_list, read_features, read_labels};
pub use operator::{estimate_lambda_max, OperatorKind, SpectralOperator};
pub use synthetic::{generate_synthetic, SyntheticKind};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Immutable undirected graph. Every undirected edge is stored in both
/// directions; neighbor lists are sorted and free of duplicates and self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an unordered edge list. Reversed and repeated
    /// pairs are merged; self-loops are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::Index { index: x, n });
                }
            }
            if u == v {
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(2 * edges.len());
        indptr.push(0);
        for mut nbrs in adj {
            nbrs.sort_unstable();
            nbrs.dedup();
            indices.extend_from_slice(&nbrs);
            indptr.push(indices.len());
        }
        Ok(Self { n, indptr, indices })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            indptr: vec![0; n + 1],
            indices: Vec::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// Undirected edge count `m`.
    pub fn num_edges(&self) -> usize {
        self.indices.len() / 2
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn degree(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.indices[self.indptr[i]..self.indptr[i + 1]]
    }

    /// Each undirected edge once, as `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| i < j)
                .map(move |&j| (i, j))
        })
    }

    pub fn dense_adjacency(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for &j in self.neighbors(i) {
                a.set(i, j, 1.0);
            }
        }
        a
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::dim(self.n, perm.len()));
        }
        let edges: Vec<_> = self.edges().map(|(i, j)| (perm[i], perm[j])).collect();
        Graph::from_edges(self.n, &edges)
    }
}

/// Graph, node features, and integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub graph: Arc<Graph>,
    pub features: Matrix,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl Dataset {
    pub fn new(graph: Graph, features: Matrix, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        let n = graph.num_nodes();
        if features.rows() != n {
            return Err(Error::dim(format!("{n} feature rows"), features.rows()));
        }
        if labels.len() != n {
            return Err(Error::dim(format!("{n} labels"), labels.len()));
        }
        if let Some((node, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= num_classes) {
            return Err(Error::Label {
                node,
                label,
                classes: num_classes,
            });
        }
        Ok(Self {
            graph: Arc::new(graph),
            features,
            labels,
            num_classes,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }
}

/// Mean over nodes of the fraction of neighbors sharing the node's label.
/// Isolated nodes contribute zero.
pub fn homophily(dataset: &Dataset) -> f64 {
    let g = &dataset.graph;
    let n = g.num_nodes();
    if n == 0 {
        return 0.0;
    }
    let total: f64 = (0..n)
        .map(|v| {
            let nbrs = g.neighbors(v);
            if nbrs.is_empty() {
                return 0.0;
            }
            let same = nbrs
                .iter()
                .filter(|&&u| dataset.labels[u] == dataset.labels[v])
                .count();
            same as f64 / nbrs.len() as f64
        })
        .sum();
    total / n as f64
}
