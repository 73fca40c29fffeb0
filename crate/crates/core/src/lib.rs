//! Spectral graph filtering toolkit: sparse graph operators, polynomial
//! approximation on `[-1, 1]` (Chebyshev interpolation, Lagrange,
//! Vandermonde, Bernstein), polynomial filters applied by recurrence, a small
//! reverse-mode differentiation engine, and node-classification models built
//! on these filters.

pub mod autodiff;
pub mod error;
pub mod format;
pub mod graph;
pub mod linalg;
pub mod models;
pub mod par;
pub mod poly;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::Matrix;
