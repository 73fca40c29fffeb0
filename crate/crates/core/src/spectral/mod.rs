//! Filtering graph signals: the Chebyshev recurrence, the exact eigenbasis
//! filter used as an oracle, impulse filters, and perfect-filter recovery.

mod ring;

pub use ring::{build_ring, ring_demo, RingDemo, RingDemoRow};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{csv_line, fmt_g};
use crate::graph::{EigenDecomposition, OperatorKind, SpectralOperator};
use crate::linalg::Matrix;
use crate::poly::{uniform_grid, Basis, FilterCoefficients};

pub const DEFAULT_IMPULSE_TOL: f64 = 1e-6;
pub const DEFAULT_RECOVERY_EPS: f64 = 1e-8;

fn check_cheb_inputs(op: &SpectralOperator, coeffs: &FilterCoefficients) -> Result<()> {
    if !matches!(op.kind(), OperatorKind::ScaledLaplacian { .. }) {
        return Err(Error::InvalidArgument(format!(
            "chebyshev filtering needs the scaled laplacian, got {:?}",
            op.kind()
        )));
    }
    if coeffs.basis() != Basis::Chebyshev {
        return Err(Error::InvalidArgument(format!(
            "expected chebyshev coefficients, got {}",
            coeffs.basis().name()
        )));
    }
    Ok(())
}

/// `Σ w_k T_k(L̂) X` by the three-term recurrence; costs `K` operator
/// applications and never forms a matrix power.
pub fn apply_cheb_filter_matrix(
    op: &SpectralOperator,
    coeffs: &FilterCoefficients,
    x: &Matrix,
) -> Result<Matrix> {
    cheb_recurrence(op, coeffs, x, SpectralOperator::apply)
}

/// Same as [`apply_cheb_filter_matrix`] with every operator application on
/// the calling thread.
pub fn apply_cheb_filter_matrix_sequential(
    op: &SpectralOperator,
    coeffs: &FilterCoefficients,
    x: &Matrix,
) -> Result<Matrix> {
    cheb_recurrence(op, coeffs, x, SpectralOperator::apply_sequential)
}

fn cheb_recurrence(
    op: &SpectralOperator,
    coeffs: &FilterCoefficients,
    x: &Matrix,
    apply: impl Fn(&SpectralOperator, &Matrix) -> Result<Matrix>,
) -> Result<Matrix> {
    check_cheb_inputs(op, coeffs)?;
    if x.rows() != op.n() {
        return Err(Error::dim(format!("{} rows", op.n()), x.rows()));
    }
    let w = coeffs.weights();
    let mut y = x.scale(w[0]);
    if w.len() == 1 {
        return Ok(y);
    }
    let mut prev = x.clone();
    let mut cur = apply(op, x)?;
    y.add_assign_scaled(&cur, w[1]);
    for &wk in &w[2..] {
        let mut next = apply(op, &cur)?;
        next.as_mut_slice()
            .iter_mut()
            .zip(prev.as_slice())
            .for_each(|(n, &p)| *n = 2.0 * *n - p);
        y.add_assign_scaled(&next, wk);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(y)
}

pub fn apply_cheb_filter(op: &SpectralOperator, coeffs: &FilterCoefficients, x: &[f64]) -> Result<Vec<f64>> {
    Ok(apply_cheb_filter_matrix(op, coeffs, &Matrix::column(x))?.into_vec())
}

/// `U diag(r) Uᵀ x` for per-eigenvalue responses `r`.
pub fn apply_spectral_responses(eig: &EigenDecomposition, responses: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if responses.len() != eig.n() {
        return Err(Error::dim(eig.n(), responses.len()));
    }
    let mut c = eig.project(x)?;
    c.iter_mut().zip(responses).for_each(|(ci, &r)| *ci *= r);
    eig.expand(&c)
}

/// `U diag(h(λ_1), ..., h(λ_n)) Uᵀ x`
pub fn apply_exact_filter(eig: &EigenDecomposition, h: impl Fn(f64) -> f64, x: &[f64]) -> Result<Vec<f64>> {
    let responses = eig
        .eigenvalues
        .iter()
        .map(|&lambda| {
            let value = h(lambda);
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::Evaluation { at: lambda, value })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    apply_spectral_responses(eig, &responses, x)
}

/// Indicator of `|λ - target| <= tol`: the discrete-spectrum stand-in for an
/// impulse at `target`.
pub fn impulse_filter(target: f64, tol: f64) -> Result<impl Fn(f64) -> f64 + Copy> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("impulse tolerance must be positive, got {tol}")));
    }
    Ok(move |lambda: f64| if (lambda - target).abs() <= tol { 1.0 } else { 0.0 })
}

/// Which spectral axis a [`SampledFilter`] is expressed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterDomain {
    /// `λ̂ ∈ [-1, 1]`
    Scaled,
    /// `λ ∈ [0, 2]`, with `λ̂ = λ - 1`.
    Laplacian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFilter {
    pub domain: FilterDomain,
    pub lambdas: Vec<f64>,
    pub responses: Vec<f64>,
}

impl SampledFilter {
    pub fn new(domain: FilterDomain, lambdas: Vec<f64>, responses: Vec<f64>) -> Result<Self> {
        if lambdas.len() != responses.len() {
            return Err(Error::dim(lambdas.len(), responses.len()));
        }
        let (lo, hi) = match domain {
            FilterDomain::Scaled => (-1.0, 1.0),
            FilterDomain::Laplacian => (0.0, 2.0),
        };
        // eigenvalues from the dense solver can overshoot by rounding
        let slack = 1e-9;
        if let Some(&bad) = lambdas.iter().find(|&&l| !(l >= lo - slack && l <= hi + slack)) {
            return Err(Error::Domain {
                value: bad,
                domain: if domain == FilterDomain::Scaled { "[-1, 1]" } else { "[0, 2]" },
            });
        }
        Ok(Self {
            domain,
            lambdas,
            responses,
        })
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `lambda,response` with one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,response\n");
        for (l, r) in self.lambdas.iter().zip(&self.responses) {
            out.push_str(&csv_line([fmt_g(*l), fmt_g(*r)]));
            out.push('\n');
        }
        out
    }
}

/// Evaluates `f` (a function of `λ̂`) on a uniform grid of `grid` points over
/// the chosen axis.
pub fn sample_response(f: impl Fn(f64) -> f64, grid: usize, domain: FilterDomain) -> Result<SampledFilter> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("grid size must be >= 2, got {grid}")));
    }
    let scaled = uniform_grid(grid);
    let responses = scaled.iter().map(|&x| f(x)).collect();
    let lambdas = match domain {
        FilterDomain::Scaled => scaled,
        FilterDomain::Laplacian => scaled.iter().map(|x| x + 1.0).collect(),
    };
    SampledFilter::new(domain, lambdas, responses)
}

/// Samples a polynomial filter given on `λ̂`.
pub fn sample_filter_response(coeffs: &FilterCoefficients, grid: usize, domain: FilterDomain) -> Result<SampledFilter> {
    sample_response(|x| coeffs.eval_unchecked(x), grid, domain)
}

/// Per-eigenvalue responses `h_i = (Uᵀy)_i / (Uᵀx)_i`, the filter that maps
/// `x` exactly onto the `±1` labels `y`.
pub fn recover_perfect_filter(
    eig: &EigenDecomposition,
    x: &[f64],
    y: &[f64],
    eps: f64,
) -> Result<SampledFilter> {
    if let Some((i, &v)) = y.iter().enumerate().find(|(_, &v)| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidArgument(format!("label signal must be +1/-1, got {v} at node {i}")));
    }
    let px = eig.project(x)?;
    let py = eig.project(y)?;
    if let Some((index, &projection)) = px.iter().enumerate().find(|(_, p)| p.abs() <= eps) {
        return Err(Error::Recovery {
            index,
            projection: projection.abs(),
        });
    }
    let responses = py.iter().zip(&px).map(|(a, b)| a / b).collect();
    Ok(SampledFilter {
        domain: FilterDomain::Laplacian,
        lambdas: eig.eigenvalues.clone(),
        responses,
    })
}
