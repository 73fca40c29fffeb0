//! Polynomial bases and approximation on `[-1, 1]`.

mod bernstein;
mod chebyshev;
mod lagrange;
mod study;

pub use bernstein::{bernstein_approximate, bernstein_basis};
pub(crate) use bernstein::binomial;
pub use chebyshev::{
    cheb_interpolate, cheb_nodes, cheb_t, cheb_t_all, coefficients_from_node_values,
    eval_cheb_series, interpolation_matrix, monic_nodal, ChebyshevNodes,
};
pub use lagrange::{equispaced_nodes, lagrange_interpolate, vandermonde_interpolate, LagrangeInterpolant, MAX_VANDERMONDE_NODES};
pub use study::{
    approximate, coefficient_decay_rate, error_study, max_grid_error, uniform_grid, ApproxMethod,
    ErrorStudyRow, FilterFunction, DECAY_FLOOR,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Chebyshev,
    Monomial,
    Bernstein,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Chebyshev => "chebyshev",
            Basis::Monomial => "monomial",
            Basis::Bernstein => "bernstein",
        }
    }
}

/// A degree-`K` polynomial on `[-1, 1]` given by `K + 1` weights in one of
/// the supported bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterCoefficients {
    basis: Basis,
    weights: Vec<f64>,
}

impl FilterCoefficients {
    pub fn new(basis: Basis, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("filter needs at least one weight".into()));
        }
        if let Some(&bad) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite filter weight {bad}")));
        }
        Ok(Self { basis, weights })
    }

    pub fn chebyshev(weights: Vec<f64>) -> Result<Self> {
        Self::new(Basis::Chebyshev, weights)
    }

    /// `h ≡ 1` in the Chebyshev basis.
    pub fn identity() -> Self {
        Self {
            basis: Basis::Chebyshev,
            weights: vec![1.0],
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn order(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match self.basis {
            Basis::Chebyshev => chebyshev::clenshaw(&self.weights, x),
            Basis::Monomial => self.weights.iter().rev().fold(0.0, |acc, &w| acc * x + w),
            Basis::Bernstein => bernstein::de_casteljau(&self.weights, (1.0 + x) / 2.0),
        }
    }
}

pub(crate) fn check_domain(x: f64) -> Result<()> {
    if x.abs() > 1.0 || x.is_nan() {
        return Err(Error::Domain {
            value: x,
            domain: "[-1, 1]",
        });
    }
    Ok(())
}

pub(crate) fn eval_checked(h: &dyn Fn(f64) -> f64, x: f64) -> Result<f64> {
    let value = h(x);
    if !value.is_finite() {
        return Err(Error::Evaluation { at: x, value });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_horner() {
        let p = FilterCoefficients::new(Basis::Monomial, vec![1.0, -2.0, 3.0]).unwrap();
        assert!((p.eval(0.5).unwrap() - (1.0 - 1.0 + 0.75)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(FilterCoefficients::chebyshev(vec![]).is_err());
        assert!(FilterCoefficients::chebyshev(vec![f64::NAN]).is_err());
    }

    #[test]
    fn domain_checked() {
        let p = FilterCoefficients::identity();
        assert!(matches!(p.eval(1.5), Err(Error::Domain { .. })));
        assert_eq!(p.eval(-1.0).unwrap(), 1.0);
    }
}
