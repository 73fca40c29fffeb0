//! Error-study utilities: uniform grids, max-error measurement, coefficient
//! decay fits, and the approximation sweep behind `chebfilter approx`.

use serde::Serialize;

use super::{
    bernstein_approximate, cheb_interpolate, equispaced_nodes, eval_checked,
    vandermonde_interpolate, Basis, FilterCoefficients, LagrangeInterpolant,
};
use crate::error::{Error, Result};
use crate::par;

/// Coefficients below this magnitude are treated as rounding noise.
pub const DECAY_FLOOR: f64 = 1e-14;

/// `size` equally spaced points from -1 to 1 inclusive.
pub fn uniform_grid(size: usize) -> Vec<f64> {
    match size {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let step = 2.0 / (size - 1) as f64;
            let mut grid: Vec<f64> = (0..size).map(|i| -1.0 + i as f64 * step).collect();
            grid[size - 1] = 1.0;
            grid
        }
    }
}

/// `max |f - approx|` over a uniform grid on `[-1, 1]`.
pub fn max_grid_error(
    f: impl Fn(f64) -> f64,
    approx: impl Fn(f64) -> f64,
    grid_size: usize,
) -> Result<f64> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument(format!("grid size must be >= 2, got {grid_size}")));
    }
    Ok(uniform_grid(grid_size)
        .into_iter()
        .map(|x| (f(x) - approx(x)).abs())
        .fold(0.0, f64::max))
}

/// Least-squares slope of `log|w_k|` against `log k` for `k >= 2`.
pub fn coefficient_decay_rate(coeffs: &FilterCoefficients) -> Result<f64> {
    if coeffs.basis() != Basis::Chebyshev {
        return Err(Error::UndefinedRate(format!(
            "decay rate is defined for chebyshev coefficients, got {}",
            coeffs.basis().name()
        )));
    }
    if coeffs.order() < 8 {
        return Err(Error::UndefinedRate(format!("order {} is below 8", coeffs.order())));
    }
    let points: Vec<(f64, f64)> = coeffs
        .weights()
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(_, w)| w.abs() >= DECAY_FLOOR)
        .map(|(k, w)| ((k as f64).ln(), w.abs().ln()))
        .collect();
    if points.len() < 5 {
        return Err(Error::UndefinedRate(format!(
            "only {} tail coefficients above {DECAY_FLOOR:e}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// The approximation schemes compared by the error study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxMethod {
    /// Interpolation at Chebyshev nodes.
    Chebyshev,
    /// Barycentric interpolation at equispaced nodes.
    Lagrange,
    /// Bernstein operator.
    Bernstein,
    /// Monomial coefficients from the Vandermonde solve at equispaced nodes.
    Monomial,
}

impl ApproxMethod {
    pub const ALL: [ApproxMethod; 4] = [
        ApproxMethod::Chebyshev,
        ApproxMethod::Lagrange,
        ApproxMethod::Bernstein,
        ApproxMethod::Monomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ApproxMethod::Chebyshev => "chebyshev",
            ApproxMethod::Lagrange => "lagrange",
            ApproxMethod::Bernstein => "bernstein",
            ApproxMethod::Monomial => "monomial",
        }
    }

    pub fn node_scheme(self) -> &'static str {
        match self {
            ApproxMethod::Chebyshev => "chebyshev",
            _ => "equispaced",
        }
    }
}

impl std::str::FromStr for ApproxMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "chebyshev" => Ok(Self::Chebyshev),
            "lagrange" | "equispaced-lagrange" | "equispaced" => Ok(Self::Lagrange),
            "bernstein" => Ok(Self::Bernstein),
            "monomial" | "vandermonde" => Ok(Self::Monomial),
            other => Err(Error::InvalidArgument(format!("unknown basis {other:?}"))),
        }
    }
}

/// Builds the order-`K` approximant of `h` and returns it as a closure on
/// `[-1, 1]`.
pub fn approximate(
    method: ApproxMethod,
    h: &(dyn Fn(f64) -> f64 + Sync),
    order: usize,
) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    let coeffs = match method {
        ApproxMethod::Chebyshev => cheb_interpolate(h, order)?,
        ApproxMethod::Bernstein => bernstein_approximate(h, order)?,
        ApproxMethod::Monomial => vandermonde_interpolate(h, &equispaced_nodes(order))?,
        ApproxMethod::Lagrange => {
            let nodes = equispaced_nodes(order);
            let values = nodes
                .iter()
                .map(|&x| eval_checked(h, x))
                .collect::<Result<Vec<_>>>()?;
            let li = LagrangeInterpolant::new(nodes, values)?;
            return Ok(Box::new(move |x| li.eval(x)));
        }
    };
    Ok(Box::new(move |x| coeffs.eval_unchecked(x)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorStudyRow {
    pub basis: String,
    #[serde(rename = "K")]
    pub order: usize,
    pub max_error: f64,
    pub node_scheme: String,
}

/// One row per `(method, order)` pair, in input order. Pairs are evaluated
/// in parallel.
pub fn error_study(
    h: &(dyn Fn(f64) -> f64 + Sync),
    methods: &[ApproxMethod],
    orders: &[usize],
    grid_size: usize,
) -> Result<Vec<ErrorStudyRow>> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument(format!("grid size must be >= 2, got {grid_size}")));
    }
    let pairs: Vec<(ApproxMethod, usize)> = methods
        .iter()
        .flat_map(|&m| orders.iter().map(move |&k| (m, k)))
        .collect();
    par::map_indexed(pairs.len(), |i| {
        let (method, order) = pairs[i];
        let approx = approximate(method, h, order)?;
        Ok(ErrorStudyRow {
            basis: method.name().to_string(),
            order,
            max_error: max_grid_error(h, approx, grid_size)?,
            node_scheme: method.node_scheme().to_string(),
        })
    })
    .into_iter()
    .collect()
}

/// Named target responses on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterFunction {
    /// `1 / (1 + 25 x^2)`
    Runge,
    /// 1 for `x <= tau`, 0 above.
    Step(f64),
    /// `exp(-a (x + 1))`
    ExpDecay(f64),
    /// Monomial coefficients `c_0, c_1, ...`.
    Polynomial(Vec<f64>),
}

impl FilterFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            FilterFunction::Runge => 1.0 / (1.0 + 25.0 * x * x),
            FilterFunction::Step(tau) => {
                if x <= *tau {
                    1.0
                } else {
                    0.0
                }
            }
            FilterFunction::ExpDecay(a) => (-a * (x + 1.0)).exp(),
            FilterFunction::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &a| acc * x + a),
        }
    }
}

impl std::str::FromStr for FilterFunction {
    type Err = Error;

    /// Accepts `runge`, `step:TAU`, `exp_decay:A`, and `poly:C0,C1,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let number = |a: &str| {
            a.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidArgument(format!("bad numeric parameter {a:?} in {s:?}")))
        };
        match (name, arg) {
            ("runge", None) => Ok(Self::Runge),
            ("step", None) => Ok(Self::Step(0.0)),
            ("step", Some(a)) => Ok(Self::Step(number(a)?)),
            ("exp_decay", None) => Ok(Self::ExpDecay(1.0)),
            ("exp_decay", Some(a)) => Ok(Self::ExpDecay(number(a)?)),
            ("poly", Some(a)) => {
                let coeffs = a.split(',').map(|c| number(c.trim())).collect::<Result<Vec<_>>>()?;
                Ok(Self::Polynomial(coeffs))
            }
            _ => Err(Error::InvalidArgument(format!(
                "unknown function {s:?} (expected runge, step:TAU, exp_decay:A or poly:C0,C1,...)"
            ))),
        }
    }
}
