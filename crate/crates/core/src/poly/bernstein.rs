use super::{eval_checked, Basis, FilterCoefficients};
use crate::error::{Error, Result};

/// `C(K, k) t^k (1 - t)^(K - k)` with `t = (1 + x) / 2`.
pub fn bernstein_basis(order: usize, k: usize, x: f64) -> f64 {
    if k > order {
        return 0.0;
    }
    let t = (1.0 + x) / 2.0;
    binomial(order, k) * t.powi(k as i32) * (1.0 - t).powi((order - k) as i32)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Bernstein operator `B_K h`: weights are `h` sampled at `-1 + 2k/K`.
pub fn bernstein_approximate(h: impl Fn(f64) -> f64, order: usize) -> Result<FilterCoefficients> {
    if order == 0 {
        return Err(Error::InvalidArgument("bernstein approximation needs K >= 1".into()));
    }
    let weights = (0..=order)
        .map(|k| eval_checked(&h, -1.0 + 2.0 * k as f64 / order as f64))
        .collect::<Result<Vec<_>>>()?;
    FilterCoefficients::new(Basis::Bernstein, weights)
}

pub(crate) fn de_casteljau(weights: &[f64], t: f64) -> f64 {
    let mut b = weights.to_vec();
    let n = b.len();
    for r in 1..n {
        for i in 0..(n - r) {
            b[i] = (1.0 - t) * b[i] + t * b[i + 1];
        }
    }
    b[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{cheb_interpolate, max_grid_error, uniform_grid};

    fn runge(x: f64) -> f64 {
        1.0 / (1.0 + 25.0 * x * x)
    }

    #[test]
    fn partition_of_unity_and_linear_reproduction() {
        for order in 1..=20 {
            let one = bernstein_approximate(|_| 1.0, order).unwrap();
            let lin = bernstein_approximate(|x| x, order).unwrap();
            for x in uniform_grid(101) {
                assert!((one.eval(x).unwrap() - 1.0).abs() <= 1e-12);
                assert!((lin.eval(x).unwrap() - x).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn endpoint_interpolation() {
        let h = |x: f64| (3.0 * x).sin() + x * x;
        for order in 1..=15 {
            let b = bernstein_approximate(h, order).unwrap();
            assert_eq!(b.eval(-1.0).unwrap(), h(-1.0));
            assert_eq!(b.eval(1.0).unwrap(), h(1.0));
        }
    }

    #[test]
    fn basis_agrees_with_de_casteljau() {
        let w = [0.3, -1.0, 2.0, 0.5, 1.5];
        for x in uniform_grid(21) {
            let direct: f64 = (0..5).map(|k| w[k] * bernstein_basis(4, k, x)).sum();
            assert!((direct - de_casteljau(&w, (1.0 + x) / 2.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn runge_convergence_is_slow() {
        let e10 = {
            let b = bernstein_approximate(runge, 10).unwrap();
            max_grid_error(runge, |x| b.eval(x).unwrap(), 1001).unwrap()
        };
        let e20 = {
            let b = bernstein_approximate(runge, 20).unwrap();
            max_grid_error(runge, |x| b.eval(x).unwrap(), 1001).unwrap()
        };
        let c = cheb_interpolate(runge, 10).unwrap();
        let cheb10 = max_grid_error(runge, |x| c.eval(x).unwrap(), 1001).unwrap();
        assert!(e20 < e10);
        assert!(e20 > cheb10, "{e20} vs {cheb10}");
    }

    #[test]
    fn order_zero_rejected() {
        assert!(bernstein_approximate(|x| x, 0).is_err());
    }
}
