//! Maps between normalized optimism and degrees of freedom.
//!
//! The reference model is least squares with d features on well-specified
//! Gaussian data, whose random-X optimism is sigma^2 (d/n + d/(n-d-1)).
//! `omega_n` inverts that law exactly; `omega` is its large-n proportional limit.

use crate::error::{invalid, Result};

/// Random-X optimism of the reference least-squares model with `d` features.
pub fn reference_optimism(d: f64, n: usize, sigma2: f64) -> Result<f64> {
    let nf = n as f64;
    if n < 2 {
        return invalid("n must be at least 2");
    }
    if !(d >= 0.0 && d < nf - 1.0) {
        return invalid(format!("d must lie in [0, n-1), got {d} with n = {n}"));
    }
    Ok(sigma2 * (d / nf + d / (nf - d - 1.0)))
}

/// Derivative of the normalized reference optimism with respect to d.
pub fn reference_slope(d: f64, n: usize) -> f64 {
    let nf = n as f64;
    let gap = nf - d - 1.0;
    1.0 / nf + (nf - 1.0) / (gap * gap)
}

/// Exact inverse of the normalized reference optimism on [0, n-1).
pub fn omega_n(x: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return invalid("n must be at least 2");
    }
    if !(x >= 0.0) {
        return invalid(format!("normalized optimism must be nonnegative, got {x}"));
    }
    Ok(omega_n_unchecked(x, n))
}

pub(crate) fn omega_n_unchecked(x: f64, n: usize) -> f64 {
    let nf = n as f64;
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return nf - 1.0;
    }
    // smaller root of u^2 - b u + c = 0, written as c / (larger root / 2)
    let b = 2.0 * nf - 1.0 + nf * x;
    let c = (nf - 1.0) * nf * x;
    let ratio = (4.0 * c / b) / b;
    let d = 2.0 * c / (b * (1.0 + (1.0 - ratio).max(0.0).sqrt()));
    d.min(nf - 1.0)
}

/// Proportional-limit map: the u in [0,1) solving x = u + u/(1-u).
pub fn omega(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return invalid(format!("normalized optimism must be nonnegative, got {x}"));
    }
    Ok(omega_unchecked(x))
}

pub(crate) fn omega_unchecked(x: f64) -> f64 {
    if x.is_infinite() {
        return 1.0;
    }
    if x > 1e150 {
        let r = 1.0 / x;
        return 1.0 / (r + 0.5 + (r * r + 0.25).sqrt());
    }
    x / (1.0 + 0.5 * x + (1.0 + 0.25 * x * x).sqrt())
}

/// Degrees of freedom matched to an optimism estimate. Negative estimates clamp
/// to zero. `sigma2` must be positive; otherwise the result is NaN.
pub fn df_from_optimism(opt: f64, sigma2: f64, n: usize) -> f64 {
    if !(sigma2 > 0.0) || n < 2 {
        return f64::NAN;
    }
    omega_n_unchecked(opt.max(0.0) / sigma2, n)
}

/// Delta-method standard error of `df_from_optimism`.
pub fn df_standard_error(opt_se: f64, df: f64, sigma2: f64, n: usize) -> f64 {
    opt_se / sigma2 / reference_slope(df, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_examples() {
        assert_eq!(reference_optimism(0.0, 50, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            reference_optimism(10.0, 100, 1.0).unwrap(),
            0.1 + 10.0 / 89.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(reference_optimism(10.0, 100, 1.0).unwrap(), 0.212360, epsilon = 1e-6);
        assert_abs_diff_eq!(reference_optimism(50.0, 100, 2.0).unwrap(), 3.040816, epsilon = 1e-6);
        assert!(reference_optimism(99.0, 100, 1.0).is_err());
    }

    #[test]
    fn omega_n_examples() {
        assert_eq!(omega_n(0.0, 100).unwrap(), 0.0);
        let x = reference_optimism(10.0, 100, 1.0).unwrap();
        assert_abs_diff_eq!(omega_n(x, 100).unwrap(), 10.0, epsilon = 1e-9);
        assert_abs_diff_eq!(omega_n(1e6, 100).unwrap(), 99.0, epsilon = 1e-3);
        assert!(omega_n(-1e-3, 100).is_err());
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(omega(1.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(omega(0.01).unwrap(), 0.004987500078124, epsilon = 1e-13);
        for x in [1e-3, 1e-5, 1e-8] {
            assert!((omega(x).unwrap() / (x / 2.0) - 1.0).abs() < x);
        }
        assert_abs_diff_eq!(omega(2.0).unwrap(), 2.0 - 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(omega(1e300).unwrap(), 1.0, epsilon = 1e-15);
        assert!(omega(-1.0).is_err());
    }

    #[test]
    fn df_examples() {
        assert_eq!(df_from_optimism(0.0, 1.0, 40), 0.0);
        assert_eq!(df_from_optimism(-0.3, 1.0, 40), 0.0);
        let opt = reference_optimism(7.5, 40, 0.7).unwrap();
        assert_abs_diff_eq!(df_from_optimism(opt, 0.7, 40), 7.5, epsilon = 1e-10);
    }

    #[test]
    fn slope_matches_finite_difference() {
        let (d, n, h) = (12.0, 60, 1e-6);
        let fd = (reference_optimism(d + h, n, 1.0).unwrap()
            - reference_optimism(d - h, n, 1.0).unwrap())
            / (2.0 * h);
        assert_abs_diff_eq!(reference_slope(d, n), fd, epsilon = 1e-6);
    }

    #[test]
    fn omega_n_approaches_omega() {
        for x in [0.5, 2.0, 10.0] {
            let gaps: Vec<f64> = [100usize, 1000, 10000]
                .iter()
                .map(|&n| (omega_n(x, n).unwrap() / n as f64 - omega(x).unwrap()).abs())
                .collect();
            assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
            for (g, n) in gaps.iter().zip([100.0, 1000.0, 10000.0]) {
                assert!(*g < 10.0 / n);
            }
        }
    }

    #[test]
    fn omega_n_monotone_concave() {
        let n = 50;
        let xs: Vec<f64> = (0..2000).map(|i| i as f64 * 0.01).collect();
        let v: Vec<f64> = xs.iter().map(|&x| omega_n(x, n).unwrap()).collect();
        for w in v.windows(3) {
            assert!(w[1] > w[0]);
            assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-12);
        }
    }
}
