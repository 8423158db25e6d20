//! Lasso by cyclic coordinate descent, objective 0.5 ||y - Xb||^2 + lambda ||b||_1.
//!
//! Descent alternates full sweeps with sweeps over the active set. Once the
//! support looks settled, the stationarity equations on that support are solved
//! directly and accepted if the signs and the KKT conditions check out, which
//! removes the slow tail of coordinate descent on ill-conditioned problems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const KKT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LassoFit {
    pub coefficients: DVector<f64>,
    pub lambda: f64,
    pub sweeps: usize,
    pub kkt_residual: f64,
}

impl LassoFit {
    pub fn nonzero(&self) -> usize {
        self.coefficients.iter().filter(|b| **b != 0.0).count()
    }
}

pub fn soft(u: f64, t: f64) -> f64 {
    if u > t {
        u - t
    } else if u < -t {
        u + t
    } else {
        0.0
    }
}

pub fn objective(x: &DMatrix<f64>, y: &DVector<f64>, b: &DVector<f64>, lambda: f64) -> f64 {
    let r = y - x * b;
    0.5 * r.norm_squared() + lambda * b.iter().map(|v| v.abs()).sum::<f64>()
}

/// Largest violation of the lasso optimality conditions.
pub fn kkt_residual(x: &DMatrix<f64>, y: &DVector<f64>, b: &DVector<f64>, lambda: f64) -> f64 {
    let r = y - x * b;
    let g = x.tr_mul(&r);
    g.iter()
        .zip(b.iter())
        .map(|(gj, bj)| {
            if *bj != 0.0 {
                (gj - lambda * bj.signum()).abs()
            } else {
                (gj.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

pub fn lambda_max(x: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    x.tr_mul(y).amax()
}

struct Cd<'a> {
    x: &'a DMatrix<f64>,
    col_sq: Vec<f64>,
    lambda: f64,
    b: DVector<f64>,
    r: DVector<f64>,
}

impl<'a> Cd<'a> {
    fn update(&mut self, j: usize) -> f64 {
        let cj = self.col_sq[j];
        if cj == 0.0 {
            return 0.0;
        }
        let col = self.x.column(j);
        let old = self.b[j];
        let z = col.dot(&self.r) + cj * old;
        let new = soft(z, self.lambda) / cj;
        let delta = new - old;
        if delta != 0.0 {
            self.r.axpy(-delta, &col, 1.0);
            self.b[j] = new;
        }
        delta.abs() * cj.sqrt()
    }

    fn sweep_all(&mut self) -> f64 {
        (0..self.b.len()).map(|j| self.update(j)).fold(0.0, f64::max)
    }

    fn sweep_active(&mut self) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..self.b.len() {
            if self.b[j] != 0.0 {
                m = m.max(self.update(j));
            }
        }
        m
    }
}

/// Solves the stationarity equations on the current support with the current
/// signs; returns the candidate if it is sign consistent and satisfies KKT.
fn polish(x: &DMatrix<f64>, y: &DVector<f64>, b: &DVector<f64>, lambda: f64) -> Option<DVector<f64>> {
    let support: Vec<usize> = (0..b.len()).filter(|&j| b[j] != 0.0).collect();
    if support.is_empty() || support.len() > x.nrows() {
        return None;
    }
    let xs = x.select_columns(support.iter());
    let signs = DVector::from_iterator(support.len(), support.iter().map(|&j| b[j].signum()));
    let rhs = xs.tr_mul(y) - &signs * lambda;
    let chol = xs.tr_mul(&xs).cholesky()?;
    let bs = chol.solve(&rhs);
    if bs.iter().zip(signs.iter()).any(|(v, s)| v * s <= 0.0) {
        return None;
    }
    let mut cand = DVector::zeros(b.len());
    for (k, &j) in support.iter().enumerate() {
        cand[j] = bs[k];
    }
    if kkt_residual(x, y, &cand, lambda) <= 0.1 * KKT_TOLERANCE {
        Some(cand)
    } else {
        None
    }
}

pub fn fit_lasso_warm(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    warm: Option<&DVector<f64>>,
) -> Result<LassoFit> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lasso needs lambda > 0, got {lambda}")));
    }
    let p = x.ncols();
    let b = warm.cloned().unwrap_or_else(|| DVector::zeros(p));
    let r = y - x * &b;
    let col_sq: Vec<f64> = (0..p).map(|j| x.column(j).norm_squared()).collect();
    let scale = y.norm().max(1e-300);
    let mut cd = Cd {
        x,
        col_sq,
        lambda,
        b,
        r,
    };
    let max_sweeps = 200_000usize;
    let mut sweeps = 0usize;
    let mut tol = 1e-6 * scale;
    loop {
        let mut change = cd.sweep_all();
        sweeps += 1;
        while change > tol && sweeps < max_sweeps {
            let mut inner = cd.sweep_active();
            sweeps += 1;
            while inner > tol && sweeps < max_sweeps {
                inner = cd.sweep_active();
                sweeps += 1;
            }
            change = cd.sweep_all();
            sweeps += 1;
        }
        if let Some(cand) = polish(x, y, &cd.b, lambda) {
            let kkt = kkt_residual(x, y, &cand, lambda);
            return Ok(LassoFit {
                coefficients: cand,
                lambda,
                sweeps,
                kkt_residual: kkt,
            });
        }
        let kkt = kkt_residual(x, y, &cd.b, lambda);
        if kkt <= KKT_TOLERANCE && tol <= 1e-12 * scale {
            return Ok(LassoFit {
                coefficients: cd.b,
                lambda,
                sweeps,
                kkt_residual: kkt,
            });
        }
        if sweeps >= max_sweeps || tol < 1e-15 * scale {
            if kkt <= KKT_TOLERANCE {
                return Ok(LassoFit {
                    coefficients: cd.b,
                    lambda,
                    sweeps,
                    kkt_residual: kkt,
                });
            }
            return Err(Error::NoConvergence {
                what: "lasso coordinate descent",
                iterations: sweeps,
                residual: kkt,
            });
        }
        tol *= 1e-2;
    }
}

pub fn fit_lasso(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> Result<LassoFit> {
    fit_lasso_warm(x, y, lambda, None)
}

/// Objective value after each of `sweeps` plain full coordinate sweeps from zero.
pub fn objective_trace(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, sweeps: usize) -> Vec<f64> {
    let p = x.ncols();
    let mut cd = Cd {
        x,
        col_sq: (0..p).map(|j| x.column(j).norm_squared()).collect(),
        lambda,
        b: DVector::zeros(p),
        r: y.clone(),
    };
    let mut out = vec![objective(x, y, &cd.b, lambda)];
    for _ in 0..sweeps {
        cd.sweep_all();
        out.push(objective(x, y, &cd.b, lambda));
    }
    out
}

/// Lasso path at geometrically spaced levels from lambda_max down to
/// `lambda_max * floor_ratio`, warm started; returns the final fit.
pub fn lasso_path_end(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    floor_ratio: f64,
    steps: usize,
) -> Result<LassoFit> {
    let lmax = lambda_max(x, y);
    if lmax == 0.0 {
        return Ok(LassoFit {
            coefficients: DVector::zeros(x.ncols()),
            lambda: 0.0,
            sweeps: 0,
            kkt_residual: 0.0,
        });
    }
    let ratio = floor_ratio.powf(1.0 / steps as f64);
    let mut warm: Option<DVector<f64>> = None;
    let mut last = None;
    let mut sweeps = 0;
    for k in 1..=steps {
        let lam = lmax * ratio.powi(k as i32);
        let fit = fit_lasso_warm(x, y, lam, warm.as_ref())?;
        sweeps += fit.sweeps;
        warm = Some(fit.coefficients.clone());
        last = Some(fit);
    }
    let mut fit = last.expect("at least one step");
    fit.sweeps = sweeps;
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(n: usize, p: usize, seed: u64) -> (DMatrix<f64>, DVector<f64>) {
        let mut r = crate::rng::stream(seed, 0, crate::rng::Role::TrainX, 0);
        let x = DMatrix::from_fn(n, p, |_, _| crate::rng::normal(&mut r));
        let y = DVector::from_fn(n, |_, _| crate::rng::normal(&mut r));
        (x, y)
    }

    #[test]
    fn soft_threshold_branches() {
        assert_eq!(soft(5.0, 2.0), 3.0);
        assert_eq!(soft(-1.0, 2.0), 0.0);
        assert_eq!(soft(-5.0, 2.0), -3.0);
    }

    #[test]
    fn zero_above_lambda_max() {
        let (x, y) = sample(30, 8, 1);
        let fit = fit_lasso(&x, &y, lambda_max(&x, &y) * 1.0001).unwrap();
        assert_eq!(fit.nonzero(), 0);
    }

    #[test]
    fn orthonormal_design_soft_thresholds_ols() {
        let (z, y) = sample(20, 5, 2);
        let q = z.qr().q();
        let ols = q.tr_mul(&y);
        let fit = fit_lasso(&q, &y, 0.3).unwrap();
        for j in 0..5 {
            assert_abs_diff_eq!(fit.coefficients[j], soft(ols[j], 0.3), epsilon = 1e-10);
        }
    }

    #[test]
    fn kkt_holds_in_both_regimes() {
        for (n, p) in [(50, 20), (30, 80)] {
            let (x, y) = sample(n, p, 3);
            for lam in [0.05, 0.5, 3.0] {
                let fit = fit_lasso(&x, &y, lam).unwrap();
                assert!(fit.kkt_residual <= KKT_TOLERANCE, "{}", fit.kkt_residual);
            }
        }
    }

    #[test]
    fn small_lambda_approaches_least_squares() {
        let (x, y) = sample(40, 6, 4);
        let ls = (x.tr_mul(&x)).cholesky().unwrap().solve(&x.tr_mul(&y));
        let fit = fit_lasso(&x, &y, 1e-7).unwrap();
        assert_abs_diff_eq!((fit.coefficients - ls).amax(), 0.0, epsilon = 1e-5);
    }

    #[test]
    fn objective_never_increases() {
        let (x, y) = sample(25, 40, 5);
        let tr = objective_trace(&x, &y, 0.4, 50);
        for w in tr.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs());
        }
    }
}
