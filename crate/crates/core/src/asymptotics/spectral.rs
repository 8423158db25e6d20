//! Ridge and ridgeless equivalents for unit-variance features with covariance
//! Sigma, objective (1/n)||y - Xb||^2 + lambda ||b||^2.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::Population;
use crate::error::{invalid, Error, Result};
use crate::omega::omega_unchecked as omega;

/// One eigenvalue of Sigma with its share of the spectrum and the squared
/// projection of beta onto its eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub eigenvalue: f64,
    pub mass: f64,
    pub signal_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    pub atoms: Vec<Atom>,
    pub gamma: f64,
    pub sigma2: f64,
    #[serde(default)]
    pub sigma2_nl: f64,
}

impl SpectralModel {
    /// Sigma = I with signal energy `signal` and aspect ratio `gamma`.
    pub fn isotropic(gamma: f64, sigma2: f64, signal: f64) -> Self {
        Self {
            atoms: vec![Atom {
                eigenvalue: 1.0,
                mass: 1.0,
                signal_energy: signal,
            }],
            gamma,
            sigma2,
            sigma2_nl: 0.0,
        }
    }

    /// Empirical spectrum of `sigma` with beta projected on its eigenvectors.
    pub fn from_covariance(
        sigma: &DMatrix<f64>,
        beta: &nalgebra::DVector<f64>,
        n: usize,
        sigma2: f64,
        sigma2_nl: f64,
    ) -> Result<Self> {
        let p = sigma.nrows();
        if sigma.ncols() != p || beta.len() != p {
            return invalid("covariance and signal dimensions disagree");
        }
        let eig = sigma.clone().symmetric_eigen();
        let proj = eig.eigenvectors.tr_mul(beta);
        let atoms = (0..p)
            .map(|k| Atom {
                eigenvalue: eig.eigenvalues[k],
                mass: 1.0 / p as f64,
                signal_energy: proj[k] * proj[k],
            })
            .collect();
        let m = Self {
            atoms,
            gamma: p as f64 / n as f64,
            sigma2,
            sigma2_nl,
        };
        m.validate()?;
        Ok(m)
    }

    /// Spectral description of a generator's observed features. The best
    /// linear predictor in those features plays the role of beta and the
    /// remaining signal variance is counted as nonlinear.
    pub fn from_population(pop: &Population) -> Result<Self> {
        if pop.feature_map().is_some() {
            return Err(Error::Unsupported(
                "spectral model of random-feature covariates".into(),
            ));
        }
        let full = pop.latent_covariance();
        let beta = pop.beta();
        let nl = pop.sigma2_nl();
        match pop.selected_features() {
            None => Self::from_covariance(&full, beta, pop.n(), pop.sigma2(), nl),
            Some(sel) => {
                let s_ss = full.select_rows(sel.iter()).select_columns(sel.iter());
                let cross = full.select_rows(sel.iter()) * beta;
                let chol = s_ss.clone().cholesky().ok_or_else(|| {
                    Error::InvalidArgument("selected covariance is singular".into())
                })?;
                let b_eff = chol.solve(&cross);
                let total = beta.dot(&(&full * beta));
                let explained = b_eff.dot(&cross);
                let omitted = (total - explained).max(0.0);
                Self::from_covariance(&s_ss, &b_eff, pop.n(), pop.sigma2(), nl + omitted)
            }
        }
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self {
            gamma,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return invalid("spectral model has no atoms");
        }
        let total: f64 = self.atoms.iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > 1e-9 {
            return invalid(format!("atom masses sum to {total}, not 1"));
        }
        for a in &self.atoms {
            if !(a.eigenvalue > 0.0 && a.eigenvalue.is_finite()) || a.mass < 0.0 || a.signal_energy < 0.0
            {
                return invalid("atoms need positive eigenvalues and nonnegative mass and energy");
            }
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return invalid("gamma must be positive");
        }
        if !(self.sigma2 > 0.0) || self.sigma2_nl < 0.0 {
            return invalid("sigma2 must be positive and sigma2_nl nonnegative");
        }
        Ok(())
    }

    fn r_min(&self) -> f64 {
        self.atoms.iter().map(|a| a.eigenvalue).fold(f64::INFINITY, f64::min)
    }

    /// gamma * mean of s / (s + mu)
    fn first(&self, mu: f64) -> f64 {
        self.gamma * self.atoms.iter().map(|a| a.mass * a.eigenvalue / (a.eigenvalue + mu)).sum::<f64>()
    }

    /// gamma * mean of s^2 / (s + mu)^2
    fn second(&self, mu: f64) -> f64 {
        self.gamma
            * self
                .atoms
                .iter()
                .map(|a| {
                    let r = a.eigenvalue / (a.eigenvalue + mu);
                    a.mass * r * r
                })
                .sum::<f64>()
    }

    fn bias(&self, mu: f64) -> f64 {
        mu * mu
            * self
                .atoms
                .iter()
                .map(|a| a.signal_energy * a.eigenvalue / ((a.eigenvalue + mu) * (a.eigenvalue + mu)))
                .sum::<f64>()
            / self.sigma2
    }
}

/// Bisection on an increasing function with a sign change in [lo, hi].
pub(crate) fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RidgeSolution {
    pub mu: f64,
    pub v: f64,
    pub b: f64,
    pub d: f64,
    pub df_fixed_norm: f64,
    pub df_intrinsic_norm: f64,
    pub df_emergent_norm: f64,
    /// D <= 0 or gamma = 1 without regularization: random-X df at its upper limit.
    pub divergent: bool,
}

/// mu = lambda + gamma mu tr[Sigma (Sigma + mu I)^{-1}] / p.
pub fn solve_ridge_mu(lambda: f64, model: &SpectralModel) -> Result<f64> {
    model.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid(format!("lambda must be positive, got {lambda}"));
    }
    let h = |mu: f64| 1.0 - model.first(mu) - lambda / mu;
    let hi = lambda + model.first(0.0) * model.atoms.iter().map(|a| a.eigenvalue).fold(0.0, f64::max);
    let mu = bisect(lambda, hi.max(lambda * (1.0 + 1e-12)), h);
    let resid = (mu - lambda - mu * model.first(mu)).abs();
    if resid > 1e-12 * mu {
        return Err(Error::NoConvergence {
            what: "ridge fixed point",
            iterations: 400,
            residual: resid / mu,
        });
    }
    Ok(mu)
}

fn chain(model: &SpectralModel, mu: f64, shrink: f64) -> (f64, f64, f64, f64, f64, bool) {
    let v = model.second(mu);
    let d = 1.0 - v;
    let b = model.bias(mu);
    if d <= 0.0 {
        return (v, b, d, 1.0, 1.0, true);
    }
    let nl = 1.0 + model.sigma2_nl / model.sigma2;
    let intr = omega(shrink * (v / d + 1.0));
    let emer = omega(shrink * (b / d + (v / d + 1.0) * nl));
    (v, b, d, intr, emer, false)
}

pub fn ridge_equivalents(lambda: f64, model: &SpectralModel) -> Result<RidgeSolution> {
    let mu = solve_ridge_mu(lambda, model)?;
    let r = lambda / mu;
    let (v, b, d, intr, emer, div) = chain(model, mu, 1.0 - r * r);
    Ok(RidgeSolution {
        mu,
        v,
        b,
        d,
        df_fixed_norm: 1.0 - r,
        df_intrinsic_norm: intr,
        df_emergent_norm: emer,
        divergent: div,
    })
}

/// 1 = gamma tr[Sigma (Sigma + mu I)^{-1}] / p, for gamma > 1.
pub fn solve_ridgeless_mu(model: &SpectralModel) -> Result<f64> {
    model.validate()?;
    if model.gamma <= 1.0 {
        return invalid("the ridgeless fixed point needs gamma > 1");
    }
    let smax = model.atoms.iter().map(|a| a.eigenvalue).fold(0.0, f64::max);
    let mu = bisect(0.0, model.gamma * smax, |mu| 1.0 - model.first(mu));
    let resid = (1.0 - model.first(mu)).abs();
    if resid > 1e-12 {
        return Err(Error::NoConvergence {
            what: "ridgeless fixed point",
            iterations: 400,
            residual: resid,
        });
    }
    Ok(mu)
}

pub fn ridgeless_equivalents(model: &SpectralModel) -> Result<RidgeSolution> {
    model.validate()?;
    let g = model.gamma;
    if g == 1.0 {
        return Ok(RidgeSolution {
            mu: 0.0,
            v: f64::INFINITY,
            b: 0.0,
            d: 0.0,
            df_fixed_norm: 1.0,
            df_intrinsic_norm: 1.0,
            df_emergent_norm: 1.0,
            divergent: true,
        });
    }
    if g < 1.0 {
        let nl = 1.0 + model.sigma2_nl / model.sigma2;
        return Ok(RidgeSolution {
            mu: 0.0,
            v: g,
            b: 0.0,
            d: 1.0 - g,
            df_fixed_norm: g,
            df_intrinsic_norm: g,
            df_emergent_norm: omega((g + g / (1.0 - g)) * nl),
            divergent: false,
        });
    }
    let mu = solve_ridgeless_mu(model)?;
    let (v, b, d, intr, emer, div) = chain(model, mu, 1.0);
    Ok(RidgeSolution {
        mu,
        v,
        b,
        d,
        df_fixed_norm: 1.0,
        df_intrinsic_norm: intr,
        df_emergent_norm: emer,
        divergent: div,
    })
}

/// Root of 1 = gamma tr[Sigma^2 (Sigma + mu I)^{-2}] / p above -r_min.
pub fn mu_min(model: &SpectralModel) -> Result<f64> {
    model.validate()?;
    let rmin = model.r_min();
    let mut hi = 1.0f64;
    let mut k = 0;
    while model.second(hi) >= 1.0 {
        hi *= 2.0;
        k += 1;
        if k > 200 {
            return Err(Error::Bracketing("mu_min upper bracket".into()));
        }
    }
    // second() decreases in mu, so 1 - second() increases.
    let mu = bisect(-rmin, hi, |mu| {
        if mu <= -rmin {
            -1.0
        } else {
            1.0 - model.second(mu)
        }
    });
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quad_mu(lambda: f64, gamma: f64) -> f64 {
        let b = 1.0 - lambda - gamma;
        (-b + (b * b + 4.0 * lambda).sqrt()) / 2.0
    }

    #[test]
    fn ridge_mu_examples() {
        let m = SpectralModel::isotropic(1.0, 1.0, 0.0);
        assert_abs_diff_eq!(solve_ridge_mu(1.0, &m).unwrap(), (1.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-12);
        let m2 = SpectralModel::isotropic(2.0, 1.0, 0.0);
        assert_abs_diff_eq!(solve_ridge_mu(0.1, &m2).unwrap(), quad_mu(0.1, 2.0), epsilon = 1e-12);
        let tiny = SpectralModel::isotropic(1e-9, 1.0, 0.0);
        assert_abs_diff_eq!(solve_ridge_mu(0.7, &tiny).unwrap(), 0.7, epsilon = 1e-8);
        assert!(solve_ridge_mu(0.0, &m).is_err());
    }

    #[test]
    fn ridge_limits() {
        let m = SpectralModel::isotropic(0.6, 1.0, 0.0);
        let s = ridge_equivalents(1e8, &m).unwrap();
        assert!(s.df_fixed_norm < 1e-7 && s.df_intrinsic_norm < 1e-7 && s.df_emergent_norm < 1e-7);
        let s = ridge_equivalents(0.5, &m).unwrap();
        assert_eq!(s.df_intrinsic_norm, s.df_emergent_norm);
        assert!(s.mu >= 0.5 && s.d > 0.0 && s.d <= 1.0);
    }

    #[test]
    fn ridgeless_examples() {
        assert_abs_diff_eq!(solve_ridgeless_mu(&SpectralModel::isotropic(2.0, 1.0, 0.0)).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(solve_ridgeless_mu(&SpectralModel::isotropic(4.0, 1.0, 0.0)).unwrap(), 3.0, epsilon = 1e-12);
        assert!(solve_ridgeless_mu(&SpectralModel::isotropic(1.0 + 1e-9, 1.0, 0.0)).unwrap() < 1e-8);
        assert!(solve_ridgeless_mu(&SpectralModel::isotropic(0.5, 1.0, 0.0)).is_err());
        let s = ridgeless_equivalents(&SpectralModel::isotropic(2.0, 1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s.v, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.d, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.df_intrinsic_norm, 2.0 - 2f64.sqrt(), epsilon = 1e-12);
        let u = ridgeless_equivalents(&SpectralModel::isotropic(0.5, 1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(u.df_emergent_norm, 0.5, epsilon = 1e-15);
        assert_eq!(u.df_intrinsic_norm, 0.5);
        assert!(ridgeless_equivalents(&SpectralModel::isotropic(1.0, 1.0, 0.0)).unwrap().divergent);
    }

    #[test]
    fn mu_min_examples() {
        assert_abs_diff_eq!(mu_min(&SpectralModel::isotropic(1.0, 1.0, 0.0)).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mu_min(&SpectralModel::isotropic(4.0, 1.0, 0.0)).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mu_min(&SpectralModel::isotropic(0.25, 1.0, 0.0)).unwrap(), -0.5, epsilon = 1e-12);
    }

    #[test]
    fn ridgeless_continuous_at_one() {
        let m = SpectralModel::isotropic(1.0, 1.0, 1.0);
        for f in [|s: &RidgeSolution| s.df_intrinsic_norm, |s: &RidgeSolution| s.df_emergent_norm] {
            let lo = f(&ridgeless_equivalents(&m.with_gamma(1.0 - 1e-7)).unwrap());
            let hi = f(&ridgeless_equivalents(&m.with_gamma(1.0 + 1e-7)).unwrap());
            assert!((lo - 1.0).abs() < 1e-3 && (hi - 1.0).abs() < 1e-3, "{lo} {hi}");
        }
    }

    #[test]
    fn intrinsic_decreasing_in_lambda() {
        let m = SpectralModel::isotropic(1.5, 1.0, 1.0);
        let mut prev = f64::INFINITY;
        for k in 0..40 {
            let l = 1e-3 * 1.3f64.powi(k);
            let s = ridge_equivalents(l, &m).unwrap();
            assert!(s.df_intrinsic_norm < prev);
            prev = s.df_intrinsic_norm;
        }
    }
}
