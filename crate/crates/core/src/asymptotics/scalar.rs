//! Scalar fixed-point systems for lasso, lassoless and separable convex
//! penalties, for features with i.i.d. N(0, 1/n) entries and objective
//! (1/2)||y - Xb||^2 + lambda sum g(b_j).
//!
//! Systems are solved in coordinates (tau, a) with threshold mu = a tau: an
//! inner bisection finds tau for fixed a and an outer bisection matches lambda.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::gaussian::{self, expect_adaptive, expect_many, soft_moments, soft_null_risk, soft_risk};
use super::spectral::bisect;
use crate::error::{invalid, Error, Result};
use crate::omega::omega_unchecked as omega;

pub const SYSTEM_TOLERANCE: f64 = 1e-10;

/// Finite mixture of point masses for the entries of beta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalLaw {
    /// (location, probability)
    pub atoms: Vec<(f64, f64)>,
}

impl SignalLaw {
    pub fn point_mass(at: f64) -> Self {
        Self {
            atoms: vec![(at, 1.0)],
        }
    }

    /// Value `v` with probability delta, zero otherwise.
    pub fn bernoulli(delta: f64, v: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return invalid("delta must lie in (0, 1]");
        }
        let mut atoms = vec![(v, delta)];
        if delta < 1.0 {
            atoms.push((0.0, 1.0 - delta));
        }
        Ok(Self { atoms })
    }

    /// Empirical law of the entries of a realized vector; equal values merge.
    pub fn empirical(beta: &[f64]) -> Result<Self> {
        if beta.is_empty() {
            return invalid("empty signal vector");
        }
        let mut v = beta.to_vec();
        v.sort_by(f64::total_cmp);
        let w = 1.0 / v.len() as f64;
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        for x in v {
            match atoms.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => atoms.push((x, w)),
            }
        }
        Ok(Self { atoms })
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return invalid("signal law has no atoms");
        }
        let total: f64 = self.atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-9 || self.atoms.iter().any(|a| a.1 < 0.0 || !a.0.is_finite()) {
            return invalid("signal law probabilities must be nonnegative and sum to 1");
        }
        Ok(())
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|(b, w)| w * b * b).sum()
    }

    pub fn is_null(&self) -> bool {
        self.atoms.iter().all(|a| a.0 == 0.0 || a.1 == 0.0)
    }
}

type ProxFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Separable penalty g described through its proximal map prox(x; t).
#[derive(Clone)]
pub enum PenaltyLaw {
    /// g(b) = |b|
    Lasso,
    /// g(b) = b^2 / 2
    Ridge,
    /// g(b) = alpha |b| + (1 - alpha) b^2 / 2
    ElasticNet { alpha: f64 },
    Custom { prox: ProxFn, derivative: ProxFn },
}

impl fmt::Debug for PenaltyLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PenaltyLaw::Lasso => write!(f, "Lasso"),
            PenaltyLaw::Ridge => write!(f, "Ridge"),
            PenaltyLaw::ElasticNet { alpha } => write!(f, "ElasticNet({alpha})"),
            PenaltyLaw::Custom { .. } => write!(f, "Custom"),
        }
    }
}

impl PenaltyLaw {
    pub fn custom(
        prox: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PenaltyLaw::Custom {
            prox: Arc::new(prox),
            derivative: Arc::new(derivative),
        }
    }

    pub fn prox(&self, x: f64, t: f64) -> f64 {
        match self {
            PenaltyLaw::Lasso => soft_threshold(x, t),
            PenaltyLaw::Ridge => x / (1.0 + t),
            PenaltyLaw::ElasticNet { alpha } => soft_threshold(x, t * alpha) / (1.0 + t * (1.0 - alpha)),
            PenaltyLaw::Custom { prox, .. } => prox(x, t),
        }
    }

    /// Almost-everywhere derivative in x.
    pub fn prox_derivative(&self, x: f64, t: f64) -> f64 {
        match self {
            PenaltyLaw::Lasso => soft_threshold_derivative(x, t),
            PenaltyLaw::Ridge => 1.0 / (1.0 + t),
            PenaltyLaw::ElasticNet { alpha } => {
                soft_threshold_derivative(x, t * alpha) / (1.0 + t * (1.0 - alpha))
            }
            PenaltyLaw::Custom { derivative, .. } => derivative(x, t),
        }
    }

    fn validate(&self) -> Result<()> {
        if let PenaltyLaw::ElasticNet { alpha } = self {
            if !(0.0..=1.0).contains(alpha) {
                return invalid("elastic-net alpha must lie in [0, 1]");
            }
        }
        Ok(())
    }
}

pub fn soft_threshold(u: f64, t: f64) -> f64 {
    crate::predictors::lasso::soft(u, t)
}

pub fn soft_threshold_derivative(u: f64, t: f64) -> f64 {
    if u.abs() > t {
        1.0
    } else {
        0.0
    }
}

/// (E[(prox(b + tau H; kappa) - b)^2], E[prox'(b + tau H; kappa)]).
pub fn gaussian_prox_moments(b: f64, tau: f64, kappa: f64, penalty: &PenaltyLaw) -> Result<(f64, f64)> {
    if !(tau > 0.0) {
        return invalid("tau must be positive");
    }
    Ok(match penalty {
        PenaltyLaw::Lasso => soft_risk(b, tau, kappa),
        PenaltyLaw::Ridge => {
            let c = 1.0 + kappa;
            ((tau * tau + kappa * kappa * b * b) / (c * c), 1.0 / c)
        }
        PenaltyLaw::ElasticNet { alpha } => {
            let c = 1.0 + kappa * (1.0 - alpha);
            let k = kappa * alpha;
            let (m, s) = soft_moments(b, tau, k);
            let (_, p) = soft_risk(b, tau, k);
            (s / (c * c) - 2.0 * b * m / c + b * b, p / c)
        }
        PenaltyLaw::Custom { prox, derivative } => {
            let g = |h: f64| {
                let x = b + tau * h;
                let d = prox(x, kappa) - b;
                [d * d, derivative(x, kappa)]
            };
            let [m2, m1] = match expect_many(g) {
                Ok(v) => v,
                Err(Error::NoConvergence { .. }) => expect_adaptive(g)?,
                Err(e) => return Err(e),
            };
            (m2, m1)
        }
    })
}

fn law_moments(law: &SignalLaw, tau: f64, kappa: f64, penalty: &PenaltyLaw) -> Result<(f64, f64)> {
    let mut m2 = 0.0;
    let mut m1 = 0.0;
    for &(b, w) in &law.atoms {
        if w == 0.0 {
            continue;
        }
        let (a2, a1) = gaussian_prox_moments(b, tau, kappa, penalty)?;
        m2 += w * a2;
        m1 += w * a1;
    }
    Ok((m2, m1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarSystemSolution {
    pub tau: f64,
    pub a: f64,
    pub mu: f64,
    pub converged: bool,
    /// Relative residuals of the tau and mu equations.
    pub residuals: (f64, f64),
}

struct System<'a> {
    gamma: f64,
    sigma2: f64,
    law: &'a SignalLaw,
    penalty: &'a PenaltyLaw,
}

impl System<'_> {
    /// sigma^2 / tau^2 + gamma E[(prox - B)^2] / tau^2 - 1 at threshold a tau.
    fn tau_gap(&self, tau: f64, a: f64) -> Result<f64> {
        let (m2, _) = law_moments(self.law, tau, a * tau, self.penalty)?;
        Ok((self.sigma2 + self.gamma * m2) / (tau * tau) - 1.0)
    }

    /// Smallest tau >= sigma solving the tau equation for fixed a, if any.
    fn tau_of(&self, a: f64) -> Result<Option<f64>> {
        let sigma = self.sigma2.sqrt();
        if let PenaltyLaw::Lasso = self.penalty {
            // the gap decreases in tau towards gamma E[soft(H; a)^2] - 1
            if self.gamma * soft_null_risk(a) >= 1.0 {
                return Ok(None);
            }
        }
        let mut lo = sigma;
        let mut hi = sigma;
        let mut k = 0;
        while self.tau_gap(hi, a)? > 0.0 {
            lo = hi;
            hi *= 1.1;
            k += 1;
            if k > 1000 {
                return Ok(None);
            }
        }
        if k == 0 {
            return Ok(Some(sigma));
        }
        let err = Cell::new(None);
        let tau = bisect(lo, hi, |t| match self.tau_gap(t, a) {
            Ok(g) => -g,
            Err(e) => {
                err.set(Some(e));
                0.0
            }
        });
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(Some(tau)),
        }
    }

    /// lambda(a) = a tau (1 - gamma E[prox']) with its tau; None when the tau
    /// equation has no root.
    fn lambda_of(&self, a: f64) -> Result<Option<(f64, f64)>> {
        let Some(tau) = self.tau_of(a)? else {
            return Ok(None);
        };
        let (_, m1) = law_moments(self.law, tau, a * tau, self.penalty)?;
        Ok(Some((a * tau * (1.0 - self.gamma * m1), tau)))
    }

    /// Residual of the mu equation scaled by a tau: 1 - gamma E[prox'] - lambda / (a tau).
    fn scaled_gap(&self, a: f64, lambda: f64) -> Result<f64> {
        Ok(match self.lambda_of(a)? {
            None => -1.0,
            Some((l, tau)) => (l - lambda) / (a * tau),
        })
    }

    fn solve(&self, lambda: f64) -> Result<ScalarSystemSolution> {
        let mut hi = 1.0;
        let mut k = 0;
        while self.scaled_gap(hi, lambda)? <= 0.0 {
            hi *= 2.0;
            k += 1;
            if k > 60 {
                return Err(Error::Bracketing("threshold upper bracket".into()));
            }
        }
        let mut lo = 0.0;
        if let PenaltyLaw::Lasso = self.penalty {
            // below the root of gamma E[soft(H; a)^2] = 1 the tau equation fails
            if self.gamma * soft_null_risk(0.0) >= 1.0 {
                lo = bisect(0.0, hi, |a| 1.0 - self.gamma * soft_null_risk(a));
            }
        }
        let err = Cell::new(None);
        let a = bisect(lo, hi, |a| {
            if a <= 0.0 {
                return -1.0;
            }
            match self.scaled_gap(a, lambda) {
                Ok(g) => g,
                Err(e) => {
                    err.set(Some(e));
                    0.0
                }
            }
        });
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        let tau = self.tau_of(a)?.ok_or(Error::NoConvergence {
            what: "scalar fixed point",
            iterations: 400,
            residual: f64::NAN,
        })?;
        let mu = a * tau;
        let (m2, m1) = law_moments(self.law, tau, mu, self.penalty)?;
        let r_tau = (self.sigma2 + self.gamma * m2 - tau * tau) / (tau * tau);
        let r_mu = (lambda + self.gamma * mu * m1 - mu) / mu.max(lambda).max(1.0);
        let converged = r_tau.abs() <= SYSTEM_TOLERANCE && r_mu.abs() <= SYSTEM_TOLERANCE;
        Ok(ScalarSystemSolution {
            tau,
            a,
            mu,
            converged,
            residuals: (r_tau, r_mu),
        })
    }
}

fn check(gamma: f64, sigma2: f64, law: &SignalLaw) -> Result<()> {
    law.validate()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return invalid("gamma must be positive");
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return invalid("sigma2 must be positive");
    }
    Ok(())
}

fn converged(s: ScalarSystemSolution) -> Result<ScalarSystemSolution> {
    if s.converged {
        Ok(s)
    } else {
        Err(Error::NoConvergence {
            what: "scalar fixed point",
            iterations: 400,
            residual: s.residuals.0.abs().max(s.residuals.1.abs()),
        })
    }
}

pub fn solve_convex_system(
    lambda: f64,
    gamma: f64,
    law: &SignalLaw,
    sigma2: f64,
    penalty: &PenaltyLaw,
) -> Result<ScalarSystemSolution> {
    check(gamma, sigma2, law)?;
    penalty.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid("lambda must be positive");
    }
    converged(
        System {
            gamma,
            sigma2,
            law,
            penalty,
        }
        .solve(lambda)?,
    )
}

pub fn solve_lasso_system(lambda: f64, gamma: f64, law: &SignalLaw, sigma2: f64) -> Result<ScalarSystemSolution> {
    solve_convex_system(lambda, gamma, law, sigma2, &PenaltyLaw::Lasso)
}

/// Threshold a0 and tau0 of the lassoless system with a null signal.
pub fn lassoless_null_closed_form(gamma: f64, sigma2: f64) -> Result<(f64, f64)> {
    if !(gamma > 1.0) {
        return invalid("lassoless needs gamma > 1");
    }
    let a0 = gaussian::inverse_cdf(1.0 - 1.0 / (2.0 * gamma));
    let tau0 = (sigma2 / (1.0 - gamma * soft_null_risk(a0))).sqrt();
    Ok((a0, tau0))
}

/// tau^2 = sigma^2 + gamma E[(soft(B + tau H; a tau) - B)^2] and
/// 1 = gamma P(|B + tau H| > a tau), for gamma > 1.
pub fn solve_lassoless_system(gamma: f64, law: &SignalLaw, sigma2: f64) -> Result<ScalarSystemSolution> {
    check(gamma, sigma2, law)?;
    if !(gamma > 1.0) {
        return invalid("lassoless needs gamma > 1");
    }
    if law.is_null() {
        let (a, tau) = lassoless_null_closed_form(gamma, sigma2)?;
        let (m2, m1) = soft_risk(0.0, tau, a * tau);
        return Ok(ScalarSystemSolution {
            tau,
            a,
            mu: a * tau,
            converged: true,
            residuals: ((sigma2 + gamma * m2 - tau * tau) / (tau * tau), 1.0 - gamma * m1),
        });
    }
    let sys = System {
        gamma,
        sigma2,
        law,
        penalty: &PenaltyLaw::Lasso,
    };
    let s = sys.solve(0.0)?;
    let (_, m1) = law_moments(law, s.tau, s.mu, &PenaltyLaw::Lasso)?;
    converged(ScalarSystemSolution {
        residuals: (s.residuals.0, 1.0 - gamma * m1),
        converged: s.residuals.0.abs() <= SYSTEM_TOLERANCE && (1.0 - gamma * m1).abs() <= SYSTEM_TOLERANCE,
        ..s
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexEquivalents {
    pub solution: ScalarSystemSolution,
    /// Same system with a null signal.
    pub null_solution: ScalarSystemSolution,
    pub df_fixed_norm: f64,
    pub df_intrinsic_norm: f64,
    pub df_emergent_norm: f64,
}

/// Normalized df equivalents. The intrinsic one trains on pure noise, so it is
/// built from the null-signal solution (tau0, mu0) throughout.
pub fn convex_equivalents(
    lambda: f64,
    gamma: f64,
    law: &SignalLaw,
    sigma2: f64,
    penalty: &PenaltyLaw,
) -> Result<ConvexEquivalents> {
    let s = solve_convex_system(lambda, gamma, law, sigma2, penalty)?;
    let s0 = solve_convex_system(lambda, gamma, &SignalLaw::point_mass(0.0), sigma2, penalty)?;
    // 1 - lambda/mu equals gamma E[prox'] at the fixed point; taking the moment
    // directly avoids cancellation once mu is close to lambda
    let f = gamma * law_moments(law, s.tau, s.mu, penalty)?.1;
    let f0 = gamma * law_moments(&SignalLaw::point_mass(0.0), s0.tau, s0.mu, penalty)?.1;
    Ok(ConvexEquivalents {
        solution: s,
        null_solution: s0,
        df_fixed_norm: f,
        df_intrinsic_norm: omega(f0 * (2.0 - f0) * s0.tau * s0.tau / sigma2),
        df_emergent_norm: omega(f * (2.0 - f) * s.tau * s.tau / sigma2),
    })
}

pub fn lasso_equivalents(lambda: f64, gamma: f64, law: &SignalLaw, sigma2: f64) -> Result<ConvexEquivalents> {
    convex_equivalents(lambda, gamma, law, sigma2, &PenaltyLaw::Lasso)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LassolessEquivalents {
    /// Absent for gamma <= 1, where lassoless is least squares.
    pub solution: Option<ScalarSystemSolution>,
    pub null_solution: Option<ScalarSystemSolution>,
    pub df_fixed_norm: f64,
    pub df_intrinsic_norm: f64,
    pub df_emergent_norm: f64,
    pub divergent: bool,
}

pub fn lassoless_equivalents(gamma: f64, law: &SignalLaw, sigma2: f64) -> Result<LassolessEquivalents> {
    check(gamma, sigma2, law)?;
    if gamma <= 1.0 {
        return Ok(LassolessEquivalents {
            solution: None,
            null_solution: None,
            df_fixed_norm: gamma,
            df_intrinsic_norm: gamma,
            df_emergent_norm: gamma,
            divergent: gamma == 1.0,
        });
    }
    let s = solve_lassoless_system(gamma, law, sigma2)?;
    let s0 = solve_lassoless_system(gamma, &SignalLaw::point_mass(0.0), sigma2)?;
    Ok(LassolessEquivalents {
        solution: Some(s),
        null_solution: Some(s0),
        df_fixed_norm: 1.0,
        df_intrinsic_norm: omega(s0.tau * s0.tau / sigma2),
        df_emergent_norm: omega(s.tau * s.tau / sigma2),
        divergent: false,
    })
}

/// Largest violation of the two algebraic identities behind the convex df
/// equivalents: normalized optimism (1 - (lambda/mu)^2) tau^2 rebuilt from the
/// system moments, and 1 - lambda/mu = gamma E[prox'].
pub fn gcv_consistency_check(
    lambda: f64,
    gamma: f64,
    law: &SignalLaw,
    sigma2: f64,
    penalty: &PenaltyLaw,
) -> Result<f64> {
    let s = solve_convex_system(lambda, gamma, law, sigma2, penalty)?;
    let (m2, m1) = law_moments(law, s.tau, s.mu, penalty)?;
    let df = gamma * m1;
    let adjust = 1.0 - (1.0 - df) * (1.0 - df);
    let opt_from_moments = adjust * (sigma2 + gamma * m2);
    let r = lambda / s.mu;
    let opt = (1.0 - r * r) * s.tau * s.tau;
    let a = (opt_from_moments - opt).abs() / opt.abs().max(1.0);
    let b = ((1.0 - r) - df).abs();
    Ok(a.max(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bern() -> SignalLaw {
        SignalLaw::bernoulli(1.0 / 6.0, 2.0).unwrap()
    }

    #[test]
    fn soft_threshold_scaling() {
        let (a, x, k) = (3.0, 1.7, 0.4);
        assert_abs_diff_eq!(soft_threshold(x, k), soft_threshold(a * x, a * k) / a, epsilon = 1e-15);
        assert_eq!(soft_threshold(5.0, 2.0), 3.0);
        assert_eq!(soft_threshold(-1.0, 2.0), 0.0);
    }

    #[test]
    fn prox_moment_examples() {
        let (m2, m1) = gaussian_prox_moments(0.0, 2.0, 0.0, &PenaltyLaw::Lasso).unwrap();
        assert_abs_diff_eq!(m2, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m1, 1.0, epsilon = 1e-15);
        let (m2, m1) = gaussian_prox_moments(0.0, 1.0, 0.67449, &PenaltyLaw::Lasso).unwrap();
        assert_abs_diff_eq!(m1, 0.5, epsilon = 1e-5);
        assert_abs_diff_eq!(m2, 0.29878, epsilon = 2e-5);
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        // smooth prox through the generic path versus its closed form
        let custom = PenaltyLaw::custom(|x, t| x / (1.0 + t), |_, t| 1.0 / (1.0 + t));
        for (b, tau, k) in [(0.0, 1.0, 0.3), (1.5, 0.7, 2.0)] {
            let c = gaussian_prox_moments(b, tau, k, &PenaltyLaw::Ridge).unwrap();
            let g = gaussian_prox_moments(b, tau, k, &custom).unwrap();
            assert_abs_diff_eq!(c.0, g.0, epsilon = 1e-12);
            assert_abs_diff_eq!(c.1, g.1, epsilon = 1e-12);
        }
        // elastic net at alpha = 1 is the lasso, at alpha = 0 ridge
        let e1 = gaussian_prox_moments(0.8, 1.2, 0.5, &PenaltyLaw::ElasticNet { alpha: 1.0 }).unwrap();
        let l = gaussian_prox_moments(0.8, 1.2, 0.5, &PenaltyLaw::Lasso).unwrap();
        assert_abs_diff_eq!(e1.0, l.0, epsilon = 1e-13);
        let e0 = gaussian_prox_moments(0.8, 1.2, 0.5, &PenaltyLaw::ElasticNet { alpha: 0.0 }).unwrap();
        let r = gaussian_prox_moments(0.8, 1.2, 0.5, &PenaltyLaw::Ridge).unwrap();
        assert_abs_diff_eq!(e0.0, r.0, epsilon = 1e-13);
        assert_abs_diff_eq!(e0.1, r.1, epsilon = 1e-15);
    }

    #[test]
    fn lasso_null_signal_matches_intrinsic_pair() {
        let s = solve_lasso_system(0.5, 0.8, &SignalLaw::point_mass(0.0), 1.0).unwrap();
        assert!(s.converged);
        let e = lasso_equivalents(0.5, 0.8, &SignalLaw::point_mass(0.0), 1.0).unwrap();
        assert_eq!(e.solution, e.null_solution);
        assert_eq!(e.df_intrinsic_norm, e.df_emergent_norm);
    }

    #[test]
    fn lasso_large_lambda_limit() {
        let law = bern();
        let s = solve_lasso_system(1e3, 0.5, &law, 1.0).unwrap();
        let t2 = 1.0 + 0.5 * law.second_moment();
        assert_abs_diff_eq!(s.tau * s.tau, t2, epsilon = 1e-9);
        assert!(1.0 - 1e3 / s.mu < 1e-12);
    }

    #[test]
    fn lasso_residuals_and_emergent_dominates() {
        let law = bern();
        for gamma in [0.3, 0.75, 1.5, 3.0] {
            let mut prev = f64::INFINITY;
            for k in 0..12 {
                let l = 0.05 * 1.6f64.powi(k);
                let e = lasso_equivalents(l, gamma, &law, 1.0).unwrap();
                assert!(e.solution.residuals.0.abs() <= 1e-10 && e.solution.residuals.1.abs() <= 1e-10);
                assert!(e.solution.tau >= 1.0);
                assert!(e.df_emergent_norm >= e.df_intrinsic_norm - 1e-12);
                assert!(e.df_intrinsic_norm < prev);
                prev = e.df_intrinsic_norm;
            }
        }
    }

    #[test]
    fn lasso_tail_stays_positive_and_ordered() {
        let law = bern();
        let mut prev = f64::INFINITY;
        for l in [5.0, 10.0, 15.0, 20.0, 30.0] {
            let e = lasso_equivalents(l, 0.75, &law, 1.0).unwrap();
            assert!(e.df_intrinsic_norm > 0.0 && e.df_intrinsic_norm < prev);
            assert!(e.df_emergent_norm >= e.df_intrinsic_norm);
            prev = e.df_intrinsic_norm;
        }
    }

    #[test]
    fn lassoless_closed_form() {
        let (a0, tau0) = lassoless_null_closed_form(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(a0, 0.6744897501960817, epsilon = 1e-12);
        assert_abs_diff_eq!(tau0 * tau0, 2.4848, epsilon = 1e-3);
        assert_abs_diff_eq!(omega(tau0 * tau0), 0.648, epsilon = 1e-3);
        let (a_big, t_big) = lassoless_null_closed_form(1e6, 1.0).unwrap();
        assert!(a_big > 4.0 && t_big > 1.0 && t_big < 1.1);
        let mut prev = 0.0;
        for g in [1.1, 1.5, 2.0, 4.0, 10.0] {
            let (a, _) = lassoless_null_closed_form(g, 1.0).unwrap();
            assert!(a > prev);
            prev = a;
        }
        assert!(solve_lassoless_system(0.9, &bern(), 1.0).is_err());
    }

    #[test]
    fn lassoless_is_lasso_limit() {
        let law = bern();
        let ll = solve_lassoless_system(2.0, &law, 1.0).unwrap();
        assert!(ll.converged);
        let l = solve_lasso_system(1e-9, 2.0, &law, 1.0).unwrap();
        assert_abs_diff_eq!(ll.tau, l.tau, epsilon = 1e-6);
        assert_abs_diff_eq!(ll.a, l.a, epsilon = 1e-6);
    }

    #[test]
    fn ridge_penalty_matches_spectral_ridge() {
        use crate::asymptotics::spectral::{ridge_equivalents, SpectralModel};
        for (l, g) in [(0.1, 0.5), (1.0, 2.0), (0.3, 1.0)] {
            let c = convex_equivalents(l, g, &SignalLaw::point_mass(0.0), 1.0, &PenaltyLaw::Ridge).unwrap();
            let r = ridge_equivalents(l, &SpectralModel::isotropic(g, 1.0, 0.0)).unwrap();
            assert_abs_diff_eq!(c.df_fixed_norm, r.df_fixed_norm, epsilon = 1e-9);
        }
    }

    #[test]
    fn gcv_identity_holds() {
        let law = bern();
        for p in [PenaltyLaw::Lasso, PenaltyLaw::Ridge, PenaltyLaw::ElasticNet { alpha: 0.5 }] {
            for (l, g) in [(0.2, 0.5), (1.0, 2.0)] {
                assert!(gcv_consistency_check(l, g, &law, 1.0, &p).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn empirical_law_merges() {
        let l = SignalLaw::empirical(&[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(l.atoms, vec![(0.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn unit_mixing_elastic_net_matches_lasso() {
        let soft = PenaltyLaw::ElasticNet { alpha: 1.0 };
        let law = SignalLaw::bernoulli(0.2, 2.0).unwrap();
        for (lam, gamma) in [(0.3, 0.5), (1.0, 1.5), (3.0, 3.0)] {
            let a = solve_lasso_system(lam, gamma, &law, 1.0).unwrap();
            let b = solve_convex_system(lam, gamma, &law, 1.0, &soft).unwrap();
            assert_abs_diff_eq!(a.tau, b.tau, epsilon = 1e-9);
            assert_abs_diff_eq!(a.mu, b.mu, epsilon = 1e-9);
        }
    }

}
