//! Deterministic proportional-limit equivalents of degrees of freedom.

pub mod gaussian;
pub mod scalar;
pub mod spectral;

pub use gaussian::{expect_adaptive, expect_many, hermite_rule, soft_moments, soft_risk};
pub use scalar::{
    convex_equivalents, gaussian_prox_moments, gcv_consistency_check, lasso_equivalents,
    lassoless_equivalents, lassoless_null_closed_form, soft_threshold, solve_convex_system,
    solve_lasso_system, solve_lassoless_system, ConvexEquivalents, LassolessEquivalents,
    PenaltyLaw, ScalarSystemSolution, SignalLaw,
};
pub use spectral::{
    mu_min, ridge_equivalents, ridgeless_equivalents, solve_ridge_mu, solve_ridgeless_mu, Atom,
    RidgeSolution, SpectralModel,
};
