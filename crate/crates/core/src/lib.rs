//! Random-X degrees of freedom of prediction models.
//!
//! Monte Carlo estimation of emergent and intrinsic optimism, the matching maps
//! that turn optimism into a parameter count, and deterministic asymptotic
//! equivalents for ridge, ridgeless, lasso, lassoless and convex penalties.

pub mod asymptotics;
pub mod data;
pub mod decomposition;
pub mod error;
pub mod estimator;
pub mod omega;
mod par;
pub mod predictors;
pub mod rng;

pub use error::{Error, Result};
