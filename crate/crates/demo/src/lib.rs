//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every function returns a flat row-major `Float64Array`. Points where a
//! solver fails come back as NaN so the page can leave a gap.

use rxdf_core::asymptotics::{
    lasso_equivalents, lassoless_equivalents, ridge_equivalents, ridgeless_equivalents, SignalLaw,
    SpectralModel,
};
use rxdf_core::omega::{omega, omega_n};
use wasm_bindgen::prelude::*;

fn grid(lo: f64, hi: f64, points: u32, log: bool) -> Vec<f64> {
    let k = points.max(2) as usize;
    (0..k)
        .map(|i| {
            let t = i as f64 / (k - 1) as f64;
            if log {
                lo * (hi / lo).powf(t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect()
}

const NAN3: [f64; 3] = [f64::NAN; 3];

/// Rows of (x, omega_n(x)/n, omega(x)) for x in [0, x_max].
#[wasm_bindgen]
pub fn omega_curve(n: u32, x_max: f64, points: u32) -> Vec<f64> {
    let n = n.max(2) as usize;
    let mut out = Vec::new();
    for x in grid(0.0, x_max.max(1e-9), points, false) {
        let exact = omega_n(x, n).map(|d| d / n as f64).unwrap_or(f64::NAN);
        out.extend([x, exact, omega(x).unwrap_or(f64::NAN)]);
    }
    out
}

/// Rows of (lambda, fixed, emergent, intrinsic) normalized df for isotropic
/// ridge with unit noise and signal energy `snr`.
#[wasm_bindgen]
pub fn ridge_curve(gamma: f64, snr: f64, lambda_min: f64, lambda_max: f64, points: u32) -> Vec<f64> {
    let model = SpectralModel::isotropic(gamma, 1.0, snr);
    let mut out = Vec::new();
    for lambda in grid(lambda_min, lambda_max, points, true) {
        let df = ridge_equivalents(lambda, &model)
            .map(|r| [r.df_fixed_norm, r.df_emergent_norm, r.df_intrinsic_norm])
            .unwrap_or(NAN3);
        out.push(lambda);
        out.extend(df);
    }
    out
}

/// Rows of (gamma, fixed, emergent, intrinsic) for ridgeless regression.
#[wasm_bindgen]
pub fn ridgeless_curve(snr: f64, gamma_max: f64, points: u32) -> Vec<f64> {
    let mut out = Vec::new();
    for gamma in grid(0.05, gamma_max.max(0.1), points, false) {
        let df = ridgeless_equivalents(&SpectralModel::isotropic(gamma, 1.0, snr))
            .map(|r| [r.df_fixed_norm, r.df_emergent_norm, r.df_intrinsic_norm])
            .unwrap_or(NAN3);
        out.push(gamma);
        out.extend(df);
    }
    out
}

/// Sparse signal with a fraction `delta` of nonzero entries at SNR 1 for
/// features N(0, 1/n).
fn sparse_law(delta: f64, gamma: f64) -> Option<SignalLaw> {
    SignalLaw::bernoulli(delta, (1.0 / (delta * gamma)).sqrt()).ok()
}

/// Rows of (lambda, fixed, emergent, intrinsic) for the lasso.
#[wasm_bindgen]
pub fn lasso_curve(gamma: f64, delta: f64, lambda_min: f64, lambda_max: f64, points: u32) -> Vec<f64> {
    let law = sparse_law(delta, gamma);
    let mut out = Vec::new();
    for lambda in grid(lambda_min, lambda_max, points, true) {
        let df = law
            .as_ref()
            .and_then(|l| lasso_equivalents(lambda, gamma, l, 1.0).ok())
            .map(|e| [e.df_fixed_norm, e.df_emergent_norm, e.df_intrinsic_norm])
            .unwrap_or(NAN3);
        out.push(lambda);
        out.extend(df);
    }
    out
}

/// Rows of (gamma, fixed, emergent, intrinsic) for the lassoless limit.
#[wasm_bindgen]
pub fn lassoless_curve(delta: f64, gamma_max: f64, points: u32) -> Vec<f64> {
    let mut out = Vec::new();
    for gamma in grid(0.05, gamma_max.max(0.1), points, false) {
        let df = sparse_law(delta, gamma)
            .and_then(|l| lassoless_equivalents(gamma, &l, 1.0).ok())
            .map(|e| [e.df_fixed_norm, e.df_emergent_norm, e.df_intrinsic_norm])
            .unwrap_or(NAN3);
        out.push(gamma);
        out.extend(df);
    }
    out
}
