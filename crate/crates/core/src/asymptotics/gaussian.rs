//! Standard normal functions, Gauss-Hermite rules and soft-threshold moments
//! under a Gaussian perturbation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Upper tail P(H > x).
pub fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

pub fn cdf(x: f64) -> f64 {
    q(-x)
}

/// Quantile function, polished by Newton steps on [`cdf`].
pub fn inverse_cdf(p: f64) -> f64 {
    let mut x = Normal::standard().inverse_cdf(p);
    if x.is_finite() {
        for _ in 0..2 {
            let d = pdf(x);
            if d > 0.0 {
                x -= (cdf(x) - p) / d;
            }
        }
    }
    x
}

/// E[soft(H; a)^2] for standard normal H.
pub fn soft_null_risk(a: f64) -> f64 {
    2.0 * ((1.0 + a * a) * q(a) - a * pdf(a))
}

/// Mean and second moment of soft(b + tau H; kappa).
pub fn soft_moments(b: f64, tau: f64, kappa: f64) -> (f64, f64) {
    let u = (kappa - b) / tau;
    let v = (kappa + b) / tau;
    let (qu, qv, pu, pv) = (q(u), q(v), pdf(u), pdf(v));
    let m = tau * ((pu - u * qu) - (pv - v * qv));
    let s = tau * tau * ((1.0 + u * u) * qu - u * pu + (1.0 + v * v) * qv - v * pv);
    (m, s)
}

/// (E[(soft(b + tau H; kappa) - b)^2], P(|b + tau H| > kappa)).
pub fn soft_risk(b: f64, tau: f64, kappa: f64) -> (f64, f64) {
    let u = (kappa - b) / tau;
    let v = (kappa + b) / tau;
    let c = kappa / tau;
    let (qu, qv, pu, pv) = (q(u), q(v), pdf(u), pdf(v));
    let t2 = tau * tau;
    let m2 = t2 * ((1.0 + c * c) * qu + pu * (u - 2.0 * c))
        + t2 * ((1.0 + c * c) * qv + pv * (v - 2.0 * c))
        + b * b * (cdf(u) - qv).max(0.0);
    (m2, qu + qv)
}

/// Nodes and weights of an n-point rule for E[g(H)], H standard normal.
pub fn hermite_rule(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache").get(&n) {
        return r.clone();
    }
    // Jacobi matrix of the monic probabilists' Hermite recurrence.
    let mut j = DMatrix::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let rule = Arc::new((
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1 / total).collect(),
    ));
    cache.lock().expect("rule cache").insert(n, rule.clone());
    rule
}

pub const QUADRATURE_START: usize = 64;
pub const QUADRATURE_CAP: usize = 512;
pub const QUADRATURE_TOL: f64 = 1e-10;

/// E[g_k(H)] for several integrands, doubling the node count from 64 until
/// consecutive rules agree to relative 1e-10.
pub fn expect_many<const K: usize>(g: impl Fn(f64) -> [f64; K]) -> Result<[f64; K]> {
    let eval = |n: usize| {
        let rule = hermite_rule(n);
        let mut acc = [0.0; K];
        for (x, w) in rule.0.iter().zip(rule.1.iter()) {
            let v = g(*x);
            for k in 0..K {
                acc[k] += w * v[k];
            }
        }
        acc
    };
    let mut n = QUADRATURE_START;
    let mut prev = eval(n);
    while n < QUADRATURE_CAP {
        n *= 2;
        let cur = eval(n);
        let err = (0..K)
            .map(|k| (cur[k] - prev[k]).abs() / cur[k].abs().max(1e-12))
            .fold(0.0, f64::max);
        if err <= QUADRATURE_TOL {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence {
        what: "gauss-hermite quadrature",
        iterations: n,
        residual: f64::NAN,
    })
}

const KRONROD_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

pub const ADAPTIVE_TOL: f64 = 1e-13;
pub const ADAPTIVE_MAX_INTERVALS: usize = 20_000;

struct Piece<const K: usize> {
    lo: f64,
    hi: f64,
    value: [f64; K],
    error: f64,
}

fn kronrod<const K: usize>(g: &impl Fn(f64) -> [f64; K], lo: f64, hi: f64) -> Piece<K> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut vk = [0.0; K];
    let mut vg = [0.0; K];
    let mut add = |x: f64, wk: f64, wg: f64| {
        let w = pdf(x);
        let v = g(x);
        for k in 0..K {
            vk[k] += wk * w * v[k];
            vg[k] += wg * w * v[k];
        }
    };
    for i in 0..7 {
        let wg = if i % 2 == 1 { GAUSS_WEIGHTS[i / 2] } else { 0.0 };
        add(c - h * KRONROD_NODES[i], KRONROD_WEIGHTS[i], wg);
        add(c + h * KRONROD_NODES[i], KRONROD_WEIGHTS[i], wg);
    }
    add(c, KRONROD_WEIGHTS[7], GAUSS_WEIGHTS[3]);
    let mut value = [0.0; K];
    let mut error: f64 = 0.0;
    for k in 0..K {
        value[k] = h * vk[k];
        error = error.max((h * (vk[k] - vg[k])).abs());
    }
    Piece { lo, hi, value, error }
}

/// Kronrod estimates on both halves; the error combines the Gauss-Kronrod gaps
/// with the disagreement against the rule on the whole interval, so a jump
/// that happens to fool one comparison is still refined.
fn refine<const K: usize>(g: &impl Fn(f64) -> [f64; K], lo: f64, hi: f64, whole: &[f64; K]) -> Piece<K> {
    let mid = 0.5 * (lo + hi);
    let a = kronrod(g, lo, mid);
    let b = kronrod(g, mid, hi);
    let mut value = [0.0; K];
    let mut gap: f64 = 0.0;
    for k in 0..K {
        value[k] = a.value[k] + b.value[k];
        gap = gap.max((value[k] - whole[k]).abs());
    }
    Piece {
        lo,
        hi,
        value,
        error: gap.max(a.error + b.error),
    }
}

/// E[g_k(H)] by globally adaptive Gauss-Kronrod on [-40, 40]. Slower than
/// [`expect_many`] but indifferent to kinks and jumps in the integrand.
pub fn expect_adaptive<const K: usize>(g: impl Fn(f64) -> [f64; K]) -> Result<[f64; K]> {
    let mut pieces: Vec<Piece<K>> = (0..32)
        .map(|i| {
            let (lo, hi) = (-40.0 + 2.5 * i as f64, -37.5 + 2.5 * i as f64);
            let whole = kronrod(&g, lo, hi).value;
            refine(&g, lo, hi, &whole)
        })
        .collect();
    loop {
        let mut total = [0.0; K];
        let mut err = 0.0;
        for p in &pieces {
            for k in 0..K {
                total[k] += p.value[k];
            }
            err += p.error;
        }
        let scale = total.iter().fold(1e-3f64, |m, v| m.max(v.abs()));
        if err <= ADAPTIVE_TOL * scale {
            return Ok(total);
        }
        if pieces.len() >= ADAPTIVE_MAX_INTERVALS {
            return Err(Error::NoConvergence {
                what: "adaptive gauss-kronrod quadrature",
                iterations: pieces.len(),
                residual: err,
            });
        }
        let worst = (0..pieces.len())
            .max_by(|&a, &b| pieces[a].error.total_cmp(&pieces[b].error))
            .expect("nonempty");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        let left = kronrod(&g, p.lo, mid).value;
        let right = kronrod(&g, mid, p.hi).value;
        pieces.push(refine(&g, p.lo, mid, &left));
        pieces.push(refine(&g, mid, p.hi, &right));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_functions() {
        assert_abs_diff_eq!(q(0.0), 0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(cdf(1.959963984540054), 0.975, epsilon = 1e-15);
        assert_abs_diff_eq!(q(0.5 * std::f64::consts::SQRT_2), 0.5 * 0.4795001221869534623, epsilon = 1e-16);
        assert_abs_diff_eq!(inverse_cdf(0.75), 0.6744897501960817, epsilon = 1e-12);
    }

    #[test]
    fn rule_integrates_polynomials() {
        let r = hermite_rule(64);
        let m = |k: i32| r.0.iter().zip(r.1.iter()).map(|(x, w)| w * x.powi(k)).sum::<f64>();
        assert_abs_diff_eq!(m(0), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(m(2), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m(4), 3.0, epsilon = 1e-11);
        assert_abs_diff_eq!(m(6), 15.0, epsilon = 1e-10);
    }

    #[test]
    fn soft_risk_examples() {
        let (m2, m1) = soft_risk(0.0, 1.0, 0.0);
        assert_abs_diff_eq!(m2, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m1, 1.0, epsilon = 1e-15);
        let (m2, m1) = soft_risk(0.0, 1.0, 40.0);
        assert!(m2 < 1e-300 && m1 < 1e-300);
        let (m2, m1) = soft_risk(0.0, 1.0, 0.67449);
        assert_abs_diff_eq!(m1, 0.5, epsilon = 1e-5);
        assert_abs_diff_eq!(m2, 0.29878, epsilon = 2e-5);
        assert_abs_diff_eq!(m2, soft_null_risk(0.67449), epsilon = 1e-15);
    }

    #[test]
    fn soft_moments_match_quadrature_on_smooth_pieces() {
        // Integrate piecewise by shifting: compare against a fine midpoint rule.
        for (b, tau, k) in [(0.7, 1.3, 0.4), (-2.0, 0.5, 1.0), (5.0, 2.0, 0.1)] {
            let (m, s) = soft_moments(b, tau, k);
            let (r2, r1) = soft_risk(b, tau, k);
            let h = 1e-4;
            let (mut em, mut es, mut er, mut ep) = (0.0, 0.0, 0.0, 0.0);
            let mut x = -12.0;
            while x < 12.0 {
                let z = x + 0.5 * h;
                let w = pdf(z) * h;
                let u = b + tau * z;
                let sv = crate::predictors::lasso::soft(u, k);
                em += w * sv;
                es += w * sv * sv;
                er += w * (sv - b) * (sv - b);
                ep += w * if u.abs() > k { 1.0 } else { 0.0 };
                x += h;
            }
            assert_abs_diff_eq!(m, em, epsilon = 1e-6);
            assert_abs_diff_eq!(s, es, epsilon = 1e-6);
            assert_abs_diff_eq!(r2, er, epsilon = 1e-6);
            assert_abs_diff_eq!(r1, ep, epsilon = 1e-4);
        }
    }

    #[test]
    fn adaptive_handles_kinks() {
        let (m2, m1) = soft_risk(0.3, 1.2, 0.8);
        let v = expect_adaptive(|h| {
            let u = 0.3 + 1.2 * h;
            let d = crate::predictors::lasso::soft(u, 0.8) - 0.3;
            [d * d, if u.abs() > 0.8 { 1.0 } else { 0.0 }]
        })
        .unwrap();
        assert_abs_diff_eq!(v[0], m2, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], m1, epsilon = 1e-12);
    }

    #[test]
    fn expect_many_on_smooth_integrand() {
        let v = expect_many(|x| [(0.3 * x).cos(), x * x]).unwrap();
        assert_abs_diff_eq!(v[0], (-0.045f64).exp(), epsilon = 1e-13);
        assert_abs_diff_eq!(v[1], 1.0, epsilon = 1e-12);
    }
}
