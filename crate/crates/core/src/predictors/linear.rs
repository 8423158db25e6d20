//! Least squares, ridge and ridgeless through one thin SVD.
//!
//! The SVD is obtained from the eigendecomposition of the smaller Gram matrix
//! (X^T X when p <= n, X X^T otherwise). Every penalty level then costs only a
//! rescaling of the singular values, so a factor is shared across a tuning grid.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GramFactor {
    n: usize,
    p: usize,
    /// n x r left singular vectors
    u: DMatrix<f64>,
    /// p x r right singular vectors
    v: DMatrix<f64>,
    s: DVector<f64>,
}

impl GramFactor {
    pub fn new(x: &DMatrix<f64>) -> Self {
        let (n, p) = x.shape();
        let primal = p <= n;
        let gram = if primal { x.tr_mul(x) } else { x * x.transpose() };
        let eig = gram.symmetric_eigen();
        let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        // Relative cutoff on squared singular values. Eigenvalues of a Gram
        // matrix carry round-off of order eps * lmax, which sets the floor.
        let tol = (n.max(p) as f64) * f64::EPSILON * lmax;
        let mut order: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&k| eig.eigenvalues[k] > tol)
            .collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let r = order.len();
        let s = DVector::from_iterator(r, order.iter().map(|&k| eig.eigenvalues[k].sqrt()));
        let w = eig.eigenvectors.select_columns(order.iter());
        let (u, v) = if primal {
            let mut u = x * &w;
            for k in 0..r {
                u.column_mut(k).unscale_mut(s[k]);
            }
            (u, w)
        } else {
            let mut v = x.tr_mul(&w);
            for k in 0..r {
                v.column_mut(k).unscale_mut(s[k]);
            }
            (w, v)
        };
        Self { n, p, u, v, s }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn singular_values(&self) -> &DVector<f64> {
        &self.s
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Per-direction gains c_k = s_k / (s_k^2 + n lambda); lambda = 0 gives the
    /// pseudoinverse.
    pub fn gains(&self, lambda: f64) -> DVector<f64> {
        let nl = self.n as f64 * lambda;
        self.s.map(|s| s / (s * s + nl))
    }

    pub fn coefficients(&self, gains: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let uy = self.u.tr_mul(y).component_mul(gains);
        &self.v * uy
    }
}

/// Fitted linear predictor. Linear-smoother families keep their factor.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub coefficients: DVector<f64>,
    pub smoother: Option<LinearSmoother>,
}

#[derive(Debug, Clone)]
pub struct LinearSmoother {
    pub factor: std::sync::Arc<GramFactor>,
    pub gains: DVector<f64>,
}

impl LinearSmoother {
    /// In-sample shrinkage h_k = s_k c_k; L_X(X) = U diag(h) U^T.
    pub fn in_sample_gains(&self) -> DVector<f64> {
        self.factor.s.component_mul(&self.gains)
    }

    pub fn trace(&self) -> f64 {
        self.in_sample_gains().sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.in_sample_gains().iter().map(|h| h * h).sum()
    }

    pub fn in_sample_matrix(&self) -> DMatrix<f64> {
        let h = self.in_sample_gains();
        let mut uh = self.factor.u.clone();
        for k in 0..h.len() {
            uh.column_mut(k).scale_mut(h[k]);
        }
        uh * self.factor.u.transpose()
    }

    /// L_X(x) = U diag(c) V^T x.
    pub fn weights(&self, x: &DVector<f64>) -> DVector<f64> {
        let z = self.factor.v.tr_mul(x).component_mul(&self.gains);
        &self.factor.u * z
    }

    /// ||L_X(x_i)||^2 for each row of `x0`.
    pub fn weight_norms_sq(&self, x0: &DMatrix<f64>) -> DVector<f64> {
        let mut z = x0 * &self.factor.v;
        for k in 0..self.gains.len() {
            z.column_mut(k).scale_mut(self.gains[k]);
        }
        DVector::from_iterator(
            z.nrows(),
            (0..z.nrows()).map(|i| z.row(i).iter().map(|v| v * v).sum()),
        )
    }

    /// L_X(X) v.
    pub fn apply_in_sample(&self, v: &DVector<f64>) -> DVector<f64> {
        let h = self.in_sample_gains();
        &self.factor.u * self.factor.u.tr_mul(v).component_mul(&h)
    }
}

pub(crate) fn check_least_squares(f: &GramFactor) -> Result<()> {
    if f.p > f.n || f.rank() < f.p {
        return Err(Error::RankDeficient {
            rank: f.rank(),
            needed: f.p,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(n: usize, p: usize, seed: u64) -> DMatrix<f64> {
        let mut r = crate::rng::stream(seed, 0, crate::rng::Role::TrainX, 0);
        DMatrix::from_fn(n, p, |_, _| crate::rng::normal(&mut r))
    }

    #[test]
    fn factor_reconstructs_matrix() {
        for (n, p) in [(8, 3), (3, 8), (5, 5)] {
            let x = sample(n, p, 1);
            let f = GramFactor::new(&x);
            let mut us = f.u.clone();
            for k in 0..f.rank() {
                us.column_mut(k).scale_mut(f.s[k]);
            }
            let rec = us * f.v.transpose();
            assert_abs_diff_eq!((rec - &x).abs().max(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn rank_detects_duplicate_columns() {
        let mut x = sample(10, 4, 2);
        let c = x.column(0).clone_owned();
        x.set_column(3, &c);
        assert_eq!(GramFactor::new(&x).rank(), 3);
    }
}
