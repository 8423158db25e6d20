//! k-nearest-neighbor regression with Euclidean distance and uniform weights.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct KnnFit {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub k: usize,
}

impl KnnFit {
    /// Indices of the k nearest training rows; ties go to the lower index.
    pub fn neighbors(&self, q: &[f64]) -> Vec<usize> {
        let n = self.x.nrows();
        let mut d: Vec<(f64, usize)> = (0..n)
            .map(|i| {
                let mut s = 0.0;
                for (j, qj) in q.iter().enumerate() {
                    let t = self.x[(i, j)] - qj;
                    s += t * t;
                }
                (s, i)
            })
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < n {
            d.select_nth_unstable_by(self.k - 1, cmp);
            d.truncate(self.k);
        }
        d.sort_by(cmp);
        d.into_iter().map(|(_, i)| i).collect()
    }

    pub fn predict_one(&self, q: &[f64]) -> f64 {
        let nb = self.neighbors(q);
        nb.iter().map(|&i| self.y[i]).sum::<f64>() / self.k as f64
    }

    pub fn weights(&self, q: &[f64]) -> DVector<f64> {
        let mut w = DVector::zeros(self.x.nrows());
        for i in self.neighbors(q) {
            w[i] = 1.0 / self.k as f64;
        }
        w
    }
}
