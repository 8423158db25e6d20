//! Single-dataset optimism: K-fold cross-validated error minus training error.

use nalgebra::DVector;

use super::{mean_se, OptimismEstimate};
use crate::data::Dataset;
use crate::error::{invalid, Result};
use crate::predictors::{PredictorSpec, PreparedDesign};

/// Folds are contiguous blocks of rows; callers shuffle beforehand if the rows
/// are ordered. `se` comes from the per-observation differences between
/// held-out and training squared residuals.
pub fn cv_optimism(data: &Dataset, pred: &PredictorSpec, folds: usize) -> Result<OptimismEstimate> {
    cv_optimism_seeded(data, pred, folds, data.seed)
}

pub fn cv_optimism_seeded(
    data: &Dataset,
    pred: &PredictorSpec,
    folds: usize,
    seed: u64,
) -> Result<OptimismEstimate> {
    let n = data.n();
    if folds < 2 || folds > n {
        return invalid(format!("folds must lie in [2, n], got {folds} with n = {n}"));
    }
    let full = PreparedDesign::new(&data.features).fit(pred, &data.response, seed)?;
    let train_sq: DVector<f64> = (full.predict(&data.features) - &data.response).map(|r| r * r);
    let mut held_sq = DVector::zeros(n);
    for k in 0..folds {
        let lo = k * n / folds;
        let hi = (k + 1) * n / folds;
        let keep: Vec<usize> = (0..n).filter(|i| *i < lo || *i >= hi).collect();
        let x = data.features.select_rows(keep.iter());
        let y = data.response.select_rows(keep.iter());
        let model = PreparedDesign::new(&x).fit(pred, &y, seed)?;
        let xo = data.features.rows(lo, hi - lo).clone_owned();
        let pred_o = model.predict(&xo);
        for (j, i) in (lo..hi).enumerate() {
            let r = pred_o[j] - data.response[i];
            held_sq[i] = r * r;
        }
    }
    let err_r = held_sq.mean();
    let err_t = train_sq.mean();
    let diffs: Vec<f64> = held_sq.iter().zip(train_sq.iter()).map(|(a, b)| a - b).collect();
    let (_, se) = mean_se(&diffs);
    Ok(OptimismEstimate {
        err_r,
        err_t,
        optimism: err_r - err_t,
        se,
        n_reps: folds,
        n_failed: 0,
    })
}
