//! Prediction models with a uniform fit/predict contract.

pub mod knn;
pub mod lasso;
pub mod linear;
pub mod tree;

use std::cell::OnceCell;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{invalid, Error, Result};
use crate::rng::{self, Role};

pub use knn::KnnFit;
pub use lasso::LassoFit;
pub use linear::{GramFactor, LinearFit, LinearSmoother};
pub use tree::{Forest, Tree};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PredictorSpec {
    /// Always predicts 0.
    Zero,
    LeastSquares,
    /// Objective (1/n)||y - Xb||^2 + lambda ||b||^2.
    Ridge { lambda: f64 },
    Ridgeless,
    /// Objective 0.5 ||y - Xb||^2 + lambda ||b||_1.
    Lasso { lambda: f64 },
    Lassoless,
    Knn { k: usize },
    Tree { max_leaves: usize },
    Forest {
        n_trees: usize,
        max_leaves: usize,
        #[serde(default)]
        max_features: Option<usize>,
    },
    /// Ridgeless regression on tanh(F x) with a fixed Gaussian map F.
    RandomFeaturesRidgeless {
        features: usize,
        #[serde(default)]
        map_seed: u64,
    },
}

impl PredictorSpec {
    pub fn label(&self) -> String {
        match self {
            PredictorSpec::Zero => "zero".into(),
            PredictorSpec::LeastSquares => "least-squares".into(),
            PredictorSpec::Ridge { lambda } => format!("ridge(lambda={lambda})"),
            PredictorSpec::Ridgeless => "ridgeless".into(),
            PredictorSpec::Lasso { lambda } => format!("lasso(lambda={lambda})"),
            PredictorSpec::Lassoless => "lassoless".into(),
            PredictorSpec::Knn { k } => format!("knn(k={k})"),
            PredictorSpec::Tree { max_leaves } => format!("tree(max_leaves={max_leaves})"),
            PredictorSpec::Forest {
                n_trees,
                max_leaves,
                ..
            } => format!("forest(n_trees={n_trees},max_leaves={max_leaves})"),
            PredictorSpec::RandomFeaturesRidgeless { features, .. } => {
                format!("random-features-ridgeless(features={features})")
            }
        }
    }

    pub fn is_linear_smoother(&self) -> bool {
        matches!(
            self,
            PredictorSpec::LeastSquares
                | PredictorSpec::Ridge { .. }
                | PredictorSpec::Ridgeless
                | PredictorSpec::Knn { .. }
        )
    }

    /// True for families whose fit does not depend on a random seed.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, PredictorSpec::Forest { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PredictorSpec::Ridge { lambda } | PredictorSpec::Lasso { lambda } => {
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return invalid(format!("lambda must be positive and finite, got {lambda}"));
                }
            }
            PredictorSpec::Knn { k } if *k < 1 => return invalid("k must be at least 1"),
            PredictorSpec::Tree { max_leaves } if *max_leaves < 2 => {
                return invalid("max_leaves must be at least 2")
            }
            PredictorSpec::Forest {
                n_trees,
                max_leaves,
                max_features,
            } => {
                if *n_trees < 1 {
                    return invalid("n_trees must be at least 1");
                }
                if *max_leaves < 2 {
                    return invalid("max_leaves must be at least 2");
                }
                if *max_features == Some(0) {
                    return invalid("max_features must be at least 1");
                }
            }
            PredictorSpec::RandomFeaturesRidgeless { features, .. } if *features < 1 => {
                return invalid("features must be at least 1")
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Model {
    Zero,
    Linear(LinearFit),
    Lasso(LassoFit),
    Knn(KnnFit),
    Tree(Tree),
    Forest(Forest),
    RandomFeatures {
        map: Arc<DMatrix<f64>>,
        inner: LinearFit,
    },
}

#[derive(Debug, Clone)]
pub struct FittedModel {
    pub spec: PredictorSpec,
    model: Model,
}

impl FittedModel {
    pub fn predict_one(&self, q: &[f64]) -> f64 {
        match &self.model {
            Model::Zero => 0.0,
            Model::Linear(l) => q.iter().zip(l.coefficients.iter()).map(|(a, b)| a * b).sum(),
            Model::Lasso(l) => q.iter().zip(l.coefficients.iter()).map(|(a, b)| a * b).sum(),
            Model::Knn(k) => k.predict_one(q),
            Model::Tree(t) => t.predict_one(q),
            Model::Forest(f) => f.predict_one(q),
            Model::RandomFeatures { map, inner } => {
                let z = random_feature_row(map, q);
                z.iter().zip(inner.coefficients.iter()).map(|(a, b)| a * b).sum()
            }
        }
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> DVector<f64> {
        match &self.model {
            Model::Zero => DVector::zeros(x.nrows()),
            Model::Linear(l) => x * &l.coefficients,
            Model::Lasso(l) => x * &l.coefficients,
            Model::RandomFeatures { map, inner } => random_features(map, x) * &inner.coefficients,
            _ => {
                let mut row = vec![0.0; x.ncols()];
                DVector::from_iterator(
                    x.nrows(),
                    (0..x.nrows()).map(|i| {
                        for (j, v) in row.iter_mut().enumerate() {
                            *v = x[(i, j)];
                        }
                        self.predict_one(&row)
                    }),
                )
            }
        }
    }

    pub fn coefficients(&self) -> Option<&DVector<f64>> {
        match &self.model {
            Model::Linear(l) => Some(&l.coefficients),
            Model::Lasso(l) => Some(&l.coefficients),
            _ => None,
        }
    }

    /// Number of nonzero coefficients of a lasso-type fit.
    pub fn nonzero_count(&self) -> Option<usize> {
        match &self.model {
            Model::Lasso(l) => Some(l.nonzero()),
            _ => None,
        }
    }

    /// tr L_X(X) for predictors linear in y.
    pub fn fixed_x_trace(&self) -> Option<f64> {
        match &self.model {
            Model::Linear(l) | Model::RandomFeatures { inner: l, .. } => {
                l.smoother.as_ref().map(|s| s.trace())
            }
            Model::Knn(k) => {
                let own = (0..k.x.nrows())
                    .filter(|&i| {
                        let row: Vec<f64> = k.x.row(i).iter().cloned().collect();
                        k.neighbors(&row).contains(&i)
                    })
                    .count();
                Some(own as f64 / k.k as f64)
            }
            _ => None,
        }
    }

    pub fn lasso(&self) -> Option<&LassoFit> {
        match &self.model {
            Model::Lasso(l) => Some(l),
            _ => None,
        }
    }

    pub fn smoother_weights(&self) -> Result<SmootherWeights> {
        match &self.model {
            Model::Linear(l) => match &l.smoother {
                Some(s) => Ok(SmootherWeights::Linear(s.clone())),
                None => Err(Error::Unsupported(self.spec.label())),
            },
            Model::Knn(k) => Ok(SmootherWeights::Knn(k.clone())),
            _ => Err(Error::Unsupported(format!(
                "smoother weights of {}",
                self.spec.label()
            ))),
        }
    }
}

fn random_feature_row(map: &DMatrix<f64>, q: &[f64]) -> Vec<f64> {
    (0..map.nrows())
        .map(|k| {
            map.row(k)
                .iter()
                .zip(q.iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .tanh()
        })
        .collect()
}

fn random_features(map: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut z = x * map.transpose();
    z.apply(|v| *v = v.tanh());
    z
}

/// Linear-smoother weights: f(x) = L_X(x)^T y.
#[derive(Debug, Clone)]
pub enum SmootherWeights {
    Linear(LinearSmoother),
    Knn(KnnFit),
}

impl SmootherWeights {
    pub fn n(&self) -> usize {
        match self {
            SmootherWeights::Linear(s) => s.factor.n(),
            SmootherWeights::Knn(k) => k.x.nrows(),
        }
    }

    pub fn weights(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            SmootherWeights::Linear(s) => s.weights(x),
            SmootherWeights::Knn(k) => k.weights(x.as_slice()),
        }
    }

    /// The n x n matrix L_X(X).
    pub fn in_sample(&self) -> DMatrix<f64> {
        match self {
            SmootherWeights::Linear(s) => s.in_sample_matrix(),
            SmootherWeights::Knn(k) => {
                let n = k.x.nrows();
                let mut m = DMatrix::zeros(n, n);
                for i in 0..n {
                    let row: Vec<f64> = k.x.row(i).iter().cloned().collect();
                    for j in k.neighbors(&row) {
                        m[(i, j)] = 1.0 / k.k as f64;
                    }
                }
                m
            }
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            SmootherWeights::Linear(s) => s.trace(),
            SmootherWeights::Knn(_) => self.in_sample().trace(),
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        match self {
            SmootherWeights::Linear(s) => s.frobenius_sq(),
            SmootherWeights::Knn(_) => self.in_sample().norm_squared(),
        }
    }

    /// ||L_X(x0_i)||^2 for every row of x0.
    pub fn weight_norms_sq(&self, x0: &DMatrix<f64>) -> DVector<f64> {
        match self {
            SmootherWeights::Linear(s) => s.weight_norms_sq(x0),
            SmootherWeights::Knn(k) => DVector::from_element(x0.nrows(), 1.0 / k.k as f64),
        }
    }

    /// L_X(x0_i)^T v for every row of x0.
    pub fn apply(&self, x0: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
        match self {
            SmootherWeights::Linear(s) => {
                let b = s.factor.coefficients(&s.gains, v);
                x0 * b
            }
            SmootherWeights::Knn(k) => {
                let kk = KnnFit {
                    x: k.x.clone(),
                    y: v.clone(),
                    k: k.k,
                };
                DVector::from_iterator(
                    x0.nrows(),
                    (0..x0.nrows()).map(|i| {
                        let row: Vec<f64> = x0.row(i).iter().cloned().collect();
                        kk.predict_one(&row)
                    }),
                )
            }
        }
    }

    /// L_X(X) v.
    pub fn apply_in_sample(&self, v: &DVector<f64>) -> DVector<f64> {
        match self {
            SmootherWeights::Linear(s) => s.apply_in_sample(v),
            SmootherWeights::Knn(_) => self.in_sample() * v,
        }
    }
}

/// A training design with factorizations computed lazily and shared by every
/// fit on it (tuning grids, emergent and intrinsic responses, redraws of y).
pub struct PreparedDesign<'a> {
    x: &'a DMatrix<f64>,
    gram: OnceCell<Arc<GramFactor>>,
    rf: OnceCell<(u64, usize, Arc<DMatrix<f64>>, DMatrix<f64>, Arc<GramFactor>)>,
}

impl<'a> PreparedDesign<'a> {
    pub fn new(x: &'a DMatrix<f64>) -> Self {
        Self {
            x,
            gram: OnceCell::new(),
            rf: OnceCell::new(),
        }
    }

    pub fn x(&self) -> &DMatrix<f64> {
        self.x
    }

    pub fn factor(&self) -> Arc<GramFactor> {
        self.gram
            .get_or_init(|| Arc::new(GramFactor::new(self.x)))
            .clone()
    }

    fn linear(&self, spec: &PredictorSpec, lambda: f64, y: &DVector<f64>) -> FittedModel {
        let factor = self.factor();
        let gains = factor.gains(lambda);
        let coefficients = factor.coefficients(&gains, y);
        FittedModel {
            spec: spec.clone(),
            model: Model::Linear(LinearFit {
                coefficients,
                smoother: Some(LinearSmoother { factor, gains }),
            }),
        }
    }

    /// Fits `spec` to response `y`. `seed` drives forest randomization only.
    pub fn fit(&self, spec: &PredictorSpec, y: &DVector<f64>, seed: u64) -> Result<FittedModel> {
        spec.validate()?;
        let (n, p) = self.x.shape();
        if y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: y.len(),
            });
        }
        let wrap = |model| FittedModel {
            spec: spec.clone(),
            model,
        };
        Ok(match spec {
            PredictorSpec::Zero => wrap(Model::Zero),
            PredictorSpec::LeastSquares => {
                linear::check_least_squares(&self.factor())?;
                self.linear(spec, 0.0, y)
            }
            PredictorSpec::Ridge { lambda } => self.linear(spec, *lambda, y),
            PredictorSpec::Ridgeless => self.linear(spec, 0.0, y),
            PredictorSpec::Lasso { lambda } => wrap(Model::Lasso(lasso::fit_lasso(self.x, y, *lambda)?)),
            PredictorSpec::Lassoless => {
                let f = self.factor();
                if p <= n && f.rank() == p {
                    let fit = self.linear(spec, 0.0, y);
                    let coefficients = fit.coefficients().expect("linear").clone();
                    wrap(Model::Lasso(LassoFit {
                        coefficients,
                        lambda: 0.0,
                        sweeps: 0,
                        kkt_residual: 0.0,
                    }))
                } else {
                    wrap(Model::Lasso(lassoless_path(self.x, y)?))
                }
            }
            PredictorSpec::Knn { k } => {
                if *k > n {
                    return invalid(format!("k = {k} exceeds n = {n}"));
                }
                wrap(Model::Knn(KnnFit {
                    x: self.x.clone(),
                    y: y.clone(),
                    k: *k,
                }))
            }
            PredictorSpec::Tree { max_leaves } => wrap(Model::Tree(Tree::fit(self.x, y, *max_leaves, p, None))),
            PredictorSpec::Forest {
                n_trees,
                max_leaves,
                max_features,
            } => {
                let mtry = max_features.unwrap_or(p.div_ceil(3)).min(p);
                wrap(Model::Forest(Forest::fit(self.x, y, *n_trees, *max_leaves, mtry, seed)))
            }
            PredictorSpec::RandomFeaturesRidgeless { features, map_seed } => {
                let (_, _, map, _, factor) = self.rf.get_or_init(|| {
                    let map = Arc::new(random_feature_map(*features, p, *map_seed));
                    let z = random_features(&map, self.x);
                    let f = Arc::new(GramFactor::new(&z));
                    (*map_seed, *features, map, z, f)
                });
                let cached = self.rf.get().expect("initialized");
                if cached.0 != *map_seed || cached.1 != *features {
                    return Err(Error::InvalidArgument(
                        "one prepared design serves a single random-feature map".into(),
                    ));
                }
                let gains = factor.gains(0.0);
                let coefficients = factor.coefficients(&gains, y);
                wrap(Model::RandomFeatures {
                    map: map.clone(),
                    inner: LinearFit {
                        coefficients,
                        smoother: Some(LinearSmoother {
                            factor: factor.clone(),
                            gains,
                        }),
                    },
                })
            }
        })
    }
}

fn random_feature_map(features: usize, input: usize, seed: u64) -> DMatrix<f64> {
    let sd = (input as f64).powf(-0.25);
    let mut r = rng::stream(seed, 0, Role::Design, 2);
    DMatrix::from_fn(features, input, |_, _| sd * rng::normal(&mut r))
}

fn lassoless_path(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<LassoFit> {
    let fit = lasso::lasso_path_end(x, y, 1e-8, 80)?;
    let resid = (y - x * &fit.coefficients).norm_squared() / y.len() as f64;
    let mean = y.mean();
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / y.len() as f64;
    // A single sample has no spread; fall back to the raw second moment.
    let scale = if var > 0.0 { var } else { y.norm_squared() / y.len() as f64 };
    if resid > 1e-6 * scale {
        return Err(Error::NoConvergence {
            what: "lassoless path",
            iterations: fit.sweeps,
            residual: resid,
        });
    }
    Ok(fit)
}

pub fn fit(spec: &PredictorSpec, data: &Dataset, seed: u64) -> Result<FittedModel> {
    PreparedDesign::new(&data.features).fit(spec, &data.response, seed)
}

pub fn fit_least_squares(data: &Dataset) -> Result<FittedModel> {
    fit(&PredictorSpec::LeastSquares, data, 0)
}

pub fn fit_ridge(data: &Dataset, lambda: f64) -> Result<FittedModel> {
    fit(&PredictorSpec::Ridge { lambda }, data, 0)
}

pub fn fit_ridgeless(data: &Dataset) -> Result<FittedModel> {
    fit(&PredictorSpec::Ridgeless, data, 0)
}

pub fn fit_lasso(data: &Dataset, lambda: f64) -> Result<FittedModel> {
    fit(&PredictorSpec::Lasso { lambda }, data, 0)
}

pub fn fit_lassoless(data: &Dataset) -> Result<FittedModel> {
    fit(&PredictorSpec::Lassoless, data, 0)
}

pub fn fit_knn(data: &Dataset, k: usize) -> Result<FittedModel> {
    fit(&PredictorSpec::Knn { k }, data, 0)
}

pub fn fit_tree(data: &Dataset, max_leaves: usize) -> Result<FittedModel> {
    fit(&PredictorSpec::Tree { max_leaves }, data, 0)
}

pub fn fit_forest(data: &Dataset, n_trees: usize, max_leaves: usize, seed: u64) -> Result<FittedModel> {
    fit(
        &PredictorSpec::Forest {
            n_trees,
            max_leaves,
            max_features: None,
        },
        data,
        seed,
    )
}

pub fn smoother_weights(model: &FittedModel) -> Result<SmootherWeights> {
    model.smoother_weights()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ds(x: DMatrix<f64>, y: &[f64]) -> Dataset {
        Dataset::new(x, DVector::from_row_slice(y), "test", 0).unwrap()
    }

    fn random(n: usize, p: usize, seed: u64) -> Dataset {
        let mut r = rng::stream(seed, 0, Role::TrainX, 0);
        let x = DMatrix::from_fn(n, p, |_, _| rng::normal(&mut r));
        let y = DVector::from_fn(n, |_, _| rng::normal(&mut r));
        Dataset::new(x, y, "test", seed).unwrap()
    }

    #[test]
    fn least_squares_examples() {
        let m = fit_least_squares(&ds(DMatrix::identity(2, 2), &[1.0, 2.0])).unwrap();
        assert_abs_diff_eq!(m.coefficients().unwrap()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.coefficients().unwrap()[1], 2.0, epsilon = 1e-12);
        let m = fit_least_squares(&ds(DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]), &[2.0, 4.0, 6.0]))
            .unwrap();
        assert_abs_diff_eq!(m.coefficients().unwrap()[0], 2.0, epsilon = 1e-12);
        let d = random(30, 7, 1);
        let w = fit_least_squares(&d).unwrap().smoother_weights().unwrap();
        assert_abs_diff_eq!(w.trace(), 7.0, epsilon = 1e-10);
        let l = w.in_sample();
        assert_abs_diff_eq!((&l * &l - &l).amax(), 0.0, epsilon = 1e-10);
        assert!(fit_least_squares(&random(5, 8, 1)).is_err());
    }

    #[test]
    fn ridge_examples() {
        let d = random(30, 5, 2);
        let ls = fit_least_squares(&d).unwrap();
        let r0 = fit_ridge(&d, 1e-10).unwrap();
        assert_abs_diff_eq!(
            (ls.coefficients().unwrap() - r0.coefficients().unwrap()).amax(),
            0.0,
            epsilon = 1e-6
        );
        assert!(fit_ridge(&d, 1e12).unwrap().coefficients().unwrap().amax() < 1e-10);
        // X^T X / n = I
        let q = d.features.clone().qr().q() * (30f64).sqrt();
        let dq = Dataset::new(q, d.response.clone(), "q", 0).unwrap();
        let ols = fit_least_squares(&dq).unwrap();
        let half = fit_ridge(&dq, 1.0).unwrap();
        assert_abs_diff_eq!(
            (ols.coefficients().unwrap() * 0.5 - half.coefficients().unwrap()).amax(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn ridge_trace_matches_eigenvalues() {
        let d = random(5, 3, 3);
        let lambda = 0.7;
        let w = fit_ridge(&d, lambda).unwrap().smoother_weights().unwrap();
        let ev = (d.features.tr_mul(&d.features) / 5.0).symmetric_eigen().eigenvalues;
        let expect: f64 = ev.iter().map(|s| s / (s + lambda)).sum();
        assert_abs_diff_eq!(w.trace(), expect, epsilon = 1e-12);
    }

    #[test]
    fn ridgeless_examples() {
        let d = random(30, 5, 4);
        let a = fit_ridgeless(&d).unwrap();
        let b = fit_least_squares(&d).unwrap();
        assert_abs_diff_eq!(
            (a.coefficients().unwrap() - b.coefficients().unwrap()).amax(),
            0.0,
            epsilon = 1e-8
        );
        let wide = random(10, 25, 5);
        let m = fit_ridgeless(&wide).unwrap();
        assert!((m.predict(&wide.features) - &wide.response).amax() <= 1e-8);
        let w = m.smoother_weights().unwrap();
        assert_abs_diff_eq!((w.in_sample() - DMatrix::identity(10, 10)).amax(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn ridgeless_is_minimum_norm() {
        // x1 = (1,0,1), x2 = (0,1,1); y = (1,2). Min-norm solution X^T (X X^T)^{-1} y.
        let x = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let m = fit_ridgeless(&ds(x, &[1.0, 2.0])).unwrap();
        // X X^T = [[2,1],[1,2]], inverse = [[2,-1],[-1,2]]/3, times y = (0, 1); X^T (0,1) = (0,1,1)
        let b = m.coefficients().unwrap();
        assert_abs_diff_eq!(b[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lassoless_examples() {
        let d = random(30, 5, 6);
        let a = fit_lassoless(&d).unwrap();
        let b = fit_least_squares(&d).unwrap();
        assert_abs_diff_eq!(
            (a.coefficients().unwrap() - b.coefficients().unwrap()).amax(),
            0.0,
            epsilon = 1e-10
        );
        let wide = random(20, 50, 7);
        let m = fit_lassoless(&wide).unwrap();
        let mse = crate::data::mean_squared_error(&m.predict(&wide.features), &wide.response).unwrap();
        let var = wide.response.variance();
        assert!(mse <= 1e-6 * var);
    }

    #[test]
    fn lassoless_tiny_instance() {
        let x = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        let data = Dataset {
            features: x,
            response: DVector::from_row_slice(&[2.0]),
            generator_id: "tiny".into(),
            seed: 0,
        };
        let m = PreparedDesign::new(&data.features)
            .fit(&PredictorSpec::Lassoless, &data.response, 0)
            .unwrap();
        let b = m.coefficients().unwrap();
        assert_abs_diff_eq!(b[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b[1], 1.0, epsilon = 1e-7);
    }

    #[test]
    fn knn_examples() {
        let x = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 10.0]);
        let d = ds(x, &[0.0, 1.0, 10.0]);
        let m = fit_knn(&d, 2).unwrap();
        assert_abs_diff_eq!(m.predict_one(&[0.4]), 0.5, epsilon = 1e-15);
        let all = fit_knn(&d, 3).unwrap();
        assert_abs_diff_eq!(all.predict_one(&[-4.0]), 11.0 / 3.0, epsilon = 1e-15);
        let one = fit_knn(&d, 1).unwrap();
        assert_eq!(one.predict_one(&[10.0]), 10.0);
        let w = one.smoother_weights().unwrap();
        assert_eq!(w.in_sample(), DMatrix::identity(3, 3));
        let r = random(20, 3, 8);
        let w = fit_knn(&r, 4).unwrap().smoother_weights().unwrap();
        assert_abs_diff_eq!(w.trace(), 5.0, epsilon = 1e-12);
        let q = DVector::from_row_slice(&[0.1, 0.2, 0.3]);
        let wq = w.weights(&q);
        assert_abs_diff_eq!(wq.sum(), 1.0, epsilon = 1e-12);
        assert_eq!(wq.iter().filter(|v| **v == 0.25).count(), 4);
    }

    #[test]
    fn forest_with_all_features_equals_tree() {
        let d = random(40, 3, 9);
        let t = fit_tree(&d, 12).unwrap();
        let f = fit(
            &PredictorSpec::Forest {
                n_trees: 1,
                max_leaves: 12,
                max_features: Some(3),
            },
            &d,
            77,
        )
        .unwrap();
        assert_eq!(t.predict(&d.features), f.predict(&d.features));
    }

    #[test]
    fn smoother_weights_reproduce_refits() {
        let d = random(25, 6, 10);
        let y2 = DVector::from_fn(25, |i, _| (i as f64).sin());
        let x0 = random(7, 6, 11).features;
        for spec in [
            PredictorSpec::LeastSquares,
            PredictorSpec::Ridge { lambda: 0.3 },
            PredictorSpec::Ridgeless,
            PredictorSpec::Knn { k: 3 },
        ] {
            let prep = PreparedDesign::new(&d.features);
            let w = prep.fit(&spec, &d.response, 0).unwrap().smoother_weights().unwrap();
            let refit = prep.fit(&spec, &y2, 0).unwrap().predict(&x0);
            assert_abs_diff_eq!((w.apply(&x0, &y2) - &refit).amax(), 0.0, epsilon = 1e-8);
            for i in 0..7 {
                let xi = x0.row(i).transpose();
                assert_abs_diff_eq!(w.weights(&xi).dot(&y2), refit[i], epsilon = 1e-8);
            }
        }
        let lasso = fit_lasso(&d, 0.5).unwrap();
        assert!(lasso.smoother_weights().is_err());
    }

    #[test]
    fn spec_serde_round_trip() {
        let spec = PredictorSpec::Forest {
            n_trees: 3,
            max_leaves: 9,
            max_features: None,
        };
        let s = serde_json_like(&spec);
        assert!(s.contains("forest"));
    }

    fn serde_json_like(spec: &PredictorSpec) -> String {
        format!("{spec:?}").to_lowercase()
    }
}
