//! Data model, synthetic generators and error metrics.
//!
//! A [`Population`] holds everything that stays fixed across replications of an
//! experiment (signal vector, feature map, nested feature order). Draws from it
//! are keyed by replication so that training, test and pure-noise samples can be
//! regenerated independently.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decomposition::ShiftSpec;
use crate::error::{invalid, Error, Result};
use crate::rng::{self, Role};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: DMatrix<f64>,
    pub response: DVector<f64>,
    pub generator_id: String,
    pub seed: u64,
}

impl Dataset {
    pub fn new(
        features: DMatrix<f64>,
        response: DVector<f64>,
        generator_id: impl Into<String>,
        seed: u64,
    ) -> Result<Self> {
        if features.nrows() != response.len() {
            return Err(Error::LengthMismatch {
                expected: features.nrows(),
                got: response.len(),
            });
        }
        if features.nrows() < 2 {
            return invalid("a dataset needs at least two samples");
        }
        Ok(Self {
            features,
            response,
            generator_id: generator_id.into(),
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    NonlinearAr1,
    SparseLinear,
    LinearAr1,
    BernoulliSignal,
    RandomFeatures,
}

impl Variant {
    pub fn id(self) -> &'static str {
        match self {
            Variant::NonlinearAr1 => "nonlinear-ar1",
            Variant::SparseLinear => "sparse-linear",
            Variant::LinearAr1 => "linear-ar1",
            Variant::BernoulliSignal => "bernoulli-signal",
            Variant::RandomFeatures => "random-features",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseDistribution {
    #[default]
    Gaussian,
    RademacherScaled,
}

/// Law of the independent entries that the AR1 recurrence is driven by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureDistribution {
    #[default]
    Gaussian,
    Rademacher,
}

/// How the random-features scale parameter 1/sqrt(P) is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapScale {
    #[default]
    Variance,
    StdDev,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma2: f64,
    pub distribution: NoiseDistribution,
}

impl NoiseSpec {
    pub fn new(sigma2: f64, distribution: NoiseDistribution) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return invalid(format!("noise variance must be positive, got {sigma2}"));
        }
        Ok(Self {
            sigma2,
            distribution,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> DVector<f64> {
        let sd = self.sigma2.sqrt();
        match self.distribution {
            NoiseDistribution::Gaussian => DVector::from_fn(m, |_, _| sd * rng::normal(rng)),
            NoiseDistribution::RademacherScaled => {
                DVector::from_fn(m, |_, _| sd * rng::rademacher(rng))
            }
        }
    }
}

fn default_sigma() -> f64 {
    1.0
}

/// Synthetic data model.
///
/// Variant parameters not used by a variant are ignored. `latent` is the ambient
/// feature count P: for `nonlinear-ar1` it switches on the nested design (P
/// features drawn, the p with largest |beta_j| kept); for `random-features` it
/// is the input dimension of the tanh map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub variant: Variant,
    pub n: usize,
    pub p: usize,
    #[serde(default)]
    pub rho: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub latent: Option<usize>,
    #[serde(default)]
    pub noise: NoiseDistribution,
    #[serde(default)]
    pub features: FeatureDistribution,
    #[serde(default)]
    pub map_scale: MapScale,
}

impl GeneratorSpec {
    pub fn new(variant: Variant, n: usize, p: usize) -> Self {
        Self {
            variant,
            n,
            p,
            rho: 0.0,
            sigma: 1.0,
            s: None,
            alpha: None,
            delta: None,
            latent: None,
            noise: NoiseDistribution::Gaussian,
            features: FeatureDistribution::Gaussian,
            map_scale: MapScale::Variance,
        }
    }

    /// Nonlinear AR1 model with the default correlation 0.25 and noise sd 0.4.
    pub fn nonlinear_ar1(n: usize, p: usize) -> Self {
        Self {
            rho: 0.25,
            sigma: 0.4,
            ..Self::new(Variant::NonlinearAr1, n, p)
        }
    }

    pub fn sparse_linear(n: usize, p: usize, s: usize) -> Self {
        Self {
            s: Some(s),
            ..Self::new(Variant::SparseLinear, n, p)
        }
    }

    pub fn linear_ar1(n: usize, p: usize, rho: f64, sigma: f64) -> Self {
        Self {
            rho,
            sigma,
            ..Self::new(Variant::LinearAr1, n, p)
        }
    }

    pub fn bernoulli_signal(n: usize, p: usize, delta: f64) -> Self {
        Self {
            delta: Some(delta),
            ..Self::new(Variant::BernoulliSignal, n, p)
        }
    }

    pub fn random_features(n: usize, p: usize, latent: usize) -> Self {
        Self {
            rho: 0.25,
            sigma: 0.4,
            latent: Some(latent),
            ..Self::new(Variant::RandomFeatures, n, p)
        }
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_latent(mut self, latent: usize) -> Self {
        self.latent = Some(latent);
        self
    }

    pub fn with_features(mut self, features: FeatureDistribution) -> Self {
        self.features = features;
        self
    }

    pub fn with_noise(mut self, noise: NoiseDistribution) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_p(mut self, p: usize) -> Self {
        self.p = p;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn noise_spec(&self) -> Result<NoiseSpec> {
        NoiseSpec::new(self.sigma2(), self.noise)
    }

    /// Dimension of the vector the regression function is defined on.
    pub fn latent_dim(&self) -> usize {
        match self.variant {
            Variant::NonlinearAr1 | Variant::RandomFeatures => self.latent.unwrap_or(self.p),
            _ => self.p,
        }
    }

    /// Amplitude of the sparse-linear coefficients; sigma/sqrt(s) unless set.
    pub fn sparse_alpha(&self) -> Option<f64> {
        let s = self.s?;
        Some(self.alpha.unwrap_or(self.sigma / (s as f64).sqrt()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return invalid("n must be at least 2");
        }
        if self.p < 1 {
            return invalid("p must be at least 1");
        }
        if !(0.0..1.0).contains(&self.rho) {
            return invalid(format!("rho must lie in [0,1), got {}", self.rho));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return invalid(format!("sigma must be positive, got {}", self.sigma));
        }
        match self.variant {
            Variant::SparseLinear => match self.s {
                None | Some(0) => return invalid("sparse-linear needs s >= 1"),
                Some(s) if s > self.p => return invalid(format!("s = {s} exceeds p = {}", self.p)),
                _ => {}
            },
            Variant::BernoulliSignal => match self.delta {
                Some(d) if d > 0.0 && d <= 1.0 => {}
                other => return invalid(format!("delta must lie in (0,1], got {other:?}")),
            },
            Variant::RandomFeatures => match self.latent {
                Some(l) if l >= 1 => {}
                _ => return invalid("random-features needs latent >= 1"),
            },
            Variant::NonlinearAr1 => {
                if let Some(l) = self.latent {
                    if l < self.p {
                        return invalid(format!("latent = {l} is smaller than p = {}", self.p));
                    }
                }
            }
            Variant::LinearAr1 => {}
        }
        if let Some(a) = self.alpha {
            if !a.is_finite() {
                return invalid("alpha must be finite");
            }
        }
        Ok(())
    }
}

/// Covariance with entries rho^|i-j|.
pub fn ar1_covariance(p: usize, rho: f64) -> Result<DMatrix<f64>> {
    if !(0.0..1.0).contains(&rho) {
        return invalid(format!("rho must lie in [0,1), got {rho}"));
    }
    Ok(DMatrix::from_fn(p, p, |i, j| {
        rho.powi((i as i64 - j as i64).unsigned_abs() as i32)
    }))
}

/// Uniform draw from the unit sphere in R^p.
pub fn sample_unit_sphere(p: usize, seed: u64) -> Result<DVector<f64>> {
    let mut r = rng::stream(seed, 0, Role::Design, 0);
    unit_sphere_from(p, &mut r)
}

fn unit_sphere_from<R: Rng + ?Sized>(p: usize, r: &mut R) -> Result<DVector<f64>> {
    if p == 0 {
        return invalid("p must be at least 1");
    }
    loop {
        let v = DVector::from_fn(p, |_, _| rng::normal(r));
        let norm = v.norm();
        if norm > 1e-300 {
            return Ok(v / norm);
        }
    }
}

pub fn mean_squared_error(pred: &DVector<f64>, truth: &DVector<f64>) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    if pred.is_empty() {
        return invalid("empty vectors");
    }
    Ok(pred
        .iter()
        .zip(truth.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / pred.len() as f64)
}

/// Features and noiseless regression values for a batch of samples.
#[derive(Debug, Clone)]
pub struct Draw {
    pub x: DMatrix<f64>,
    pub f: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct Population {
    spec: GeneratorSpec,
    seed: u64,
    beta: DVector<f64>,
    selected: Option<Vec<usize>>,
    map: Option<DMatrix<f64>>,
}

impl Population {
    pub fn new(spec: &GeneratorSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let d = spec.latent_dim();
        let mut design = rng::stream(seed, 0, Role::Design, 0);
        let beta = match spec.variant {
            Variant::NonlinearAr1 | Variant::RandomFeatures => unit_sphere_from(d, &mut design)?,
            Variant::LinearAr1 => unit_sphere_from(d, &mut design)? * spec.alpha.unwrap_or(1.0),
            Variant::SparseLinear => {
                let s = spec.s.unwrap_or(0);
                let a = spec.sparse_alpha().unwrap_or(0.0);
                DVector::from_fn(d, |j, _| if j < s { a } else { 0.0 })
            }
            Variant::BernoulliSignal => {
                let delta = spec.delta.unwrap_or(1.0);
                let amp = spec
                    .alpha
                    .unwrap_or_else(|| (spec.n as f64 / (delta * spec.p as f64)).sqrt());
                DVector::from_fn(d, |_, _| {
                    if design.random::<f64>() < delta {
                        amp
                    } else {
                        0.0
                    }
                })
            }
        };
        let selected = match (spec.variant, spec.latent) {
            (Variant::NonlinearAr1, Some(_)) => {
                let mut order: Vec<usize> = (0..d).collect();
                order.sort_by(|&a, &b| beta[b].abs().total_cmp(&beta[a].abs()).then(a.cmp(&b)));
                order.truncate(spec.p);
                Some(order)
            }
            _ => None,
        };
        let map = if spec.variant == Variant::RandomFeatures {
            let sd = match spec.map_scale {
                MapScale::Variance => (d as f64).powf(-0.25),
                MapScale::StdDev => (d as f64).powf(-0.5),
            };
            let mut r = rng::stream(seed, 0, Role::Design, 1);
            Some(DMatrix::from_fn(spec.p, d, |_, _| sd * rng::normal(&mut r)))
        } else {
            None
        };
        Ok(Self {
            spec: spec.clone(),
            seed,
            beta,
            selected,
            map,
        })
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn p(&self) -> usize {
        self.spec.p
    }

    /// Linear coefficients on the latent features.
    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    pub fn sigma2(&self) -> f64 {
        self.spec.sigma2()
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec {
            sigma2: self.spec.sigma2(),
            distribution: self.spec.noise,
        }
    }

    /// Indices of the latent features kept by the nested design.
    pub fn selected_features(&self) -> Option<&[usize]> {
        self.selected.as_deref()
    }

    pub fn feature_map(&self) -> Option<&DMatrix<f64>> {
        self.map.as_ref()
    }

    /// Covariance of the latent features.
    pub fn latent_covariance(&self) -> DMatrix<f64> {
        let d = self.spec.latent_dim();
        match self.spec.variant {
            Variant::BernoulliSignal => DMatrix::identity(d, d) / self.spec.n as f64,
            Variant::SparseLinear => DMatrix::identity(d, d),
            _ => ar1_covariance(d, self.spec.rho).expect("validated rho"),
        }
    }

    /// Variance of the nonlinear part of f when the model features are the
    /// latent features: 2 tr(Sigma^2) / d^2 for the nonlinear AR1 model, 0 for
    /// the linear ones.
    pub fn sigma2_nl(&self) -> f64 {
        match self.spec.variant {
            Variant::NonlinearAr1 | Variant::RandomFeatures => {
                let d = self.spec.latent_dim();
                let s = self.latent_covariance();
                2.0 * s.iter().map(|v| v * v).sum::<f64>() / (d * d) as f64
            }
            _ => 0.0,
        }
    }

    /// True when the model features coincide with the latent features.
    pub fn features_are_latent(&self) -> bool {
        self.selected.is_none() && self.map.is_none()
    }

    fn latent_scale(&self) -> f64 {
        match self.spec.variant {
            Variant::BernoulliSignal => 1.0 / (self.spec.n as f64).sqrt(),
            _ => 1.0,
        }
    }

    fn sample_latent<R: Rng + ?Sized>(&self, m: usize, r: &mut R) -> DMatrix<f64> {
        let d = self.spec.latent_dim();
        let rho = match self.spec.variant {
            Variant::BernoulliSignal | Variant::SparseLinear => 0.0,
            _ => self.spec.rho,
        };
        let c = (1.0 - rho * rho).sqrt();
        let scale = self.latent_scale();
        let mut x = DMatrix::zeros(m, d);
        let mut z = vec![0.0; d];
        for i in 0..m {
            match self.spec.features {
                FeatureDistribution::Gaussian => rng::fill_normal(r, &mut z),
                FeatureDistribution::Rademacher => {
                    for v in z.iter_mut() {
                        *v = rng::rademacher(r);
                    }
                }
            }
            let mut prev = 0.0;
            for (j, zj) in z.iter().enumerate() {
                let v = if j == 0 { *zj } else { rho * prev + c * zj };
                prev = v;
                x[(i, j)] = scale * v;
            }
        }
        x
    }

    fn regression(&self, latent: &DMatrix<f64>) -> DVector<f64> {
        let mut f = latent * &self.beta;
        if matches!(
            self.spec.variant,
            Variant::NonlinearAr1 | Variant::RandomFeatures
        ) {
            let d = latent.ncols() as f64;
            for (i, fi) in f.iter_mut().enumerate() {
                let sq: f64 = latent.row(i).iter().map(|v| v * v).sum();
                *fi += sq / d - 1.0;
            }
        }
        f
    }

    fn to_features(&self, latent: DMatrix<f64>) -> DMatrix<f64> {
        if let Some(sel) = &self.selected {
            latent.select_columns(sel.iter())
        } else if let Some(map) = &self.map {
            let mut z = latent * map.transpose();
            z.apply(|v| *v = v.tanh());
            z
        } else {
            latent
        }
    }

    /// Draws m samples; a shift, when given, is applied to the latent features
    /// before both the regression function and the feature map.
    pub fn draw<R: Rng + ?Sized>(&self, m: usize, r: &mut R, shift: Option<&ShiftSpec>) -> Draw {
        let mut latent = self.sample_latent(m, r);
        if let Some(s) = shift {
            s.apply(&mut latent);
        }
        let f = self.regression(&latent);
        Draw {
            x: self.to_features(latent),
            f,
        }
    }

    pub fn noise<R: Rng + ?Sized>(&self, m: usize, r: &mut R) -> DVector<f64> {
        self.noise_spec().sample(m, r)
    }

    /// Regression function evaluated at the given latent points.
    pub fn regression_at(&self, latent: &DMatrix<f64>) -> DVector<f64> {
        self.regression(latent)
    }
}

/// Dataset reproducible from (spec, seed): replication 0 of the training streams.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Dataset> {
    let pop = Population::new(spec, seed)?;
    let draw = pop.draw(spec.n, &mut rng::stream(seed, 0, Role::TrainX, 0), None);
    let eps = pop.noise(spec.n, &mut rng::stream(seed, 0, Role::TrainNoise, 0));
    Dataset::new(draw.x, draw.f + eps, spec.variant.id(), seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ar1_examples() {
        assert_eq!(ar1_covariance(2, 0.0).unwrap(), DMatrix::identity(2, 2));
        let s = ar1_covariance(3, 0.25).unwrap();
        assert_eq!(s[(0, 1)], 0.25);
        assert_eq!(s[(2, 1)], 0.25);
        assert_eq!(s[(0, 2)], 0.0625);
        let e = ar1_covariance(4, 0.5).unwrap().symmetric_eigen();
        assert!(e.eigenvalues.min() > 0.0);
        assert!(ar1_covariance(3, 1.0).is_err());
        assert!(ar1_covariance(3, -0.1).is_err());
    }

    #[test]
    fn ar1_recurrence_matches_cholesky_factor() {
        let spec = GeneratorSpec::linear_ar1(10, 6, 0.6, 1.0);
        let pop = Population::new(&spec, 3).unwrap();
        let x = pop.sample_latent(4, &mut rng::stream(1, 2, Role::TrainX, 0));
        let mut r = rng::stream(1, 2, Role::TrainX, 0);
        let l = ar1_covariance(6, 0.6).unwrap().cholesky().unwrap().l();
        for i in 0..4 {
            let mut z = vec![0.0; 6];
            rng::fill_normal(&mut r, &mut z);
            let expect = &l * DVector::from_vec(z);
            for j in 0..6 {
                assert_abs_diff_eq!(x[(i, j)], expect[j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sphere_examples() {
        let v = sample_unit_sphere(1, 9).unwrap();
        assert!(v[0] == 1.0 || v[0] == -1.0);
        let a = sample_unit_sphere(50, 1).unwrap();
        let b = sample_unit_sphere(50, 2).unwrap();
        assert_abs_diff_eq!(a.norm(), 1.0, epsilon = 1e-12);
        assert_ne!(a, b);
    }

    #[test]
    fn sparse_alpha_matches_snr_one() {
        let spec = GeneratorSpec::sparse_linear(200, 30, 10);
        assert_abs_diff_eq!(spec.sparse_alpha().unwrap(), 0.316227766016838, epsilon = 1e-12);
        let pop = Population::new(&spec, 0).unwrap();
        assert_abs_diff_eq!(pop.beta().norm_squared(), 1.0, epsilon = 1e-12);
        let bad = GeneratorSpec {
            s: Some(0),
            ..spec.clone()
        };
        assert!(generate(&bad, 0).is_err());
    }

    #[test]
    fn linearized_snr_of_nonlinear_model() {
        let mut acc = 0.0;
        for seed in 0..20 {
            let spec = GeneratorSpec::nonlinear_ar1(100, 300);
            let pop = Population::new(&spec, seed).unwrap();
            let b = pop.beta();
            let s = pop.latent_covariance();
            acc += (b.transpose() * &s * b)[(0, 0)] / spec.sigma2();
        }
        assert!((acc / 20.0 - 6.25).abs() < 0.2, "{}", acc / 20.0);
    }

    #[test]
    fn generators_are_deterministic() {
        let specs = [
            GeneratorSpec::nonlinear_ar1(20, 5),
            GeneratorSpec::nonlinear_ar1(20, 5).with_latent(12),
            GeneratorSpec::sparse_linear(20, 8, 3),
            GeneratorSpec::linear_ar1(20, 5, 0.3, 0.5),
            GeneratorSpec::bernoulli_signal(20, 40, 0.2),
            GeneratorSpec::random_features(20, 7, 9),
        ];
        for s in specs {
            let a = generate(&s, 11).unwrap();
            let b = generate(&s, 11).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.p(), s.p);
            let c = generate(&s, 12).unwrap();
            assert_ne!(a.response, c.response);
        }
    }

    #[test]
    fn nonlinear_term_is_centered() {
        let spec = GeneratorSpec::nonlinear_ar1(10, 20);
        let pop = Population::new(&spec, 5).unwrap();
        let lat = pop.sample_latent(100_000, &mut rng::stream(5, 0, Role::Test, 0));
        let vals: Vec<f64> = (0..lat.nrows())
            .map(|i| lat.row(i).iter().map(|v| v * v).sum::<f64>() / 20.0 - 1.0)
            .collect();
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        let sd = (vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (vals.len() - 1) as f64)
            .sqrt();
        assert!(m.abs() < 3.0 * sd / (vals.len() as f64).sqrt());
        let var_expected = pop.sigma2_nl();
        assert!((sd * sd - var_expected).abs() < 0.05 * var_expected);
    }

    #[test]
    fn bernoulli_second_moment() {
        let (n, p, delta) = (50usize, 400usize, 0.25);
        let mut acc = 0.0;
        let reps = 50;
        for seed in 0..reps {
            let pop = Population::new(&GeneratorSpec::bernoulli_signal(n, p, delta), seed).unwrap();
            acc += pop.beta().norm_squared() / p as f64;
        }
        let m = acc / reps as f64;
        assert!((m - n as f64 / p as f64).abs() < 0.03 * n as f64 / p as f64, "{m}");
    }

    #[test]
    fn nested_design_keeps_largest_coefficients() {
        let spec = GeneratorSpec::nonlinear_ar1(10, 4).with_latent(30);
        let pop = Population::new(&spec, 2).unwrap();
        let sel = pop.selected_features().unwrap();
        let kept_min = sel.iter().map(|&j| pop.beta()[j].abs()).fold(f64::MAX, f64::min);
        let dropped_max = (0..30)
            .filter(|j| !sel.contains(j))
            .map(|j| pop.beta()[j].abs())
            .fold(0.0, f64::max);
        assert!(kept_min >= dropped_max);
    }

    #[test]
    fn mse_examples() {
        let v = |a: &[f64]| DVector::from_row_slice(a);
        assert_eq!(mean_squared_error(&v(&[1.0, 2.0]), &v(&[1.0, 2.0])).unwrap(), 0.0);
        assert_eq!(mean_squared_error(&v(&[0.0, 0.0]), &v(&[1.0, -1.0])).unwrap(), 1.0);
        assert_eq!(mean_squared_error(&v(&[3.0]), &v(&[1.0])).unwrap(), 4.0);
        assert!(mean_squared_error(&v(&[3.0]), &v(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn dataset_invariants() {
        assert!(Dataset::new(DMatrix::zeros(3, 2), DVector::zeros(2), "x", 0).is_err());
        assert!(Dataset::new(DMatrix::zeros(1, 2), DVector::zeros(1), "x", 0).is_err());
    }

    #[test]
    fn noise_spec_rejects_nonpositive_variance() {
        assert!(NoiseSpec::new(0.0, NoiseDistribution::Gaussian).is_err());
        let ns = NoiseSpec::new(4.0, NoiseDistribution::RademacherScaled).unwrap();
        let v = ns.sample(10, &mut rng::stream(0, 0, Role::Test, 0));
        assert!(v.iter().all(|x| x.abs() == 2.0));
    }
}
