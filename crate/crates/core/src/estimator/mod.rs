//! Monte Carlo optimism, degrees-of-freedom reports and closed-form smoother
//! quantities.
//!
//! Replication r draws its training features from stream (seed, r, TrainX),
//! its noise from (seed, r, TrainNoise), its test set from (seed, r, Test) and
//! pure-noise responses from (seed, r, PureNoise). Emergent and intrinsic runs
//! therefore see the same feature draws.

mod cv;
mod smoother;

use nalgebra::DVector;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::data::{GeneratorSpec, NoiseDistribution, NoiseSpec, Population};
use crate::decomposition::ShiftSpec;
use crate::error::{invalid, Error, Result};
use crate::omega::{df_from_optimism, df_standard_error, reference_slope};
use crate::par;
use crate::predictors::{FittedModel, PredictorSpec, PreparedDesign};
use crate::rng::{self, Role};

pub use cv::cv_optimism;
pub use smoother::{
    excess_bias_variance, linear_smoother_optimism, luan_predictive_df, ExcessBiasVariance,
    SmootherOptimism,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Sigma2Source {
    Known(f64),
    /// The generator's own noise variance.
    #[default]
    Generator,
    /// Smallest estimated test error over a grid; an empty grid means the
    /// predictors under study.
    Proxy {
        #[serde(default)]
        grid: Vec<PredictorSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub n_reps: usize,
    #[serde(default = "default_test_size")]
    pub test_size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sigma2_source: Sigma2Source,
    #[serde(default)]
    pub cv_folds: Option<usize>,
    /// Feature draws for Monte Carlo fixed-X df.
    #[serde(default = "default_outer")]
    pub fixed_x_outer: usize,
    /// Response redraws per feature draw for Monte Carlo fixed-X df.
    #[serde(default = "default_inner")]
    pub fixed_x_inner: usize,
    #[serde(default = "default_failure_fraction")]
    pub max_failure_fraction: f64,
}

fn default_test_size() -> usize {
    1000
}
fn default_outer() -> usize {
    20
}
fn default_inner() -> usize {
    100
}
fn default_failure_fraction() -> f64 {
    0.1
}

impl EstimatorConfig {
    pub fn new(n_reps: usize, seed: u64) -> Self {
        Self {
            n_reps,
            test_size: default_test_size(),
            seed,
            sigma2_source: Sigma2Source::Generator,
            cv_folds: None,
            fixed_x_outer: default_outer(),
            fixed_x_inner: default_inner(),
            max_failure_fraction: default_failure_fraction(),
        }
    }

    pub fn with_test_size(mut self, m: usize) -> Self {
        self.test_size = m;
        self
    }

    pub fn with_sigma2(mut self, source: Sigma2Source) -> Self {
        self.sigma2_source = source;
        self
    }

    pub fn with_fixed_x(mut self, outer: usize, inner: usize) -> Self {
        self.fixed_x_outer = outer;
        self.fixed_x_inner = inner;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_reps < 2 {
            return invalid("n_reps must be at least 2");
        }
        if self.test_size < 1 {
            return invalid("test_size must be at least 1");
        }
        if self.fixed_x_outer < 2 || self.fixed_x_inner < 2 {
            return invalid("fixed-X replication counts must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.max_failure_fraction) {
            return invalid("max_failure_fraction must lie in [0, 1]");
        }
        if let Sigma2Source::Known(s) = self.sigma2_source {
            if !(s > 0.0 && s.is_finite()) {
                return invalid("known sigma2 must be positive");
            }
        }
        if let Some(k) = self.cv_folds {
            if k < 2 {
                return invalid("cv_folds must be at least 2");
            }
        }
        Ok(())
    }
}

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn from_samples(v: &[f64]) -> Self {
        let (m, s) = mean_se(v);
        Self { value: m, se: s }
    }
}

pub(crate) fn mean_se(v: &[f64]) -> (f64, f64) {
    let k = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = v.iter().sum::<f64>() / k;
    if v.len() < 2 {
        return (m, f64::NAN);
    }
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (k - 1.0);
    (m, (var / k).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimismEstimate {
    pub err_r: f64,
    pub err_t: f64,
    /// Always exactly err_r - err_t.
    pub optimism: f64,
    pub se: f64,
    pub n_reps: usize,
    pub n_failed: usize,
}

impl OptimismEstimate {
    fn from_records(records: &[RepRecord], failed: usize) -> Self {
        let k = records.len() as f64;
        let err_r = records.iter().map(|r| r.err_r).sum::<f64>() / k;
        let err_t = records.iter().map(|r| r.err_t).sum::<f64>() / k;
        let diffs: Vec<f64> = records.iter().map(|r| r.err_r - r.err_t).collect();
        let (_, se) = mean_se(&diffs);
        Self {
            err_r,
            err_t,
            optimism: err_r - err_t,
            se,
            n_reps: records.len(),
            n_failed: failed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DofUncertainty {
    pub df_fixed: f64,
    pub df_emergent: f64,
    pub df_intrinsic: f64,
    pub df_bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DofReport {
    pub df_fixed: f64,
    pub df_emergent: f64,
    pub df_intrinsic: f64,
    /// Always exactly df_emergent - df_intrinsic.
    pub df_bias: f64,
    pub sigma2_used: f64,
    pub uncertainty: DofUncertainty,
    pub emergent: OptimismEstimate,
    pub intrinsic: OptimismEstimate,
}

/// Training and test error of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepRecord {
    pub rep: usize,
    pub err_t: f64,
    pub err_r: f64,
}

/// Which response a pass trains and tests on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Response {
    /// f(x) plus generator noise.
    Signal,
    /// N(0, sigma2) independent of the features.
    PureNoise(f64),
}

/// Per-predictor outcome of one pass over all replications.
#[derive(Debug, Clone)]
pub struct PassResult {
    pub spec: PredictorSpec,
    pub records: Vec<RepRecord>,
    pub failed: usize,
    /// Per-replication fixed-X df when it is available in closed form
    /// (smoother trace, lasso support size).
    pub fixed_df: Vec<f64>,
    pub estimate: OptimismEstimate,
}

/// Seed handed to forest fits of replication `rep`.
pub(crate) fn forest_seed(seed: u64, rep: usize) -> u64 {
    rng::stream(seed, rep as u64, Role::Forest, u64::MAX).next_u64()
}

fn mse(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

fn closed_form_df(model: &FittedModel) -> Option<f64> {
    if let Some(k) = model.nonzero_count() {
        return Some(k as f64);
    }
    if matches!(model.spec, PredictorSpec::Zero) {
        return Some(0.0);
    }
    model.fixed_x_trace()
}

/// Runs every predictor on every replication and aggregates per predictor.
/// `shift` alters test features only.
pub fn run_pass(
    pop: &Population,
    specs: &[PredictorSpec],
    cfg: &EstimatorConfig,
    response: Response,
    shift: Option<&ShiftSpec>,
) -> Result<Vec<PassResult>> {
    cfg.validate()?;
    for s in specs {
        s.validate()?;
    }
    if let Some(s) = shift {
        s.validate()?;
    }
    let n = pop.n();
    let m = cfg.test_size;
    let pure = match response {
        Response::PureNoise(s2) => {
            if !(s2 > 0.0 && s2.is_finite()) {
                return invalid("pure-noise variance must be positive");
            }
            Some(NoiseSpec::new(s2, NoiseDistribution::Gaussian)?)
        }
        Response::Signal => None,
    };
    let per_rep = par::map_indexed(cfg.n_reps, |r| {
        let seed = cfg.seed;
        let rep = r as u64;
        let train = pop.draw(n, &mut rng::stream(seed, rep, Role::TrainX, 0), None);
        let test = pop.draw(m, &mut rng::stream(seed, rep, Role::Test, 0), shift);
        let (y, y0) = match &pure {
            None => (
                &train.f + pop.noise(n, &mut rng::stream(seed, rep, Role::TrainNoise, 0)),
                &test.f + pop.noise(m, &mut rng::stream(seed, rep, Role::Test, 1)),
            ),
            Some(ns) => (
                ns.sample(n, &mut rng::stream(seed, rep, Role::PureNoise, 0)),
                ns.sample(m, &mut rng::stream(seed, rep, Role::PureNoise, 1)),
            ),
        };
        let prep = PreparedDesign::new(&train.x);
        let fseed = forest_seed(seed, r);
        specs
            .iter()
            .map(|spec| {
                prep.fit(spec, &y, fseed).map(|model| {
                    let rec = RepRecord {
                        rep: r,
                        err_t: mse(&model.predict(&train.x), &y),
                        err_r: mse(&model.predict(&test.x), &y0),
                    };
                    (rec, closed_form_df(&model))
                })
            })
            .collect::<Vec<_>>()
    });
    let mut out = Vec::with_capacity(specs.len());
    for (k, spec) in specs.iter().enumerate() {
        let mut records = Vec::new();
        let mut fixed_df = Vec::new();
        let mut failed = 0;
        let mut last_err = None;
        for rep in &per_rep {
            match &rep[k] {
                Ok((rec, df)) => {
                    if rec.err_r.is_finite() && rec.err_t.is_finite() {
                        records.push(*rec);
                        if let Some(d) = df {
                            fixed_df.push(*d);
                        }
                    } else {
                        failed += 1;
                    }
                }
                Err(e) => {
                    failed += 1;
                    last_err = Some(e.to_string());
                }
            }
        }
        if failed as f64 > cfg.max_failure_fraction * cfg.n_reps as f64 || records.len() < 2 {
            if let (Some(e), true) = (&last_err, records.is_empty()) {
                return Err(Error::InvalidArgument(format!("{}: {e}", spec.label())));
            }
            return Err(Error::TooManyFailures {
                failed,
                total: cfg.n_reps,
            });
        }
        let estimate = OptimismEstimate::from_records(&records, failed);
        out.push(PassResult {
            spec: spec.clone(),
            records,
            failed,
            fixed_df,
            estimate,
        });
    }
    Ok(out)
}

fn population(gen: &GeneratorSpec, cfg: &EstimatorConfig) -> Result<Population> {
    cfg.validate()?;
    Population::new(gen, cfg.seed)
}

pub fn estimate_random_x_optimism(
    gen: &GeneratorSpec,
    pred: &PredictorSpec,
    cfg: &EstimatorConfig,
) -> Result<OptimismEstimate> {
    let pop = population(gen, cfg)?;
    let mut r = run_pass(&pop, std::slice::from_ref(pred), cfg, Response::Signal, None)?;
    Ok(r.remove(0).estimate)
}

/// sigma^2 for the intrinsic pass. Proxy estimates reuse `emergent` when the
/// grid is the list of predictors under study.
pub fn resolve_sigma2(
    pop: &Population,
    specs: &[PredictorSpec],
    cfg: &EstimatorConfig,
    emergent: Option<&[PassResult]>,
) -> Result<f64> {
    match &cfg.sigma2_source {
        Sigma2Source::Known(s) => Ok(*s),
        Sigma2Source::Generator => Ok(pop.sigma2()),
        Sigma2Source::Proxy { grid } => {
            if grid.is_empty() {
                match emergent {
                    Some(e) => Ok(min_err_r(e)),
                    None => sigma2_proxy(pop, specs, cfg),
                }
            } else {
                sigma2_proxy(pop, grid, cfg)
            }
        }
    }
}

fn min_err_r(results: &[PassResult]) -> f64 {
    results
        .iter()
        .map(|r| r.estimate.err_r)
        .fold(f64::INFINITY, f64::min)
}

fn sigma2_proxy(pop: &Population, grid: &[PredictorSpec], cfg: &EstimatorConfig) -> Result<f64> {
    if grid.is_empty() {
        return invalid("sigma2 proxy grid is empty");
    }
    Ok(min_err_r(&run_pass(pop, grid, cfg, Response::Signal, None)?))
}

pub fn estimate_intrinsic_optimism(
    gen: &GeneratorSpec,
    pred: &PredictorSpec,
    cfg: &EstimatorConfig,
) -> Result<OptimismEstimate> {
    let pop = population(gen, cfg)?;
    let specs = std::slice::from_ref(pred);
    let s2 = resolve_sigma2(&pop, specs, cfg, None)?;
    let mut r = run_pass(&pop, specs, cfg, Response::PureNoise(s2), None)?;
    Ok(r.remove(0).estimate)
}

/// Smallest estimated random-X prediction error over the grid.
pub fn estimate_sigma2_proxy(
    gen: &GeneratorSpec,
    pred_grid: &[PredictorSpec],
    cfg: &EstimatorConfig,
) -> Result<f64> {
    let pop = population(gen, cfg)?;
    sigma2_proxy(&pop, pred_grid, cfg)
}

/// Monte Carlo fixed-X df: features fixed per outer draw, responses redrawn,
/// sum of covariances between responses and fitted values over sigma^2.
pub fn fixed_x_df_monte_carlo(
    pop: &Population,
    pred: &PredictorSpec,
    cfg: &EstimatorConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    pred.validate()?;
    let n = pop.n();
    let s2 = pop.sigma2();
    let inner = cfg.fixed_x_inner;
    let outer = par::map_indexed(cfg.fixed_x_outer, |o| -> Result<f64> {
        let seed = cfg.seed;
        let train = pop.draw(n, &mut rng::stream(seed, o as u64, Role::TrainX, 0), None);
        let prep = PreparedDesign::new(&train.x);
        let fseed = forest_seed(seed, o);
        let mut eps = Vec::with_capacity(inner);
        let mut fits = Vec::with_capacity(inner);
        for i in 0..inner {
            let e = pop.noise(n, &mut rng::stream(seed, o as u64, Role::TrainNoise, i as u64 + 1));
            let y = &train.f + &e;
            let model = prep.fit(pred, &y, fseed)?;
            fits.push(model.predict(&train.x));
            eps.push(e);
        }
        let k = inner as f64;
        let mut total = 0.0;
        for j in 0..n {
            let me = eps.iter().map(|e| e[j]).sum::<f64>() / k;
            let mf = fits.iter().map(|f| f[j]).sum::<f64>() / k;
            let c: f64 = eps
                .iter()
                .zip(fits.iter())
                .map(|(e, f)| (e[j] - me) * (f[j] - mf))
                .sum();
            total += c / (k - 1.0);
        }
        Ok(total / s2)
    });
    let vals = outer.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&vals))
}

/// Fixed-X df: smoother trace or lasso support size averaged over the
/// replications' feature draws, Monte Carlo otherwise.
pub fn fixed_x_df(gen: &GeneratorSpec, pred: &PredictorSpec, cfg: &EstimatorConfig) -> Result<f64> {
    let pop = population(gen, cfg)?;
    Ok(fixed_x_df_estimate(&pop, pred, cfg)?.value)
}

pub fn fixed_x_df_estimate(
    pop: &Population,
    pred: &PredictorSpec,
    cfg: &EstimatorConfig,
) -> Result<Estimate> {
    if has_closed_form_df(pred) {
        let r = run_pass(pop, std::slice::from_ref(pred), cfg, Response::Signal, None)?;
        return Ok(Estimate::from_samples(&r[0].fixed_df));
    }
    fixed_x_df_monte_carlo(pop, pred, cfg)
}

pub fn has_closed_form_df(pred: &PredictorSpec) -> bool {
    matches!(
        pred,
        PredictorSpec::Zero
            | PredictorSpec::LeastSquares
            | PredictorSpec::Ridge { .. }
            | PredictorSpec::Ridgeless
            | PredictorSpec::Knn { .. }
            | PredictorSpec::Lasso { .. }
            | PredictorSpec::Lassoless
            | PredictorSpec::RandomFeaturesRidgeless { .. }
    )
}

/// Combines paired emergent and intrinsic passes into a report.
pub fn assemble_report(
    emergent: &PassResult,
    intrinsic: &PassResult,
    fixed: Estimate,
    sigma2: f64,
    n: usize,
) -> DofReport {
    let e = &emergent.estimate;
    let i = &intrinsic.estimate;
    let df_e = df_from_optimism(e.optimism, sigma2, n);
    let df_i = df_from_optimism(i.optimism, sigma2, n);
    let se_e = df_standard_error(e.se, df_e, sigma2, n);
    let se_i = df_standard_error(i.se, df_i, sigma2, n);
    // paired delta method over replications present in both passes
    let (ge, gi) = (
        1.0 / (sigma2 * reference_slope(df_e, n)),
        1.0 / (sigma2 * reference_slope(df_i, n)),
    );
    let mut diffs = Vec::new();
    let mut a = intrinsic.records.iter().peekable();
    for re in &emergent.records {
        while a.peek().is_some_and(|ri| ri.rep < re.rep) {
            a.next();
        }
        if let Some(ri) = a.peek() {
            if ri.rep == re.rep {
                diffs.push(ge * (re.err_r - re.err_t) - gi * (ri.err_r - ri.err_t));
            }
        }
    }
    let (_, se_b) = mean_se(&diffs);
    DofReport {
        df_fixed: fixed.value,
        df_emergent: df_e,
        df_intrinsic: df_i,
        df_bias: df_e - df_i,
        sigma2_used: sigma2,
        uncertainty: DofUncertainty {
            df_fixed: fixed.se,
            df_emergent: se_e,
            df_intrinsic: se_i,
            df_bias: se_b,
        },
        emergent: e.clone(),
        intrinsic: i.clone(),
    }
}

/// Reports for a list of predictors on one population, sharing all draws.
pub fn dof_reports(
    pop: &Population,
    specs: &[PredictorSpec],
    cfg: &EstimatorConfig,
) -> Result<Vec<DofReport>> {
    let emergent = run_pass(pop, specs, cfg, Response::Signal, None)?;
    let s2 = resolve_sigma2(pop, specs, cfg, Some(&emergent))?;
    let intrinsic = run_pass(pop, specs, cfg, Response::PureNoise(s2), None)?;
    let mut out = Vec::with_capacity(specs.len());
    for (k, spec) in specs.iter().enumerate() {
        let fixed = if has_closed_form_df(spec) {
            Estimate::from_samples(&emergent[k].fixed_df)
        } else {
            fixed_x_df_monte_carlo(pop, spec, cfg)?
        };
        out.push(assemble_report(&emergent[k], &intrinsic[k], fixed, s2, pop.n()));
    }
    Ok(out)
}

pub fn dof_report(gen: &GeneratorSpec, pred: &PredictorSpec, cfg: &EstimatorConfig) -> Result<DofReport> {
    let pop = population(gen, cfg)?;
    Ok(dof_reports(&pop, std::slice::from_ref(pred), cfg)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::reference_optimism;

    fn ls_gen(n: usize, p: usize) -> GeneratorSpec {
        GeneratorSpec::linear_ar1(n, p, 0.0, 1.0)
    }

    #[test]
    fn config_validation() {
        assert!(EstimatorConfig::new(1, 0).validate().is_err());
        assert!(EstimatorConfig::new(2, 0).with_test_size(0).validate().is_err());
        assert!(EstimatorConfig::new(2, 0)
            .with_sigma2(Sigma2Source::Known(-1.0))
            .validate()
            .is_err());
        assert!(EstimatorConfig::new(2, 0).validate().is_ok());
    }

    #[test]
    fn optimism_is_exact_difference() {
        let cfg = EstimatorConfig::new(20, 3).with_test_size(200);
        let e = estimate_random_x_optimism(&ls_gen(40, 4), &PredictorSpec::LeastSquares, &cfg).unwrap();
        assert_eq!(e.optimism, e.err_r - e.err_t);
        assert_eq!(e.n_reps, 20);
    }

    #[test]
    fn zero_predictor_on_pure_noise_has_no_optimism() {
        let gen = ls_gen(50, 5).with_alpha(0.0);
        let cfg = EstimatorConfig::new(200, 1).with_test_size(200);
        let e = estimate_random_x_optimism(&gen, &PredictorSpec::Zero, &cfg).unwrap();
        assert!(e.optimism.abs() <= 3.0 * e.se, "{e:?}");
    }

    #[test]
    fn least_squares_matches_reference() {
        let cfg = EstimatorConfig::new(2000, 11).with_test_size(200);
        let e = estimate_random_x_optimism(&ls_gen(100, 10), &PredictorSpec::LeastSquares, &cfg).unwrap();
        let want = reference_optimism(10.0, 100, 1.0).unwrap();
        assert!((e.optimism - want).abs() <= 3.0 * e.se, "{e:?} vs {want}");
    }

    #[test]
    fn ridgeless_interpolates_in_training() {
        let cfg = EstimatorConfig::new(5, 2).with_test_size(50);
        let e = estimate_random_x_optimism(&ls_gen(20, 40), &PredictorSpec::Ridgeless, &cfg).unwrap();
        assert!(e.err_t < 1e-12);
        assert!((e.optimism - e.err_r).abs() < 1e-12);
    }

    #[test]
    fn intrinsic_constant_smoother() {
        // k = n: the prediction is the training mean, tr L = 1.
        let n = 30;
        let cfg = EstimatorConfig::new(3000, 5).with_test_size(100);
        let e = estimate_intrinsic_optimism(&ls_gen(n, 2), &PredictorSpec::Knn { k: n }, &cfg).unwrap();
        let want = 2.0 / n as f64;
        assert!((e.optimism - want).abs() <= 3.0 * e.se, "{e:?}");
    }

    #[test]
    fn intrinsic_vanishes_for_heavy_ridge() {
        let cfg = EstimatorConfig::new(50, 5).with_test_size(100);
        let e = estimate_intrinsic_optimism(&ls_gen(40, 5), &PredictorSpec::Ridge { lambda: 1e9 }, &cfg)
            .unwrap();
        assert!(e.optimism.abs() <= 3.0 * e.se, "{e:?}");
    }

    #[test]
    fn proxy_singleton_is_that_error() {
        let cfg = EstimatorConfig::new(20, 4).with_test_size(200);
        let gen = ls_gen(60, 5);
        let spec = PredictorSpec::Ridge { lambda: 0.1 };
        let p = estimate_sigma2_proxy(&gen, std::slice::from_ref(&spec), &cfg).unwrap();
        let e = estimate_random_x_optimism(&gen, &spec, &cfg).unwrap();
        assert_eq!(p, e.err_r);
    }

    #[test]
    fn fixed_x_examples() {
        let cfg = EstimatorConfig::new(10, 4).with_test_size(20).with_fixed_x(10, 60);
        assert_eq!(fixed_x_df(&ls_gen(40, 7), &PredictorSpec::LeastSquares, &cfg).unwrap(), 7.0);
        let knn = fixed_x_df(&ls_gen(40, 3), &PredictorSpec::Knn { k: 4 }, &cfg).unwrap();
        assert!((knn - 10.0).abs() < 1e-12);
        let pop = Population::new(&ls_gen(30, 60), 4).unwrap();
        let mc = fixed_x_df_monte_carlo(&pop, &PredictorSpec::Ridgeless, &cfg).unwrap();
        assert!((mc.value - 30.0).abs() <= 3.0 * mc.se, "{mc:?}");
    }

    #[test]
    fn report_identities() {
        let cfg = EstimatorConfig::new(50, 8).with_test_size(100);
        let r = dof_report(&ls_gen(50, 5), &PredictorSpec::Ridge { lambda: 0.2 }, &cfg).unwrap();
        assert_eq!(r.df_bias, r.df_emergent - r.df_intrinsic);
        for v in [r.df_emergent, r.df_intrinsic] {
            assert!((0.0..=49.0).contains(&v));
        }
        let huge = dof_report(&ls_gen(50, 5), &PredictorSpec::Ridge { lambda: 1e9 }, &cfg).unwrap();
        let u = huge.uncertainty;
        assert!(huge.df_fixed < 1e-6);
        assert!(huge.df_intrinsic <= 3.0 * u.df_intrinsic, "{huge:?}");
        assert!(huge.df_emergent <= 3.0 * u.df_emergent, "{huge:?}");
    }

    #[test]
    fn deterministic_across_runs() {
        let cfg = EstimatorConfig::new(8, 21).with_test_size(30);
        let gen = GeneratorSpec::nonlinear_ar1(30, 10);
        let spec = PredictorSpec::Forest {
            n_trees: 3,
            max_leaves: 8,
            max_features: None,
        };
        let a = dof_report(&gen, &spec, &cfg.clone().with_fixed_x(3, 5)).unwrap();
        let b = dof_report(&gen, &spec, &cfg.with_fixed_x(3, 5)).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
