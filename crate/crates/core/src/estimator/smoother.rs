//! Closed-form random-X quantities of linear smoothers, with expectations over
//! test points and feature draws taken by Monte Carlo.

use nalgebra::DVector;
use serde::Serialize;

use super::{EstimatorConfig, Estimate, Sigma2Source};
use crate::data::{GeneratorSpec, Population};
use crate::error::{Error, Result};
use crate::par;
use crate::predictors::{PredictorSpec, PreparedDesign};
use crate::rng::{self, Role};

/// Per feature draw: tr L, ||L||_F^2, mean ||L(x0)||^2, mean (f(x0) - L(x0)^T f)^2,
/// and ||(I - L) f||^2 / n.
struct Terms {
    trace: f64,
    frob: f64,
    test_norm: f64,
    test_bias: f64,
    train_bias: f64,
}

fn terms(pop: &Population, spec: &PredictorSpec, cfg: &EstimatorConfig) -> Result<Vec<Terms>> {
    cfg.validate()?;
    spec.validate()?;
    if !spec.is_linear_smoother() {
        return Err(Error::Unsupported(format!(
            "{} is not a linear smoother",
            spec.label()
        )));
    }
    let n = pop.n();
    let m = cfg.test_size;
    par::map_indexed(cfg.n_reps, |r| -> Result<Terms> {
        let rep = r as u64;
        let train = pop.draw(n, &mut rng::stream(cfg.seed, rep, Role::TrainX, 0), None);
        let test = pop.draw(m, &mut rng::stream(cfg.seed, rep, Role::Test, 0), None);
        let prep = PreparedDesign::new(&train.x);
        let w = prep.fit(spec, &DVector::zeros(n), 0)?.smoother_weights()?;
        let lf = w.apply(&test.x, &train.f);
        let resid = &train.f - w.apply_in_sample(&train.f);
        Ok(Terms {
            trace: w.trace(),
            frob: w.frobenius_sq(),
            test_norm: w.weight_norms_sq(&test.x).mean(),
            test_bias: (&test.f - lf).norm_squared() / m as f64,
            train_bias: resid.norm_squared() / n as f64,
        })
    })
    .into_iter()
    .collect()
}

fn noise_variance(pop: &Population, cfg: &EstimatorConfig) -> f64 {
    match cfg.sigma2_source {
        Sigma2Source::Known(s) => s,
        _ => pop.sigma2(),
    }
}

fn summarize(t: &[Terms], f: impl Fn(&Terms) -> f64) -> Estimate {
    let v: Vec<f64> = t.iter().map(f).collect();
    Estimate::from_samples(&v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmootherOptimism {
    pub intrinsic: Estimate,
    pub emergent: Estimate,
}

/// Intrinsic optimism sigma^2 [(2/n) tr L + E||L(x0)||^2 - ||L||_F^2 / n] and
/// emergent optimism, which adds the excess squared bias.
pub fn linear_smoother_optimism(
    model: &PredictorSpec,
    gen: &GeneratorSpec,
    cfg: &EstimatorConfig,
) -> Result<SmootherOptimism> {
    let pop = Population::new(gen, cfg.seed)?;
    linear_smoother_optimism_on(&pop, model, cfg)
}

pub fn linear_smoother_optimism_on(
    pop: &Population,
    model: &PredictorSpec,
    cfg: &EstimatorConfig,
) -> Result<SmootherOptimism> {
    let t = terms(pop, model, cfg)?;
    let s2 = noise_variance(pop, cfg);
    let nf = pop.n() as f64;
    let intr = move |x: &Terms| s2 * (2.0 * x.trace / nf + x.test_norm - x.frob / nf);
    Ok(SmootherOptimism {
        intrinsic: summarize(&t, intr),
        emergent: summarize(&t, move |x| intr(x) + x.test_bias - x.train_bias),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcessBiasVariance {
    pub b_plus: Estimate,
    pub v_plus: Estimate,
    /// Expected fixed-X optimism 2 sigma^2 tr L / n.
    pub fixed_optimism: Estimate,
    /// Random-X optimism; equals fixed_optimism + b_plus + v_plus per draw.
    pub random_optimism: Estimate,
}

pub fn excess_bias_variance(
    model: &PredictorSpec,
    gen: &GeneratorSpec,
    cfg: &EstimatorConfig,
) -> Result<ExcessBiasVariance> {
    let pop = Population::new(gen, cfg.seed)?;
    let t = terms(&pop, model, cfg)?;
    let s2 = noise_variance(&pop, cfg);
    let nf = pop.n() as f64;
    let b = |x: &Terms| x.test_bias - x.train_bias;
    let v = move |x: &Terms| s2 * (x.test_norm - x.frob / nf);
    let f = move |x: &Terms| 2.0 * s2 * x.trace / nf;
    Ok(ExcessBiasVariance {
        b_plus: summarize(&t, b),
        v_plus: summarize(&t, v),
        fixed_optimism: summarize(&t, f),
        random_optimism: summarize(&t, move |x| f(x) + b(x) + v(x)),
    })
}

/// tr L + (n/2)(E||L(x0)||^2 - ||L||_F^2 / n), averaged over feature draws.
pub fn luan_predictive_df(
    model: &PredictorSpec,
    gen: &GeneratorSpec,
    cfg: &EstimatorConfig,
) -> Result<Estimate> {
    let pop = Population::new(gen, cfg.seed)?;
    let t = terms(&pop, model, cfg)?;
    let nf = pop.n() as f64;
    Ok(summarize(&t, |x| x.trace + 0.5 * nf * (x.test_norm - x.frob / nf)))
}
