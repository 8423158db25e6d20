//! Covariate-shift scenarios and the two-source Shapley split of degrees of freedom.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::{GeneratorSpec, Population};
use crate::error::{invalid, Result};
use crate::estimator::{mean_se, resolve_sigma2, run_pass, EstimatorConfig, PassResult, Response};
use crate::omega::{df_from_optimism, df_standard_error, reference_slope};
use crate::predictors::PredictorSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Offset {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// Test features become `scale * x + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    #[serde(default = "default_scale")]
    pub scale: f64,
    /// None means 0.5 / sqrt(dim) in every coordinate.
    #[serde(default)]
    pub offset: Option<Offset>,
}

fn default_scale() -> f64 {
    1.5
}

impl Default for ShiftSpec {
    fn default() -> Self {
        Self {
            scale: default_scale(),
            offset: None,
        }
    }
}

impl ShiftSpec {
    pub fn identity() -> Self {
        Self {
            scale: 1.0,
            offset: Some(Offset::Scalar(0.0)),
        }
    }

    pub fn new(scale: f64, offset: Offset) -> Result<Self> {
        let s = Self {
            scale,
            offset: Some(offset),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return invalid(format!("shift scale must be positive, got {}", self.scale));
        }
        match &self.offset {
            Some(Offset::Scalar(v)) if !v.is_finite() => invalid("shift offset must be finite"),
            Some(Offset::Vector(v)) if v.iter().any(|x| !x.is_finite()) => {
                invalid("shift offset must be finite")
            }
            _ => Ok(()),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.scale == 1.0
            && match &self.offset {
                Some(Offset::Scalar(v)) => *v == 0.0,
                Some(Offset::Vector(v)) => v.iter().all(|x| *x == 0.0),
                None => false,
            }
    }

    fn offset_at(&self, j: usize, dim: usize) -> f64 {
        match &self.offset {
            None => 0.5 / (dim as f64).sqrt(),
            Some(Offset::Scalar(v)) => *v,
            Some(Offset::Vector(v)) => v.get(j).copied().unwrap_or(0.0),
        }
    }

    /// Checks a vector offset against the feature dimension.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if let Some(Offset::Vector(v)) = &self.offset {
            if v.len() != dim {
                return invalid(format!(
                    "shift offset has length {} but features have dimension {dim}",
                    v.len()
                ));
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &mut DMatrix<f64>) {
        let dim = x.ncols();
        for j in 0..dim {
            let o = self.offset_at(j, dim);
            for v in x.column_mut(j).iter_mut() {
                *v = self.scale * *v + o;
            }
        }
    }
}

/// Degrees of freedom in the four signal x shift cells; the first digit is
/// the signal, the second the shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioGrid {
    pub df00: f64,
    pub df01: f64,
    pub df10: f64,
    pub df11: f64,
    pub se00: f64,
    pub se01: f64,
    pub se10: f64,
    pub se11: f64,
    /// Paired standard errors of the two attributions.
    pub se_phi_bias: f64,
    pub se_phi_cov: f64,
    pub sigma2: f64,
}

impl ScenarioGrid {
    /// Grid from point values alone, with zero standard errors.
    pub fn from_values(df00: f64, df01: f64, df10: f64, df11: f64) -> Self {
        Self {
            df00,
            df01,
            df10,
            df11,
            se00: 0.0,
            se01: 0.0,
            se10: 0.0,
            se11: 0.0,
            se_phi_bias: 0.0,
            se_phi_cov: 0.0,
            sigma2: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Attribution {
    /// df00 as used in the split.
    pub base: f64,
    /// df11 as used in the split; always exactly base + phi_bias + phi_cov.
    pub total: f64,
    pub phi_bias: f64,
    pub phi_cov: f64,
    pub se_bias: f64,
    pub se_cov: f64,
}

/// Rounds the four cells to a common dyadic grid fine enough to be invisible
/// yet coarse enough that every sum and half in the split is exact.
fn snap(v: [f64; 4]) -> [f64; 4] {
    let m = v.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let k = m.log2().ceil() as i32 + 1;
    let q = 2f64.powi(k - 50);
    v.map(|x| (x / q).round() * q)
}

pub fn shapley_attribution(grid: &ScenarioGrid) -> Attribution {
    let [d00, d01, d10, d11] = snap([grid.df00, grid.df01, grid.df10, grid.df11]);
    Attribution {
        base: d00,
        total: d11,
        phi_bias: 0.5 * (d11 - d01) + 0.5 * (d10 - d00),
        phi_cov: 0.5 * (d11 - d10) + 0.5 * (d01 - d00),
        se_bias: grid.se_phi_bias,
        se_cov: grid.se_phi_cov,
    }
}

/// Optimism of each replication indexed by replication number.
fn by_rep(pass: &PassResult, reps: usize) -> Vec<Option<f64>> {
    let mut v = vec![None; reps];
    for r in &pass.records {
        v[r.rep] = Some(r.err_r - r.err_t);
    }
    v
}

/// Scenario grids for several predictors on one population. All four cells
/// share training and test feature draws; the shift moves test features only.
pub fn scenario_grids(
    pop: &Population,
    specs: &[PredictorSpec],
    shift: &ShiftSpec,
    cfg: &EstimatorConfig,
) -> Result<Vec<ScenarioGrid>> {
    shift.validate()?;
    shift.check_dim(pop.spec().latent_dim())?;
    let s10 = run_pass(pop, specs, cfg, Response::Signal, None)?;
    let s11 = run_pass(pop, specs, cfg, Response::Signal, Some(shift))?;
    let s2 = resolve_sigma2(pop, specs, cfg, Some(&s10))?;
    let s00 = run_pass(pop, specs, cfg, Response::PureNoise(s2), None)?;
    let s01 = run_pass(pop, specs, cfg, Response::PureNoise(s2), Some(shift))?;
    let n = pop.n();
    let reps = cfg.n_reps;
    let mut out = Vec::with_capacity(specs.len());
    for k in 0..specs.len() {
        let cells = [&s00[k], &s01[k], &s10[k], &s11[k]];
        let df = cells.map(|c| df_from_optimism(c.estimate.optimism, s2, n));
        let se: Vec<f64> = cells
            .iter()
            .zip(df.iter())
            .map(|(c, d)| df_standard_error(c.estimate.se, *d, s2, n))
            .collect();
        let g = df.map(|d| 1.0 / (s2 * reference_slope(d, n)));
        let opts = cells.map(|c| by_rep(c, reps));
        let mut bias = Vec::new();
        let mut cov = Vec::new();
        for r in 0..reps {
            if let [Some(o00), Some(o01), Some(o10), Some(o11)] = [opts[0][r], opts[1][r], opts[2][r], opts[3][r]] {
                let [l00, l01, l10, l11] = [g[0] * o00, g[1] * o01, g[2] * o10, g[3] * o11];
                bias.push(0.5 * (l11 - l01) + 0.5 * (l10 - l00));
                cov.push(0.5 * (l11 - l10) + 0.5 * (l01 - l00));
            }
        }
        out.push(ScenarioGrid {
            df00: df[0],
            df01: df[1],
            df10: df[2],
            df11: df[3],
            se00: se[0],
            se01: se[1],
            se10: se[2],
            se11: se[3],
            se_phi_bias: mean_se(&bias).1,
            se_phi_cov: mean_se(&cov).1,
            sigma2: s2,
        });
    }
    Ok(out)
}

pub fn scenario_grid(
    gen: &GeneratorSpec,
    pred: &PredictorSpec,
    shift: &ShiftSpec,
    cfg: &EstimatorConfig,
) -> Result<ScenarioGrid> {
    cfg.validate()?;
    let pop = Population::new(gen, cfg.seed)?;
    Ok(scenario_grids(&pop, std::slice::from_ref(pred), shift, cfg)?.remove(0))
}
