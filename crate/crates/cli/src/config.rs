//! Experiment configuration files.
//!
//! A config is one TOML document. `kind` selects the runner and the matching
//! section (`[sweep]`, `[asymptotics]`, `[decompose]` or `[reproduce]`) must
//! be present. Unknown keys anywhere are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use rxdf_core::asymptotics::SignalLaw;
use rxdf_core::data::GeneratorSpec;
use rxdf_core::decomposition::ShiftSpec;
use rxdf_core::estimator::{EstimatorConfig, Sigma2Source};
use rxdf_core::predictors::PredictorSpec;

use crate::RunError;

pub const DEFAULT_REPS: usize = 100;
pub const FULL_REPS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Sweep,
    Asymptotics,
    Decompose,
    Reproduce,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Sweep => "sweep",
            Kind::Asymptotics => "asymptotics",
            Kind::Decompose => "decompose",
            Kind::Reproduce => "reproduce",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
    #[serde(default)]
    pub estimator: EstimatorSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub asymptotics: Option<AsymptoticsSection>,
    #[serde(default)]
    pub decompose: Option<DecomposeSection>,
    #[serde(default)]
    pub reproduce: Option<ReproduceSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    #[serde(default = "default_reps")]
    pub n_reps: usize,
    #[serde(default = "default_test_size")]
    pub test_size: usize,
    #[serde(default)]
    pub sigma2: Sigma2Source,
    #[serde(default = "default_outer")]
    pub fixed_x_outer: usize,
    #[serde(default = "default_inner")]
    pub fixed_x_inner: usize,
    #[serde(default = "default_failure_fraction")]
    pub max_failure_fraction: f64,
}

fn default_reps() -> usize {
    DEFAULT_REPS
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

impl Default for EstimatorSection {
    fn default() -> Self {
        Self {
            n_reps: DEFAULT_REPS,
            test_size: default_test_size(),
            sigma2: Sigma2Source::Generator,
            fixed_x_outer: default_outer(),
            fixed_x_inner: default_inner(),
            max_failure_fraction: default_failure_fraction(),
        }
    }
}

impl EstimatorSection {
    pub fn to_config(&self, seed: u64) -> EstimatorConfig {
        let mut c = EstimatorConfig::new(self.n_reps, seed)
            .with_test_size(self.test_size)
            .with_sigma2(self.sigma2.clone())
            .with_fixed_x(self.fixed_x_outer, self.fixed_x_inner);
        c.max_failure_fraction = self.max_failure_fraction;
        c
    }
}

/// What a sweep or decomposition varies from point to point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameter {
    /// Penalty of a ridge or lasso template.
    Lambda,
    /// Neighbors of a kNN template.
    K,
    /// Maximum leaves of a tree or forest template.
    Leaves,
    /// Trees of a forest template.
    Trees,
    /// Generator feature count.
    P,
    /// Generator aspect ratio p / n; p is rounded to the nearest integer.
    Gamma,
    /// Explicit `predictors` list; the coordinate is each model's own tuning
    /// parameter.
    Model,
}

impl Parameter {
    pub fn column(self) -> &'static str {
        match self {
            Parameter::Lambda => "lambda",
            Parameter::K => "k",
            Parameter::Leaves => "leaves",
            Parameter::Trees => "trees",
            Parameter::P => "p",
            Parameter::Gamma => "gamma",
            Parameter::Model => "parameter",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: Parameter,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub predictor: Option<PredictorSpec>,
    #[serde(default)]
    pub predictors: Vec<PredictorSpec>,
    /// Adds asymptotic equivalents where a theory applies.
    #[serde(default)]
    pub theory: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeSection {
    pub parameter: Parameter,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub predictor: Option<PredictorSpec>,
    #[serde(default)]
    pub predictors: Vec<PredictorSpec>,
    #[serde(default)]
    pub shift: ShiftSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoryFamily {
    Ridge,
    Ridgeless,
    Lasso,
    Lassoless,
    ElasticNet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoryParameter {
    Lambda,
    Gamma,
}

/// Theory curves. Without a `[generator]` the model is isotropic (ridge
/// families) or i.i.d. N(0, 1/n) features with the given signal law (lasso
/// families); with one, the model is read off the generator's population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsSection {
    pub family: TheoryFamily,
    pub parameter: TheoryParameter,
    pub values: Vec<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "one")]
    pub sigma2: f64,
    #[serde(default)]
    pub sigma2_nl: f64,
    /// Squared norm of the signal for isotropic ridge models.
    #[serde(default)]
    pub signal_energy: f64,
    #[serde(default)]
    pub signal: Option<SignalLaw>,
    /// Elastic-net mixing weight on the l1 part.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Pairs every theory point with a simulation from `[generator]`.
    #[serde(default)]
    pub monte_carlo: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproduceSection {
    pub figure: String,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn estimator_config(&self) -> EstimatorConfig {
        self.estimator.to_config(self.seed)
    }

    /// Schema checks that do not need to run anything.
    pub fn validate(&self) -> Result<(), RunError> {
        let cfg = |m: String| Err(RunError::Config(m));
        self.estimator_config().validate().map_err(RunError::config)?;
        if let Some(g) = &self.generator {
            g.validate().map_err(RunError::config)?;
        }
        let sections = [
            (Kind::Sweep, self.sweep.is_some()),
            (Kind::Asymptotics, self.asymptotics.is_some()),
            (Kind::Decompose, self.decompose.is_some()),
            (Kind::Reproduce, self.reproduce.is_some()),
        ];
        for (k, present) in sections {
            if k == self.kind && !present {
                return cfg(format!("kind = \"{}\" needs a [{}] section", k.name(), k.name()));
            }
            if k != self.kind && present {
                return cfg(format!("[{}] section given but kind = \"{}\"", k.name(), self.kind.name()));
            }
        }
        match self.kind {
            Kind::Sweep | Kind::Decompose => {
                if self.generator.is_none() {
                    return cfg(format!("kind = \"{}\" needs a [generator] section", self.kind.name()));
                }
                crate::runs::points(self)?;
                if let Some(d) = &self.decompose {
                    d.shift.validate().map_err(RunError::config)?;
                }
            }
            Kind::Asymptotics => crate::theory::validate(self)?,
            Kind::Reproduce => {
                let id = &self.reproduce.as_ref().expect("checked above").figure;
                crate::recipes::find(id)?;
            }
        }
        Ok(())
    }
}
