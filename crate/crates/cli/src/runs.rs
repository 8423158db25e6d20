//! Monte Carlo sweeps and covariate-shift decompositions over grids of points.

use rxdf_core::asymptotics::{
    lasso_equivalents, lassoless_equivalents, ridge_equivalents, ridgeless_equivalents, SignalLaw,
    SpectralModel,
};
use rxdf_core::data::{GeneratorSpec, Population, Variant};
use rxdf_core::decomposition::{scenario_grids, shapley_attribution, ShiftSpec};
use rxdf_core::estimator::{dof_reports, EstimatorConfig};
use rxdf_core::predictors::PredictorSpec;

use crate::config::{ExperimentConfig, Kind, Parameter};
use crate::table::{Cell, Table};
use crate::RunError;

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coordinate: f64,
    pub generator: GeneratorSpec,
    pub predictor: PredictorSpec,
}

/// The tuning parameter a model is usually plotted against.
pub fn natural_parameter(spec: &PredictorSpec, gen: &GeneratorSpec) -> f64 {
    match spec {
        PredictorSpec::Ridge { lambda } | PredictorSpec::Lasso { lambda } => *lambda,
        PredictorSpec::Knn { k } => *k as f64,
        PredictorSpec::Tree { max_leaves } => *max_leaves as f64,
        PredictorSpec::Forest {
            n_trees,
            max_leaves,
            ..
        } => (n_trees * max_leaves) as f64,
        PredictorSpec::RandomFeaturesRidgeless { features, .. } => *features as f64,
        _ => gen.p as f64,
    }
}

fn count(v: f64, what: &str) -> Result<usize, RunError> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e12 {
        Ok(v as usize)
    } else {
        Err(RunError::Config(format!("{what} must be a positive integer, got {v}")))
    }
}

pub fn build_points(
    parameter: Parameter,
    values: &[f64],
    template: Option<&PredictorSpec>,
    list: &[PredictorSpec],
    gen: &GeneratorSpec,
) -> Result<Vec<Point>, RunError> {
    let bad = |m: &str| Err(RunError::Config(m.to_string()));
    let mut out = Vec::new();
    if parameter == Parameter::Model {
        if list.is_empty() || !values.is_empty() || template.is_some() {
            return bad("parameter = \"model\" takes a `predictors` list and no `values` or `predictor`");
        }
        for p in list {
            out.push(Point {
                coordinate: natural_parameter(p, gen),
                generator: gen.clone(),
                predictor: p.clone(),
            });
        }
    } else {
        let Some(t) = template else {
            return bad("a `predictor` template is required unless parameter = \"model\"");
        };
        if values.is_empty() || !list.is_empty() {
            return bad("a sweep over a parameter takes `values` and no `predictors` list");
        }
        for &v in values {
            let mut g = gen.clone();
            let mut p = t.clone();
            match (parameter, &mut p) {
                (Parameter::Lambda, PredictorSpec::Ridge { lambda } | PredictorSpec::Lasso { lambda }) => {
                    *lambda = v
                }
                (Parameter::K, PredictorSpec::Knn { k }) => *k = count(v, "k")?,
                (
                    Parameter::Leaves,
                    PredictorSpec::Tree { max_leaves } | PredictorSpec::Forest { max_leaves, .. },
                ) => *max_leaves = count(v, "leaves")?,
                (Parameter::Trees, PredictorSpec::Forest { n_trees, .. }) => *n_trees = count(v, "trees")?,
                (Parameter::P, _) => g.p = count(v, "p")?,
                (Parameter::Gamma, _) => {
                    if !(v > 0.0 && v.is_finite()) {
                        return bad("gamma values must be positive");
                    }
                    g.p = count((v * g.n as f64).round().max(1.0), "p")?
                }
                _ => {
                    return Err(RunError::Config(format!(
                        "parameter \"{}\" does not apply to {}",
                        parameter.column(),
                        t.label()
                    )))
                }
            }
            out.push(Point {
                coordinate: v,
                generator: g,
                predictor: p,
            });
        }
    }
    for p in &out {
        p.generator.validate().map_err(RunError::config)?;
        p.predictor.validate().map_err(RunError::config)?;
    }
    Ok(out)
}

/// Points of a sweep or decompose config.
pub fn points(cfg: &ExperimentConfig) -> Result<Vec<Point>, RunError> {
    let gen = cfg
        .generator
        .as_ref()
        .ok_or_else(|| RunError::Config("missing [generator]".into()))?;
    match cfg.kind {
        Kind::Sweep => {
            let s = cfg.sweep.as_ref().expect("validated");
            build_points(s.parameter, &s.values, s.predictor.as_ref(), &s.predictors, gen)
        }
        Kind::Decompose => {
            let s = cfg.decompose.as_ref().expect("validated");
            build_points(s.parameter, &s.values, s.predictor.as_ref(), &s.predictors, gen)
        }
        _ => Err(RunError::Config("no points for this kind".into())),
    }
}

/// Consecutive points sharing a generator run together on common draws.
fn groups(points: &[Point]) -> Vec<&[Point]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=points.len() {
        if i == points.len() || points[i].generator != points[start].generator {
            out.push(&points[start..i]);
            start = i;
        }
    }
    out
}

struct TheoryValues {
    df: Option<[f64; 3]>,
    status: &'static str,
}

fn theory_for(pop: &Population, spec: &PredictorSpec) -> TheoryValues {
    let none = TheoryValues {
        df: None,
        status: "n/a",
    };
    let n = pop.n() as f64;
    let gen = pop.spec();
    let gamma = gen.p as f64 / n;
    let scaled = |f: f64, e: f64, i: f64, divergent: bool| TheoryValues {
        df: Some([f * n, e * n, i * n]),
        status: if divergent { "divergent" } else { "ok" },
    };
    let failed = TheoryValues {
        df: None,
        status: "failed",
    };
    match spec {
        PredictorSpec::Ridge { .. } | PredictorSpec::Ridgeless | PredictorSpec::LeastSquares => {
            let Ok(model) = SpectralModel::from_population(pop) else {
                return none;
            };
            let sol = match spec {
                PredictorSpec::Ridge { lambda } => ridge_equivalents(*lambda, &model),
                _ => ridgeless_equivalents(&model),
            };
            match sol {
                Ok(s) => scaled(s.df_fixed_norm, s.df_emergent_norm, s.df_intrinsic_norm, s.divergent),
                Err(_) => failed,
            }
        }
        PredictorSpec::Lasso { .. } | PredictorSpec::Lassoless if gen.variant == Variant::BernoulliSignal => {
            let Ok(law) = SignalLaw::empirical(pop.beta().as_slice()) else {
                return failed;
            };
            let s2 = gen.sigma2();
            match spec {
                PredictorSpec::Lasso { lambda } => match lasso_equivalents(*lambda, gamma, &law, s2) {
                    Ok(e) => scaled(e.df_fixed_norm, e.df_emergent_norm, e.df_intrinsic_norm, false),
                    Err(_) => failed,
                },
                _ => match lassoless_equivalents(gamma, &law, s2) {
                    Ok(e) => scaled(e.df_fixed_norm, e.df_emergent_norm, e.df_intrinsic_norm, e.divergent),
                    Err(_) => failed,
                },
            }
        }
        _ => none,
    }
}

pub const SWEEP_COLUMNS: [&str; 19] = [
    "model",
    "",
    "n",
    "p",
    "err_r",
    "err_t",
    "optimism",
    "optimism_se",
    "df_fixed",
    "df_fixed_se",
    "df_emergent",
    "df_emergent_se",
    "df_intrinsic",
    "df_intrinsic_se",
    "df_bias",
    "df_bias_se",
    "sigma2",
    "reps",
    "failed",
];

pub const THEORY_COLUMNS: [&str; 4] = [
    "theory_df_fixed",
    "theory_df_emergent",
    "theory_df_intrinsic",
    "theory_status",
];

fn header(coordinate: &str, base: &[&'static str], extra: &[&'static str]) -> Table {
    let mut h: Vec<&str> = base.iter().map(|c| if c.is_empty() { coordinate } else { c }).collect();
    h.extend_from_slice(extra);
    Table::new(&h)
}

pub fn run_sweep(
    coordinate: &str,
    points: &[Point],
    est: &EstimatorConfig,
    theory: bool,
) -> Result<Table, RunError> {
    let extra: &[&str] = if theory { &THEORY_COLUMNS } else { &[] };
    let mut table = header(coordinate, &SWEEP_COLUMNS, extra);
    for group in groups(points) {
        let gen = &group[0].generator;
        let pop = Population::new(gen, est.seed).map_err(RunError::failure)?;
        let specs: Vec<PredictorSpec> = group.iter().map(|p| p.predictor.clone()).collect();
        let reports = dof_reports(&pop, &specs, est).map_err(RunError::failure)?;
        for (pt, r) in group.iter().zip(&reports) {
            let u = &r.uncertainty;
            let mut row: Vec<Cell> = vec![
                pt.predictor.label().into(),
                pt.coordinate.into(),
                gen.n.into(),
                gen.p.into(),
                r.emergent.err_r.into(),
                r.emergent.err_t.into(),
                r.emergent.optimism.into(),
                r.emergent.se.into(),
                r.df_fixed.into(),
                u.df_fixed.into(),
                r.df_emergent.into(),
                u.df_emergent.into(),
                r.df_intrinsic.into(),
                u.df_intrinsic.into(),
                r.df_bias.into(),
                u.df_bias.into(),
                r.sigma2_used.into(),
                r.emergent.n_reps.into(),
                r.emergent.n_failed.max(r.intrinsic.n_failed).into(),
            ];
            if theory {
                let t = theory_for(&pop, &pt.predictor);
                match t.df {
                    Some(d) => row.extend(d.iter().map(|v| Cell::Real(*v))),
                    None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
                }
                row.push(t.status.into());
            }
            table.push(row);
        }
    }
    Ok(table)
}

pub const DECOMPOSE_COLUMNS: [&str; 20] = [
    "model",
    "",
    "n",
    "p",
    "df00",
    "df01",
    "df10",
    "df11",
    "df00_se",
    "df01_se",
    "df10_se",
    "df11_se",
    "phi_bias",
    "phi_bias_se",
    "phi_cov",
    "phi_cov_se",
    "efficiency_residual",
    "sigma2",
    "shift_scale",
    "reps",
];

pub fn run_decompose(
    coordinate: &str,
    points: &[Point],
    shift: &ShiftSpec,
    est: &EstimatorConfig,
) -> Result<Table, RunError> {
    let mut table = header(coordinate, &DECOMPOSE_COLUMNS, &[]);
    for group in groups(points) {
        let gen = &group[0].generator;
        let pop = Population::new(gen, est.seed).map_err(RunError::failure)?;
        let specs: Vec<PredictorSpec> = group.iter().map(|p| p.predictor.clone()).collect();
        let grids = scenario_grids(&pop, &specs, shift, est).map_err(RunError::failure)?;
        for (pt, g) in group.iter().zip(&grids) {
            let a = shapley_attribution(g);
            table.push(vec![
                pt.predictor.label().into(),
                pt.coordinate.into(),
                gen.n.into(),
                gen.p.into(),
                a.base.into(),
                g.df01.into(),
                g.df10.into(),
                a.total.into(),
                g.se00.into(),
                g.se01.into(),
                g.se10.into(),
                g.se11.into(),
                a.phi_bias.into(),
                a.se_bias.into(),
                a.phi_cov.into(),
                a.se_cov.into(),
                (a.total - a.base - a.phi_bias - a.phi_cov).into(),
                g.sigma2.into(),
                shift.scale.into(),
                est.n_reps.into(),
            ]);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_follow_parameter() {
        let gen = GeneratorSpec::nonlinear_ar1(50, 10).with_latent(40);
        let pts = build_points(
            Parameter::P,
            &[5.0, 40.0],
            Some(&PredictorSpec::Ridgeless),
            &[],
            &gen,
        )
        .unwrap();
        assert_eq!(pts[1].generator.p, 40);
        assert!(build_points(Parameter::P, &[41.0], Some(&PredictorSpec::Ridgeless), &[], &gen).is_err());
        assert!(build_points(Parameter::K, &[2.5], Some(&PredictorSpec::Knn { k: 1 }), &[], &gen).is_err());
        assert!(build_points(Parameter::Lambda, &[1.0], Some(&PredictorSpec::Knn { k: 1 }), &[], &gen).is_err());
        let g = build_points(Parameter::Gamma, &[0.5], Some(&PredictorSpec::Ridgeless), &[], &gen).unwrap();
        assert_eq!(g[0].generator.p, 25);
        let m = build_points(
            Parameter::Model,
            &[],
            None,
            &[PredictorSpec::Forest { n_trees: 3, max_leaves: 4, max_features: None }],
            &gen,
        )
        .unwrap();
        assert_eq!(m[0].coordinate, 12.0);
    }

    #[test]
    fn groups_split_on_generator_change() {
        let gen = GeneratorSpec::linear_ar1(20, 3, 0.0, 1.0);
        let pts = build_points(Parameter::P, &[2.0, 2.0, 3.0], Some(&PredictorSpec::LeastSquares), &[], &gen).unwrap();
        let g = groups(&pts);
        assert_eq!(g.iter().map(|g| g.len()).collect::<Vec<_>>(), vec![2, 1]);
    }
}
