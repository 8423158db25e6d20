//! Asymptotic theory curves, optionally paired with simulations.

use rxdf_core::asymptotics::{
    convex_equivalents, lasso_equivalents, lassoless_equivalents, ridge_equivalents,
    ridgeless_equivalents, PenaltyLaw, SignalLaw, SpectralModel,
};
use rxdf_core::data::{GeneratorSpec, Population, Variant};
use rxdf_core::estimator::{dof_report, EstimatorConfig};
use rxdf_core::predictors::PredictorSpec;
use rxdf_core::Error;

use crate::config::{AsymptoticsSection, ExperimentConfig, TheoryFamily, TheoryParameter};
use crate::table::{Cell, Table};
use crate::RunError;

fn section(cfg: &ExperimentConfig) -> &AsymptoticsSection {
    cfg.asymptotics.as_ref().expect("validated")
}

pub fn validate(cfg: &ExperimentConfig) -> Result<(), RunError> {
    let s = section(cfg);
    let bad = |m: &str| Err(RunError::Config(m.to_string()));
    if s.values.is_empty() || s.values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return bad("asymptotics values must be a nonempty list of positive numbers");
    }
    if !(s.sigma2 > 0.0 && s.sigma2.is_finite()) || !(s.sigma2_nl >= 0.0) || !(s.signal_energy >= 0.0) {
        return bad("sigma2 must be positive, sigma2_nl and signal_energy nonnegative");
    }
    let penalized = !matches!(s.family, TheoryFamily::Ridgeless | TheoryFamily::Lassoless);
    match s.parameter {
        TheoryParameter::Lambda => {
            if !penalized {
                return bad("ridgeless and lassoless curves run over gamma");
            }
            if cfg.generator.is_none() && s.gamma.is_none() {
                return bad("a lambda curve needs `gamma` or a [generator]");
            }
        }
        TheoryParameter::Gamma => {
            if penalized && s.lambda.is_none() {
                return bad("a gamma curve of a penalized family needs `lambda`");
            }
        }
    }
    if let Some(g) = s.gamma {
        if !(g > 0.0 && g.is_finite()) {
            return bad("gamma must be positive");
        }
    }
    if let Some(l) = s.lambda {
        if !(l > 0.0 && l.is_finite()) {
            return bad("lambda must be positive");
        }
    }
    if s.family == TheoryFamily::ElasticNet {
        match s.alpha {
            Some(a) if (0.0..=1.0).contains(&a) => {}
            _ => return bad("elastic-net needs alpha in [0, 1]"),
        }
    } else if s.alpha.is_some() {
        return bad("alpha applies to elastic-net only");
    }
    if let Some(law) = &s.signal {
        law.validate().map_err(RunError::config)?;
    }
    let lasso_like = matches!(
        s.family,
        TheoryFamily::Lasso | TheoryFamily::Lassoless | TheoryFamily::ElasticNet
    );
    if let Some(g) = &cfg.generator {
        if lasso_like && g.variant != Variant::BernoulliSignal {
            return bad("lasso-type theory needs the bernoulli-signal generator (features N(0, 1/n))");
        }
    }
    if s.monte_carlo {
        if cfg.generator.is_none() {
            return bad("monte_carlo needs a [generator]");
        }
        if s.family == TheoryFamily::ElasticNet {
            return bad("no simulated predictor for elastic-net");
        }
    }
    Ok(())
}

struct Row {
    df: Option<[f64; 3]>,
    mu: Option<f64>,
    tau: Option<f64>,
    status: String,
}

fn status_of(e: &Error) -> String {
    match e {
        Error::NoConvergence { .. } | Error::Bracketing(_) => "no-convergence".into(),
        _ => "failed".into(),
    }
}

fn solve(s: &AsymptoticsSection, gamma: f64, lambda: f64, pop: Option<&Population>) -> Result<Row, Error> {
    let ok = |df: [f64; 3], mu, tau, divergent: bool| Row {
        df: Some(df),
        mu,
        tau,
        status: if divergent { "divergent" } else { "ok" }.into(),
    };
    match s.family {
        TheoryFamily::Ridge | TheoryFamily::Ridgeless => {
            let model = match pop {
                Some(p) => SpectralModel::from_population(p)?,
                None => SpectralModel {
                    sigma2_nl: s.sigma2_nl,
                    ..SpectralModel::isotropic(gamma, s.sigma2, s.signal_energy)
                },
            };
            let r = if s.family == TheoryFamily::Ridge {
                ridge_equivalents(lambda, &model)?
            } else {
                ridgeless_equivalents(&model)?
            };
            Ok(ok(
                [r.df_fixed_norm, r.df_emergent_norm, r.df_intrinsic_norm],
                Some(r.mu),
                None,
                r.divergent,
            ))
        }
        _ => {
            let (law, s2) = match pop {
                Some(p) => (SignalLaw::empirical(p.beta().as_slice())?, p.sigma2()),
                None => (
                    s.signal.clone().unwrap_or_else(|| SignalLaw::point_mass(0.0)),
                    s.sigma2,
                ),
            };
            match s.family {
                TheoryFamily::Lassoless => {
                    let e = lassoless_equivalents(gamma, &law, s2)?;
                    Ok(ok(
                        [e.df_fixed_norm, e.df_emergent_norm, e.df_intrinsic_norm],
                        e.solution.map(|x| x.mu),
                        e.solution.map(|x| x.tau),
                        e.divergent,
                    ))
                }
                _ => {
                    let e = if s.family == TheoryFamily::Lasso {
                        lasso_equivalents(lambda, gamma, &law, s2)?
                    } else {
                        let alpha = s.alpha.expect("validated");
                        convex_equivalents(lambda, gamma, &law, s2, &PenaltyLaw::ElasticNet { alpha })?
                    };
                    Ok(ok(
                        [e.df_fixed_norm, e.df_emergent_norm, e.df_intrinsic_norm],
                        Some(e.solution.mu),
                        Some(e.solution.tau),
                        false,
                    ))
                }
            }
        }
    }
}

fn predictor(family: TheoryFamily, lambda: f64) -> PredictorSpec {
    match family {
        TheoryFamily::Ridge => PredictorSpec::Ridge { lambda },
        TheoryFamily::Ridgeless => PredictorSpec::Ridgeless,
        TheoryFamily::Lasso => PredictorSpec::Lasso { lambda },
        TheoryFamily::Lassoless => PredictorSpec::Lassoless,
        TheoryFamily::ElasticNet => unreachable!("rejected by validation"),
    }
}

fn family_name(f: TheoryFamily) -> &'static str {
    match f {
        TheoryFamily::Ridge => "ridge",
        TheoryFamily::Ridgeless => "ridgeless",
        TheoryFamily::Lasso => "lasso",
        TheoryFamily::Lassoless => "lassoless",
        TheoryFamily::ElasticNet => "elastic-net",
    }
}

pub fn run_asymptotics(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let s = section(cfg);
    let est = cfg.estimator_config();
    run_curve(s, cfg.generator.as_ref(), &est)
}

pub fn run_curve(
    s: &AsymptoticsSection,
    generator: Option<&GeneratorSpec>,
    est: &EstimatorConfig,
) -> Result<Table, RunError> {
    let mut cols = vec![
        "family",
        "gamma",
        "lambda",
        "df_fixed_norm",
        "df_emergent_norm",
        "df_intrinsic_norm",
        "mu",
        "tau",
        "status",
    ];
    if s.monte_carlo {
        cols.extend([
            "n",
            "p",
            "mc_df_fixed_norm",
            "mc_df_fixed_norm_se",
            "mc_df_emergent_norm",
            "mc_df_emergent_norm_se",
            "mc_df_intrinsic_norm",
            "mc_df_intrinsic_norm_se",
        ]);
    }
    let mut table = Table::new(&cols);
    let penalized = !matches!(s.family, TheoryFamily::Ridgeless | TheoryFamily::Lassoless);
    for &v in &s.values {
        let (gamma_req, lambda) = match s.parameter {
            TheoryParameter::Lambda => (s.gamma, v),
            TheoryParameter::Gamma => (Some(v), s.lambda.unwrap_or(f64::NAN)),
        };
        let gen = generator.map(|g| {
            let mut g = g.clone();
            if let Some(gm) = gamma_req {
                g.p = ((gm * g.n as f64).round() as usize).max(1);
            }
            g
        });
        let pop = match &gen {
            Some(g) => Some(Population::new(g, est.seed).map_err(RunError::config)?),
            None => None,
        };
        let gamma = match &gen {
            Some(g) => g.p as f64 / g.n as f64,
            None => gamma_req.expect("validated"),
        };
        let row = solve(s, gamma, lambda, pop.as_ref()).unwrap_or_else(|e| Row {
            df: None,
            mu: None,
            tau: None,
            status: status_of(&e),
        });
        let mut cells: Vec<Cell> = vec![
            family_name(s.family).into(),
            gamma.into(),
            if penalized { lambda.into() } else { Cell::Empty },
        ];
        match row.df {
            Some(d) => cells.extend(d.map(Cell::Real)),
            None => cells.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
        }
        cells.extend([Cell::opt(row.mu), Cell::opt(row.tau), row.status.into()]);
        if s.monte_carlo {
            let g = gen.as_ref().expect("validated");
            let r = dof_report(g, &predictor(s.family, lambda), est).map_err(RunError::failure)?;
            let n = g.n as f64;
            let u = &r.uncertainty;
            cells.extend([
                Cell::from(g.n),
                Cell::from(g.p),
                (r.df_fixed / n).into(),
                (u.df_fixed / n).into(),
                (r.df_emergent / n).into(),
                (u.df_emergent / n).into(),
                (r.df_intrinsic / n).into(),
                (u.df_intrinsic / n).into(),
            ]);
        }
        table.push(cells);
    }
    Ok(table)
}
