//! Named recipes that regenerate the data behind each reference figure at
//! desk scale. Replication counts come from the caller.

use rxdf_core::asymptotics::SignalLaw;
use rxdf_core::data::GeneratorSpec;
use rxdf_core::decomposition::ShiftSpec;
use rxdf_core::estimator::EstimatorConfig;
use rxdf_core::omega::{omega, omega_n};
use rxdf_core::predictors::PredictorSpec;

use crate::config::{AsymptoticsSection, Parameter, TheoryFamily, TheoryParameter};
use crate::runs::{build_points, natural_parameter, run_decompose, run_sweep, Point};
use crate::table::{Cell, Table};
use crate::theory::run_curve;
use crate::RunError;

pub type Output = Vec<(String, Table)>;

pub struct Recipe {
    pub id: &'static str,
    pub summary: &'static str,
    run: fn(&EstimatorConfig) -> Result<Output, RunError>,
}

impl Recipe {
    pub fn run(&self, est: &EstimatorConfig) -> Result<Output, RunError> {
        (self.run)(est)
    }
}

pub const RECIPES: &[Recipe] = &[
    Recipe {
        id: "fig1",
        summary: "ridgeless on nested nonlinear features, n=100, p=1..300",
        run: fig1,
    },
    Recipe {
        id: "fig-omega",
        summary: "the maps omega and omega_n/n over normalized optimism",
        run: fig_omega,
    },
    Recipe {
        id: "fig-lasso-under",
        summary: "lasso path, n=200, p=30, s=10",
        run: |e| lasso_path(e, "fig-lasso-under", GeneratorSpec::sparse_linear(200, 30, 10), 0.05),
    },
    Recipe {
        id: "fig-lasso-over",
        summary: "lasso path, n=200, p=300, s=100",
        run: |e| lasso_path(e, "fig-lasso-over", GeneratorSpec::sparse_linear(200, 300, 100), 0.5),
    },
    Recipe {
        id: "fig-forest",
        summary: "single tree up to interpolation, then more trees; linear AR1 data at n=400, p=20",
        run: fig_forest,
    },
    Recipe {
        id: "fig-comparison",
        summary: "ridge, kNN and tree/forest paths on linear AR1 data, n=200, p=100",
        run: fig_comparison,
    },
    Recipe {
        id: "fig-attribution",
        summary: "covariate-shift decomposition of the comparison models",
        run: fig_attribution,
    },
    Recipe {
        id: "fig-ridge",
        summary: "ridge theory and simulation over lambda, p=300, n=500 and n=200",
        run: fig_ridge,
    },
    Recipe {
        id: "fig-ridgeless",
        summary: "ridgeless theory and simulation over gamma, n=400",
        run: fig_ridgeless,
    },
    Recipe {
        id: "fig-lasso",
        summary: "lasso theory and simulation over lambda, p=600, n=800 and n=400, delta=1/6",
        run: fig_lasso,
    },
    Recipe {
        id: "fig-lassoless",
        summary: "lassoless theory and simulation over gamma, n=400, delta=1/10",
        run: fig_lassoless,
    },
    Recipe {
        id: "fig-knn-under",
        summary: "kNN over k on nonlinear data, n=500, p=300",
        run: |e| knn(e, "fig-knn-under", 500),
    },
    Recipe {
        id: "fig-knn-over",
        summary: "kNN over k on nonlinear data, n=200, p=300",
        run: |e| knn(e, "fig-knn-over", 200),
    },
    Recipe {
        id: "fig-random-features",
        summary: "ridgeless on tanh random features of 300 inputs, n=100, p=1..300",
        run: fig_random_features,
    },
];

pub fn find(id: &str) -> Result<&'static Recipe, RunError> {
    RECIPES.iter().find(|r| r.id == id).ok_or_else(|| {
        let ids: Vec<&str> = RECIPES.iter().map(|r| r.id).collect();
        RunError::Config(format!("unknown figure id \"{id}\"; known: {}", ids.join(", ")))
    })
}

fn geometric(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64))
        .collect()
}

fn sweep(
    est: &EstimatorConfig,
    parameter: Parameter,
    values: &[f64],
    template: Option<PredictorSpec>,
    list: &[PredictorSpec],
    gen: &GeneratorSpec,
    theory: bool,
) -> Result<Table, RunError> {
    let pts = build_points(parameter, values, template.as_ref(), list, gen)?;
    run_sweep(parameter.column(), &pts, est, theory)
}

fn fig1(est: &EstimatorConfig) -> Result<Output, RunError> {
    let ps: Vec<f64> = (1..=300).map(|p| p as f64).collect();
    let gen = GeneratorSpec::nonlinear_ar1(100, 1).with_latent(300);
    let t = sweep(est, Parameter::P, &ps, Some(PredictorSpec::Ridgeless), &[], &gen, false)?;
    Ok(vec![
        ("fig1_error.csv".into(), t.select(&["p", "err_r", "err_t", "optimism", "optimism_se"])),
        (
            "fig1_df.csv".into(),
            t.select(&[
                "p",
                "df_fixed",
                "df_fixed_se",
                "df_emergent",
                "df_emergent_se",
                "df_intrinsic",
                "df_intrinsic_se",
            ]),
        ),
        (
            "fig1_error_vs_df.csv".into(),
            t.select(&["p", "df_emergent", "df_intrinsic", "err_r"]),
        ),
    ])
}

fn fig_omega(_: &EstimatorConfig) -> Result<Output, RunError> {
    let mut t = Table::new(&["x", "omega", "omega_n_10", "omega_n_100", "omega_n_10000"]);
    for i in 0..=200 {
        let x = i as f64 * 0.05;
        let mut row: Vec<Cell> = vec![x.into(), omega(x).map_err(RunError::failure)?.into()];
        for n in [10, 100, 10_000] {
            row.push((omega_n(x, n).map_err(RunError::failure)? / n as f64).into());
        }
        t.push(row);
    }
    Ok(vec![("fig-omega.csv".into(), t)])
}

fn lasso_path(est: &EstimatorConfig, id: &str, gen: GeneratorSpec, lo: f64) -> Result<Output, RunError> {
    let lambdas = geometric(lo, 100.0, 20);
    let t = sweep(
        est,
        Parameter::Lambda,
        &lambdas,
        Some(PredictorSpec::Lasso { lambda: 1.0 }),
        &[],
        &gen,
        false,
    )?;
    Ok(vec![(format!("{id}.csv"), t)])
}

fn forest_path(n: usize) -> Vec<PredictorSpec> {
    let mut v = Vec::new();
    let mut leaves = 2;
    while leaves < n {
        v.push(PredictorSpec::Tree { max_leaves: leaves });
        leaves *= 2;
    }
    v.push(PredictorSpec::Tree { max_leaves: n });
    for n_trees in [2, 5, 10, 20] {
        v.push(PredictorSpec::Forest {
            n_trees,
            max_leaves: n,
            max_features: None,
        });
    }
    v
}

fn forest_estimator(est: &EstimatorConfig) -> EstimatorConfig {
    est.clone().with_fixed_x(est.fixed_x_outer.min(10), est.fixed_x_inner.min(50))
}

fn fig_forest(est: &EstimatorConfig) -> Result<Output, RunError> {
    let gen = GeneratorSpec::linear_ar1(400, 20, 0.25, 0.5);
    let t = sweep(&forest_estimator(est), Parameter::Model, &[], None, &forest_path(400), &gen, false)?;
    Ok(vec![("fig-forest.csv".into(), t)])
}

fn comparison_models(n: usize) -> Vec<PredictorSpec> {
    let mut v: Vec<PredictorSpec> = geometric(1e-3, 1e2, 11)
        .into_iter()
        .map(|lambda| PredictorSpec::Ridge { lambda })
        .collect();
    v.extend([1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144].map(|k| PredictorSpec::Knn { k }));
    v.extend([4, 16, 64, n].map(|max_leaves| PredictorSpec::Tree { max_leaves }));
    v.extend([5, 20].map(|n_trees| PredictorSpec::Forest {
        n_trees,
        max_leaves: n,
        max_features: None,
    }));
    v
}

fn comparison_generator() -> GeneratorSpec {
    GeneratorSpec::linear_ar1(200, 100, 0.25, 0.5)
}

fn fig_comparison(est: &EstimatorConfig) -> Result<Output, RunError> {
    let t = sweep(
        &forest_estimator(est),
        Parameter::Model,
        &[],
        None,
        &comparison_models(200),
        &comparison_generator(),
        false,
    )?;
    Ok(vec![("fig-comparison.csv".into(), t)])
}

fn fig_attribution(est: &EstimatorConfig) -> Result<Output, RunError> {
    let gen = comparison_generator();
    let pts: Vec<Point> = comparison_models(200)
        .into_iter()
        .map(|p| Point {
            coordinate: natural_parameter(&p, &gen),
            generator: gen.clone(),
            predictor: p,
        })
        .collect();
    let t = run_decompose("parameter", &pts, &ShiftSpec::default(), est)?;
    Ok(vec![("fig-attribution.csv".into(), t)])
}

fn curve(family: TheoryFamily, parameter: TheoryParameter, values: Vec<f64>) -> AsymptoticsSection {
    AsymptoticsSection {
        family,
        parameter,
        values,
        lambda: None,
        gamma: None,
        sigma2: 1.0,
        sigma2_nl: 0.0,
        signal_energy: 0.0,
        signal: None::<SignalLaw>,
        alpha: None,
        monte_carlo: true,
    }
}

fn fig_ridge(est: &EstimatorConfig) -> Result<Output, RunError> {
    let s = curve(TheoryFamily::Ridge, TheoryParameter::Lambda, geometric(1e-2, 1e2, 13));
    let mut out = Vec::new();
    for (tag, n) in [("under", 500), ("over", 200)] {
        let gen = GeneratorSpec::nonlinear_ar1(n, 300);
        out.push((format!("fig-ridge_{tag}.csv"), run_curve(&s, Some(&gen), est)?));
    }
    Ok(out)
}

fn fig_ridgeless(est: &EstimatorConfig) -> Result<Output, RunError> {
    let gammas = vec![0.1, 0.25, 0.5, 0.75, 0.9, 1.1, 1.25, 1.5, 2.0, 3.0, 4.0, 5.0];
    let s = curve(TheoryFamily::Ridgeless, TheoryParameter::Gamma, gammas);
    let gen = GeneratorSpec::nonlinear_ar1(400, 1);
    Ok(vec![("fig-ridgeless.csv".into(), run_curve(&s, Some(&gen), est)?)])
}

fn fig_lasso(est: &EstimatorConfig) -> Result<Output, RunError> {
    let s = curve(TheoryFamily::Lasso, TheoryParameter::Lambda, geometric(0.05, 5.0, 12));
    let mut out = Vec::new();
    for (tag, n) in [("under", 800), ("over", 400)] {
        let gen = GeneratorSpec::bernoulli_signal(n, 600, 1.0 / 6.0);
        out.push((format!("fig-lasso_{tag}.csv"), run_curve(&s, Some(&gen), est)?));
    }
    Ok(out)
}

fn fig_lassoless(est: &EstimatorConfig) -> Result<Output, RunError> {
    let gammas = vec![0.25, 0.5, 0.75, 1.25, 1.5, 2.0, 3.0, 4.0];
    let s = curve(TheoryFamily::Lassoless, TheoryParameter::Gamma, gammas);
    let gen = GeneratorSpec::bernoulli_signal(400, 1, 0.1);
    Ok(vec![("fig-lassoless.csv".into(), run_curve(&s, Some(&gen), est)?)])
}

fn knn(est: &EstimatorConfig, id: &str, n: usize) -> Result<Output, RunError> {
    let ks: Vec<f64> = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]
        .into_iter()
        .filter(|k| *k < n)
        .map(|k| k as f64)
        .collect();
    let gen = GeneratorSpec::nonlinear_ar1(n, 300);
    let t = sweep(est, Parameter::K, &ks, Some(PredictorSpec::Knn { k: 1 }), &[], &gen, false)?;
    Ok(vec![(format!("{id}.csv"), t)])
}

fn fig_random_features(est: &EstimatorConfig) -> Result<Output, RunError> {
    let ps: Vec<f64> = (1..=300).map(|p| p as f64).collect();
    let gen = GeneratorSpec::random_features(100, 1, 300);
    let t = sweep(est, Parameter::P, &ps, Some(PredictorSpec::Ridgeless), &[], &gen, false)?;
    Ok(vec![("fig-random-features.csv".into(), t)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_found() {
        for (i, r) in RECIPES.iter().enumerate() {
            assert!(RECIPES[i + 1..].iter().all(|o| o.id != r.id));
            assert_eq!(find(r.id).unwrap().id, r.id);
        }
        assert!(matches!(find("fig99"), Err(RunError::Config(_))));
    }

    #[test]
    fn omega_recipe_is_cheap_and_bounded() {
        let out = find("fig-omega").unwrap().run(&EstimatorConfig::new(2, 0)).unwrap();
        let t = &out[0].1;
        assert_eq!(t.rows.len(), 201);
        assert!(t.values("omega").iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn forest_path_ends_at_interpolation() {
        let v = forest_path(400);
        assert_eq!(v[7], PredictorSpec::Tree { max_leaves: 256 });
        assert_eq!(v[8], PredictorSpec::Tree { max_leaves: 400 });
        assert_eq!(v.len(), 13);
    }
}
