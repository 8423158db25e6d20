use rxdf_core::data::{generate, GeneratorSpec};
use rxdf_core::decomposition::{scenario_grid, shapley_attribution, ShiftSpec};
use rxdf_core::estimator::{dof_report, EstimatorConfig, Sigma2Source};
use rxdf_core::omega::{omega_n, reference_optimism};
use rxdf_core::predictors::{fit, PredictorSpec};

#[test]
fn least_squares_report_recovers_dimension() {
    let gen = GeneratorSpec::linear_ar1(80, 10, 0.5, 1.0);
    let cfg = EstimatorConfig::new(400, 17).with_test_size(400);
    let r = dof_report(&gen, &PredictorSpec::LeastSquares, &cfg).unwrap();
    assert!((r.df_fixed - 10.0).abs() < 1e-8);
    assert!((r.df_emergent - 10.0).abs() <= 3.0 * r.uncertainty.df_emergent);
    assert!((r.df_intrinsic - 10.0).abs() <= 3.0 * r.uncertainty.df_intrinsic);
    assert_eq!(r.df_bias, r.df_emergent - r.df_intrinsic);
}

#[test]
fn omega_inverts_reference() {
    for d in [0.0, 1.0, 7.5, 40.0] {
        let x = reference_optimism(d, 50, 1.0).unwrap();
        assert!((omega_n(x, 50).unwrap() - d).abs() < 1e-9);
    }
}

#[test]
fn proxy_sigma_is_used_for_intrinsic_pass() {
    let gen = GeneratorSpec::nonlinear_ar1(60, 20);
    let cfg = EstimatorConfig::new(30, 2)
        .with_test_size(300)
        .with_sigma2(Sigma2Source::Proxy { grid: vec![] });
    let r = dof_report(&gen, &PredictorSpec::Ridge { lambda: 0.1 }, &cfg).unwrap();
    assert_eq!(r.sigma2_used, r.emergent.err_r);
}

#[test]
fn fitted_model_from_generated_data() {
    let data = generate(&GeneratorSpec::sparse_linear(50, 8, 3), 4).unwrap();
    let m = fit(&PredictorSpec::Lasso { lambda: 0.5 }, &data, 0).unwrap();
    assert!(m.nonzero_count().unwrap() <= 8);
    assert_eq!(m.predict(&data.features).len(), 50);
}

#[test]
fn decomposition_identity_on_simulated_grid() {
    let gen = GeneratorSpec::nonlinear_ar1(50, 15);
    let cfg = EstimatorConfig::new(25, 9).with_test_size(300);
    let g = scenario_grid(&gen, &PredictorSpec::Knn { k: 5 }, &ShiftSpec::default(), &cfg).unwrap();
    let a = shapley_attribution(&g);
    assert_eq!(a.base + a.phi_bias + a.phi_cov, a.total);
    assert_eq!(a.total - a.base - a.phi_bias - a.phi_cov, 0.0);
}
