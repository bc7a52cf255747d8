use milne_core::dispersion::{build_theta_table, lambda_case};
use milne_core::rh_solver::v1_coefficient;
use milne_core::saddle::{
    lambda_surrogate, saddle_residual, saddle_root, saddle_root_approx, v1_saddle, v1_via_surrogate, DEFAULT_ROOT_TOL,
};
use milne_core::{AlphaModel, Complex64, GridSpec, SaddleSummary};

#[test]
fn printed_roots() {
    assert!((saddle_root(0.0, DEFAULT_ROOT_TOL).unwrap() - 3.83002).abs() <= 1e-5);
    assert!((saddle_root(2.0, DEFAULT_ROOT_TOL).unwrap() - 5.96941).abs() <= 1e-5);
    assert!((saddle_root_approx(0.0).unwrap() - 3.85347).abs() <= 1e-5);
    assert!((saddle_root_approx(2.0).unwrap() - 5.97025).abs() <= 1e-5);
}

#[test]
fn root_satisfies_its_equation() {
    for alpha in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let w = saddle_root(alpha, DEFAULT_ROOT_TOL).unwrap();
        assert!(saddle_residual(alpha, w).abs() <= DEFAULT_ROOT_TOL);
        assert!(w > 0.0 && w < alpha + 4.0);
    }
}

#[test]
fn approximation_within_one_percent() {
    for alpha in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let s = SaddleSummary::new(alpha, 0.71045, None).unwrap();
        assert!(s.root_gap() <= 0.01, "alpha {alpha}: {}", s.root_gap());
    }
    let a = 1e3;
    assert!((saddle_root_approx(a).unwrap() / (a + 4.0) - 1.0).abs() < 1e-12);
}

#[test]
fn saddle_coefficient_at_two_uses_the_computed_exact_value() {
    let m = AlphaModel::new(0.0).unwrap();
    let v0 = v1_coefficient(&m, &build_theta_table(&m, &GridSpec::default()).unwrap()).unwrap().value;
    assert!((v1_saddle(2.0, v0).unwrap() - 0.01994).abs() <= 1e-5);
    assert_eq!(v1_saddle(0.0, v0).unwrap(), v0);
}

#[test]
fn saddle_coefficient_decreases_with_alpha() {
    let vals: Vec<f64> = (0..=30).map(|i| v1_saddle(i as f64 * 0.1, 0.71045).unwrap()).collect();
    assert!(vals.windows(2).all(|p| p[1] < p[0]));
}

#[test]
fn surrogate_examples() {
    let w = saddle_root(2.0, DEFAULT_ROOT_TOL).unwrap();
    let z = Complex64::new(0.0, 2.0);
    assert!((lambda_surrogate(2.0, w, z / (w * w)).unwrap() - lambda_case(z).unwrap()).norm() < 1e-14);
    let u = Complex64::new(0.4, -1.1);
    assert_eq!(lambda_surrogate(0.0, w, u).unwrap(), lambda_case(u).unwrap());
    assert_eq!(lambda_surrogate(2.0, w, Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
}

#[test]
fn generic_pipeline_reproduces_the_rescaling() {
    let m = AlphaModel::new(0.0).unwrap();
    let v0 = v1_coefficient(&m, &build_theta_table(&m, &GridSpec::default()).unwrap()).unwrap().value;
    for alpha in [0.5, 1.0, 2.0, 3.0] {
        let via = v1_via_surrogate(alpha, &GridSpec::default()).unwrap().value;
        let direct = v1_saddle(alpha, v0).unwrap();
        assert!((via - direct).abs() <= 1e-6, "alpha {alpha}: {via} vs {direct}");
    }
}
