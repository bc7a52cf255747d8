use std::f64::consts::PI;

use milne_core::dispersion::{build_theta_table, lambda_boundary, Side};
use milne_core::field::MilneSolution;
use milne_core::quadrature::QuadConfig;
use milne_core::rh_solver::{
    auxiliary_closed_form, n_coefficient, n_jump, n_table, v1_coefficient, v_transform, x_boundary, x_factor,
};
use milne_core::saddle::v1_via_surrogate;
use milne_core::{AlphaModel, Complex64, FactorizationData, GridSpec};

fn factorization(alpha: f64, k: f64) -> (AlphaModel, FactorizationData) {
    let m = AlphaModel::new(alpha).unwrap();
    let t = build_theta_table(&m, &GridSpec::default()).unwrap();
    let f = FactorizationData::new(&m, t, k).unwrap();
    (m, f)
}

/// π − arg λ⁺ for the Case function on the slit.
fn case_deficit(t: f64) -> f64 {
    let re = 1.0 - t * t.atanh();
    let im = 0.5 * PI * t;
    im.atan2(-re)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn jump_coefficient_at_zero_exponent() {
    let (_, f) = factorization(0.0, 1.0);
    let v = f.v1_estimate();
    assert!((v.value - 0.71045).abs() <= 5e-5, "{v:?}");
    assert!(v.error < 5e-5);
    let surrogate = v1_via_surrogate(0.0, &GridSpec::default()).unwrap();
    assert!((surrogate.value - v.value).abs() < 1e-12);
}

#[test]
fn jump_coefficient_is_stable_under_refinement() {
    let m = AlphaModel::new(0.0).unwrap();
    let coarse = build_theta_table(&m, &GridSpec::Auto { nodes: 800 }).unwrap();
    let fine = build_theta_table(&m, &GridSpec::Auto { nodes: 1600 }).unwrap();
    let a = v1_coefficient(&m, &coarse).unwrap();
    let b = v1_coefficient(&m, &fine).unwrap();
    assert!((a.value - b.value).abs() <= 1e-6);
    assert!((a.table_value - b.table_value).abs() <= 1e-6);
    let doubled = AlphaModel::with_config(0.0, 80.0, QuadConfig { order: 128, max_depth: 30 }).unwrap();
    let c = v1_coefficient(&doubled, &build_theta_table(&doubled, &GridSpec::default()).unwrap()).unwrap();
    assert!((b.value - c.value).abs() <= 1e-6);
}

#[test]
fn transform_at_minus_one_matches_direct_quadrature() {
    let (_, f) = factorization(0.0, 1.0);
    // τ = 1 − e^{−s} flattens the logarithmic approach of D to zero at τ = 1.
    let oracle = -simpson(
        |s| {
            let t = 1.0 - (-s).exp();
            if t <= 0.0 {
                PI
            } else {
                case_deficit(t) / (t + 1.0) * (-s).exp()
            }
        },
        0.0,
        60.0,
        200_000,
    ) / PI;
    let v = v_transform(&f, Complex64::new(-1.0, 0.0)).unwrap();
    assert!(v.im.abs() < 1e-14);
    assert!((v.re - oracle).abs() < 1e-7, "{} vs {oracle}", v.re);
}

#[test]
fn transform_decays_like_its_first_moment() {
    let (_, f) = factorization(0.0, 1.0);
    for z in [Complex64::new(0.0, 1e6), Complex64::new(-1e6, 0.0), Complex64::new(6e5, -8e5)] {
        assert!(v_transform(&f, z).unwrap().norm() <= 2.0 * f.v1() / 1e6);
    }
}

#[test]
fn factor_symmetry_and_normalization() {
    for alpha in [0.0, 1.0] {
        let (_, f) = factorization(alpha, 1.0);
        let z = Complex64::new(0.7, 0.4);
        let (a, b) = (x_factor(&f, z).unwrap(), x_factor(&f, z.conj()).unwrap());
        assert!((a.conj() - b).norm() < 1e-14 * a.norm());
        let big = Complex64::new(3e7, 4e7);
        assert!((big * x_factor(&f, big).unwrap() - 1.0).norm() < 1e-6);
    }
}

#[test]
fn factorization_identity_at_point_three() {
    let (m, f) = factorization(0.0, 1.0);
    let (xp, xm) = x_boundary(&f, 0.3).unwrap();
    let s = lambda_boundary(&m, 0.3).unwrap();
    let lhs = xp / xm;
    let rhs = s.boundary_value(Side::Above) / s.boundary_value(Side::Below);
    let via_theta = Complex64::new(0.0, 2.0 * (f.table().theta(0.3) - PI)).exp();
    assert!((lhs - rhs).norm() < 1e-6);
    assert!((lhs - via_theta).norm() < 1e-12);
}

#[test]
fn factorization_identity_off_the_axis() {
    // Limits from z = μ ± iε against λ⁺/λ⁻ computed directly, on nodes
    // that are not in the table.
    let eps = 1e-9;
    for alpha in [0.0, 1.0] {
        let (m, f) = factorization(alpha, 1.0);
        let mus: Vec<f64> = if alpha == 0.0 {
            (0..50).map(|i| (i as f64 + 0.5) / 50.0).collect()
        } else {
            (0..50).map(|i| 1e-3 * 5e5f64.powf((i as f64 + 0.5) / 50.0)).collect()
        };
        let mut worst = 0.0f64;
        for mu in mus {
            let xp = x_factor(&f, Complex64::new(mu, eps)).unwrap();
            let xm = x_factor(&f, Complex64::new(mu, -eps)).unwrap();
            let s = lambda_boundary(&m, mu).unwrap();
            let r = s.boundary_value(Side::Above) / s.boundary_value(Side::Below);
            worst = worst.max((xp / xm - r).norm());
        }
        assert!(worst <= 1e-6, "alpha {alpha}: {worst}");
    }
}

#[test]
fn spectrum_vanishes_outside_the_slit_and_without_gradient() {
    let (_, f) = factorization(0.0, 1.0);
    for eta in [1.0, 1.5, 40.0] {
        assert_eq!(n_coefficient(&f, eta).unwrap().n_value, 0.0);
    }
    let (_, g) = factorization(1.0, 0.0);
    assert!(n_table(&g).unwrap().iter().all(|c| c.n_value == 0.0));
}

#[test]
fn jump_expression_is_real() {
    for alpha in [0.0, 1.0] {
        let (_, f) = factorization(alpha, 1.0);
        for eta in [0.01, 0.2, 0.7, 0.95] {
            let j = n_jump(&f, eta).unwrap();
            let n = n_coefficient(&f, eta).unwrap().n_value;
            assert!(j.im.abs() <= 1e-10 * j.re.abs(), "alpha {alpha}, eta {eta}: {j}");
            assert!((j.re - n).abs() <= 1e-10 * n.abs());
        }
    }
}

#[test]
fn auxiliary_function_is_reconstructed_from_the_spectrum() {
    let zs = [
        Complex64::new(0.5, 0.5),
        Complex64::new(-1.0, 0.1),
        Complex64::new(2.0, -3.0),
        Complex64::new(0.1, 0.01),
        Complex64::new(30.0, 5.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-10.0, 3.0),
        Complex64::new(0.9, -0.05),
        Complex64::new(-0.3, -2.0),
        Complex64::new(5.0, 0.5),
    ];
    for alpha in [0.0, 1.0] {
        let (m, f) = factorization(alpha, 1.0);
        let sol = MilneSolution::new(m, f).unwrap();
        for z in zs {
            let a = sol.auxiliary(z).unwrap();
            let b = auxiliary_closed_form(sol.factorization(), z).unwrap();
            assert!((a - b).norm() <= 1e-4 * b.norm(), "alpha {alpha}, z {z}");
        }
    }
}

#[test]
fn spectrum_and_intercept_are_linear_in_the_gradient() {
    let (_, f) = factorization(1.0, 1.0);
    let g = f.with_gradient(-2.5).unwrap();
    assert_eq!(f.v1(), g.v1());
    assert!((g.k0() + 2.5 * f.k0()).abs() < 1e-15);
    for eta in [0.01, 1.0, 50.0] {
        let a = n_coefficient(&f, eta).unwrap().n_value;
        let b = n_coefficient(&g, eta).unwrap().n_value;
        assert!((b + 2.5 * a).abs() <= 1e-14 * a.abs());
    }
}
