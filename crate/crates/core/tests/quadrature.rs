use std::f64::consts::PI;

use milne_core::quadrature::{gauss_rule, integrate, pv_integral, PvIntegrand, QuadConfig, Quadrature};
use proptest::prelude::*;

#[test]
fn one_and_two_point_rules() {
    let r = gauss_rule(1).unwrap();
    assert_eq!(r.nodes, vec![0.0]);
    assert!((r.weights[0] - 2.0).abs() < 1e-15);
    // P₂ = (3τ² − 1)/2 vanishes at ±1/√3; both weights are 1 by symmetry
    // and ∫1 = 2.
    let r = gauss_rule(2).unwrap();
    let t = 1.0 / 3f64.sqrt();
    assert!((r.nodes[0] + t).abs() < 1e-15 && (r.nodes[1] - t).abs() < 1e-15);
    assert!(r.weights.iter().all(|w| (w - 1.0).abs() < 1e-15));
}

#[test]
fn degree_126_is_exact_for_64_points() {
    let r = gauss_rule(64).unwrap();
    let v: f64 = r.apply(&|t: f64| t.powi(126), -1.0, 1.0);
    assert!((v - 2.0 / 127.0).abs() < 1e-12);
}

#[test]
fn gauss_weights_positive_and_nodes_increasing() {
    for n in [3, 17, 64, 128] {
        let r = gauss_rule(n).unwrap();
        assert!(r.weights.iter().all(|w| *w > 0.0));
        assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
    }
}

#[test]
fn adaptive_examples() {
    assert!((integrate(|_| 1.0, 0.0, 1.0, 1e-12).unwrap() - 1.0).abs() < 1e-15);
    let l0 = integrate(|w: f64| w.powi(4) * w.exp() / (w.exp() - 1.0).powi(2), 1e-300, 80.0, 1e-12).unwrap();
    assert!((l0 - 4.0 * PI.powi(4) / 15.0).abs() < 1e-10 * l0);
    let log = integrate(|t: f64| -t.ln(), 0.0, 1.0, 1e-10).unwrap();
    assert!((log - 1.0).abs() < 1e-10);
}

#[test]
fn principal_value_examples() {
    let flat = pv_integral(&PvIntegrand::new(|_| 1.0, 1.0, 0.0, 2.0), 1e-12).unwrap();
    assert!(flat.abs() < 1e-14);
    let odd = pv_integral(&PvIntegrand::new(|t| t, 0.0, -1.0, 1.0), 1e-12).unwrap();
    assert!((odd - 2.0).abs() < 1e-13);
    // τ²/(τ − 1) = τ + 1 + 1/(τ − 1); the last term is odd about the pole.
    let quad = pv_integral(&PvIntegrand::new(|t| t * t, 1.0, 0.0, 2.0), 1e-12).unwrap();
    assert!((quad - 4.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn principal_value_is_linear(
        c in prop::collection::vec(-2.0f64..2.0, 8),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        pole in 0.05f64..0.95,
    ) {
        let f = |t: f64| c[0] + t * (c[1] + t * (c[2] + t * c[3]));
        let g = |t: f64| c[4] + t * (c[5] + t * (c[6] + t * c[7]));
        let pv = |h: &dyn Fn(f64) -> f64| pv_integral(&PvIntegrand::new(h, pole, 0.0, 1.0), 1e-13).unwrap();
        let lhs = pv(&|t| a * f(t) + b * g(t));
        let rhs = a * pv(&f) + b * pv(&g);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn doubling_base_order_is_invisible(k in 0.1f64..5.0, s in 0.1f64..3.0) {
        let f = |x: f64| (k * x).cos() * (-s * x).exp();
        let q1 = Quadrature::new(QuadConfig { order: 32, max_depth: 12 }).unwrap();
        let q2 = Quadrature::new(QuadConfig { order: 64, max_depth: 12 }).unwrap();
        let a: f64 = q1.integrate(f, 0.0, 10.0, 1e-13).unwrap();
        let b: f64 = q2.integrate(f, 0.0, 10.0, 1e-13).unwrap();
        prop_assert!((a - b).abs() <= 1e-11 * (1.0 + b.abs()));
    }
}
