use milne_core::dispersion::build_theta_table;
use milne_core::dom_oracle::{extract_k0, operator_residual, solve};
use milne_core::rh_solver::v1_coefficient;
use milne_core::{AlphaModel, DomConfig, DomGrid, Error, GridSpec};

fn run(alpha: f64, cfg: &DomConfig, k: f64) -> milne_core::Result<milne_core::DomResult> {
    let m = AlphaModel::new(alpha).unwrap();
    let g = DomGrid::new(&m, cfg)?;
    solve(&m, &g, cfg, k)
}

#[test]
fn grid_rules_are_normalized() {
    let m = AlphaModel::new(1.0).unwrap();
    let g = DomGrid::new(&m, &DomConfig::default()).unwrap();
    assert_eq!(g.v_nodes.len(), 32);
    assert_eq!(g.w_nodes.len(), 48);
    assert!((g.v_weights.iter().sum::<f64>() - 2.0).abs() <= 1e-12);
    assert!(g.v_weights.iter().chain(&g.w_weights).all(|w| *w > 0.0));
    assert!(g.w_nodes.iter().all(|w| *w > 0.0 && *w < 30.0));
    assert_eq!(g.cells(), 600);
    assert!((g.x_nodes[1] - 1e-3).abs() < 1e-15 && (g.x_nodes[600] - 30.0).abs() < 1e-12);
}

#[test]
fn discrete_modes_survive_a_sweep() {
    for alpha in [0.0, 1.0, 2.0] {
        let m = AlphaModel::new(alpha).unwrap();
        let g = DomGrid::new(&m, &DomConfig::default()).unwrap();
        assert!(operator_residual(&g, |_, _, _| 1.0) <= 1e-10);
        let r = operator_residual(&g, move |x, v, w| x - v / w.powf(alpha));
        assert!(r <= 1e-10, "alpha {alpha}: {r}");
    }
}

#[test]
fn zero_gradient_gives_zero_state() {
    let r = run(0.5, &DomConfig::default(), 0.0).unwrap();
    assert_eq!(r.k0_extracted, 0.0);
    assert!(r.phi.iter().flatten().all(|p| *p == 0.0));
}

#[test]
fn intercept_at_zero_exponent() {
    let cfg = DomConfig::default();
    let r = run(0.0, &cfg, 1.0).unwrap();
    assert!(r.residual <= cfg.tol);
    assert!(r.fit.r_squared >= 0.9999);
    assert!((r.k0_extracted - 0.7104).abs() <= 0.02 * 0.7104);
    // Energy balance of the collision term holds by construction of S.
    assert!(r.energy_defect <= cfg.tol);
    // S increases outside the wall layer.
    let start = r.x_nodes.iter().position(|x| *x >= 1.0).unwrap();
    assert!(r.source[start..].windows(2).all(|p| p[1] > p[0]));
}

#[test]
fn intercept_agrees_with_the_analytic_coefficient() {
    for alpha in [0.5, 1.0] {
        let m = AlphaModel::new(alpha).unwrap();
        let v1 = v1_coefficient(&m, &build_theta_table(&m, &GridSpec::default()).unwrap()).unwrap().value;
        let r = run(alpha, &DomConfig::default(), 1.0).unwrap();
        let gap = (r.k0_extracted - v1).abs() / v1;
        assert!(gap <= 0.02, "alpha {alpha}: {} vs {v1}", r.k0_extracted);
    }
}

#[test]
fn angular_refinement_converges_at_least_quadratically() {
    let k: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| run(0.0, &DomConfig { angles_per_half: n, ..DomConfig::default() }, 1.0).unwrap().k0_extracted)
        .collect();
    let (d1, d2) = ((k[1] - k[0]).abs(), (k[2] - k[1]).abs());
    assert!(d2 * 4.0 <= d1, "{k:?}");
}

#[test]
fn one_iteration_is_not_enough() {
    let cfg = DomConfig { max_iter: 1, ..DomConfig::default() };
    assert!(matches!(run(0.0, &cfg, 1.0), Err(Error::Convergence { .. })));
}

#[test]
fn extraction_examples() {
    let x: Vec<f64> = (0..=300).map(|i| i as f64 * 0.1).collect();
    let line: Vec<f64> = x.iter().map(|x| 0.7 + x).collect();
    let fit = extract_k0(&x, &line, (18.0, 27.0), 1.0).unwrap();
    assert!((fit.intercept - 0.7).abs() < 1e-12);
    // Deterministic ±1e−6 perturbation.
    let noisy: Vec<f64> =
        x.iter().enumerate().map(|(i, x)| 0.7 + x + 1e-6 * ((i as f64 * 12.9898).sin() * 43_758.545).fract()).collect();
    let fit = extract_k0(&x, &noisy, (18.0, 27.0), 1.0).unwrap();
    assert!((fit.intercept - 0.7).abs() <= 1e-5);
    // A boundary-layer profile is not a line.
    let layer: Vec<f64> = x.iter().map(|x| 0.7 + x - 0.5 * (-x / 0.3f64).exp()).collect();
    assert!(matches!(extract_k0(&x, &layer, (0.0, 1.5), 1.0), Err(Error::Extraction { .. })));
}
