//! Acceptance suite behind `milne validate`.
//!
//! Reference constants live in [`Fixture`] so a run can be checked against
//! altered values. Reports carry no timings: a runtime budget only turns a
//! criterion into a failure.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::rc::Rc;
use std::time::{Duration, Instant};

use milne_core::dispersion::{build_theta_table, index_kappa, lambda_boundary, lambda_general, Side};
use milne_core::dom_oracle::{self, operator_residual, DomConfig, DomGrid};
use milne_core::field::{boundary_residual, mode_residual, DiscreteOperator, MilneSolution};
use milne_core::rh_solver::{v1_coefficient, x_factor, FactorizationData};
use milne_core::saddle::{saddle_root, saddle_root_approx, v1_saddle, DEFAULT_ROOT_TOL};
use milne_core::special_fn::moment_l0;
use milne_core::{AlphaModel, Complex64, DispersionTable, Error, GridSpec};
use serde::Serialize;

/// Published reference values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fixture {
    pub v1_zero: f64,
    pub omega0_zero: f64,
    pub omega0_two: f64,
    pub omega0_approx_zero: f64,
    pub omega0_approx_two: f64,
    pub v1_tilde_two: f64,
    pub kappa: f64,
}

impl Default for Fixture {
    fn default() -> Self {
        Fixture {
            v1_zero: 0.71045,
            omega0_zero: 3.83002,
            omega0_two: 5.96941,
            omega0_approx_zero: 3.85347,
            omega0_approx_two: 5.97025,
            v1_tilde_two: 0.01994,
            kappa: -1.0,
        }
    }
}

impl Fixture {
    pub fn is_default(&self) -> bool {
        *self == Fixture::default()
    }

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "v1_zero" => &mut self.v1_zero,
            "omega0_zero" => &mut self.omega0_zero,
            "omega0_two" => &mut self.omega0_two,
            "omega0_approx_zero" => &mut self.omega0_approx_zero,
            "omega0_approx_two" => &mut self.omega0_approx_two,
            "v1_tilde_two" => &mut self.v1_tilde_two,
            "kappa" => &mut self.kappa,
            _ => return None,
        })
    }

    pub fn has_key(key: &str) -> bool {
        Fixture::default().slot(key).is_some()
    }

    /// Sets a named constant; unknown names are ignored.
    pub fn set(&mut self, key: &str, value: f64) {
        if let Some(v) = self.slot(key) {
            *v = value;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn status(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn line(&self) -> String {
        format!("criterion {:>2} {:<22} {}  {}", self.id, self.name, self.status(), self.detail)
    }
}

pub const NAMES: [&str; 12] = [
    "jump-coefficient",
    "saddle-roots",
    "saddle-coefficient",
    "moment-oracle",
    "dispersion-reduction",
    "index",
    "factorization",
    "discrete-modes",
    "boundary-condition",
    "cross-method",
    "tail-law",
    "determinism",
];

/// Tables and `V₁(0)` shared between criteria of one run.
pub struct Context {
    fixture: Fixture,
    tables: RefCell<BTreeMap<u64, Rc<DispersionTable>>>,
    v1_zero: RefCell<Option<f64>>,
}

impl Context {
    pub fn new(fixture: &Fixture) -> Self {
        Context { fixture: fixture.clone(), tables: RefCell::new(BTreeMap::new()), v1_zero: RefCell::new(None) }
    }

    fn table(&self, alpha: f64) -> Result<Rc<DispersionTable>, Error> {
        if let Some(t) = self.tables.borrow().get(&alpha.to_bits()) {
            return Ok(t.clone());
        }
        let t = Rc::new(build_theta_table(&AlphaModel::new(alpha)?, &GridSpec::default())?);
        self.tables.borrow_mut().insert(alpha.to_bits(), t.clone());
        Ok(t)
    }

    fn v1(&self, alpha: f64) -> Result<f64, Error> {
        if alpha == 0.0 {
            if let Some(v) = *self.v1_zero.borrow() {
                return Ok(v);
            }
        }
        let v = v1_coefficient(&AlphaModel::new(alpha)?, &*self.table(alpha)?)?.value;
        if alpha == 0.0 {
            *self.v1_zero.borrow_mut() = Some(v);
        }
        Ok(v)
    }
}

type Check = Result<(bool, String), Error>;

fn within_budget(start: Instant, budget: Duration, passed: bool, detail: String) -> (bool, String) {
    if start.elapsed() > budget {
        (false, format!("{detail}; runtime budget of {} s exceeded", budget.as_secs()))
    } else {
        (passed, detail)
    }
}

fn c01(cx: &Context) -> Check {
    let start = Instant::now();
    let v = cx.v1(0.0)?;
    let passed = (v - cx.fixture.v1_zero).abs() <= 5e-5;
    Ok(within_budget(
        start,
        Duration::from_secs(10),
        passed,
        format!("V1(0) = {v:.7} vs {} +- 5e-5", cx.fixture.v1_zero),
    ))
}

fn c02(cx: &Context) -> Check {
    let start = Instant::now();
    let f = &cx.fixture;
    let pairs = [
        (saddle_root(0.0, DEFAULT_ROOT_TOL)?, f.omega0_zero),
        (saddle_root(2.0, DEFAULT_ROOT_TOL)?, f.omega0_two),
        (saddle_root_approx(0.0)?, f.omega0_approx_zero),
        (saddle_root_approx(2.0)?, f.omega0_approx_two),
    ];
    let worst = pairs.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let detail = format!(
        "roots {:.5} {:.5}, approximations {:.5} {:.5}; worst deviation {worst:.1e}",
        pairs[0].0, pairs[1].0, pairs[2].0, pairs[3].0
    );
    Ok(within_budget(start, Duration::from_secs(1), worst <= 1e-5, detail))
}

fn c03(cx: &Context) -> Check {
    let v = v1_saddle(2.0, cx.v1(0.0)?)?;
    let passed = (v - cx.fixture.v1_tilde_two).abs() <= 1e-5;
    Ok((passed, format!("V1~(2) = {v:.6} vs {} +- 1e-5", cx.fixture.v1_tilde_two)))
}

/// `Γ(p + 5) ζ(p + 4)` from an independent special-function library.
fn moment_reference(p: f64) -> f64 {
    spfunc::gamma::gamma(p + 5.0) * spfunc::zeta::zeta(p + 4.0)
}

fn c04(_: &Context) -> Check {
    let mut worst = 0.0f64;
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        let r = moment_reference(alpha);
        worst = worst.max((moment_l0(alpha)? - r).abs() / r);
        worst = worst.max((AlphaModel::new(alpha)?.l0() - r).abs() / r);
    }
    Ok((worst <= 1e-10, format!("worst relative error {worst:.1e} (limit 1e-10)")))
}

/// `1 + (z/2) ln((z − 1)/(z + 1))`.
fn case_log_form(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    one + z * 0.5 * ((z - one) / (z + one)).ln()
}

fn c05(_: &Context) -> Check {
    let m0 = AlphaModel::new(0.0)?;
    let mut reduction = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let re = -4.0 + 8.0 * i as f64 / 9.0;
            let im = if j < 5 { 0.05 + 0.6 * j as f64 } else { -0.05 - 0.6 * (j - 5) as f64 };
            let z = Complex64::new(re, im);
            reduction = reduction.max((lambda_general(&m0, z)? - case_log_form(z)).norm());
        }
    }
    let z = Complex64::new(0.0, 1e3);
    let mut passed = reduction <= 1e-12;
    let mut detail = format!("reduction {reduction:.1e} (limit 1e-12); second-order zero");
    for alpha in [0.0, 1.0, 2.0] {
        let m = AlphaModel::new(alpha)?;
        let target = -m.l0_neg().ok_or(Error::Domain { what: "l0(-alpha)", value: -alpha })? / (3.0 * m.l0());
        let rel = (z * z * lambda_general(&m, z)? - target).norm() / target.abs();
        passed &= rel <= 1e-6;
        write!(detail, " alpha={alpha}: {rel:.1e}").unwrap();
    }
    detail.push_str(" (limit 1e-6)");
    Ok((passed, detail))
}

fn c06(cx: &Context) -> Check {
    let mut found = Vec::new();
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        found.push(index_kappa(&*cx.table(alpha)?)?);
    }
    let passed = found.iter().all(|k| *k as f64 == cx.fixture.kappa);
    Ok((passed, format!("kappa {found:?} for alpha 0, 0.5, 1, 2")))
}

fn c07(cx: &Context) -> Check {
    let eps = 1e-9;
    let mut passed = true;
    let mut detail = String::from("max |X+/X- - l+/l-|");
    for alpha in [0.0, 1.0] {
        let m = AlphaModel::new(alpha)?;
        let f = FactorizationData::new(&m, (*cx.table(alpha)?).clone(), 1.0)?;
        let mus: Vec<f64> = if alpha == 0.0 {
            (0..50).map(|i| (i as f64 + 0.5) / 50.0).collect()
        } else {
            (0..50).map(|i| 1e-3 * 5e5f64.powf((i as f64 + 0.5) / 50.0)).collect()
        };
        let mut worst = 0.0f64;
        for mu in mus {
            let ratio = x_factor(&f, Complex64::new(mu, eps))? / x_factor(&f, Complex64::new(mu, -eps))?;
            let s = lambda_boundary(&m, mu)?;
            worst = worst.max((ratio - s.boundary_value(Side::Above) / s.boundary_value(Side::Below)).norm());
        }
        passed &= worst <= 1e-6;
        write!(detail, " alpha={alpha}: {worst:.1e}").unwrap();
    }
    detail.push_str(" (limit 1e-6)");
    Ok((passed, detail))
}

fn c08(_: &Context) -> Check {
    let mut worst = 0.0f64;
    let xs = [0.0, 0.1, 1.0, 7.5, 30.0];
    let mus = [-1.0, -0.37, 0.0, 0.01, 0.5, 1.0, 4.0];
    for alpha in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let m = AlphaModel::new(alpha)?;
        worst = worst.max(mode_residual(&DiscreteOperator::new(&m, 32, 48)?, &xs, &mus));
        let g = DomGrid::new(&m, &DomConfig::default())?;
        worst = worst.max(operator_residual(&g, |_, _, _| 1.0));
        worst = worst.max(operator_residual(&g, move |x, v, w| x - v / w.powf(alpha)));
    }
    Ok((worst <= 1e-10, format!("worst residual {worst:.1e} (limit 1e-10)")))
}

fn c09(_: &Context) -> Check {
    let grid: Vec<f64> = (1..50).map(|i| i as f64 / 50.0).collect();
    let mut r = Vec::new();
    for nodes in [100, 400, 1600] {
        let sol = MilneSolution::solve(AlphaModel::new(0.0)?, 1.0, &GridSpec::Auto { nodes })?;
        r.push(boundary_residual(&sol, &grid)?);
    }
    let passed = r[2] <= 1e-3 && r[0] > r[1] && r[1] > r[2];
    Ok((passed, format!("residual {:.1e} / {:.1e} / {:.1e} at 100 / 400 / 1600 nodes", r[0], r[1], r[2])))
}

fn c10(cx: &Context) -> Check {
    let start = Instant::now();
    let cfg = DomConfig::default();
    let mut passed = true;
    let mut detail = String::from("relative gap");
    for alpha in [0.0, 0.5, 1.0] {
        let m = AlphaModel::new(alpha)?;
        let r = dom_oracle::solve(&m, &DomGrid::new(&m, &cfg)?, &cfg, 1.0)?;
        let v1 = cx.v1(alpha)?;
        let gap = (r.k0_extracted - v1).abs() / v1;
        passed &= gap <= 0.02;
        write!(detail, " alpha={alpha}: {gap:.2e}").unwrap();
    }
    detail.push_str(" (limit 2e-2)");
    Ok(within_budget(start, Duration::from_secs(120), passed, detail))
}

fn c11(cx: &Context) -> Check {
    let mut passed = true;
    let mut detail = String::from("tail exponent");
    for alpha in [0.5, 1.0] {
        let expected = (alpha - 3.0) / alpha;
        match cx.table(alpha)?.tail_exponent() {
            Some(p) => {
                passed &= (p - expected).abs() <= 0.1 * expected.abs();
                write!(detail, " alpha={alpha}: {p:.4} vs {expected}").unwrap();
            }
            None => {
                passed = false;
                write!(detail, " alpha={alpha}: no tail").unwrap();
            }
        }
    }
    let m2 = AlphaModel::new(2.0)?;
    let divergent = matches!(v1_coefficient(&m2, &*cx.table(2.0)?), Err(Error::Divergence { .. }));
    let tilde = v1_saddle(2.0, cx.v1(0.0)?)?;
    passed &= divergent && tilde.is_finite() && tilde > 0.0;
    write!(
        detail,
        "; alpha=2 {}, saddle value {tilde:.5}",
        if divergent { "flagged divergent" } else { "not flagged" }
    )
    .unwrap();
    Ok((passed, detail))
}

/// Digest of a representative set of parallel computations.
fn determinism_probe() -> Result<String, Error> {
    let mut s = String::new();
    let m = AlphaModel::new(0.5)?;
    let t = build_theta_table(&m, &GridSpec::Auto { nodes: 400 })?;
    for d in t.samples() {
        write!(s, "{:x}{:x}", d.lambda_real.to_bits(), d.theta.to_bits()).unwrap();
    }
    write!(s, "{:x}", v1_coefficient(&m, &t)?.value.to_bits()).unwrap();
    let m0 = AlphaModel::new(0.0)?;
    let cfg = DomConfig::default();
    let r = dom_oracle::solve(&m0, &DomGrid::new(&m0, &cfg)?, &cfg, 1.0)?;
    write!(s, "{:x}{:x}", r.k0_extracted.to_bits(), r.iterations).unwrap();
    for row in &r.phi {
        let sum: f64 = row.iter().sum();
        write!(s, "{:x}", sum.to_bits()).unwrap();
    }
    Ok(s)
}

fn c12(_: &Context) -> Check {
    let run = |n: usize| -> Result<String, Error> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Error::Config(e.to_string()))?;
        pool.install(determinism_probe)
    };
    let (a, b) = (run(1)?, run(8)?);
    Ok((a == b, format!("1 and 8 worker threads give {} results", if a == b { "identical" } else { "different" })))
}

const CHECKS: [fn(&Context) -> Check; 12] = [c01, c02, c03, c04, c05, c06, c07, c08, c09, c10, c11, c12];

/// Evaluates criterion `id` (1-based) in `cx`.
pub fn check_in(cx: &Context, id: u8) -> CriterionResult {
    let i = usize::from(id) - 1;
    let (passed, detail) = match CHECKS[i](cx) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, name: NAMES[i], passed, detail }
}

pub fn check(id: u8, fixture: &Fixture) -> CriterionResult {
    check_in(&Context::new(fixture), id)
}

pub fn run_suite(fixture: &Fixture) -> Vec<CriterionResult> {
    let cx = Context::new(fixture);
    (1..=12).map(|id| check_in(&cx, id)).collect()
}

pub fn to_csv(results: &[CriterionResult]) -> String {
    let mut out = String::from("criterion,name,status,detail\n");
    for r in results {
        writeln!(out, "{},{},{},\"{}\"", r.id, r.name, r.status(), r.detail.replace('"', "\"\"")).unwrap();
    }
    out
}
