use milne_core::dispersion::{build_theta_table, index_kappa, lambda_boundary};
use milne_core::dom_oracle::{self, DomConfig, DomGrid};
use milne_core::field::{boundary_residual, MilneSolution};
use milne_core::rh_solver::{v1_coefficient, FactorizationData};
use milne_core::saddle::{saddle_root, saddle_root_approx, v1_saddle};
use milne_core::{AlphaModel, DispersionTable, Error, GridSpec, V1Estimate};
use rayon::prelude::*;

use crate::acceptance;
use crate::config::{Format, RunConfig};
use crate::envelope::{Digits, Envelope, Table, Uncertainty};
use crate::CliError;

/// Text to write plus whether the run counts as a success.
#[derive(Debug)]
pub struct Output {
    pub envelope: Envelope,
    pub body: String,
    pub ok: bool,
}

impl Output {
    fn from_envelope(envelope: Envelope, format: Format) -> Self {
        let body = match format {
            Format::Csv => envelope.to_csv(),
            Format::Json => envelope.to_json(),
        };
        Output { envelope, body, ok: true }
    }
}

fn compute(context: impl Into<String>) -> impl FnOnce(Error) -> CliError {
    let context = context.into();
    move |e| match e {
        Error::Config(msg) => CliError::Usage(format!("{context}: {msg}")),
        e => CliError::Compute(format!("{context}: {e}")),
    }
}

fn model(alpha: f64) -> Result<AlphaModel, CliError> {
    AlphaModel::new(alpha).map_err(|e| CliError::Usage(format!("alpha = {alpha}: {e}")))
}

fn table(m: &AlphaModel, nodes: usize) -> Result<DispersionTable, CliError> {
    build_theta_table(m, &GridSpec::Auto { nodes }).map_err(compute(format!("theta table for alpha = {}", m.alpha())))
}

/// Exact `V₁`, or `None` with a diagnostic when the integral diverges.
fn exact_v1(m: &AlphaModel, t: &DispersionTable, env: &mut Envelope) -> Result<Option<V1Estimate>, CliError> {
    match v1_coefficient(m, t) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Divergence { detail, .. }) => {
            env.warn(format!(
                "v1_exact: integral diverges for alpha = {} ({detail}); only the saddle-point value is reported",
                m.alpha()
            ));
            Ok(None)
        }
        Err(e) => Err(compute("v1")(e)),
    }
}

pub fn cmd_v1(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut env = Envelope::new("v1", cfg);
    let m = model(cfg.alpha)?;
    let t = table(&m, cfg.nodes)?;
    let exact = exact_v1(&m, &t, &mut env)?;
    let v0 = if cfg.alpha == 0.0 {
        exact.expect("alpha = 0 converges")
    } else {
        let m0 = model(0.0)?;
        v1_coefficient(&m0, &table(&m0, cfg.nodes)?).map_err(compute("v1 at alpha = 0"))?
    };
    let w = saddle_root(cfg.alpha, cfg.tol).map_err(compute("saddle root"))?;
    let w_approx = saddle_root_approx(cfg.alpha).map_err(compute("saddle root approximation"))?;
    let tilde = v1_saddle(cfg.alpha, v0.value).map_err(compute("saddle coefficient"))?;
    let scale = tilde / v0.value;

    if let Some(v) = exact {
        env.put("v1_exact", v.value, Uncertainty::Estimate(v.error));
        env.put("v1_table", v.table_value, Uncertainty::Estimate(v.error));
        let gap = (tilde - v.value) / v.value;
        env.put("v1_gap", gap, Uncertainty::Estimate((1.0 + gap.abs()) * (v.error + scale * v0.error) / v.value));
    }
    env.put("v1_saddle", tilde, Uncertainty::Estimate(scale * v0.error));
    env.put("omega0", w, Uncertainty::Estimate(cfg.tol));
    env.put("omega0_approx", w_approx, Uncertainty::Exact);
    env.put("omega0_gap", (w_approx - w).abs() / w, Uncertainty::Estimate(cfg.tol / w));
    Ok(Output::from_envelope(env, cfg.format))
}

pub fn cmd_dispersion(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut env = Envelope::new("dispersion", cfg);
    let m = model(cfg.alpha)?;
    let t = table(&m, cfg.nodes)?;
    let kappa = index_kappa(&t).map_err(compute("index"))?;
    env.put("kappa", kappa as f64, Uncertainty::Exact);
    env.put("mu_max", t.mu_max(), Uncertainty::Exact);
    match t.tail() {
        Some(tail) => {
            let expected = (cfg.alpha - 3.0) / cfg.alpha;
            env.put("tail_exponent", tail.exponent, Uncertainty::Estimate((tail.exponent - expected).abs()));
        }
        None if t.slit_end().is_none() => env.warn("no algebraic tail could be fitted"),
        None => {}
    }

    let mut out = Table::new(vec!["mu", "lambda_real", "im_plus", "theta"], Digits::Full);
    let samples = match &cfg.grid_mu {
        None => t.samples().to_vec(),
        Some(g) => {
            if let Some(mu) = g.iter().find(|mu| **mu <= 0.0) {
                return Err(CliError::Usage(format!("dispersion grid needs positive mu, got {mu}")));
            }
            g.par_iter()
                .map(|&mu| lambda_boundary(&m, mu).map_err(compute(format!("boundary values at mu = {mu}"))))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    out.rows = samples.iter().map(|s| vec![s.mu, s.lambda_real, s.im_plus, s.theta]).collect();
    env.table = Some(out);
    Ok(Output::from_envelope(env, cfg.format))
}

const PROFILE_X: [f64; 7] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];

fn slit_probe() -> Vec<f64> {
    (1..50).map(|i| i as f64 / 50.0).collect()
}

pub fn cmd_profile(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut env = Envelope::new("profile", cfg);
    let m = model(cfg.alpha)?;
    let t = table(&m, cfg.nodes)?;
    let v1 = exact_v1(&m, &t, &mut env)?.ok_or_else(|| {
        CliError::Compute(format!(
            "profile: the expansion needs a finite V1, which does not exist for alpha = {}",
            cfg.alpha
        ))
    })?;
    let f = FactorizationData::from_parts(t, v1, m.l0(), cfg.k).map_err(compute("factorization"))?;
    let sol = MilneSolution::new(m, f).map_err(compute("spectrum"))?;

    let xs = cfg.grid_x.clone().unwrap_or_else(|| PROFILE_X.to_vec());
    let mus = cfg.grid_mu.clone().unwrap_or_else(|| (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect());
    let points: Vec<(f64, f64)> = xs.iter().flat_map(|&x| mus.iter().map(move |&mu| (x, mu))).collect();
    let values = points
        .par_iter()
        .map(|&(x, mu)| sol.evaluate(x, mu).map_err(compute(format!("profile at x = {x}, mu = {mu}"))))
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = Table::new(vec!["x", "mu", "phi", "asymptote"], Digits::Shortest);
    out.rows =
        points.iter().zip(&values).map(|(&(x, mu), &phi)| vec![x, mu, phi, sol.k0() + cfg.k * (x - mu)]).collect();

    let wall: Vec<f64> = mus.iter().copied().filter(|mu| *mu > 0.0).collect();
    let wall = if wall.is_empty() { slit_probe() } else { wall };
    let residual = boundary_residual(&sol, &wall).map_err(compute("boundary residual"))?;
    let err = cfg.k.abs() * v1.error;
    env.put("k0", sol.k0(), Uncertainty::Estimate(err));
    env.put("v1", v1.value, Uncertainty::Estimate(v1.error));
    env.put("boundary_residual", residual, Uncertainty::Estimate(err));
    env.table = Some(out);
    Ok(Output::from_envelope(env, cfg.format))
}

pub fn cmd_oracle(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut env = Envelope::new("oracle", cfg);
    let m = model(cfg.alpha)?;
    let dom = DomConfig {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        angles_per_half: cfg.angles,
        cells: cfg.cells,
        ..DomConfig::default()
    };
    let grid = DomGrid::new(&m, &dom).map_err(compute("discrete-ordinates grid"))?;
    if let Some(w) = grid.optical_depth_warning() {
        env.warn(w);
    }
    let r = dom_oracle::solve(&m, &grid, &dom, cfg.k).map_err(|e| {
        let advice = match e {
            Error::Convergence { .. } => {
                "; raise --max-iter or loosen --tol (for alpha > 1 the transient decays slowly)"
            }
            Error::Extraction { .. } => "; refine the grid with --cells or --angles",
            _ => "",
        };
        CliError::Compute(format!("discrete ordinates: {e}{advice}"))
    })?;
    for w in &r.warnings {
        if !env.diagnostics.contains(w) {
            env.warn(w.clone());
        }
    }

    let t = table(&m, cfg.nodes)?;
    let (v1, v1_err) = match exact_v1(&m, &t, &mut env)? {
        Some(v) => (v.value, v.error),
        None => {
            let m0 = model(0.0)?;
            let v0 = v1_coefficient(&m0, &table(&m0, cfg.nodes)?).map_err(compute("v1 at alpha = 0"))?;
            let s = v1_saddle(cfg.alpha, v0.value).map_err(compute("saddle coefficient"))?;
            env.warn("reference is the saddle-point coefficient");
            (s, s / v0.value * v0.error)
        }
    };
    let reference = v1 * cfg.k;
    let gap = if reference == 0.0 {
        (r.k0_extracted - reference).abs()
    } else {
        (r.k0_extracted - reference).abs() / reference.abs()
    };
    let mid = 0.5 * (r.fit_window.0 + r.fit_window.1);
    // Slope error times the lever arm back to the wall.
    let fit_err = (r.fit.slope - cfg.k).abs() * mid + r.residual;
    env.put("k0_extracted", r.k0_extracted, Uncertainty::Estimate(fit_err));
    env.put("reference", reference, Uncertainty::Estimate(cfg.k.abs() * v1_err));
    env.put("gap", gap, Uncertainty::Estimate(fit_err / reference.abs().max(1.0)));
    env.put("iterations", r.iterations as f64, Uncertainty::Exact);
    env.put("residual", r.residual, Uncertainty::Exact);
    env.put("energy_defect", r.energy_defect, Uncertainty::Exact);
    env.put("r_squared", r.fit.r_squared, Uncertainty::Exact);
    Ok(Output::from_envelope(env, cfg.format))
}

/// Runs the acceptance suite; `ok` is false if any criterion fails.
pub fn cmd_validate(cfg: &RunConfig) -> Result<Output, CliError> {
    let results = acceptance::run_suite(&cfg.fixture);
    let mut env = Envelope::new("validate", cfg);
    for r in &results {
        env.put(&format!("criterion_{:02}", r.id), if r.passed { 1.0 } else { 0.0 }, Uncertainty::Exact);
        env.diagnostics.push(r.line());
    }
    let ok = results.iter().all(|r| r.passed);
    let body = match cfg.format {
        Format::Csv => acceptance::to_csv(&results),
        Format::Json => env.to_json(),
    };
    // Diagnostics carry the table; they are not warnings here.
    let envelope = Envelope { diagnostics: Vec::new(), ..env };
    Ok(Output { envelope, body, ok })
}
