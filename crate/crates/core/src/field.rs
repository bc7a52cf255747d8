//! The expanded solution
//!
//! `φ(x, μ) = K₀ + K(x − μ) + (1/2l₀) ∫₀^∞ e^{−x/η} η n(η)/(η − μ) dη
//!            + (λ(μ)/ξ(μ)) n(μ) e^{−x/μ}  (μ > 0)`
//!
//! and the checks that it satisfies the transport equation and the wall
//! condition.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use crate::dispersion::{build_theta_table, GridSpec};
use crate::interp::MonotoneCubic;
use crate::quadrature::{gauss_rule, Quadrature, QuadratureRule, WeightedRule};
use crate::rh_solver::{n_table, v_principal, FactorizationData, SpectrumCoefficient};
use crate::special_fn::AlphaModel;
use crate::{Error, Result};

const PANEL_ORDER: usize = 16;
const TAIL_TOL: f64 = 1e-12;
const SLIT_EDGE_OFFSET: f64 = 1e-9;

/// The two solutions carried by the double zero of λ at infinity:
/// `(1, x − μ)`.
pub fn discrete_modes(x: f64, mu: f64) -> (f64, f64) {
    (1.0, x - mu)
}

/// `η n(η) ≈ A η^q` beyond the last node.
#[derive(Clone, Copy, Debug, PartialEq)]
struct PowerTail {
    q: f64,
    a: f64,
    start: f64,
}

impl PowerTail {
    /// `∫₀¹ u^{−q−1} g(u) du`. With `u = v^m` the endpoint power becomes
    /// `v^{m(−q)−1}`, and `m` is chosen so that exponent is at least 3.
    fn unit_integral<G: Fn(f64) -> Complex64>(&self, g: G) -> Result<Complex64> {
        let p1 = -self.q;
        let m = (4.0 / p1).ceil().max(1.0);
        let e = m * p1 - 1.0;
        Quadrature::default().integrate(|v: f64| g(v.powf(m)) * (m * v.powf(e)), 0.0, 1.0, TAIL_TOL)
    }
}

/// Everything needed to evaluate φ(x, μ).
#[derive(Clone, Debug, PartialEq)]
pub struct MilneSolution {
    model: AlphaModel,
    factorization: FactorizationData,
    n_table: Vec<SpectrumCoefficient>,
    eta_n: MonotoneCubic,
    tail: Option<PowerTail>,
    rule: QuadratureRule,
}

/// φ split into its parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldValue {
    pub value: f64,
    /// `K₀ + K(x − μ)`.
    pub asymptote: f64,
    /// The η-integral term.
    pub continuum: f64,
    /// The point-spectrum term at `η = μ`.
    pub singular: f64,
}

impl MilneSolution {
    pub fn new(model: AlphaModel, factorization: FactorizationData) -> Result<Self> {
        let n_table = n_table(&factorization)?;
        Self::from_table(model, factorization, n_table)
    }

    /// Builds the θ table on `grid`, factorizes and tabulates `n`.
    pub fn solve(model: AlphaModel, k: f64, grid: &GridSpec) -> Result<Self> {
        let table = build_theta_table(&model, grid)?;
        let f = FactorizationData::new(&model, table, k)?;
        Self::new(model, f)
    }

    fn from_table(
        model: AlphaModel,
        factorization: FactorizationData,
        n_table: Vec<SpectrumCoefficient>,
    ) -> Result<Self> {
        if n_table.is_empty() {
            return Err(Error::Config("continuous-spectrum table is empty".into()));
        }
        let mut x = Vec::with_capacity(n_table.len() + 1);
        let mut y = Vec::with_capacity(n_table.len() + 1);
        x.push(0.0);
        y.push(0.0);
        for c in &n_table {
            x.push(c.eta);
            y.push(c.eta * c.n_value);
        }
        let eta_n = MonotoneCubic::new(x, y)?;
        let tail = if factorization.table().tail().is_some() { fit_power_tail(&n_table) } else { None };
        Ok(MilneSolution { model, factorization, n_table, eta_n, tail, rule: gauss_rule(PANEL_ORDER)? })
    }

    /// Copy with `n` negated; breaks the wall condition on purpose.
    pub fn with_negated_spectrum(&self) -> Result<Self> {
        let flipped = self.n_table.iter().map(|c| SpectrumCoefficient { eta: c.eta, n_value: -c.n_value }).collect();
        Self::from_table(self.model.clone(), self.factorization.clone(), flipped)
    }

    pub fn model(&self) -> &AlphaModel {
        &self.model
    }
    pub fn factorization(&self) -> &FactorizationData {
        &self.factorization
    }
    pub fn n_table(&self) -> &[SpectrumCoefficient] {
        &self.n_table
    }
    pub fn k(&self) -> f64 {
        self.factorization.k()
    }
    pub fn k0(&self) -> f64 {
        self.factorization.k0()
    }
    pub fn v1(&self) -> f64 {
        self.factorization.v1()
    }

    /// Upper end of the directions `μ > 0` at which φ can be evaluated.
    pub fn mu_max(&self) -> f64 {
        self.factorization.eta_max()
    }

    /// φ(x, μ).
    pub fn evaluate(&self, x: f64, mu: f64) -> Result<f64> {
        self.evaluate_parts(x, mu).map(|v| v.value)
    }

    pub fn evaluate_parts(&self, x: f64, mu: f64) -> Result<FieldValue> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Domain { what: "field evaluate x", value: x });
        }
        if !mu.is_finite() {
            return Err(Error::Domain { what: "field evaluate mu", value: mu });
        }
        if mu > 0.0 && !(mu < self.mu_max()) {
            return Err(Error::Range { what: "field evaluate mu", value: mu, lo: 0.0, hi: self.mu_max() });
        }
        // At the end of the slit the continuum and δ parts each diverge like
        // ln ln but their sum does not; take the limit from inside.
        let mu = match self.factorization.table().slit_end() {
            Some(s) if mu == s => s * (1.0 - SLIT_EDGE_OFFSET),
            _ => mu,
        };
        let k = self.k();
        let asymptote = self.k0() + k * (x - mu);
        let l0 = self.factorization.l0();
        let continuum = self.eta_integral(x, mu)? / (2.0 * l0);
        let singular = if mu > 0.0 && k != 0.0 {
            // (λ/ξ) n = −K μ e^{−Vp} cos θ wherever ξ > 0; with ξ = 0 the
            // direction is outside the spectrum.
            let d = self.factorization.table().deficit(mu);
            if d > 0.0 {
                let vp = v_principal(&self.factorization, mu)?;
                k * mu * (-vp).exp() * d.cos() * (-x / mu).exp()
            } else {
                0.0
            }
        } else {
            0.0
        };
        Ok(FieldValue { value: asymptote + continuum + singular, asymptote, continuum, singular })
    }

    /// `∫₀^∞ e^{−x/η} η n(η)/(η − μ) dη`, principal value for `μ > 0`.
    fn eta_integral(&self, x: f64, mu: f64) -> Result<f64> {
        let body = if x == 0.0 { self.eta_n.principal_value(mu) } else { self.damped_principal_value(x, mu) };
        let tail = match self.tail {
            Some(t) => {
                // η = B/u maps the tail onto (0, 1].
                let b = t.start;
                let v: f64 = t.unit_integral(|u| Complex64::new((-x * u / b).exp() / (1.0 - mu * u / b), 0.0))?.re;
                t.a * b.powf(t.q) * v
            }
            None => 0.0,
        };
        Ok(body + tail)
    }

    /// Panel Gauss rule with singularity subtraction at `μ`.
    fn damped_principal_value(&self, x: f64, mu: f64) -> f64 {
        let knots = self.eta_n.knots();
        let g = |eta: f64| {
            if eta <= 0.0 {
                0.0
            } else {
                (-x / eta).exp() * self.eta_n.eval(eta).unwrap_or(0.0)
            }
        };
        let (lo, hi) = (knots[0], knots[knots.len() - 1]);
        let inside = mu > lo && mu < hi;
        let base = if inside { g(mu) } else { 0.0 };
        let quotient = |t: f64| (g(t) - base) / (t - mu);
        let mut acc = 0.0;
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            if inside && mu > a && mu < b {
                acc += self.rule.apply(&quotient, a, mu) + self.rule.apply(&quotient, mu, b);
            } else {
                acc += self.rule.apply(&quotient, a, b);
            }
        }
        if inside {
            acc += base * ((hi - mu) / (mu - lo)).ln();
        }
        acc
    }

    /// `N(z) = ∫₀^∞ η n(η)/(η − z) dη` from the tabulated coefficient.
    pub fn auxiliary(&self, z: Complex64) -> Result<Complex64> {
        let mut v = self.eta_n.cauchy(z);
        if let Some(t) = self.tail {
            let b = t.start;
            let s = t.unit_integral(|u| Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - z * (u / b)))?;
            v += s * (t.a * b.powf(t.q));
        }
        Ok(v)
    }
}

fn fit_power_tail(n: &[SpectrumCoefficient]) -> Option<PowerTail> {
    let last = n[n.len() - 1];
    let pts: Vec<(f64, f64)> = n
        .iter()
        .filter(|c| c.eta >= last.eta / 10.0 && c.n_value != 0.0)
        .map(|c| (c.eta.ln(), (c.eta * c.n_value).abs().ln()))
        .collect();
    if pts.len() < 3 || last.n_value == 0.0 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let q = sxy / sxx;
    if !(q < 0.0) {
        return None;
    }
    let end_value = last.eta * last.n_value;
    Some(PowerTail { q, a: end_value / last.eta.powf(q), start: last.eta })
}

/// Largest `|φ(0, μ)|` over `grid`, divided by `|K|(1 + V₁)`; zero when
/// `K = 0`.
pub fn boundary_residual(sol: &MilneSolution, grid: &[f64]) -> Result<f64> {
    let k = sol.k();
    if k == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for &mu in grid {
        if !(mu > 0.0) {
            return Err(Error::Domain { what: "boundary residual grid", value: mu });
        }
        worst = worst.max(sol.evaluate(0.0, mu)?.abs());
    }
    Ok(worst / (k.abs() * (1.0 + sol.v1())))
}

/// Discretization of the transport operator
/// `μ ∂φ/∂x + φ − (1/2l₀) Σ_ω w_ω Σ_j a_j φ(x, ω^{−α} μ'_j)` with a
/// Gauss–Legendre rule in `μ'` and a Gauss rule for the weight
/// `ω^{α+4} E(ω)` normalized by its own total.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteOperator {
    alpha: f64,
    angles: QuadratureRule,
    freq: WeightedRule,
}

impl DiscreteOperator {
    pub fn new(model: &AlphaModel, n_angles: usize, n_freq: usize) -> Result<Self> {
        let angles = gauss_rule(n_angles)?;
        let freq =
            WeightedRule::from_weight(|w| model.spectral_weight(w), 0.0, model.omega_cut(), n_freq, 4 * n_freq, 16)?;
        Ok(DiscreteOperator { alpha: model.alpha(), angles, freq })
    }

    pub fn residual<F, G>(&self, phi: F, dphi_dx: G, x: f64, mu: f64) -> f64
    where
        F: Fn(f64, f64) -> f64,
        G: Fn(f64, f64) -> f64,
    {
        let total = self.freq.total_weight();
        let mut scatter = 0.0;
        for (w, wt) in self.freq.nodes.iter().zip(&self.freq.weights) {
            let s = w.powf(-self.alpha);
            let mut inner = 0.0;
            for (v, a) in self.angles.nodes.iter().zip(&self.angles.weights) {
                inner += a * phi(x, s * v);
            }
            scatter += wt * inner;
        }
        mu * dphi_dx(x, mu) + phi(x, mu) - scatter / (2.0 * total)
    }
}

/// Largest residual of both discrete modes over the tensor grid.
pub fn mode_residual(op: &DiscreteOperator, xs: &[f64], mus: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &x in xs {
        for &mu in mus {
            let r1 = op.residual(|x, m| discrete_modes(x, m).0, |_, _| 0.0, x, mu);
            let r2 = op.residual(|x, m| discrete_modes(x, m).1, |_, _| 1.0, x, mu);
            worst = worst.max(r1.abs()).max(r2.abs());
        }
    }
    worst
}
