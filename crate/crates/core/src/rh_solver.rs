//! Factorization of the Riemann problem on the positive axis.
//!
//! With `D(μ) = π − θ(μ)`:
//!
//! * `V(z) = −(1/π) ∫₀^∞ D(τ)/(τ − z) dτ`, `X(z) = e^{V(z)}/z`;
//! * `V₁ = (1/π) ∫₀^∞ D(μ) dμ`, `K₀ = V₁ K`, `C₀ = −2 l₀ K`;
//! * `n(η) = −(2 l₀ K/π) e^{−Vp(η)} sin θ(η)`, `Vp` the principal value of
//!   `V` on the axis.
//!
//! The sign of `n` is the one for which the expanded solution vanishes at
//! the wall for incoming directions.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use crate::dispersion::{dispersion_quadrature, BoundaryDispersion, DispersionTable, TailFit};
use crate::par;
use crate::quadrature::Quadrature;
use crate::special_fn::AlphaModel;
use crate::{Error, Result};

const V1_TOL: f64 = 1e-11;
const TAIL_TOL: f64 = 1e-12;

/// Jump coefficient with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct V1Estimate {
    pub value: f64,
    /// Bound combining the gap to the interpolated-table integral and the
    /// sensitivity of the tail to its fitted exponent.
    pub error: f64,
    /// `(1/π)∫ D` over the interpolated table plus the analytic tail.
    pub table_value: f64,
    /// Contribution of the analytic tail beyond the last node.
    pub tail: f64,
}

/// `V₁ = (1/π)∫₀^∞ (π − θ(μ)) dμ`.
///
/// The tabulated range is integrated adaptively on the exact boundary data of
/// `source`; beyond it the fitted power law is integrated in closed form.
/// A tail decaying no faster than `1/μ` is reported as a divergence.
pub fn v1_coefficient<D>(source: &D, table: &DispersionTable) -> Result<V1Estimate>
where
    D: BoundaryDispersion,
{
    let (tail, tail_err) = match table.tail() {
        Some(t) => {
            let v = t.integral()?;
            (v, v.abs() * tail_sensitivity(table, t))
        }
        None => (0.0, 0.0),
    };
    let upper = match (table.slit_end(), table.tail()) {
        (Some(s), None) => s.min(table.mu_max()),
        _ => table.mu_max(),
    };
    let quad = dispersion_quadrature();
    let deficit = |mu: f64| source.boundary(mu).map(|s| s.deficit).unwrap_or(f64::NAN);
    let mut exact = 0.0;
    let mut err = 0.0;
    for (a, b) in decade_pieces(table.samples()[0].mu, upper) {
        let e = quad.integrate_estimate(deficit, a, b, V1_TOL)?;
        exact += e.value;
        err += e.error;
    }
    let value = (exact + tail) / PI;
    let table_value = table.deficit_integral()? / PI;
    Ok(V1Estimate { value, error: (value - table_value).abs() + (err + tail_err) / PI, table_value, tail: tail / PI })
}

/// Pieces `[0, lo], [lo, 10 lo], …, [·, hi]`, so the adaptive integrator does
/// not have to discover the multi-decade structure itself.
fn decade_pieces(lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut edges = alloc::vec![0.0];
    let mut e = lo.min(hi);
    while e < hi {
        edges.push(e);
        e *= 10.0;
    }
    edges.push(hi);
    edges.dedup();
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Relative change of the tail integral when the exponent is replaced by the
/// local slope between the last two nodes.
fn tail_sensitivity(table: &DispersionTable, t: &TailFit) -> f64 {
    let s = table.samples();
    let n = s.len();
    if n < 2 || s[n - 2].deficit <= 0.0 {
        return 1.0;
    }
    let local = (s[n - 1].deficit / s[n - 2].deficit).ln() / (s[n - 1].mu / s[n - 2].mu).ln();
    let dp = (local - t.exponent).abs();
    // d/dp ln(C B^{p+1}/(−(p+1))) = ln B − 1/(p+1)
    (t.end.ln() - 1.0 / (t.exponent + 1.0)).abs() * dp
}

/// Tabulated argument, the jump coefficient and the constants of the
/// general solution for a given gradient `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationData {
    table: DispersionTable,
    v1: V1Estimate,
    l0: f64,
    k: f64,
    k0: f64,
    c0: f64,
}

impl FactorizationData {
    pub fn new(model: &AlphaModel, table: DispersionTable, k: f64) -> Result<Self> {
        let v1 = v1_coefficient(model, &table)?;
        Self::from_parts(table, v1, model.l0(), k)
    }

    pub fn from_parts(table: DispersionTable, v1: V1Estimate, l0: f64, k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::Config("gradient K must be finite".into()));
        }
        if !(v1.value > 0.0) {
            return Err(Error::Config(alloc::format!("jump coefficient {} must be positive", v1.value)));
        }
        Ok(FactorizationData { table, v1, l0, k, k0: v1.value * k, c0: -2.0 * l0 * k })
    }

    /// Same factorization for another gradient.
    pub fn with_gradient(&self, k: f64) -> Result<Self> {
        Self::from_parts(self.table.clone(), self.v1, self.l0, k)
    }

    pub fn table(&self) -> &DispersionTable {
        &self.table
    }
    pub fn v1(&self) -> f64 {
        self.v1.value
    }
    pub fn v1_estimate(&self) -> V1Estimate {
        self.v1
    }
    pub fn l0(&self) -> f64 {
        self.l0
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn k0(&self) -> f64 {
        self.k0
    }
    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Largest `η` at which boundary values are available: the whole axis
    /// when θ = π past a slit, otherwise strictly below the last node.
    pub fn eta_max(&self) -> f64 {
        if self.table.tail().is_none() {
            f64::INFINITY
        } else {
            self.table.mu_max()
        }
    }
}

/// `∫_B^∞ C τ^p/(τ − z) dτ = C B^p ∫₀¹ u^{−p−1}/(1 − z u/B) du`.
fn tail_cauchy(t: &TailFit, z: Complex64) -> Result<Complex64> {
    let b = t.end;
    let q = Quadrature::default();
    let v: Complex64 = q.integrate(
        |u: f64| Complex64::new(u.powf(-t.exponent - 1.0), 0.0) / (Complex64::new(1.0, 0.0) - z * (u / b)),
        0.0,
        1.0,
        TAIL_TOL,
    )?;
    Ok(v * (t.coefficient * b.powf(t.exponent)))
}

fn on_positive_axis(z: Complex64) -> bool {
    z.im == 0.0 && z.re >= 0.0
}

/// `V(z)` for `z` off `[0, ∞)`.
pub fn v_transform(data: &FactorizationData, z: Complex64) -> Result<Complex64> {
    if on_positive_axis(z) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain { what: "v_transform", value: z.re });
    }
    let table = data.table();
    let mut s = table.deficit_curve().cauchy(z);
    if let Some(t) = table.tail() {
        s += tail_cauchy(t, z)?;
    }
    Ok(-s / PI)
}

/// `X(z) = e^{V(z)}/z`.
pub fn x_factor(data: &FactorizationData, z: Complex64) -> Result<Complex64> {
    Ok(v_transform(data, z)?.exp() / z)
}

/// Principal value `Vp(μ)` of `V` on the positive axis.
pub fn v_principal(data: &FactorizationData, mu: f64) -> Result<f64> {
    if !(mu > 0.0) || !(mu < data.eta_max()) {
        return Err(Error::Range { what: "v_principal", value: mu, lo: 0.0, hi: data.eta_max() });
    }
    let table = data.table();
    let mut s = table.deficit_curve().principal_value(mu);
    if let Some(t) = table.tail() {
        s += tail_cauchy(t, Complex64::new(mu, 0.0))?.re;
    }
    Ok(-s / PI)
}

/// Boundary values `V±(μ) = Vp(μ) ± i(θ(μ) − π)`.
pub fn v_boundary(data: &FactorizationData, mu: f64) -> Result<(Complex64, Complex64)> {
    let vp = v_principal(data, mu)?;
    let d = data.table().deficit(mu);
    Ok((Complex64::new(vp, -d), Complex64::new(vp, d)))
}

/// Boundary values `X±(μ) = e^{V±(μ)}/μ`.
pub fn x_boundary(data: &FactorizationData, mu: f64) -> Result<(Complex64, Complex64)> {
    let (p, m) = v_boundary(data, mu)?;
    Ok((p.exp() / mu, m.exp() / mu))
}

/// Continuous-spectrum coefficient at one node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumCoefficient {
    pub eta: f64,
    pub n_value: f64,
}

/// `−2 l₀ K (1/X⁺ − 1/X⁻)/(2πiη)`, whose imaginary part vanishes analytically.
pub fn n_jump(data: &FactorizationData, eta: f64) -> Result<Complex64> {
    let (xp, xm) = x_boundary(data, eta)?;
    let jump = xp.inv() - xm.inv();
    Ok(jump * (-2.0 * data.l0() * data.k()) / Complex64::new(0.0, 2.0 * PI * eta))
}

/// `n(η) = −(2 l₀ K/π) e^{−Vp(η)} sin θ(η)`.
pub fn n_coefficient(data: &FactorizationData, eta: f64) -> Result<SpectrumCoefficient> {
    let vp = v_principal(data, eta)?;
    let d = data.table().deficit(eta);
    Ok(SpectrumCoefficient { eta, n_value: -2.0 * data.l0() * data.k() / PI * (-vp).exp() * d.sin() })
}

/// `n` on every table node where boundary values exist.
pub fn n_table(data: &FactorizationData) -> Result<Vec<SpectrumCoefficient>> {
    let nodes: Vec<f64> = data.table().samples().iter().map(|s| s.mu).filter(|m| *m < data.eta_max()).collect();
    par::map_range(nodes.len(), |i| n_coefficient(data, nodes[i])).into_iter().collect()
}

/// Closed form `N(z) = −2 l₀ (K₀ − K z) + C₀/X(z)` of the auxiliary function.
pub fn auxiliary_closed_form(data: &FactorizationData, z: Complex64) -> Result<Complex64> {
    let x = x_factor(data, z)?;
    Ok((Complex64::new(data.k0(), 0.0) - z * data.k()) * (-2.0 * data.l0()) + x.inv() * data.c0())
}
