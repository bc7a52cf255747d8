//! Numerical integration: Gauss–Legendre rules, adaptive panel refinement,
//! Cauchy principal values and Gauss rules for a tabulated positive weight.

mod adaptive;
mod gauss;
mod weighted;

pub use adaptive::{Estimate, QuadConfig, QuadValue, Quadrature};
pub use gauss::{gauss_rule, QuadratureRule};
pub use weighted::{weighted_gauss_rule, WeightedRule};

use crate::{Error, Result};
#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

/// Adaptive integral of `f` over `[a, b]` with the default configuration.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    Quadrature::default().integrate(f, a, b, tol)
}

/// Integrand of a Cauchy principal value `P∫_a^b f(τ)/(τ − pole) dτ`.
#[derive(Clone, Copy, Debug)]
pub struct PvIntegrand<F> {
    pub f: F,
    pub pole: f64,
    pub a: f64,
    pub b: f64,
}

impl<F: Fn(f64) -> f64> PvIntegrand<F> {
    pub fn new(f: F, pole: f64, a: f64, b: f64) -> Self {
        PvIntegrand { f, pole, a, b }
    }
}

/// Principal value by singularity subtraction,
/// `∫ (f(τ) − f(μ))/(τ − μ) dτ + f(μ)·ln((b − μ)/(μ − a))`.
///
/// The subtracted integrand is split at the pole so no node ever lands on it.
pub fn pv_integral<F>(p: &PvIntegrand<F>, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    Quadrature::default().principal_value(p, tol)
}

impl Quadrature {
    pub fn principal_value<F>(&self, p: &PvIntegrand<F>, tol: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let PvIntegrand { f, pole, a, b } = p;
        let (pole, a, b) = (*pole, *a, *b);
        if !(a < pole && pole < b) {
            return Err(Error::Domain { what: "principal value pole", value: pole });
        }
        let f_pole = f(pole);
        let quotient = |t: f64| (f(t) - f_pole) / (t - pole);
        let left = self.integrate_estimate(quotient, a, pole, tol)?;
        let right = self.integrate_estimate(quotient, pole, b, tol)?;
        Ok(left.value + right.value + f_pole * ((b - pole) / (pole - a)).ln())
    }
}
