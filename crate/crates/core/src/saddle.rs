//! Saddle-point approximation: the Case function with a rescaled argument
//! `λ̃(z) = λ_C(ω₀^α z)` stands in for λ(z), which gives `Ṽ₁ = ω₀^{−α} V₁⁰`.

use alloc::format;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use crate::dispersion::{build_theta_table, case_real, lambda_case, BoundaryDispersion, DispersionSample, GridSpec};
use crate::rh_solver::{v1_coefficient, V1Estimate};
use crate::{Error, Result};

/// Residual tolerance used when no explicit one is given.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Config(format!("saddle: alpha = {alpha} must be finite and nonnegative")));
    }
    Ok(())
}

/// Nontrivial root `ω₀ ∈ (0, α + 4)` of `e^ω = (α + 4 + ω)/(α + 4 − ω)`.
///
/// The iteration runs on `g(ω) = ω − ln((a + ω)/(a − ω))`, which is O(1)
/// across the bracket; `tol` bounds the residual `e^ω(a − ω) − (a + ω)` of
/// the original equation.
pub fn saddle_root(alpha: f64, tol: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(tol > 0.0) {
        return Err(Error::Config(format!("saddle: tolerance {tol} must be positive")));
    }
    let a = alpha + 4.0;
    let g = |w: f64| w - ((a + w) / (a - w)).ln();
    let dg = |w: f64| 1.0 - 2.0 * a / (a * a - w * w);
    let eps = 1e-9 * a;
    let (mut lo, mut hi) = (eps, a - eps);
    let (glo, ghi) = (g(lo), g(hi));
    if glo.signum() == ghi.signum() {
        return Err(Error::Solver(format!("no sign change on [{lo}, {hi}] (g = {glo}, {ghi})")));
    }
    let mut w = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gw = g(w);
        if gw == 0.0 {
            break;
        }
        if gw.signum() == glo.signum() {
            lo = w;
        } else {
            hi = w;
        }
        let newton = w - gw / dg(w);
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - w).abs() <= 4.0 * f64::EPSILON * w {
            w = next;
            break;
        }
        w = next;
    }
    let residual = saddle_residual(alpha, w);
    if !(residual.abs() <= tol) {
        return Err(Error::Solver(format!("residual {residual} at omega = {w} exceeds tolerance {tol}")));
    }
    Ok(w)
}

/// `e^ω (α + 4 − ω) − (α + 4 + ω)`.
pub fn saddle_residual(alpha: f64, omega: f64) -> f64 {
    let a = alpha + 4.0;
    omega.exp() * (a - omega) - (a + omega)
}

/// Closed-form approximation `ω̃₀ = (α + 4)(1 − 2e^{−α−4})`.
pub fn saddle_root_approx(alpha: f64) -> Result<f64> {
    let a = alpha + 4.0;
    if !(a > 1.0) || !a.is_finite() {
        return Err(Error::Config(format!("saddle approximation needs alpha + 4 > 1, got {a}")));
    }
    Ok(a * (1.0 - 2.0 * (-a).exp()))
}

/// `Ṽ₁ = ω₀^{−α} V₁⁰`.
pub fn v1_saddle(alpha: f64, v1_zero: f64) -> Result<f64> {
    let w = saddle_root(alpha, DEFAULT_ROOT_TOL)?;
    Ok(w.powf(-alpha) * v1_zero)
}

/// `λ̃(z) = λ_C(ω₀^α z)`.
pub fn lambda_surrogate(alpha: f64, omega0: f64, z: Complex64) -> Result<Complex64> {
    check_alpha(alpha)?;
    if !(omega0 > 0.0) {
        return Err(Error::Domain { what: "lambda_surrogate omega0", value: omega0 });
    }
    lambda_case(z * omega0.powf(alpha))
}

/// Boundary data of the surrogate; its slit is `(0, ω₀^{−α})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CaseSurrogate {
    alpha: f64,
    omega0: f64,
    scale: f64,
}

impl CaseSurrogate {
    pub fn new(alpha: f64, omega0: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::Domain { what: "surrogate omega0", value: omega0 });
        }
        Ok(CaseSurrogate { alpha, omega0, scale: omega0.powf(alpha) })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }
}

impl BoundaryDispersion for CaseSurrogate {
    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn boundary(&self, mu: f64) -> Result<DispersionSample> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::Domain { what: "surrogate boundary", value: mu });
        }
        let t = self.scale * mu;
        let im = if t < 1.0 { FRAC_PI_2 * t } else { 0.0 };
        Ok(DispersionSample::new(mu, case_real(t), im))
    }

    fn slit_end(&self) -> Option<f64> {
        Some(1.0 / self.scale)
    }

    fn initial_slope(&self) -> f64 {
        FRAC_PI_2 * self.scale
    }
}

/// `Ṽ₁` through the generic table and jump-coefficient machinery applied
/// to the surrogate.
pub fn v1_via_surrogate(alpha: f64, grid: &GridSpec) -> Result<V1Estimate> {
    let w = saddle_root(alpha, DEFAULT_ROOT_TOL)?;
    let s = CaseSurrogate::new(alpha, w)?;
    let table = build_theta_table(&s, grid)?;
    v1_coefficient(&s, &table)
}

/// Saddle-point results for one exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaddleSummary {
    pub alpha: f64,
    pub omega0: f64,
    pub omega0_approx: f64,
    pub v1_tilde: f64,
    pub v1_exact_ref: Option<f64>,
}

impl SaddleSummary {
    pub fn new(alpha: f64, v1_zero: f64, v1_exact_ref: Option<f64>) -> Result<Self> {
        let omega0 = saddle_root(alpha, DEFAULT_ROOT_TOL)?;
        Ok(SaddleSummary {
            alpha,
            omega0,
            omega0_approx: saddle_root_approx(alpha)?,
            v1_tilde: omega0.powf(-alpha) * v1_zero,
            v1_exact_ref,
        })
    }

    /// `|ω̃₀ − ω₀| / ω₀`.
    pub fn root_gap(&self) -> f64 {
        (self.omega0_approx - self.omega0).abs() / self.omega0
    }

    /// `(Ṽ₁ − V₁)/V₁` when the exact value is known.
    pub fn v1_gap(&self) -> Option<f64> {
        self.v1_exact_ref.map(|v| (self.v1_tilde - v) / v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn printed_saddle_values() {
        assert!((saddle_root(0.0, 1e-10).unwrap() - 3.83002).abs() < 1e-5);
        assert!((saddle_root(2.0, 1e-10).unwrap() - 5.96941).abs() < 1e-5);
        assert!((saddle_root_approx(0.0).unwrap() - 3.85347).abs() < 1e-5);
        assert!((saddle_root_approx(2.0).unwrap() - 5.97025).abs() < 1e-5);
        assert!((v1_saddle(2.0, 0.71045).unwrap() - 0.01994).abs() < 1e-5);
        assert_eq!(v1_saddle(0.0, 0.71045).unwrap(), 0.71045);
    }

    #[test]
    fn surrogate_is_a_rescaled_case_function() {
        let w = saddle_root(2.0, 1e-10).unwrap();
        let z = Complex64::new(0.0, 2.0) / (w * w);
        let a = lambda_surrogate(2.0, w, z).unwrap();
        let b = lambda_case(Complex64::new(0.0, 2.0)).unwrap();
        assert!((a - b).norm() < 1e-14);
        assert_eq!(lambda_surrogate(1.0, w, Complex64::new(0.0, 0.0)).unwrap().re, 1.0);
        assert!(saddle_root(-1.0, 1e-10).is_err());
    }

    proptest! {
        #[test]
        fn root_is_bracketed_and_close_to_its_approximation(alpha in 0.0f64..3.0) {
            let w = saddle_root(alpha, 1e-9).unwrap();
            prop_assert!(w > 0.0 && w < alpha + 4.0);
            let gap = (saddle_root_approx(alpha).unwrap() - w).abs() / w;
            prop_assert!(gap <= 0.01);
        }
    }
}
