//! Einstein function, Planck-weighted frequency moments and the scaling
//! between physical and dimensionless variables.

use alloc::format;

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use crate::quadrature::{QuadConfig, Quadrature};
use crate::{Error, Result};

/// Default truncation of semi-infinite frequency integrals. The integrands
/// carry `e^{-ω}`, so the neglected tail is below 1e-30 relative.
pub const DEFAULT_OMEGA_CUT: f64 = 80.0;

const MOMENT_TOL: f64 = 1e-14;

/// Largest accepted scattering exponent.
pub const ALPHA_MAX: f64 = 3.0;

/// Einstein function `E(x) = eˣ/(eˣ − 1)²`, evaluated as `1/(4 sinh²(x/2))`.
pub fn einstein(x: f64) -> Result<f64> {
    if x == 0.0 || x.is_nan() {
        return Err(Error::Domain { what: "einstein", value: x });
    }
    let s = (0.5 * x).sinh();
    Ok(0.25 / (s * s))
}

/// `ω^power · E(ω)` for `ω ≥ 0`, written so that small `ω` neither
/// underflows nor overflows.
#[inline]
pub fn planck_weight(omega: f64, power: f64) -> f64 {
    if omega <= 0.0 {
        return if power > 2.0 {
            0.0
        } else if power == 2.0 {
            1.0
        } else {
            f64::INFINITY
        };
    }
    let half = 0.5 * omega;
    let ratio = if half < 1e-8 { 1.0 } else { half / half.sinh() };
    ratio * ratio * omega.powf(power - 2.0)
}

fn moment_on(quad: &Quadrature, power: f64, upper: f64) -> Result<f64> {
    if upper <= 0.0 {
        return Ok(0.0);
    }
    // Near zero the integrand behaves like ω^(power-2); for power < 2 a
    // substitution ω = t^k flattens that to a bounded integrand.
    let split = upper.min(1.0);
    let head = if power < 2.0 {
        let k = 1.0 / (power - 1.0);
        let t_max = split.powf(1.0 / k);
        quad.integrate(
            |t: f64| {
                let w = t.powf(k);
                let half = 0.5 * w;
                let r = if half < 1e-8 { 1.0 } else { half / half.sinh() };
                k * r * r
            },
            0.0,
            t_max,
            MOMENT_TOL,
        )?
    } else {
        quad.integrate(|w| planck_weight(w, power), 0.0, split, MOMENT_TOL)?
    };
    let tail = if upper > split { quad.integrate(|w| planck_weight(w, power), split, upper, MOMENT_TOL)? } else { 0.0 };
    Ok(head + tail)
}

/// `l₀(p) = ∫₀^∞ ω^{p+4} E(ω) dω` by quadrature on `[0, omega_cut]`.
///
/// The integrand behaves like `ω^{p+2}` at the origin, so the moment exists
/// only for `p > −3`.
pub fn moment_l0(p: f64) -> Result<f64> {
    moment_l0_with(&moment_quadrature(), p, DEFAULT_OMEGA_CUT)
}

pub(crate) fn moment_quadrature() -> Quadrature {
    Quadrature::new(QuadConfig { order: 32, max_depth: 40 }).expect("valid moment quadrature")
}

fn moment_l0_with(quad: &Quadrature, p: f64, omega_cut: f64) -> Result<f64> {
    if !(p > -3.0) || !p.is_finite() {
        return Err(Error::Divergence {
            what: "moment_l0",
            detail: format!("integrand ω^(p+2) is not integrable at 0 for p = {p}"),
        });
    }
    moment_on(quad, p + 4.0, omega_cut)
}

/// Scattering exponent α together with the frequency moments every other
/// module normalizes by.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaModel {
    alpha: f64,
    l0_alpha: f64,
    l0_neg: Option<f64>,
    l0_2alpha: f64,
    omega_cut: f64,
    quad: Quadrature,
}

impl AlphaModel {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_config(alpha, DEFAULT_OMEGA_CUT, QuadConfig::default())
    }

    pub fn with_config(alpha: f64, omega_cut: f64, quad_cfg: QuadConfig) -> Result<Self> {
        if !(0.0..=ALPHA_MAX).contains(&alpha) {
            return Err(Error::Config(format!("alpha = {alpha} outside the accepted range [0, {ALPHA_MAX}]")));
        }
        if !(omega_cut > 0.0 && omega_cut.is_finite()) {
            return Err(Error::Config(format!("omega_cut = {omega_cut} must be positive")));
        }
        let quad = Quadrature::new(quad_cfg)?;
        let mq = moment_quadrature();
        let l0_alpha = moment_l0_with(&mq, alpha, omega_cut)?;
        let l0_2alpha = moment_l0_with(&mq, 2.0 * alpha, omega_cut)?;
        let l0_neg = if alpha < 3.0 { Some(moment_l0_with(&mq, -alpha, omega_cut)?) } else { None };
        Ok(AlphaModel { alpha, l0_alpha, l0_neg, l0_2alpha, omega_cut, quad })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// `l₀(α)`.
    pub fn l0(&self) -> f64 {
        self.l0_alpha
    }
    /// `l₀(−α)`, absent at α = 3 where it diverges.
    pub fn l0_neg(&self) -> Option<f64> {
        self.l0_neg
    }
    /// `l₀(2α)`.
    pub fn l0_2alpha(&self) -> f64 {
        self.l0_2alpha
    }
    pub fn omega_cut(&self) -> f64 {
        self.omega_cut
    }
    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    /// Spectral weight `ω^{α+4} E(ω)` of the dispersion average.
    #[inline]
    pub fn spectral_weight(&self, omega: f64) -> f64 {
        planck_weight(omega, self.alpha + 4.0)
    }

    /// Frequency at which `ω^α μ = 1`, i.e. the edge of the slit of
    /// `λ_C(ω^α z)`; infinite for α = 0.
    pub fn slit_frequency(&self, mu: f64) -> f64 {
        if self.alpha == 0.0 {
            f64::INFINITY
        } else {
            mu.powf(-1.0 / self.alpha)
        }
    }
}

/// Truncated moment `ξ_α(μ) = ∫₀^{μ^{-1/α}} ω^{2α+4} E(ω) dω`.
///
/// For α = 0 the cutoff is infinite inside the slit `|μ| < 1` and zero
/// outside it.
pub fn xi_alpha(model: &AlphaModel, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain { what: "xi_alpha", value: mu });
    }
    if model.alpha == 0.0 {
        return Ok(if mu < 1.0 { model.l0_alpha } else { 0.0 });
    }
    let cut = model.slit_frequency(mu);
    if cut >= model.omega_cut {
        return Ok(model.l0_2alpha);
    }
    let mq = moment_quadrature();
    moment_on(&mq, 2.0 * model.alpha + 4.0, cut)
}

/// Reference temperature and material constants of a physical medium.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalScales {
    /// Reference temperature, K.
    pub t0: f64,
    /// Collision-frequency prefactor ν₀ in `ν(ω) = ν₀ ω^α`.
    pub nu0: f64,
    /// Propagation speed, m/s.
    pub c: f64,
    /// ħ/k, K·s.
    pub hbar_over_k: f64,
}

impl PhysicalScales {
    pub fn new(t0: f64, nu0: f64, c: f64, hbar_over_k: f64) -> Result<Self> {
        for (name, v) in [("T0", t0), ("nu0", nu0), ("c", c), ("hbar_over_k", hbar_over_k)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive and finite")));
            }
        }
        Ok(PhysicalScales { t0, nu0, c, hbar_over_k })
    }

    /// Metres per dimensionless length unit, `(c/ν₀)(kT₀/ħ)^{−α}`.
    pub fn length_scale(&self, alpha: f64) -> Result<f64> {
        let thermal = self.t0 / self.hbar_over_k;
        let l = self.c / self.nu0 * thermal.powf(-alpha);
        if l > 0.0 && l.is_finite() {
            Ok(l)
        } else {
            Err(Error::Config(format!("length scale {l} is not positive and finite")))
        }
    }
}

/// Boundary temperature jump `T₁ − T₀ = V₁ · length_scale · K`.
pub fn physical_jump(scales: &PhysicalScales, model: &AlphaModel, k_phys: f64, v1: f64) -> Result<f64> {
    if !k_phys.is_finite() || !v1.is_finite() {
        return Err(Error::Config("temperature gradient and V1 must be finite".into()));
    }
    Ok(v1 * scales.length_scale(model.alpha)? * k_phys)
}

#[cfg(test)]
// Reference values are quoted to the digits they were computed with.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // 50-digit references for eˣ/(eˣ−1)².
    const EINSTEIN_REF: [(f64, f64); 7] = [
        (1e-8, 9999999999999999.916666667),
        (0.001, 999999.916666670833333168),
        (1.0, 0.9206735942077923189454135),
        (1.7, 0.2734757822247167723417237),
        (10.0, 0.00004540405235047541209790132),
        (100.0, 3.720075976020835962959696e-44),
        (700.0, 9.859676543759770856705373e-305),
    ];

    #[test]
    fn einstein_matches_high_precision_references() {
        for (x, e) in EINSTEIN_REF {
            let v = einstein(x).unwrap();
            assert!((v / e - 1.0).abs() <= 1e-14, "x = {x}: {v} vs {e}");
        }
    }

    #[test]
    fn einstein_is_even_and_has_double_pole() {
        assert_eq!(einstein(1.7).unwrap(), einstein(-1.7).unwrap());
        let x = 1e-6;
        assert!((x * x * einstein(x).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(einstein(0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn xi_alpha_zero_exponent_is_indicator_of_slit() {
        let m = AlphaModel::new(0.0).unwrap();
        assert_eq!(xi_alpha(&m, 0.5).unwrap(), m.l0());
        assert_eq!(xi_alpha(&m, 2.0).unwrap(), 0.0);
        assert!(xi_alpha(&m, 0.0).is_err());
    }

    #[test]
    fn xi_alpha_two_at_unit_mu() {
        let m = AlphaModel::new(2.0).unwrap();
        let v = xi_alpha(&m, 1.0).unwrap();
        assert!((v - 0.1339643277618788383).abs() < 1e-13, "{v}");
    }

    #[test]
    fn moment_rejects_non_integrable_exponent() {
        assert!(matches!(moment_l0(-3.0), Err(Error::Divergence { .. })));
        assert!(matches!(moment_l0(-3.9), Err(Error::Divergence { .. })));
        assert!(moment_l0(-2.9).unwrap() > 0.0);
    }

    #[test]
    fn alpha_range_is_enforced() {
        assert!(AlphaModel::new(-0.1).is_err());
        assert!(AlphaModel::new(3.01).is_err());
        let m = AlphaModel::new(3.0).unwrap();
        assert!(m.l0_neg().is_none());
    }

    #[test]
    fn jump_vanishes_with_gradient_or_coefficient() {
        let s = PhysicalScales::new(3.0, 1e-3, 3e8, 7.64e-12).unwrap();
        let m = AlphaModel::new(2.0).unwrap();
        assert_eq!(physical_jump(&s, &m, 0.0, 0.5).unwrap(), 0.0);
        assert_eq!(physical_jump(&s, &m, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn jump_in_unit_scales_is_the_coefficient() {
        let s = PhysicalScales::new(2.0, 5.0, 5.0, 2.0).unwrap();
        let m = AlphaModel::new(0.0).unwrap();
        let v = physical_jump(&s, &m, 1.0, 0.71045).unwrap();
        assert!((v - 0.71045).abs() < 1e-15);
    }

    #[test]
    fn scales_reject_nonpositive_fields() {
        assert!(PhysicalScales::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalScales::new(1.0, -1.0, 1.0, 1.0).is_err());
    }
}
