//! Monotone piecewise-cubic interpolation and exact Cauchy-type integrals of
//! the interpolant.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use crate::quadrature::{gauss_rule, QuadratureRule};
use crate::{Error, Result};

/// Shape-preserving cubic Hermite interpolant with Steffen slopes; third
/// order away from extrema, monotone on every panel.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
    far_rule: QuadratureRule,
}

/// Panels closer than this many widths use the exact logarithmic formula.
const NEAR_PANELS: f64 = 3.0;
const FAR_ORDER: usize = 10;

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Config(format!(
                "interpolation needs at least two matching nodes (got {} and {})",
                x.len(),
                y.len()
            )));
        }
        if x.windows(2).any(|w| !(w[0] < w[1])) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("interpolation nodes must increase and values be finite".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut slope = alloc::vec![0.0; n];
        if n == 2 {
            slope[0] = delta[0];
            slope[1] = delta[0];
        } else {
            // Steffen slopes: the three-point parabola's derivative, capped so
            // each panel stays monotone.
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let p = (delta[k - 1] * h[k] + delta[k] * h[k - 1]) / (h[k - 1] + h[k]);
                    let cap = delta[k - 1].abs().min(delta[k].abs()) * 2.0;
                    slope[k] = p.signum() * p.abs().min(cap);
                }
            }
            slope[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slope[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(MonotoneCubic { x, y, slope, far_rule: gauss_rule(FAR_ORDER)? })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn lower(&self) -> f64 {
        self.x[0]
    }

    pub fn upper(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lower() && t <= self.upper()
    }

    /// Index of the panel `[x_k, x_{k+1}]` containing `t` (clamped).
    fn panel_of(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Monomial coefficients of panel `k` in the local variable `s = τ − x_k`.
    fn coefficients(&self, k: usize) -> [f64; 4] {
        let h = self.x[k + 1] - self.x[k];
        let delta = (self.y[k + 1] - self.y[k]) / h;
        let (d0, d1) = (self.slope[k], self.slope[k + 1]);
        [self.y[k], d0, (3.0 * delta - 2.0 * d0 - d1) / h, (d0 + d1 - 2.0 * delta) / (h * h)]
    }

    #[inline]
    fn poly(c: &[f64; 4], s: f64) -> f64 {
        ((c[3] * s + c[2]) * s + c[1]) * s + c[0]
    }

    /// Value at `t`; `None` outside the knot range.
    pub fn eval(&self, t: f64) -> Option<f64> {
        if !self.contains(t) {
            return None;
        }
        let k = self.panel_of(t);
        Some(Self::poly(&self.coefficients(k), t - self.x[k]))
    }

    /// Exact integral of the interpolant over its whole range.
    pub fn integral(&self) -> f64 {
        (0..self.x.len() - 1)
            .map(|k| {
                let h = self.x[k + 1] - self.x[k];
                0.5 * h * (self.y[k] + self.y[k + 1]) + h * h * (self.slope[k] - self.slope[k + 1]) / 12.0
            })
            .sum()
    }

    /// `∫ p(τ)/(τ − z) dτ` over the knot range for `z` off the support.
    pub fn cauchy(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.x.len() - 1 {
            let a = self.x[k];
            let h = self.x[k + 1] - a;
            let c = self.coefficients(k);
            let w = z - a;
            if (w - 0.5 * h).norm() > NEAR_PANELS * h {
                for (s, wt) in self.far_rule.mapped(0.0, h) {
                    acc += Self::poly(&c, s) * wt / (s - w);
                }
            } else {
                let (q_int, rem) = divided_integral(&c, w, h);
                acc += q_int + rem * ((h - w) / (-w)).ln();
            }
        }
        acc
    }

    /// Principal value `P∫ p(τ)/(τ − η) dτ` over the knot range for real `η`.
    ///
    /// Inside the range the integral is computed as
    /// `∫ (p(τ) − p(η))/(τ − η) dτ + p(η) ln((b − η)/(η − a))`; the
    /// subtracted quotient is a polynomial on the panel holding `η`.
    pub fn principal_value(&self, eta: f64) -> f64 {
        let (lo, hi) = (self.lower(), self.upper());
        let inside = eta > lo && eta < hi;
        let base = if inside {
            self.eval(eta).unwrap_or(0.0)
        } else if eta == lo || eta == hi {
            let v = self.eval(eta).unwrap_or(0.0);
            if v != 0.0 {
                return if eta == lo { -v.signum() * f64::INFINITY } else { v.signum() * f64::INFINITY };
            }
            0.0
        } else {
            0.0
        };
        let mut acc = 0.0;
        for k in 0..self.x.len() - 1 {
            let a = self.x[k];
            let h = self.x[k + 1] - a;
            let c = self.coefficients(k);
            let w = eta - a;
            if w >= 0.0 && w <= h {
                // Quotient is the deflated polynomial; c(w) equals `base`.
                let (q_int, _) = divided_integral_real(&c, w, h);
                acc += q_int;
            } else if (w - 0.5 * h).abs() > NEAR_PANELS * h {
                for (s, wt) in self.far_rule.mapped(0.0, h) {
                    acc += (Self::poly(&c, s) - base) * wt / (s - w);
                }
            } else {
                let (q_int, rem) = divided_integral_real(&c, w, h);
                acc += q_int + (rem - base) * ((h - w) / (-w)).ln();
            }
        }
        if inside {
            acc += base * ((hi - eta) / (eta - lo)).ln();
        }
        acc
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

/// For `c(s) = (s − w) q(s) + c(w)`, returns `(∫₀^h q, c(w))`.
fn divided_integral(c: &[f64; 4], w: Complex64, h: f64) -> (Complex64, Complex64) {
    let q2 = Complex64::new(c[3], 0.0);
    let q1 = w * q2 + c[2];
    let q0 = w * q1 + c[1];
    let rem = w * q0 + c[0];
    (q0 * h + q1 * (h * h / 2.0) + q2 * (h * h * h / 3.0), rem)
}

fn divided_integral_real(c: &[f64; 4], w: f64, h: f64) -> (f64, f64) {
    let q2 = c[3];
    let q1 = w * q2 + c[2];
    let q0 = w * q1 + c[1];
    let rem = w * q0 + c[0];
    (q0 * h + q1 * h * h / 2.0 + q2 * h * h * h / 3.0, rem)
}
