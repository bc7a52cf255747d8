//! Case dispersion function, its frequency average λ(z), boundary values on
//! the positive axis and the tabulated argument θ(μ) = arg λ⁺(μ).

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use crate::interp::MonotoneCubic;
use crate::par;
use crate::quadrature::{QuadConfig, Quadrature};
use crate::special_fn::{xi_alpha, AlphaModel};
use crate::{Error, Result};

const LAMBDA_TOL: f64 = 1e-13;
// Absolute error accepted on a single ω piece, relative to l₀. Pieces deep in
// the Planck tail are otherwise refined to the rounding level.
const PIECE_FLOOR: f64 = 1e-30;
/// Above this modulus λ_C is summed from its Laurent series.
const SERIES_RADIUS: f64 = 3.0;
/// Maximal number of midpoint-insertion passes when θ jumps.
const MAX_REFINE: usize = 8;
/// Deficit π − θ below which the automatic grid stops.
const TAIL_THRESHOLD: f64 = 1e-6;
const MU_MAX_CAP_DECADES: i32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

/// Boundary data at one point `μ > 0` of the cut.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionSample {
    pub mu: f64,
    /// Principal-value real part of λ±(μ).
    pub lambda_real: f64,
    /// `Im λ⁺(μ) = π μ ξ_α(μ) / (2 l₀(α))`.
    pub im_plus: f64,
    /// `θ(μ) = arg λ⁺(μ)` in `[0, π]`.
    pub theta: f64,
    /// `π − θ(μ)`, computed directly so it keeps full relative accuracy
    /// when θ is close to π.
    pub deficit: f64,
}

impl DispersionSample {
    pub fn new(mu: f64, lambda_real: f64, im_plus: f64) -> Self {
        DispersionSample {
            mu,
            lambda_real,
            im_plus,
            theta: im_plus.atan2(lambda_real),
            deficit: im_plus.atan2(-lambda_real),
        }
    }

    /// `λ⁺(μ)` or `λ⁻(μ)`.
    pub fn boundary_value(&self, side: Side) -> Complex64 {
        match side {
            Side::Above => Complex64::new(self.lambda_real, self.im_plus),
            Side::Below => Complex64::new(self.lambda_real, -self.im_plus),
        }
    }
}

/// Series `−Σ_{k≥1} w^{−2k}/(2k+1)` of λ_C for `|w| ≥ 3`.
fn case_series(w: Complex64) -> Complex64 {
    let q = (w * w).inv();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..60 {
        term *= q;
        let add = term / (2 * k + 1) as f64;
        sum -= add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn case_unchecked(w: Complex64) -> Complex64 {
    if w.norm() >= SERIES_RADIUS {
        return case_series(w);
    }
    if w.im == 0.0 && w.re.abs() <= 1.0 {
        // Only reached when a tiny imaginary part underflowed.
        return Complex64::new(case_real(w.re), 0.0);
    }
    let one = Complex64::new(1.0, 0.0);
    one + w * 0.5 * ((w - one) / (w + one)).ln()
}

/// Real part of λ_C on the real axis (principal value inside the slit).
pub fn case_real(t: f64) -> f64 {
    let a = t.abs();
    if a >= SERIES_RADIUS {
        return case_series(Complex64::new(t, 0.0)).re;
    }
    if a == 1.0 {
        return f64::NEG_INFINITY;
    }
    if a < 1.0 {
        1.0 - t * t.atanh()
    } else {
        1.0 - t * (1.0 / t).atanh()
    }
}

/// Case dispersion function `λ_C(z) = 1 + (z/2) ln((z − 1)/(z + 1))`.
///
/// The cut is `[−1, 1]`; `z = 0` is accepted as the removable limit 1.
pub fn lambda_case(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if z.im == 0.0 && z.re.abs() <= 1.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain { what: "lambda_case", value: z.re });
    }
    Ok(case_unchecked(z))
}

/// Boundary values `λ_C±(μ) = λ_C(μ) ± iπμ/2` on the open slit.
pub fn lambda_case_boundary(mu: f64, side: Side) -> Result<Complex64> {
    if !(mu.abs() < 1.0) {
        return Err(Error::Domain { what: "lambda_case_boundary", value: mu });
    }
    let im = FRAC_PI_2 * mu;
    Ok(Complex64::new(case_real(mu), if side == Side::Above { im } else { -im }))
}

pub(crate) fn dispersion_quadrature() -> Quadrature {
    Quadrature::new(QuadConfig { order: 32, max_depth: 50 }).expect("valid dispersion quadrature")
}

/// Interior breakpoints for a frequency integral on `[0, cut]`.
fn omega_pieces(split: f64, cut: f64) -> Vec<(f64, f64)> {
    let mut edges = alloc::vec![0.0];
    for s in [split, 1.0, 10.0] {
        if s > 0.0 && s < cut && s.is_finite() {
            edges.push(s);
        }
    }
    edges.push(cut);
    edges.sort_by(|a, b| a.total_cmp(b));
    // A fixed breakpoint within rounding of the split would leave a sliver
    // whose nodes land on the log singularity.
    edges.dedup_by(|b, a| (*b - *a).abs() <= 1e-9 * b.abs());
    if let Some(last) = edges.last_mut() {
        *last = cut;
    }
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `λ(z) = (1/l₀(α)) ∫₀^∞ ω^{α+4} E(ω) λ_C(ω^α z) dω`.
///
/// For α = 0 this is exactly [`lambda_case`]. For α > 0 the cut is the whole
/// real axis, so only `z` with a nonzero imaginary part (or `z = 0`) is
/// accepted; use [`lambda_boundary`] on the axis.
pub fn lambda_general(model: &AlphaModel, z: Complex64) -> Result<Complex64> {
    let alpha = model.alpha();
    if alpha == 0.0 {
        return lambda_case(z);
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if z.im == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain { what: "lambda_general", value: z.re });
    }
    let quad = dispersion_quadrature();
    let split = z.norm().powf(-1.0 / alpha);
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in omega_pieces(split, model.omega_cut()) {
        acc +=
            quad.integrate(|w: f64| case_unchecked(z * w.powf(alpha)) * model.spectral_weight(w), a, b, LAMBDA_TOL)?;
    }
    Ok(acc / model.l0())
}

/// Boundary data of λ at `μ > 0`. The ω-integral of the real part has a
/// logarithmic singularity at `ω = μ^{−1/α}`, which is used as a breakpoint.
pub fn lambda_boundary(model: &AlphaModel, mu: f64) -> Result<DispersionSample> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain { what: "lambda_boundary", value: mu });
    }
    let alpha = model.alpha();
    let re = if alpha == 0.0 {
        case_real(mu)
    } else {
        let quad = dispersion_quadrature();
        let f = |w: f64| case_real(mu * w.powf(alpha)) * model.spectral_weight(w);
        let pieces = omega_pieces(model.slit_frequency(mu), model.omega_cut());
        // Each piece is held to the accuracy of the whole sum, estimated
        // from one unrefined rule application per piece.
        let rough: f64 = pieces.iter().map(|&(a, b)| quad.rule().apply(&f, a, b).abs()).sum();
        let floor = (PIECE_FLOOR * model.l0()).max(0.1 * LAMBDA_TOL * rough);
        let mut acc = 0.0;
        for (a, b) in pieces {
            acc += quad.integrate_floor(f, a, b, LAMBDA_TOL, floor)?.value;
        }
        acc / model.l0()
    };
    let im = PI * mu * xi_alpha(model, mu)? / (2.0 * model.l0());
    Ok(DispersionSample::new(mu, re, im))
}

/// A dispersion function known through its boundary values on `(0, ∞)`.
pub trait BoundaryDispersion {
    fn alpha(&self) -> f64;
    fn boundary(&self, mu: f64) -> Result<DispersionSample>;
    /// Right end of the slit when θ = π beyond it, `None` when the cut is the
    /// whole axis.
    fn slit_end(&self) -> Option<f64>;
    /// `dθ/dμ` at `μ = 0⁺`.
    fn initial_slope(&self) -> f64;
}

impl BoundaryDispersion for AlphaModel {
    fn alpha(&self) -> f64 {
        AlphaModel::alpha(self)
    }
    fn boundary(&self, mu: f64) -> Result<DispersionSample> {
        lambda_boundary(self, mu)
    }
    fn slit_end(&self) -> Option<f64> {
        (AlphaModel::alpha(self) == 0.0).then_some(1.0)
    }
    fn initial_slope(&self) -> f64 {
        FRAC_PI_2 * self.l0_2alpha() / self.l0()
    }
}

/// Node layout of a θ table.
#[derive(Clone, Debug, PartialEq)]
pub enum GridSpec {
    /// Geometric grid from a small `μ` to an automatically chosen `μ_max`.
    Auto {
        nodes: usize,
    },
    Geometric {
        mu_min: f64,
        mu_max: f64,
        nodes: usize,
    },
    Explicit(Vec<f64>),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Auto { nodes: 1600 }
    }
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![hi];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo * (r * i as f64).exp() }).collect()
}

/// Power law `π − θ ≈ coefficient · μ^exponent` fitted on the last decade.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailFit {
    pub exponent: f64,
    pub coefficient: f64,
    /// Lower edge of the fit window.
    pub start: f64,
    /// Last tabulated node; the model is used beyond it.
    pub end: f64,
}

impl TailFit {
    pub fn deficit(&self, mu: f64) -> f64 {
        self.coefficient * mu.powf(self.exponent)
    }

    /// `∫_end^∞ C μ^p dμ`, finite only for `p < −1`.
    pub fn integral(&self) -> Result<f64> {
        if self.exponent >= -1.0 {
            return Err(Error::Divergence {
                what: "deficit tail",
                detail: format!(
                    "pi - theta decays like mu^{:.4}; the V1 integral needs an exponent below -1 \
                     (use the saddle-point approximation)",
                    self.exponent
                ),
            });
        }
        Ok(-self.coefficient * self.end.powf(self.exponent + 1.0) / (self.exponent + 1.0))
    }

    fn fit(points: &[(f64, f64)]) -> Option<TailFit> {
        let pts: Vec<(f64, f64)> = points.iter().filter(|(_, d)| *d > 0.0).map(|(m, d)| (m.ln(), d.ln())).collect();
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if !(sxx > 0.0) {
            return None;
        }
        let exponent = sxy / sxx;
        let end = points[points.len() - 1].0;
        let last = points[points.len() - 1].1;
        Some(TailFit {
            exponent,
            // Anchor at the last node so the model is continuous there.
            coefficient: last / end.powf(exponent),
            start: points[0].0,
            end,
        })
    }
}

/// Sampled boundary data with the unwrapped argument.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionTable {
    alpha: f64,
    samples: Vec<DispersionSample>,
    slit_end: Option<f64>,
    tail: Option<TailFit>,
    grid_spec: GridSpec,
    deficit_curve: MonotoneCubic,
}

impl DispersionTable {
    /// Assembles a table from ready samples (sorted by `μ` here).
    pub fn from_samples(
        alpha: f64,
        mut samples: Vec<DispersionSample>,
        slit_end: Option<f64>,
        grid_spec: GridSpec,
    ) -> Result<Self> {
        samples.sort_by(|a, b| a.mu.total_cmp(&b.mu));
        samples.dedup_by(|a, b| a.mu == b.mu);
        if samples.is_empty() || !(samples[0].mu > 0.0) {
            return Err(Error::Config("dispersion table needs positive nodes".into()));
        }
        let mut x = Vec::with_capacity(samples.len() + 1);
        let mut y = Vec::with_capacity(samples.len() + 1);
        x.push(0.0);
        y.push(PI);
        for s in &samples {
            x.push(s.mu);
            y.push(s.deficit);
        }
        let deficit_curve = MonotoneCubic::new(x, y)?;
        let last = samples[samples.len() - 1];
        let tail = if last.deficit > 0.0 && slit_end.map_or(true, |s| last.mu < s) {
            let window: Vec<(f64, f64)> =
                samples.iter().filter(|s| s.mu >= last.mu / 10.0).map(|s| (s.mu, s.deficit)).collect();
            let window = if window.len() >= 3 {
                window
            } else {
                samples.iter().rev().take(3).rev().map(|s| (s.mu, s.deficit)).collect()
            };
            TailFit::fit(&window)
        } else {
            None
        };
        Ok(DispersionTable { alpha, samples, slit_end, tail, grid_spec, deficit_curve })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn samples(&self) -> &[DispersionSample] {
        &self.samples
    }
    pub fn grid_spec(&self) -> &GridSpec {
        &self.grid_spec
    }
    pub fn slit_end(&self) -> Option<f64> {
        self.slit_end
    }
    pub fn tail(&self) -> Option<&TailFit> {
        self.tail.as_ref()
    }
    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail.map(|t| t.exponent)
    }
    pub fn mu_max(&self) -> f64 {
        self.samples[self.samples.len() - 1].mu
    }
    /// Monotone cubic through `(0, π)` and the tabulated deficits.
    pub fn deficit_curve(&self) -> &MonotoneCubic {
        &self.deficit_curve
    }

    /// `π − θ(μ)` from the interpolant, continued by the tail model (or by
    /// zero past the slit).
    pub fn deficit(&self, mu: f64) -> f64 {
        if mu <= 0.0 {
            return PI;
        }
        if let Some(v) = self.deficit_curve.eval(mu) {
            return v;
        }
        match self.tail {
            Some(t) => t.deficit(mu),
            None => 0.0,
        }
    }

    pub fn theta(&self, mu: f64) -> f64 {
        PI - self.deficit(mu)
    }

    /// `∫₀^∞ (π − θ) dμ` from the interpolant and the analytic tail.
    pub fn deficit_integral(&self) -> Result<f64> {
        let tail = match self.tail {
            Some(t) => t.integral()?,
            None => 0.0,
        };
        Ok(self.deficit_curve.integral() + tail)
    }
}

fn sample_all<D>(source: &D, mus: &[f64]) -> Result<Vec<DispersionSample>>
where
    D: BoundaryDispersion + Sync,
{
    par::map_range(mus.len(), |i| source.boundary(mus[i])).into_iter().collect()
}

fn auto_nodes<D>(source: &D, nodes: usize) -> Result<Vec<f64>>
where
    D: BoundaryDispersion + Sync,
{
    let mu_min = (1e-4 * FRAC_PI_2 / source.initial_slope()).min(1e-4);
    if let Some(s) = source.slit_end() {
        // Cluster toward both ends of the slit; θ approaches π only
        // logarithmically at its right end. A uniform layer keeps the middle
        // from being starved.
        let third = (nodes / 3).max(2);
        let mut mus = geometric(mu_min * s, 0.5 * s, third);
        let gaps = geometric(1e-12 * s, 0.5 * s, third);
        mus.extend(gaps.iter().rev().skip(1).map(|g| s - g));
        let uniform = nodes.saturating_sub(2 * third).max(2);
        mus.extend((1..uniform).map(|i| s * i as f64 / uniform as f64));
        mus.push(s);
        mus.sort_by(|a, b| a.total_cmp(b));
        mus.dedup_by(|b, a| *b - *a <= 1e-14 * s);
        return Ok(mus);
    }
    let mut mu_max = 10f64.powi(MU_MAX_CAP_DECADES);
    for k in 0..=MU_MAX_CAP_DECADES {
        let mu = 10f64.powi(k);
        if source.boundary(mu)?.deficit < TAIL_THRESHOLD {
            mu_max = mu;
            break;
        }
    }
    Ok(geometric(mu_min, mu_max, nodes))
}

/// Samples the boundary data of `source` on `grid`, checks that θ is
/// resolved (adjacent nodes differ by at most π/2, inserting midpoints
/// otherwise) and fits the algebraic tail of `π − θ`.
pub fn build_theta_table<D>(source: &D, grid: &GridSpec) -> Result<DispersionTable>
where
    D: BoundaryDispersion + Sync,
{
    let mus = match grid {
        GridSpec::Auto { nodes } => {
            if *nodes < 4 {
                return Err(Error::Config(format!("automatic grid needs at least 4 nodes, got {nodes}")));
            }
            auto_nodes(source, *nodes)?
        }
        GridSpec::Geometric { mu_min, mu_max, nodes } => {
            if !(*mu_min > 0.0 && mu_max > mu_min && *nodes >= 2 && mu_max.is_finite()) {
                return Err(Error::Config(format!(
                    "geometric grid needs 0 < mu_min < mu_max and at least 2 nodes \
                     (got {mu_min}, {mu_max}, {nodes})"
                )));
            }
            geometric(*mu_min, *mu_max, *nodes)
        }
        GridSpec::Explicit(v) => {
            if v.is_empty() || v.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
                return Err(Error::Config("explicit grid must be nonempty with positive finite nodes".into()));
            }
            let mut v = v.clone();
            v.sort_by(|a, b| a.total_cmp(b));
            v.dedup();
            v
        }
    };
    let mut samples = sample_all(source, &mus)?;
    for pass in 0..=MAX_REFINE {
        let coarse: Vec<f64> = samples
            .windows(2)
            .filter(|w| (w[1].theta - w[0].theta).abs() > FRAC_PI_2)
            .map(|w| 0.5 * (w[0].mu + w[1].mu))
            .collect();
        if coarse.is_empty() {
            break;
        }
        if pass == MAX_REFINE {
            return Err(Error::Resolution { mu: coarse[0] });
        }
        samples.extend(sample_all(source, &coarse)?);
        samples.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    }
    DispersionTable::from_samples(source.alpha(), samples, source.slit_end(), grid.clone())
}

/// Index `κ = −(1/π)[θ(+∞) − θ(0)]` of the Riemann problem.
///
/// θ(0) is extrapolated linearly from the first two nodes and θ(+∞) comes
/// from the tail model (π whenever the deficit decays).
pub fn index_kappa(table: &DispersionTable) -> Result<i32> {
    let s = table.samples();
    if s.len() < 2 {
        return Err(Error::Consistency { winding: f64::NAN });
    }
    let theta0 = s[0].theta - s[0].mu * (s[1].theta - s[0].theta) / (s[1].mu - s[0].mu);
    let last = s[s.len() - 1];
    let at_slit_end = table.slit_end().is_some_and(|e| last.mu >= e);
    let theta_inf = if last.deficit == 0.0 || at_slit_end {
        PI
    } else {
        match table.tail() {
            Some(t) if t.exponent < 0.0 => PI,
            _ => last.theta,
        }
    };
    let winding = -(theta_inf - theta0) / PI;
    let k = winding.round();
    if (winding - k).abs() > 1e-3 || !winding.is_finite() {
        return Err(Error::Consistency { winding });
    }
    Ok(k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn case_function_reference_values() {
        let v = lambda_case(Complex64::new(2.0, 0.0)).unwrap();
        assert!((v.re + 0.09861228866810969).abs() < 1e-15, "{v}");
        assert_eq!(lambda_case(Complex64::new(0.0, 0.0)).unwrap().re, 1.0);
        assert!(lambda_case(Complex64::new(0.5, 0.0)).is_err());
        let z = Complex64::new(0.0, 1e4);
        let t = z * z * lambda_case(z).unwrap();
        assert!((t.re + 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn series_and_closed_form_agree_at_the_switch() {
        for arg in [0.1, 0.7, 1.6, 2.9] {
            let w = Complex64::from_polar(SERIES_RADIUS, arg);
            let one = Complex64::new(1.0, 0.0);
            let closed = one + w * 0.5 * ((w - one) / (w + one)).ln();
            assert!((closed - case_series(w)).norm() < 1e-15);
        }
    }

    #[test]
    fn case_boundary_values() {
        let v = lambda_case_boundary(0.5, Side::Above).unwrap();
        assert!((v.re - (1.0 - 0.25 * 3f64.ln())).abs() < 1e-15);
        assert!((v.im - PI / 4.0).abs() < 1e-15);
        assert_eq!(lambda_case_boundary(0.0, Side::Below).unwrap(), Complex64::new(1.0, 0.0));
        assert!(lambda_case_boundary(1.0, Side::Above).is_err());
        // Approaching the cut from above reproduces the + boundary value.
        let near = lambda_case(Complex64::new(0.5, 1e-12)).unwrap();
        assert!((near - v).norm() < 1e-10);
    }

    #[test]
    fn general_function_reduces_and_is_normalized() {
        let m0 = AlphaModel::new(0.0).unwrap();
        let z = Complex64::new(0.0, 2.0);
        assert_eq!(lambda_general(&m0, z).unwrap(), lambda_case(z).unwrap());
        let m1 = AlphaModel::new(1.0).unwrap();
        assert_eq!(lambda_general(&m1, Complex64::new(0.0, 0.0)).unwrap().re, 1.0);
        let small = lambda_general(&m1, Complex64::new(0.0, 1e-6)).unwrap();
        assert!((small - 1.0).norm() < 1e-5);
        assert!(lambda_general(&m1, Complex64::new(0.3, 0.0)).is_err());
    }

    #[test]
    fn boundary_samples_at_zero_exponent() {
        let m = AlphaModel::new(0.0).unwrap();
        let s = lambda_boundary(&m, 0.5).unwrap();
        assert!((s.lambda_real - (1.0 - 0.25 * 3f64.ln())).abs() < 1e-15);
        assert!((s.im_plus - PI / 4.0).abs() < 1e-14);
        let out = lambda_boundary(&m, 2.0).unwrap();
        assert_eq!(out.im_plus, 0.0);
        assert_eq!(out.theta, PI);
        assert!(out.lambda_real < 0.0);
        assert!(lambda_boundary(&m, 0.0).is_err());
    }

    #[test]
    fn boundary_value_matches_limit_from_upper_half_plane() {
        let m = AlphaModel::new(1.0).unwrap();
        for mu in [0.3, 1.0, 4.0] {
            let s = lambda_boundary(&m, mu).unwrap();
            let near = lambda_general(&m, Complex64::new(mu, 1e-7)).unwrap();
            let b = s.boundary_value(Side::Above);
            assert!((near - b).norm() < 1e-5 * b.norm().max(1e-3), "mu = {mu}: {near} vs {b}");
        }
    }

    #[test]
    fn single_node_table_has_no_index() {
        let m = AlphaModel::new(0.0).unwrap();
        let t = DispersionTable::from_samples(
            0.0,
            alloc::vec![lambda_boundary(&m, 0.5).unwrap()],
            Some(1.0),
            GridSpec::default(),
        )
        .unwrap();
        assert!(matches!(index_kappa(&t), Err(Error::Consistency { .. })));
    }

    #[test]
    fn zero_exponent_table_index_and_edge() {
        let m = AlphaModel::new(0.0).unwrap();
        let t = build_theta_table(&m, &GridSpec::default()).unwrap();
        assert_eq!(index_kappa(&t).unwrap(), -1);
        assert_eq!(t.theta(1.0), PI);
        assert_eq!(t.theta(3.0), PI);
        assert!(t.samples()[0].theta < 1e-3);
        assert!(t.tail().is_none());
    }

    #[test]
    fn geometric_grid_rejects_bad_bounds() {
        let m = AlphaModel::new(0.0).unwrap();
        let g = GridSpec::Geometric { mu_min: 1.0, mu_max: 0.5, nodes: 10 };
        assert!(build_theta_table(&m, &g).is_err());
        assert!(build_theta_table(&m, &GridSpec::Explicit(Vec::new())).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn conjugate_symmetry(re in -5.0f64..5.0, im in 0.01f64..5.0, pick in 0usize..3) {
            let m = AlphaModel::new([0.0, 1.0, 2.0][pick]).unwrap();
            let z = Complex64::new(re, im);
            let a = lambda_general(&m, z).unwrap();
            let b = lambda_general(&m, z.conj()).unwrap();
            prop_assert!((a.conj() - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }
}
