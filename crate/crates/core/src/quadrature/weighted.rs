use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use super::gauss::gauss_rule;
use crate::{Error, Result};

/// Gauss rule for a positive weight on a finite interval: `∫ w(x) f(x) dx ≈
/// Σ weights_i f(nodes_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl WeightedRule {
    /// Builds an `n`-point Gauss rule for `weight` on `[a, b]`.
    ///
    /// The measure is first discretized with `panels` Gauss–Legendre panels
    /// of order `panel_order`; the recurrence coefficients then come from a
    /// Lanczos process on that discrete measure (full reorthogonalization)
    /// and the rule from the eigen-decomposition of the Jacobi matrix.
    pub fn from_weight<W>(weight: W, a: f64, b: f64, n: usize, panels: usize, panel_order: usize) -> Result<Self>
    where
        W: Fn(f64) -> f64,
    {
        if !(a < b) || panels == 0 {
            return Err(Error::Config(format!("weighted rule needs a < b and at least one panel (a={a}, b={b})")));
        }
        let base = gauss_rule(panel_order)?;
        let h = (b - a) / panels as f64;
        let mut points = Vec::with_capacity(panels * panel_order);
        for p in 0..panels {
            let lo = a + h * p as f64;
            for (x, w) in base.mapped(lo, lo + h) {
                points.push((x, w * weight(x)));
            }
        }
        weighted_gauss_rule(&points, n)
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `n`-point Gauss rule for the discrete measure `Σ w_i δ(x − x_i)`.
pub fn weighted_gauss_rule(points: &[(f64, f64)], n: usize) -> Result<WeightedRule> {
    if n == 0 || n > points.len() {
        return Err(Error::Config(format!("weighted rule order {n} must be in 1..={}", points.len())));
    }
    if points.iter().any(|(x, w)| !x.is_finite() || !(*w >= 0.0)) {
        return Err(Error::Config("weighted rule needs finite nodes and nonnegative weights".into()));
    }
    let m = points.len();
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ws: Vec<f64> = points.iter().map(|p| p.1).collect();
    let mass: f64 = ws.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::Config("weighted rule needs positive total weight".into()));
    }

    let dot = |u: &[f64], v: &[f64]| -> f64 { (0..m).map(|i| ws[i] * u[i] * v[i]).sum() };

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    basis.push(vec![1.0 / mass.sqrt(); m]);
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for k in 0..n {
        let q = &basis[k];
        let xq: Vec<f64> = (0..m).map(|i| xs[i] * q[i]).collect();
        diag[k] = dot(&xq, q);
        if k + 1 == n {
            break;
        }
        let mut r = xq;
        for _ in 0..2 {
            for prev in &basis {
                let c = dot(&r, prev);
                for i in 0..m {
                    r[i] -= c * prev[i];
                }
            }
        }
        let norm = dot(&r, &r).sqrt();
        if !(norm > 0.0) {
            return Err(Error::Config(format!("measure supports fewer than {n} distinct nodes")));
        }
        off[k] = norm;
        for v in r.iter_mut() {
            *v /= norm;
        }
        basis.push(r);
    }

    let mut vectors = vec![vec![0.0; n]; n];
    for (i, row) in vectors.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    symmetric_tridiagonal_eigen(&mut diag, &mut off, &mut vectors)?;

    let mut pairs: Vec<(f64, f64)> = (0..n).map(|j| (diag[j], mass * vectors[0][j] * vectors[0][j])).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(WeightedRule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

/// Implicit QL with Wilkinson shifts. `diag` receives the eigenvalues,
/// columns of `vectors` the eigenvectors; `off[i]` couples rows `i` and
/// `i + 1` (the last entry is ignored).
fn symmetric_tridiagonal_eigen(diag: &mut [f64], off: &mut [f64], vectors: &mut [Vec<f64>]) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::Solver("tridiagonal QL did not converge".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                for row in vectors.iter_mut() {
                    let t = row[i + 1];
                    row[i + 1] = s * row[i] + c * t;
                    row[i] = c * row[i] - s * t;
                }
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_weight_reproduces_gauss_legendre() {
        let r = WeightedRule::from_weight(|_| 1.0, -1.0, 1.0, 8, 20, 16).unwrap();
        let gl = gauss_rule(8).unwrap();
        for i in 0..8 {
            assert!((r.nodes[i] - gl.nodes[i]).abs() < 1e-13, "{i}");
            assert!((r.weights[i] - gl.weights[i]).abs() < 1e-13, "{i}");
        }
    }

    #[test]
    fn laguerre_like_weight_integrates_high_moments() {
        // Weight x^2 e^{-x} on (0, 60): moments are Γ(k + 3) up to tail.
        let r = WeightedRule::from_weight(|x| x * x * (-x).exp(), 0.0, 60.0, 20, 120, 16).unwrap();
        let mut fact = 2.0;
        for k in 0..12 {
            if k > 0 {
                fact *= (k + 2) as f64;
            }
            let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k)).sum();
            assert!((q / fact - 1.0).abs() < 1e-9, "k = {k}: {q} vs {fact}");
        }
        assert!(r.weights.iter().all(|w| *w > 0.0));
        assert!(r.nodes.iter().all(|x| *x > 0.0 && *x < 60.0));
    }

    #[test]
    fn rejects_order_beyond_support() {
        let pts = [(0.0, 1.0), (1.0, 1.0)];
        assert!(weighted_gauss_rule(&pts, 3).is_err());
    }
}
