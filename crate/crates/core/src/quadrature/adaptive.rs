use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::gauss::{gauss_rule, QuadratureRule};
use crate::{Error, Result};

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn magnitude(&self) -> f64 {
        self.re.abs() + self.im.abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadConfig {
    /// Gauss–Legendre order applied on every panel.
    pub order: usize,
    /// Maximum number of bisections of the original interval.
    pub max_depth: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { order: 64, max_depth: 30 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Adaptive panel-refined Gauss–Legendre integrator.
///
/// Each panel is compared with the sum over its two halves; the panel with
/// the largest discrepancy is bisected until the summed discrepancy drops
/// below `tol` times the integral of `|f|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    cfg: QuadConfig,
    rule: QuadratureRule,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::new(QuadConfig::default()).expect("default order is valid")
    }
}

// Below this relative width the children's nodes would collide with the
// endpoints in double precision.
const MIN_REL_WIDTH: f64 = 1e4 * f64::EPSILON;
const ROUNDOFF_REL: f64 = 1e3 * f64::EPSILON;
const MAX_PANELS: usize = 1 << 15;

struct Panel<T> {
    a: f64,
    b: f64,
    depth: usize,
    left: T,
    right: T,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.a.total_cmp(&self.a))
    }
}

impl Quadrature {
    pub fn new(cfg: QuadConfig) -> Result<Self> {
        if cfg.max_depth == 0 || cfg.max_depth > 60 {
            return Err(Error::Config(format!("adaptive depth {} outside 1..=60", cfg.max_depth)));
        }
        Ok(Quadrature { cfg, rule: gauss_rule(cfg.order)? })
    }

    pub fn config(&self) -> QuadConfig {
        self.cfg
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Adaptive integral, returning only the value.
    pub fn integrate<T, F>(&self, f: F, a: f64, b: f64, tol: f64) -> Result<T>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        self.integrate_estimate(f, a, b, tol).map(|e| e.value)
    }

    /// Adaptive integral with its error estimate.
    pub fn integrate_estimate<T, F>(&self, f: F, a: f64, b: f64, tol: f64) -> Result<Estimate<T>>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        self.integrate_floor(f, a, b, tol, 0.0)
    }

    /// Like [`Self::integrate_estimate`], but also accepts once the error
    /// estimate drops below the absolute `floor`. Useful for one piece of a
    /// larger sum whose own magnitude may be negligible.
    pub fn integrate_floor<T, F>(&self, f: F, a: f64, b: f64, tol: f64, floor: f64) -> Result<Estimate<T>>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        if !(tol > 0.0) || !(floor >= 0.0) {
            return Err(Error::Config(format!(
                "quadrature tolerance {tol} must be positive and floor {floor} nonnegative"
            )));
        }
        if a == b {
            return Ok(Estimate { value: T::zero(), error: 0.0 });
        }
        if a > b {
            let e = self.integrate_floor(f, b, a, tol, floor)?;
            return Ok(Estimate { value: -e.value, error: e.error });
        }
        let make = |a: f64, b: f64, depth: usize, coarse: T| -> Panel<T> {
            let m = 0.5 * (a + b);
            let left = self.rule.apply(&f, a, m);
            let right = self.rule.apply(&f, m, b);
            let err = (coarse - (left + right)).magnitude();
            Panel { a, b, depth, left, right, err }
        };

        let root = make(a, b, 0, self.rule.apply(&f, a, b));
        let weight = |p: &Panel<T>| p.left.magnitude() + p.right.magnitude();
        let mut run_error = root.err;
        let mut run_scale = weight(&root);
        let mut open: BinaryHeap<Panel<T>> = BinaryHeap::new();
        let mut closed: Vec<Panel<T>> = Vec::new();
        open.push(root);

        loop {
            if !run_error.is_finite() || !run_scale.is_finite() {
                return Err(Error::Accuracy { estimate: f64::NAN, error: run_error });
            }
            if run_error <= (tol * run_scale).max(floor) || run_scale == 0.0 {
                // Running sums drift; confirm with an ordered recount.
                let (value, error, scale) = totals(open.iter().chain(closed.iter()));
                if error <= (tol * scale).max(floor) || scale == 0.0 {
                    return Ok(Estimate { value, error });
                }
                run_error = error;
                run_scale = scale;
            }
            let Some(worst) = open.pop() else {
                let (value, error, scale) = totals(closed.iter());
                // Every panel is at its resolution limit; rounding-level
                // error is the best any rule can do.
                if error <= ROUNDOFF_REL * scale {
                    return Ok(Estimate { value, error });
                }
                return Err(Error::Accuracy { estimate: value.magnitude(), error });
            };
            let narrow = worst.b - worst.a <= MIN_REL_WIDTH * worst.a.abs().max(worst.b.abs());
            if worst.depth >= self.cfg.max_depth || narrow || open.len() + closed.len() >= MAX_PANELS {
                closed.push(worst);
                continue;
            }
            run_error -= worst.err;
            run_scale -= weight(&worst);
            let m = 0.5 * (worst.a + worst.b);
            for child in [make(worst.a, m, worst.depth + 1, worst.left), make(m, worst.b, worst.depth + 1, worst.right)]
            {
                run_error += child.err;
                run_scale += weight(&child);
                open.push(child);
            }
        }
    }
}

/// Sums over panels sorted by left endpoint so the result does not depend on
/// heap order.
fn totals<'a, T: QuadValue + 'a>(panels: impl Iterator<Item = &'a Panel<T>>) -> (T, f64, f64) {
    let mut list: Vec<&Panel<T>> = panels.collect();
    list.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = T::zero();
    let mut error = 0.0;
    let mut scale = 0.0;
    for p in list {
        value = value + p.left + p.right;
        error += p.err;
        scale += p.left.magnitude() + p.right.magnitude();
    }
    (value, error, scale)
}
