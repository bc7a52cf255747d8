use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Applies the rule to `f` on `[a, b]`.
    #[inline]
    pub fn apply<T, F>(&self, f: &F, a: f64, b: f64) -> T
    where
        T: super::QuadValue,
        F: Fn(f64) -> T,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * *w;
        }
        acc * half
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }
}

/// Gauss–Legendre rule of order `n` from Newton iteration on `P_n`.
pub fn gauss_rule(n: usize) -> Result<QuadratureRule> {
    if !(1..=10_000).contains(&n) {
        return Err(Error::Config(format!("Gauss-Legendre order {n} outside 1..=10000")));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-3) {
                break;
            }
        }
        // Recompute the derivative at the converged node for the weight.
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0) * x * p2 - (jf - 1.0) * p3) / jf;
    }
    let d = n as f64 * (x * p1 - p2) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn order_one_is_midpoint() {
        let r = gauss_rule(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn order_two_closed_form() {
        let r = gauss_rule(2).unwrap();
        let s = 1.0 / 3.0f64.sqrt();
        assert!((r.nodes[0] + s).abs() < 1e-15 && (r.nodes[1] - s).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15 && (r.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn order_64_integrates_degree_126() {
        let r = gauss_rule(64).unwrap();
        let v: f64 = r.apply(&|t: f64| t.powi(126), -1.0, 1.0);
        assert!((v - 2.0 / 127.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_order() {
        assert!(matches!(gauss_rule(0), Err(Error::Config(_))));
        assert!(matches!(gauss_rule(10_001), Err(Error::Config(_))));
    }

    proptest! {
        #[test]
        fn weights_positive_nodes_increasing_sum_two(n in 1usize..300) {
            let r = gauss_rule(n).unwrap();
            prop_assert!(r.weights.iter().all(|w| *w > 0.0));
            prop_assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
            let s: f64 = r.weights.iter().sum();
            prop_assert!((s - 2.0).abs() < 1e-13);
            for i in 0..n {
                prop_assert!((r.nodes[i] + r.nodes[n - 1 - i]).abs() < 1e-15);
            }
        }

        #[test]
        fn exact_for_monomials_up_to_2n_minus_1(n in 1usize..40, k in 0usize..80) {
            prop_assume!(k < 2 * n);
            let r = gauss_rule(n).unwrap();
            let v: f64 = r.apply(&|t: f64| t.powi(k as i32), -1.0, 1.0);
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            prop_assert!((v - exact).abs() < 1e-12);
        }
    }
}
