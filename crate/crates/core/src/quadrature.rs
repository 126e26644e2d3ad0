// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Gauss–Legendre rules and a doubling composite integrator.

use crate::error::QuadratureError;
use crate::scalar::{lit, Scalar};

/// Gauss–Legendre rule on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    /// Builds the `n`-point rule. Nodes come from Newton iteration on the
    /// Legendre recurrence, carried out in `f64`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Map [-1, 1] -> [0, 1], ascending order.
            nodes[i] = lit(0.5 * (1.0 - x));
            nodes[n - 1 - i] = lit(0.5 * (1.0 + x));
            weights[i] = lit(0.5 * w);
            weights[n - 1 - i] = lit(0.5 * w);
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over `[a, b]` with `m` equal panels.
    pub fn composite(&self, a: T, b: T, m: usize, mut f: impl FnMut(T) -> T) -> T {
        let h = (b - a) / T::from_usize_lossy(m);
        let mut acc = T::zero();
        for k in 0..m {
            let x0 = a + h * T::from_usize_lossy(k);
            let mut part = T::zero();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                part += *w * f(x0 + h * *x);
            }
            acc += part * h;
        }
        acc
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates a smooth `f` over `[a, b]` by doubling the panel count of a
/// 10-point rule until two successive sums agree to `tol` (absolute plus
/// relative). Fails after `max_levels` doublings.
pub fn integrate<T: Scalar>(
    a: T,
    b: T,
    tol: T,
    max_levels: usize,
    mut f: impl FnMut(T) -> T,
) -> Result<T, QuadratureError> {
    let rule = GaussLegendre::<T>::new(10);
    let mut m = 1;
    let mut prev = rule.composite(a, b, m, &mut f);
    for _ in 0..max_levels {
        m *= 2;
        let next = rule.composite(a, b, m, &mut f);
        if (next - prev).abs() <= tol * (T::one() + next.abs()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(QuadratureError::NonConvergence { panels: m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        for n in 1..12 {
            let g = GaussLegendre::<f64>::new(n);
            let s: f64 = g.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "n = {n}");
            // Exact for degree 2n - 1.
            let d = 2 * n - 1;
            let q = g.composite(0.0, 1.0, 1, |x| x.powi(d as i32));
            assert!((q - 1.0 / (d as f64 + 1.0)).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn nodes_ascending_in_unit_interval() {
        let g = GaussLegendre::<f64>::new(7);
        assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(g.nodes[0] > 0.0 && g.nodes[6] < 1.0);
        assert!((g.nodes[3] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn adaptive_gaussian() {
        let v = integrate(0.0f64, 10.0, 1e-14, 20, |x| (-x * x).exp()).unwrap();
        assert!((v - core::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
    }
}
