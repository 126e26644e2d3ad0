// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! The truncated Gaussian `Φ_ε = c(ε)·ψ·Φ̂_ε` and its cutoff profile ψ.

use crate::error::QuadratureError;
use crate::geometry::{Mat2, Vec2};
use crate::quadrature::integrate;
use crate::scalar::{lit, Scalar};

/// Radius up to which ψ ≡ 1.
pub const CUTOFF_FLAT: f64 = 0.6;
/// Radius from which ψ ≡ 0.
pub const CUTOFF_END: f64 = 1.0;
const RAMP: f64 = 0.06;
const SPAN: f64 = CUTOFF_END - CUTOFF_FLAT;
const VMAX: f64 = 1.0 / (SPAN - RAMP);

/// Fixed radial cutoff ψ. It is 1 on `B_{0.6}`, 0 outside `B_1`, and a
/// C² piecewise quartic in between whose slope follows a
/// ramp–cruise–ramp profile.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cutoff;

impl Cutoff {
    /// Sup of `|ψ'|`.
    pub const MAX_SLOPE: f64 = VMAX;
    /// Sup of `|ψ''|`.
    pub const MAX_CURVATURE: f64 = 1.5 * VMAX / RAMP;

    /// `(S, S', S'')` of the descent `S = 1 − ψ` at `u = r − 0.6`.
    fn descent<T: Scalar>(u: T) -> (T, T, T) {
        let (tau, v, span) = (lit::<T>(RAMP), lit::<T>(VMAX), lit::<T>(SPAN));
        let six = lit::<T>(6.0);
        if u <= T::zero() {
            (T::zero(), T::zero(), T::zero())
        } else if u >= span {
            (T::one(), T::zero(), T::zero())
        } else if u < tau {
            let q = u / tau;
            let q3 = q * q * q;
            (v * tau * (q3 - q3 * q * lit(0.5)), v * (lit::<T>(3.0) * q * q - lit::<T>(2.0) * q3), v * six * q * (T::one() - q) / tau)
        } else if u <= span - tau {
            (v * tau * lit(0.5) + v * (u - tau), v, T::zero())
        } else {
            let q = (span - u) / tau;
            let q3 = q * q * q;
            (T::one() - v * tau * (q3 - q3 * q * lit(0.5)), v * (lit::<T>(3.0) * q * q - lit::<T>(2.0) * q3), -v * six * q * (T::one() - q) / tau)
        }
    }

    #[inline]
    pub fn value<T: Scalar>(r: T) -> T {
        T::one() - Self::descent(r - lit(CUTOFF_FLAT)).0
    }

    /// `1 − ψ(r)`, without cancellation.
    #[inline]
    pub fn complement<T: Scalar>(r: T) -> T {
        Self::descent(r - lit(CUTOFF_FLAT)).0
    }

    #[inline]
    pub fn slope<T: Scalar>(r: T) -> T {
        -Self::descent(r - lit(CUTOFF_FLAT)).1
    }

    #[inline]
    pub fn curvature<T: Scalar>(r: T) -> T {
        -Self::descent(r - lit(CUTOFF_FLAT)).2
    }

    /// Break points of the piecewise definition, in increasing order.
    pub fn knots<T: Scalar>() -> [T; 4] {
        [
            lit(CUTOFF_FLAT),
            lit(CUTOFF_FLAT + RAMP),
            lit(CUTOFF_END - RAMP),
            lit(CUTOFF_END),
        ]
    }
}

/// The kernel `Φ_ε` for curves in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernel<T> {
    pub epsilon: T,
    /// Normalization `c(ε)`.
    pub normalization: T,
    /// Natural log of `c(ε) − 1`, kept separately because the excess drops
    /// below the unit roundoff once ε is small.
    pub log_excess: T,
}

impl<T: Scalar> Kernel<T> {
    pub fn new(epsilon: T) -> Result<Self, QuadratureError> {
        let (c, log_excess) = kernel_normalize(epsilon)?;
        Ok(Self { epsilon, normalization: c, log_excess })
    }

    /// Radius beyond which the kernel is treated as zero by the quadratures.
    pub fn support(&self) -> T {
        T::one().min(lit::<T>(6.0) * self.epsilon)
    }

    /// Whether ψ ≡ 1 on the truncated support, so Φ_ε factors in x and y.
    pub fn is_separable(&self) -> bool {
        self.support() <= lit(CUTOFF_FLAT)
    }

    /// `c(ε)/(2πε²)`, the value at the origin.
    pub fn peak(&self) -> T {
        self.normalization / (T::TAU() * self.epsilon * self.epsilon)
    }

    /// Untruncated Gaussian `Φ̂_ε`.
    #[inline]
    pub fn gaussian(&self, x: Vec2<T>) -> T {
        let e2 = self.epsilon * self.epsilon;
        (-x.norm2() / (lit::<T>(2.0) * e2)).exp() / (T::TAU() * e2)
    }

    #[inline]
    pub fn value(&self, x: Vec2<T>) -> T {
        let r = x.norm();
        if r >= T::one() {
            return T::zero();
        }
        self.normalization * Cutoff::value(r) * self.gaussian(x)
    }

    /// `(Φ_ε(x), ∇Φ_ε(x))`; both vanish for `|x| ≥ 1`.
    pub fn eval(&self, x: Vec2<T>) -> (T, Vec2<T>) {
        let r = x.norm();
        if r >= T::one() {
            return (T::zero(), Vec2::zero());
        }
        let e2 = self.epsilon * self.epsilon;
        let g = self.gaussian(x);
        let c = self.normalization;
        let psi = Cutoff::value(r);
        let v = c * psi * g;
        let mut grad = x * (-v / e2);
        let ds = Cutoff::slope(r);
        if ds != T::zero() {
            grad += x * (c * ds * g / r);
        }
        (v, grad)
    }

    /// `∇²Φ_ε(x)`.
    pub fn hessian(&self, x: Vec2<T>) -> Mat2<T> {
        let r = x.norm();
        if r >= T::one() {
            return Mat2::zero();
        }
        let e2 = self.epsilon * self.epsilon;
        let g = self.gaussian(x);
        let c = self.normalization;
        let psi = Cutoff::value(r);
        let hg = Mat2::outer(x, x).scale(g / (e2 * e2)).add(&Mat2::identity().scale(-g / e2));
        let mut h = hg.scale(psi);
        let ds = Cutoff::slope(r);
        if ds != T::zero() {
            let u = x / r;
            let uu = Mat2::outer(u, u);
            let hpsi = uu.scale(Cutoff::curvature(r)).add(&Mat2::identity().add(&uu.scale(-T::one())).scale(ds / r));
            let gpsi = u * ds;
            let gg = x * (-g / e2);
            h = h.add(&hpsi.scale(g)).add(&Mat2::outer(gpsi, gg)).add(&Mat2::outer(gg, gpsi));
        }
        h.scale(c)
    }

    /// `ε²c(ε)∇ψ(x)Φ̂_ε(x)`, the right-hand side of the Gaussian identity
    /// `xΦ_ε + ε²∇Φ_ε = ε²c∇ψΦ̂_ε`.
    pub fn cutoff_term(&self, x: Vec2<T>) -> Vec2<T> {
        let r = x.norm();
        let ds = Cutoff::slope(r);
        if ds == T::zero() {
            return Vec2::zero();
        }
        x * (self.epsilon * self.epsilon * self.normalization * ds * self.gaussian(x) / r)
    }
}

/// Returns `(c(ε), ln(c(ε) − 1))` with `c(ε)⁻¹ = ∫ψΦ̂_ε`.
///
/// The radial mass is `1 − D` where
/// `D = ∫_{0.6}^1 (1−ψ)(r/ε²)e^{−r²/2ε²} dr + e^{−1/2ε²}`, so D is
/// integrated directly with the factor `e^{−0.18/ε²}` pulled out.
pub fn kernel_normalize<T: Scalar>(epsilon: T) -> Result<(T, T), QuadratureError> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(QuadratureError::NonConvergence { panels: 0 });
    }
    let e2 = epsilon * epsilon;
    let a = lit::<T>(CUTOFF_FLAT);
    let shift = a * a / (lit::<T>(2.0) * e2);
    let tol = lit::<T>(1e-13).max(T::epsilon() * lit(16.0));
    let k = Cutoff::knots::<T>();
    let mut bracket = (shift - T::one() / (lit::<T>(2.0) * e2)).exp();
    for w in k.windows(2) {
        let f = |r: T| Cutoff::complement(r) * (r / e2) * (shift - r * r / (lit::<T>(2.0) * e2)).exp();
        // Split each piece further so the exponential is resolved when ε is small.
        let pieces = ((w[1] - w[0]) / e2).ceil().to_usize().unwrap_or(1).clamp(1, 64);
        let h = (w[1] - w[0]) / T::from_usize_lossy(pieces);
        for p in 0..pieces {
            let lo = w[0] + h * T::from_usize_lossy(p);
            bracket += integrate(lo, lo + h, tol, 12, f)?;
        }
    }
    let log_d = bracket.ln() - shift;
    let d = log_d.exp();
    let c = T::one() / (T::one() - d);
    let log_excess = log_d - (-d).ln_1p();
    Ok((c, log_excess))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_c2_and_bounded() {
        let k = Cutoff::knots::<f64>();
        for &x in &k {
            for (f, name) in [
                (Cutoff::value::<f64> as fn(f64) -> f64, "value"),
                (Cutoff::slope::<f64>, "slope"),
                (Cutoff::curvature::<f64>, "curvature"),
            ] {
                let l = f(x - 1e-12);
                let r = f(x + 1e-12);
                assert!((l - r).abs() < 1e-8, "{name} jumps at {x}: {l} vs {r}");
            }
        }
        assert_eq!(Cutoff::value(0.3f64), 1.0);
        assert_eq!(Cutoff::value(1.2f64), 0.0);
        let mut prev = 1.0;
        for i in 0..=4000 {
            let r = 0.5 + 0.6 * i as f64 / 4000.0;
            let v = Cutoff::value(r);
            assert!(v <= prev + 1e-15);
            prev = v;
            assert!(Cutoff::slope(r).abs() <= 3.0);
            assert!(Cutoff::curvature(r).abs() <= Cutoff::MAX_CURVATURE + 1e-9);
        }
    }

    #[test]
    fn derivatives_match_differences() {
        for i in 1..400 {
            let r = 0.59 + 0.42 * i as f64 / 400.0;
            let h = 1e-6;
            let fd = (Cutoff::value(r + h) - Cutoff::value(r - h)) / (2.0 * h);
            assert!((fd - Cutoff::slope(r)).abs() < 1e-6);
            let fd2 = (Cutoff::slope(r + h) - Cutoff::slope(r - h)) / (2.0 * h);
            assert!((fd2 - Cutoff::curvature(r)).abs() < 1e-4);
        }
    }

    #[test]
    fn origin_value() {
        let k = Kernel::new(0.1f64).unwrap();
        let v = k.eval(Vec2::zero()).0;
        assert!((v - 15.915494309189533 * k.normalization).abs() < 1e-12);
        assert_eq!(k.eval(Vec2::new(1.5, 0.0)), (0.0, Vec2::zero()));
    }

    #[test]
    fn normalization_examples() {
        let (c, _) = kernel_normalize(0.1f64).unwrap();
        assert!(c > 1.0 && c < 1.0 + 1e-9, "{c}");
        let (c, _) = kernel_normalize(0.5f64).unwrap();
        assert!(c > 1.156 && c < 2.54, "{c}");
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let k = Kernel::new(0.3f64).unwrap();
        for i in 0..60 {
            let a = i as f64 * 0.41;
            let r = 0.05 + 0.9 * i as f64 / 60.0;
            let x = Vec2::new(r * a.cos(), r * a.sin());
            let h = k.hessian(x);
            let d = 1e-6;
            let gx = (k.eval(x + Vec2::new(d, 0.0)).1 - k.eval(x - Vec2::new(d, 0.0)).1) / (2.0 * d);
            let gy = (k.eval(x + Vec2::new(0.0, d)).1 - k.eval(x - Vec2::new(0.0, d)).1) / (2.0 * d);
            let scale = h.op_norm().max(1.0);
            assert!((h.m[0][0] - gx.x).abs() < 1e-5 * scale);
            assert!((h.m[1][0] - gx.y).abs() < 1e-5 * scale);
            assert!((h.m[0][1] - gy.x).abs() < 1e-5 * scale);
            assert!((h.m[1][1] - gy.y).abs() < 1e-5 * scale);
        }
    }
}
