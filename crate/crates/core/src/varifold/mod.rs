// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! The unit-density boundary varifold of a network, its first variation and
//! its kernel smoothings.

mod checks;
mod lattice;

pub use checks::{inequality_suite, Fault, InequalityCheck, InequalityReport};
pub use lattice::{l2_energy, smoothed_mean_curvature, CurvatureField, QuadratureConfig};

use crate::domain::Domain;
use crate::geometry::{segment_disk_interval, Mat2, Vec2};
use crate::kernel::Kernel;
use crate::network::LabeledNetwork;
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, Scalar};
use crate::weights::{ScalarField, VectorField, WeightFunction};

/// One polyline segment with its tangent line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarifoldSegment<T> {
    pub a: Vec2<T>,
    /// Second endpoint, lifted next to `a` on the torus.
    pub b: Vec2<T>,
    pub tangent: Vec2<T>,
    pub length: T,
    pub edge: usize,
}

/// Point source of the first variation: `δV(g) = Σ g(p)·t` for a
/// piecewise linear `g`, with `t` the sum of unit tangents arriving at the
/// vertex minus those leaving it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TurningSource<T> {
    pub vertex: usize,
    pub position: Vec2<T>,
    pub turning: Vec2<T>,
}

#[derive(Clone, Debug)]
pub struct VarifoldView<T> {
    pub domain: Domain<T>,
    pub segments: Vec<VarifoldSegment<T>>,
    pub total_mass: T,
    pub omega: WeightFunction<T>,
    pub sources: Vec<TurningSource<T>>,
}

/// Builds the unit-density varifold of `net`. Anchored ends (boundary
/// leaving a plane window) carry no turning source: the curve is taken to
/// continue straight beyond the window.
pub fn build_varifold_view<T: Scalar>(net: &LabeledNetwork<T>, omega: WeightFunction<T>) -> VarifoldView<T> {
    let mut segments = Vec::with_capacity(net.segment_count());
    let mut turning = vec![Vec2::zero(); net.vertices.len()];
    let mut total = T::zero();
    for (e, a, b) in net.segments() {
        let (pa, pb) = net.segment(a, b);
        let d = pb - pa;
        let length = d.norm();
        let tangent = d / length;
        total += length;
        turning[b] += tangent;
        turning[a] -= tangent;
        segments.push(VarifoldSegment { a: pa, b: pb, tangent, length, edge: e });
    }
    let degrees = net.degrees();
    let tol = lit::<T>(1e-9);
    let floor = T::epsilon() * lit(16.0);
    let sources = turning
        .iter()
        .enumerate()
        .filter(|&(v, t)| degrees[v] > 0 && t.norm() > floor && !net.is_anchor(v, degrees[v], tol))
        .map(|(v, &t)| TurningSource { vertex: v, position: net.vertices[v], turning: t })
        .collect();
    VarifoldView { domain: net.domain, segments, total_mass: total, omega, sources }
}

/// `∫_s f ds` by order-`n` Gauss–Legendre on panels no longer than
/// `max_len`. The sum is formed as `L·(f₀ + Σ wᵢ(fᵢ − f₀))`, so a constant
/// integrand is integrated exactly.
fn segment_integral<T: Scalar>(
    s: &VarifoldSegment<T>,
    rule: &GaussLegendre<T>,
    max_len: T,
    mut f: impl FnMut(Vec2<T>) -> T,
) -> T {
    let panels = (s.length / max_len).ceil().to_usize().unwrap_or(1).max(1);
    let h = T::one() / T::from_usize_lossy(panels);
    let mut reference = None;
    let mut acc = T::zero();
    for p in 0..panels {
        let t0 = h * T::from_usize_lossy(p);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let v = f(s.a + (s.b - s.a) * (t0 + h * x));
            let r = *reference.get_or_insert(v);
            acc += w * h * (v - r);
        }
    }
    s.length * (reference.unwrap_or_else(T::zero) + acc)
}

fn sum_segments<T: Scalar>(
    v: &VarifoldView<T>,
    max_len: T,
    mut f: impl FnMut(&VarifoldSegment<T>, Vec2<T>) -> T,
) -> T {
    let rule = GaussLegendre::<T>::new(4);
    let mut acc = T::zero();
    for s in &v.segments {
        acc += segment_integral(s, &rule, max_len, |p| f(s, p));
    }
    acc
}

impl<T: Scalar> VarifoldView<T> {
    /// `∫ f d‖V‖`.
    pub fn integrate(&self, max_len: T, mut f: impl FnMut(Vec2<T>) -> T) -> T {
        sum_segments(self, max_len, |_, p| f(p))
    }

    /// `‖V‖(Ω)`; exactly the total length when `Ω ≡ 1`.
    pub fn weighted_mass(&self, max_len: T) -> T {
        if self.omega.is_one() {
            return self.total_mass;
        }
        let om = self.omega;
        self.integrate(max_len, |p| om.value(p))
    }
}

/// `δV(g) = ∫ S·∇g dV`, with `S·∇g = τᵀ(∇g)τ` on a segment.
pub fn first_variation<T: Scalar>(v: &VarifoldView<T>, g: &impl VectorField<T>, max_len: T) -> T {
    sum_segments(v, max_len, |s, p| s.tangent.dot(g.jacobian(p).mul_vec(s.tangent)))
}

/// `δ(V, φ)(g) = ∫ φ ∇g·S dV + ∫ g·∇φ d‖V‖`.
pub fn weighted_first_variation<T: Scalar>(
    v: &VarifoldView<T>,
    phi: &impl ScalarField<T>,
    g: &impl VectorField<T>,
    max_len: T,
) -> T {
    sum_segments(v, max_len, |s, p| {
        phi.value(p) * s.tangent.dot(g.jacobian(p).mul_vec(s.tangent)) + g.value(p).dot(phi.gradient(p))
    })
}

/// Image shifts of the torus that can bring a point within distance 1.
fn shifts<T: Scalar>(domain: &Domain<T>) -> Vec<Vec2<T>> {
    if domain.is_torus() {
        let mut out = Vec::with_capacity(9);
        for i in -1i32..=1 {
            for j in -1i32..=1 {
                out.push(Vec2::new(T::from_i32(i).unwrap(), T::from_i32(j).unwrap()));
            }
        }
        out
    } else {
        vec![Vec2::zero()]
    }
}

/// `(Φ_ε ∗ ‖V‖)(y)`, integrating each segment's chord inside the truncated
/// support with panels of length at most `ε/4`.
pub fn convolve_mass<T: Scalar>(v: &VarifoldView<T>, k: &Kernel<T>, y: Vec2<T>) -> T {
    let radius = k.support();
    let rule = GaussLegendre::<T>::new(4);
    let panel = k.epsilon * lit(0.25);
    let mut acc = T::zero();
    for s in &v.segments {
        for shift in shifts(&v.domain) {
            // Place the segment next to y, then try each image.
            let base = v.domain.near(y, s.a) - s.a + shift;
            let (a, b) = (s.a + base, s.b + base);
            let Some((t0, t1)) = segment_disk_interval(a, b, y, radius) else { continue };
            let len = (t1 - t0) * s.length;
            if len <= T::zero() {
                continue;
            }
            let m = (len / panel).ceil().to_usize().unwrap_or(1).max(1);
            let pa = a + (b - a) * t0;
            let pb = a + (b - a) * t1;
            acc += rule.composite(T::zero(), len, m, |u| k.value(pa + (pb - pa) * (u / len) - y));
        }
    }
    acc
}

/// `(Φ_ε ∗ δV)(y) = ∫ S ∇Φ_ε(x − y) dV(x)`. On a segment the integrand is
/// `τ ∂_τ Φ_ε`, so the integral is `Σ_v Φ_ε(v − y) t_v` over turning
/// sources, exact up to rounding.
pub fn convolve_first_variation<T: Scalar>(v: &VarifoldView<T>, k: &Kernel<T>, y: Vec2<T>) -> Vec2<T> {
    let mut acc = Vec2::zero();
    for src in &v.sources {
        for shift in shifts(&v.domain) {
            let d = v.domain.delta(y, src.position) + shift;
            if d.norm2() < T::one() {
                acc += src.turning * k.value(d);
            }
        }
    }
    acc
}

/// Product field `φ·g`.
pub struct ScaledField<'a, S, G> {
    pub phi: &'a S,
    pub g: &'a G,
}

impl<T: Scalar, S: ScalarField<T>, G: VectorField<T>> VectorField<T> for ScaledField<'_, S, G> {
    fn value(&self, x: Vec2<T>) -> Vec2<T> {
        self.g.value(x) * self.phi.value(x)
    }
    fn jacobian(&self, x: Vec2<T>) -> Mat2<T> {
        self.g.jacobian(x).scale(self.phi.value(x)).add(&Mat2::outer(self.g.value(x), self.phi.gradient(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BBox;
    use crate::weights::AffineField;

    fn plane() -> Domain<f64> {
        Domain::Plane { bbox: BBox::new(Vec2::new(-10.0, -10.0), Vec2::new(10.0, 10.0)) }
    }

    #[test]
    fn unit_segment_view() {
        let mut net = LabeledNetwork::new(plane(), 1);
        net.add_polyline(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)], false, 1, 1);
        let v = build_varifold_view(&net, WeightFunction::One);
        assert_eq!(v.segments.len(), 1);
        assert_eq!(v.total_mass, 1.0);
        assert_eq!(v.segments[0].tangent, Vec2::new(1.0, 0.0));
        let g = AffineField { m: Mat2::new(1.0, 0.0, 0.0, 0.0), b: Vec2::zero() };
        assert_eq!(first_variation(&v, &g, 0.1), 1.0);
    }

    #[test]
    fn polygon_first_variation_is_perimeter() {
        let mut net = LabeledNetwork::new(plane(), 2);
        let pts: Vec<_> = (0..64).map(|i| Vec2::from_angle(i as f64 * std::f64::consts::TAU / 64.0)).collect();
        net.add_polyline(&pts, true, 2, 1);
        let v = build_varifold_view(&net, WeightFunction::One);
        let perimeter = 64.0 * 2.0 * (std::f64::consts::PI / 64.0).sin();
        assert!((v.total_mass - perimeter).abs() < 1e-13);
        let g = AffineField { m: Mat2::identity(), b: Vec2::zero() };
        assert!((first_variation(&v, &g, 0.05) - perimeter).abs() < 1e-12 * perimeter);
        // δV(g) = Σ g(v)·t_v for affine g.
        let discrete: f64 = v.sources.iter().map(|s| s.position.dot(s.turning)).sum();
        assert!((discrete - perimeter).abs() < 1e-12, "{discrete} vs {perimeter}");
    }

    #[test]
    fn line_marginal() {
        let mut net = LabeledNetwork::new(plane(), 2);
        net.add_polyline(&[Vec2::new(-5.0, 0.0), Vec2::new(5.0, 0.0)], false, 1, 2);
        let v = build_varifold_view(&net, WeightFunction::One);
        let k = Kernel::new(0.1).unwrap();
        let m = convolve_mass(&v, &k, Vec2::new(0.3, 0.0));
        let expected = k.normalization / ((std::f64::consts::TAU).sqrt() * 0.1);
        assert!((m - expected).abs() < 1e-7 * expected, "{m} vs {expected}");
        assert_eq!(convolve_mass(&v, &k, Vec2::new(0.0, 2.0)), 0.0);
        // Interior vertices of a straight edge carry no turning; the ends do.
        assert_eq!(convolve_first_variation(&v, &k, Vec2::new(0.3, 0.0)), Vec2::zero());
    }
}
