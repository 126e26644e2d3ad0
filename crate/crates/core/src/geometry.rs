// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Small planar vector and matrix types plus the segment predicates used by
//! validation, deformation and diagnostics.

use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Scalar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    #[inline]
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm2(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    /// Counter-clockwise rotation by a right angle.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    #[inline]
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self / n
        } else {
            Self::zero()
        }
    }

    #[inline]
    pub fn angle(self) -> T {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn from_angle(theta: T) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn cast<U: Scalar>(self) -> Vec2<U> {
        Vec2::new(U::lit(self.x.to_f64_lossy()), U::lit(self.y.to_f64_lossy()))
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> AddAssign for Vec2<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> SubAssign for Vec2<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl<T: Scalar> Mul<T> for Vec2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Scalar> Div<T> for Vec2<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s)
    }
}

impl<T: Scalar> Neg for Vec2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Row-major 2x2 matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Scalar> Mat2<T> {
    #[inline]
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    #[inline]
    pub fn outer(a: Vec2<T>, b: Vec2<T>) -> Self {
        Self::new(a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y)
    }

    #[inline]
    pub fn mul_vec(&self, v: Vec2<T>) -> Vec2<T> {
        Vec2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    #[inline]
    pub fn scale(&self, s: T) -> Self {
        Self::new(self.m[0][0] * s, self.m[0][1] * s, self.m[1][0] * s, self.m[1][1] * s)
    }

    #[inline]
    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }

    /// Frobenius inner product.
    #[inline]
    pub fn frob(&self, o: &Self) -> T {
        self.m[0][0] * o.m[0][0]
            + self.m[0][1] * o.m[0][1]
            + self.m[1][0] * o.m[1][0]
            + self.m[1][1] * o.m[1][1]
    }

    /// Operator 2-norm (largest singular value).
    pub fn op_norm(&self) -> T {
        let [[a, b], [c, d]] = self.m;
        let s1 = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = (s1 * s1 - lit::<T>(4.0) * det * det).max(T::zero()).sqrt();
        ((s1 + disc) * lit(0.5)).sqrt()
    }
}

/// Signed area of a closed polygon (counter-clockwise positive).
pub fn polygon_area<T: Scalar>(pts: &[Vec2<T>]) -> T {
    let n = pts.len();
    if n < 3 {
        return T::zero();
    }
    let mut acc = T::zero();
    for i in 0..n {
        acc += pts[i].cross(pts[(i + 1) % n]);
    }
    acc * lit(0.5)
}

/// Distance from `p` to the closed segment `ab`.
pub fn point_segment_distance<T: Scalar>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> T {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == T::zero() {
        return (p - a).norm();
    }
    let t = ((p - a).dot(d) / l2).max(T::zero()).min(T::one());
    (a + d * t - p).norm()
}

/// Parameter interval `[t0, t1] ⊂ [0, 1]` of the segment `a + t(b - a)`
/// lying in the closed disk of radius `r` around `c`.
pub fn segment_disk_interval<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, r: T) -> Option<(T, T)> {
    let d = b - a;
    let f = a - c;
    let qa = d.norm2();
    if qa == T::zero() {
        return (f.norm2() <= r * r).then_some((T::zero(), T::one()));
    }
    let qb = f.dot(d);
    let qc = f.norm2() - r * r;
    let disc = qb * qb - qa * qc;
    if disc < T::zero() {
        return None;
    }
    let sq = disc.sqrt();
    // Stable root pair.
    let (t0, t1) = if qb >= T::zero() {
        let q = -(qb + sq);
        (q / qa, if q != T::zero() { qc / q } else { T::zero() })
    } else {
        let q = -qb + sq;
        (qc / q, q / qa)
    };
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let lo = lo.max(T::zero());
    let hi = hi.min(T::one());
    (lo <= hi).then_some((lo, hi))
}

/// Length of the part of segment `ab` inside the closed disk `B_r(c)`.
pub fn segment_disk_length<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, r: T) -> T {
    match segment_disk_interval(a, b, c, r) {
        Some((t0, t1)) => (b - a).norm() * (t1 - t0),
        None => T::zero(),
    }
}

#[inline]
fn orient<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> T {
    (b - a).cross(c - a)
}

/// True when the closed segments `ab` and `cd` share a point.
pub fn segments_intersect<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, d: Vec2<T>) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    let z = T::zero();
    if ((o1 > z && o2 < z) || (o1 < z && o2 > z)) && ((o3 > z && o4 < z) || (o3 < z && o4 > z)) {
        return true;
    }
    let on = |p: Vec2<T>, q: Vec2<T>, r: Vec2<T>, o: T| {
        o == z && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

/// Minimum distance between the closed segments `ab` and `cd`.
pub fn segment_segment_distance<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, d: Vec2<T>) -> T {
    if segments_intersect(a, b, c, d) {
        return T::zero();
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_interval_of_chord() {
        let a = Vec2::new(-2.0, 0.5);
        let b = Vec2::new(2.0, 0.5);
        let l = segment_disk_length(a, b, Vec2::zero(), 1.0);
        assert!((l - 2.0 * 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(segment_disk_length(a, b, Vec2::new(0.0, 3.0), 1.0), 0.0);
    }

    #[test]
    fn disk_interval_partial() {
        let l: f64 = segment_disk_length(Vec2::new(0.0, 0.0), Vec2::new(3.0, 0.0), Vec2::zero(), 1.0);
        assert!((l - 1.0).abs() < 1e-15);
    }

    #[test]
    fn crossing_segments() {
        let p = |x, y| Vec2::new(x, y);
        assert!(segments_intersect(p(0.0, 0.0), p(1.0, 1.0), p(0.0, 1.0), p(1.0, 0.0)));
        assert!(!segments_intersect(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(1.0, 1.0)));
        assert!(segments_intersect(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0), p(2.0, 1.0)));
    }

    #[test]
    fn op_norm_matches_diagonal() {
        let m = Mat2::new(3.0, 0.0, 0.0, -5.0);
        assert!((m.op_norm() - 5.0f64).abs() < 1e-14);
    }

    #[test]
    fn square_area() {
        let sq = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)];
        assert_eq!(polygon_area(&sq), 1.0);
    }
}
