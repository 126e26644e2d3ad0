// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Ambient domain: a bounded window of the plane or the unit torus.

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::scalar::Scalar;

/// Axis-aligned box `[min.x, max.x] × [min.y, max.y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox<T> {
    pub min: Vec2<T>,
    pub max: Vec2<T>,
}

impl<T: Scalar> BBox<T> {
    pub fn new(min: Vec2<T>, max: Vec2<T>) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: Vec2<T>, tol: T) -> bool {
        p.x >= self.min.x - tol && p.x <= self.max.x + tol && p.y >= self.min.y - tol && p.y <= self.max.y + tol
    }

    /// True when `p` lies on the box outline within `tol`.
    pub fn on_boundary(&self, p: Vec2<T>, tol: T) -> bool {
        self.contains(p, tol)
            && ((p.x - self.min.x).abs() <= tol
                || (p.x - self.max.x).abs() <= tol
                || (p.y - self.min.y).abs() <= tol
                || (p.y - self.max.y).abs() <= tol)
    }

    pub fn of_points(pts: impl IntoIterator<Item = Vec2<T>>) -> Option<Self> {
        let mut it = pts.into_iter();
        let first = it.next()?;
        let mut b = Self::new(first, first);
        for p in it {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        Some(b)
    }

    pub fn inflate(&self, r: T) -> Self {
        Self::new(self.min - Vec2::new(r, r), self.max + Vec2::new(r, r))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain<T> {
    /// The plane; every edge must lie inside `bbox`. Degree-one vertices on
    /// the box outline are anchored ends representing boundary that
    /// continues outside the window.
    Plane { bbox: BBox<T> },
    /// The flat torus `R² / Z²`; positions are stored in `[0, 1)²`.
    Torus,
}

impl<T: Scalar> Domain<T> {
    pub fn is_torus(&self) -> bool {
        matches!(self, Domain::Torus)
    }

    /// Displacement from `a` to `b`, using the minimal image on the torus.
    #[inline]
    pub fn delta(&self, a: Vec2<T>, b: Vec2<T>) -> Vec2<T> {
        let d = b - a;
        match self {
            Domain::Plane { .. } => d,
            Domain::Torus => Vec2::new(min_image(d.x), min_image(d.y)),
        }
    }

    /// Canonical representative of a position.
    #[inline]
    pub fn wrap(&self, p: Vec2<T>) -> Vec2<T> {
        match self {
            Domain::Plane { .. } => p,
            Domain::Torus => Vec2::new(wrap_unit(p.x), wrap_unit(p.y)),
        }
    }

    /// The image of `p` closest to `origin`.
    #[inline]
    pub fn near(&self, origin: Vec2<T>, p: Vec2<T>) -> Vec2<T> {
        origin + self.delta(origin, p)
    }

    #[inline]
    pub fn dist(&self, a: Vec2<T>, b: Vec2<T>) -> T {
        self.delta(a, b).norm()
    }

    pub fn bbox(&self) -> Option<BBox<T>> {
        match self {
            Domain::Plane { bbox } => Some(*bbox),
            Domain::Torus => None,
        }
    }

    pub fn cast<U: Scalar>(&self) -> Domain<U> {
        match self {
            Domain::Plane { bbox } => Domain::Plane { bbox: BBox::new(bbox.min.cast(), bbox.max.cast()) },
            Domain::Torus => Domain::Torus,
        }
    }
}

#[inline]
pub(crate) fn min_image<T: Scalar>(d: T) -> T {
    d - d.round()
}

#[inline]
pub(crate) fn wrap_unit<T: Scalar>(x: T) -> T {
    let w = x - x.floor();
    // `x - floor(x)` can round up to exactly 1 for tiny negative x.
    if w >= T::one() {
        T::zero()
    } else {
        w
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_minimal_image() {
        let d = Domain::<f64>::Torus;
        let v = d.delta(Vec2::new(0.95, 0.5), Vec2::new(0.05, 0.5));
        assert!((v.x - 0.1).abs() < 1e-15);
        assert_eq!(d.wrap(Vec2::new(-1e-20, 1.25)), Vec2::new(0.0, 0.25));
    }
}
