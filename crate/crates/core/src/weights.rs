// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! The weight Ω and the test-function families 𝓐_j (scalar) and 𝓑_j
//! (vector fields).

use serde::{Deserialize, Serialize};

use crate::domain::min_image;
use crate::error::ShapeError;
use crate::geometry::{Mat2, Vec2};
use crate::scalar::{lit, Scalar};

/// Positive weight `Ω ≤ 1` with `|∇Ω| ≤ c₁Ω` and `‖∇²Ω‖ ≤ c₁Ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum WeightFunction<T> {
    /// `Ω ≡ 1`, `c₁ = 0`.
    One,
    /// `Ω(x) = exp(−√(1 + |x|²))`. The true ratios are bounded by 1; `c1`
    /// is the configured constant (default 2).
    ExpDecay { c1: T },
}

impl<T: Scalar> WeightFunction<T> {
    pub fn exp_decay() -> Self {
        Self::ExpDecay { c1: lit(2.0) }
    }

    pub fn c1(&self) -> T {
        match self {
            Self::One => T::zero(),
            Self::ExpDecay { c1 } => *c1,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Self::One)
    }

    #[inline]
    pub fn value(&self, x: Vec2<T>) -> T {
        match self {
            Self::One => T::one(),
            Self::ExpDecay { .. } => (-(T::one() + x.norm2()).sqrt()).exp(),
        }
    }

    /// `1 / Ω(x)`, evaluated without forming Ω.
    #[inline]
    pub fn inverse(&self, x: Vec2<T>) -> T {
        match self {
            Self::One => T::one(),
            Self::ExpDecay { .. } => (T::one() + x.norm2()).sqrt().exp(),
        }
    }

    pub fn gradient(&self, x: Vec2<T>) -> Vec2<T> {
        match self {
            Self::One => Vec2::zero(),
            Self::ExpDecay { .. } => {
                let s = (T::one() + x.norm2()).sqrt();
                x * (-(-s).exp() / s)
            }
        }
    }

    pub fn hessian(&self, x: Vec2<T>) -> Mat2<T> {
        match self {
            Self::One => Mat2::zero(),
            Self::ExpDecay { .. } => {
                let s = (T::one() + x.norm2()).sqrt();
                let w = (-s).exp();
                let k = T::one() / (s * s) + T::one() / (s * s * s);
                Mat2::outer(x, x).scale(w * k).add(&Mat2::identity().scale(-w / s))
            }
        }
    }

    /// Ω difference `Ω(q) − Ω(p)` without cancellation for nearby points.
    pub fn difference(&self, p: Vec2<T>, q: Vec2<T>) -> T {
        match self {
            Self::One => T::zero(),
            Self::ExpDecay { .. } => {
                let sp = (T::one() + p.norm2()).sqrt();
                let sq = (T::one() + q.norm2()).sqrt();
                let ds = ((q - p).dot(q + p)) / (sp + sq);
                (-sp).exp() * (-ds).exp_m1()
            }
        }
    }
}

/// Scalar field with analytic first and second derivatives.
pub trait ScalarField<T: Scalar> {
    fn value(&self, x: Vec2<T>) -> T;
    fn gradient(&self, x: Vec2<T>) -> Vec2<T>;
    fn hessian(&self, x: Vec2<T>) -> Mat2<T>;
}

/// Vector field with analytic Jacobian `J[i][k] = ∂g_i/∂x_k`.
pub trait VectorField<T: Scalar> {
    fn value(&self, x: Vec2<T>) -> Vec2<T>;
    fn jacobian(&self, x: Vec2<T>) -> Mat2<T>;
}

impl<T: Scalar> ScalarField<T> for WeightFunction<T> {
    fn value(&self, x: Vec2<T>) -> T {
        WeightFunction::value(self, x)
    }
    fn gradient(&self, x: Vec2<T>) -> Vec2<T> {
        WeightFunction::gradient(self, x)
    }
    fn hessian(&self, x: Vec2<T>) -> Mat2<T> {
        WeightFunction::hessian(self, x)
    }
}

/// Affine field `g(x) = M x + b`.
#[derive(Clone, Copy, Debug)]
pub struct AffineField<T> {
    pub m: Mat2<T>,
    pub b: Vec2<T>,
}

impl<T: Scalar> VectorField<T> for AffineField<T> {
    fn value(&self, x: Vec2<T>) -> Vec2<T> {
        self.m.mul_vec(x) + self.b
    }
    fn jacobian(&self, _x: Vec2<T>) -> Mat2<T> {
        self.m
    }
}

/// Radial profile `θ(x) = exp(−λ(√(w² + |x−c|²) − w))`: equal to 1 at the
/// center, flat across a core of radius about `w`, then decaying at rate λ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump<T> {
    pub center: Vec2<T>,
    pub width: T,
    pub rate: T,
    /// Measure offsets by the minimal image on the unit torus.
    #[serde(default)]
    pub periodic: bool,
}

impl<T: Scalar> Bump<T> {
    /// `x − center`, minimal image when periodic.
    #[inline]
    pub fn offset(&self, x: Vec2<T>) -> Vec2<T> {
        let d = x - self.center;
        if self.periodic {
            Vec2::new(min_image(d.x), min_image(d.y))
        } else {
            d
        }
    }

    fn parts(&self, x: Vec2<T>) -> (T, Vec2<T>, Mat2<T>) {
        let d = self.offset(x);
        let s = (self.width * self.width + d.norm2()).sqrt();
        let th = (-self.rate * (s - self.width)).exp();
        let g = d * (-self.rate * th / s);
        let dd = Mat2::outer(d, d);
        let l = self.rate;
        let h = dd
            .scale(l * l / (s * s) + l / (s * s * s))
            .add(&Mat2::identity().scale(-l / s))
            .scale(th);
        (th, g, h)
    }

    /// `∫ θ²` over the plane, by radial quadrature.
    fn l2_squared(&self) -> T {
        let (w, l) = (self.width, self.rate);
        // Substitute s = √(w² + r²): ∫ θ² dx = 2π ∫_w^∞ s e^{−2λ(s−w)} ds.
        let two_l = lit::<T>(2.0) * l;
        T::TAU() * (w / two_l + T::one() / (two_l * two_l))
    }
}

/// A member of 𝓐_j: `φ = a·Ω·θ` (or `a·Ω`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarTest<T> {
    pub omega: WeightFunction<T>,
    pub amplitude: T,
    pub bump: Option<Bump<T>>,
    pub j: u32,
}

impl<T: Scalar> ScalarField<T> for ScalarTest<T> {
    fn value(&self, x: Vec2<T>) -> T {
        let w = self.omega.value(x);
        let th = self.bump.map_or(T::one(), |b| b.parts(x).0);
        self.amplitude * w * th
    }

    fn gradient(&self, x: Vec2<T>) -> Vec2<T> {
        let w = self.omega.value(x);
        let gw = self.omega.gradient(x);
        let (th, gt, _) = self.bump.map_or((T::one(), Vec2::zero(), Mat2::zero()), |b| b.parts(x));
        (gw * th + gt * w) * self.amplitude
    }

    fn hessian(&self, x: Vec2<T>) -> Mat2<T> {
        let w = self.omega.value(x);
        let gw = self.omega.gradient(x);
        let hw = self.omega.hessian(x);
        let (th, gt, ht) = self.bump.map_or((T::one(), Vec2::zero(), Mat2::zero()), |b| b.parts(x));
        hw.scale(th)
            .add(&Mat2::outer(gw, gt))
            .add(&Mat2::outer(gt, gw))
            .add(&ht.scale(w))
            .scale(self.amplitude)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum VectorShape<T> {
    Zero,
    /// `g = a·Ω·θ·v`.
    Uniform { direction: Vec2<T> },
    /// `g = a·Ω·θ·(x − c)`.
    Radial,
}

/// A member of 𝓑_j.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorTest<T> {
    pub omega: WeightFunction<T>,
    pub amplitude: T,
    pub bump: Bump<T>,
    pub shape: VectorShape<T>,
    pub j: u32,
}

impl<T: Scalar> VectorTest<T> {
    fn envelope(&self, x: Vec2<T>) -> (T, Vec2<T>, Mat2<T>) {
        let w = self.omega.value(x);
        let gw = self.omega.gradient(x);
        let hw = self.omega.hessian(x);
        let (th, gt, ht) = self.bump.parts(x);
        let h = hw.scale(th).add(&Mat2::outer(gw, gt)).add(&Mat2::outer(gt, gw)).add(&ht.scale(w));
        (w * th, gw * th + gt * w, h)
    }

    /// Frobenius norm of the second derivative tensor `∂²g_i/∂x_k∂x_l`.
    pub fn second_derivative_norm(&self, x: Vec2<T>) -> T {
        let (s, gs, hs) = self.envelope(x);
        let _ = s;
        let a = self.amplitude;
        match self.shape {
            VectorShape::Zero => T::zero(),
            VectorShape::Uniform { direction } => a * direction.norm() * hs.frob(&hs).sqrt(),
            VectorShape::Radial => {
                let u = self.bump.offset(x);
                let mut acc = T::zero();
                let uc = [u.x, u.y];
                let gc = [gs.x, gs.y];
                for i in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            let dik = if i == k { T::one() } else { T::zero() };
                            let dil = if i == l { T::one() } else { T::zero() };
                            let t = uc[i] * hs.m[k][l] + dik * gc[l] + dil * gc[k];
                            acc += t * t;
                        }
                    }
                }
                a * acc.sqrt()
            }
        }
    }

    /// `‖Ω⁻¹g‖_{L²}` (analytic for the uniform shape, radial quadrature
    /// for the radial one).
    pub fn weighted_l2(&self) -> T {
        let a = self.amplitude;
        match self.shape {
            VectorShape::Zero => T::zero(),
            VectorShape::Uniform { direction } => a * direction.norm() * self.bump.l2_squared().sqrt(),
            VectorShape::Radial => {
                let b = self.bump;
                let f = |r: T| {
                    let s = (b.width * b.width + r * r).sqrt();
                    let th = (-b.rate * (s - b.width)).exp();
                    r * r * th * th * r
                };
                let reach = b.width + lit::<T>(60.0) / b.rate;
                let q = crate::quadrature::GaussLegendre::<T>::new(10).composite(T::zero(), reach, 400, f);
                a * (T::TAU() * q).sqrt()
            }
        }
    }
}

impl<T: Scalar> VectorField<T> for VectorTest<T> {
    fn value(&self, x: Vec2<T>) -> Vec2<T> {
        let (s, _, _) = self.envelope(x);
        let a = self.amplitude;
        match self.shape {
            VectorShape::Zero => Vec2::zero(),
            VectorShape::Uniform { direction } => direction * (a * s),
            VectorShape::Radial => self.bump.offset(x) * (a * s),
        }
    }

    fn jacobian(&self, x: Vec2<T>) -> Mat2<T> {
        let (s, gs, _) = self.envelope(x);
        let a = self.amplitude;
        match self.shape {
            VectorShape::Zero => Mat2::zero(),
            VectorShape::Uniform { direction } => Mat2::outer(direction, gs).scale(a),
            VectorShape::Radial => {
                let u = self.bump.offset(x);
                Mat2::outer(u, gs).add(&Mat2::identity().scale(s)).scale(a)
            }
        }
    }
}

/// A member of 𝓐_j or 𝓑_j.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TestFunction<T> {
    Scalar(ScalarTest<T>),
    Vector(VectorTest<T>),
}

impl<T: Scalar> TestFunction<T> {
    pub fn as_scalar(&self) -> Option<&ScalarTest<T>> {
        match self {
            Self::Scalar(s) => Some(s),
            Self::Vector(_) => None,
        }
    }

    /// Same member, evaluated periodically on the unit torus. Only
    /// meaningful with `Ω ≡ 1`.
    pub fn periodic(mut self) -> Self {
        match &mut self {
            Self::Scalar(s) => {
                if let Some(b) = &mut s.bump {
                    b.periodic = true;
                }
            }
            Self::Vector(v) => v.bump.periodic = true,
        }
        self
    }

    pub fn as_vector(&self) -> Option<&VectorTest<T>> {
        match self {
            Self::Vector(v) => Some(v),
            Self::Scalar(_) => None,
        }
    }
}

/// Requested member shape.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestKind<T> {
    /// φ = Ω.
    Omega,
    /// φ = Ω·θ with core width `width`.
    ABump { width: T },
    /// g ≡ 0.
    BZero,
    /// g = a·Ω·θ·direction.
    BUniform { width: T, direction: Vec2<T> },
    /// g = a·Ω·θ·(x − center).
    BRadial { width: T },
}

/// Safety factor applied to every bound so members sit strictly inside.
const MARGIN: f64 = 0.95;

/// Largest decay rate λ for which `Ω·θ` satisfies the 𝓐_j derivative bounds:
/// `c₁ + λ ≤ j'` and `c₁ + 2c₁λ + λ² + λ/w ≤ j'` with `j' = 0.95 j`.
fn max_rate<T: Scalar>(j: T, c1: T, width: T) -> Option<T> {
    let jj = j * lit(MARGIN);
    let b = lit::<T>(2.0) * c1 + T::one() / width;
    let c = c1 - jj;
    if c >= T::zero() {
        return None;
    }
    let root = (-b + (b * b - lit::<T>(4.0) * c).sqrt()) * lit(0.5);
    let rate = root.min(jj - c1);
    (rate > T::zero()).then_some(rate)
}

/// Builds a member of 𝓐_j or 𝓑_j with the requested shape.
pub fn make_test_function<T: Scalar>(
    j: u32,
    kind: TestKind<T>,
    center: Vec2<T>,
    omega: WeightFunction<T>,
) -> Result<TestFunction<T>, ShapeError> {
    let jt = T::from_u32(j).unwrap();
    let c1 = omega.c1();
    let min_width = lit::<T>(4.0) / jt;
    let check_width = |w: T| {
        if w < min_width {
            Err(ShapeError::Infeasible(format!("width {w} is below 4/j = {min_width}")))
        } else {
            Ok(())
        }
    };
    match kind {
        TestKind::Omega => {
            if jt < T::one().max(c1) {
                return Err(ShapeError::Infeasible(format!("Ω is in 𝓐_j only for j ≥ max(1, c₁) = {}", c1.max(T::one()))));
            }
            Ok(TestFunction::Scalar(ScalarTest { omega, amplitude: T::one(), bump: None, j }))
        }
        TestKind::ABump { width } => {
            check_width(width)?;
            let rate = max_rate(jt, c1, width)
                .ok_or_else(|| ShapeError::Infeasible(format!("no decay rate fits j = {j} with c₁ = {c1}")))?;
            Ok(TestFunction::Scalar(ScalarTest { omega, amplitude: T::one(), bump: Some(Bump { center, width, rate, periodic: false }), j }))
        }
        TestKind::BZero => Ok(TestFunction::Vector(VectorTest {
            omega,
            amplitude: T::zero(),
            bump: Bump { center, width: T::one(), rate: T::one(), periodic: false },
            shape: VectorShape::Zero,
            j,
        })),
        TestKind::BUniform { width, direction } => {
            check_width(width)?;
            let rate = max_rate(jt, c1, width)
                .ok_or_else(|| ShapeError::Infeasible(format!("no decay rate fits j = {j} with c₁ = {c1}")))?;
            let direction = direction.normalized();
            let bump = Bump { center, width, rate, periodic: false };
            // |g|/Ω ≤ a, |∇g|/Ω ≤ a(c₁ + λ), ‖∇²g‖/Ω ≤ a·√2·(c₁ + 2c₁λ + λ² + λ/w).
            let d1 = c1 + rate;
            let d2 = lit::<T>(2.0).sqrt() * (c1 + lit::<T>(2.0) * c1 * rate + rate * rate + rate / width);
            let l2 = bump.l2_squared().sqrt();
            let a = jt * lit(MARGIN) / T::one().max(d1).max(d2).max(l2);
            Ok(TestFunction::Vector(VectorTest { omega, amplitude: a, bump, shape: VectorShape::Uniform { direction }, j }))
        }
        TestKind::BRadial { width } => {
            check_width(width)?;
            let rate = max_rate(jt, c1, width)
                .ok_or_else(|| ShapeError::Infeasible(format!("no decay rate fits j = {j} with c₁ = {c1}")))?;
            let bump = Bump { center, width, rate, periodic: false };
            let mut g = VectorTest { omega, amplitude: T::one(), bump, shape: VectorShape::Radial, j };
            let sup = radial_sup(&g);
            let a = jt * lit(MARGIN) / sup.max(g.weighted_l2()).max(T::one());
            g.amplitude = a;
            Ok(TestFunction::Vector(g))
        }
    }
}

/// Upper bound of `max(|g|, ‖∇g‖, ‖∇²g‖)/Ω` for the radial field at unit
/// amplitude, from closed-form bounds on the radial profile sampled densely
/// in r and maximized.
fn radial_sup<T: Scalar>(g: &VectorTest<T>) -> T {
    let b = g.bump;
    let c1 = g.omega.c1();
    let (w, l) = (b.width, b.rate);
    let reach = w + lit::<T>(80.0) / l;
    let n = 20_000;
    let mut sup = T::zero();
    for k in 0..=n {
        let r = reach * T::from_usize_lossy(k) / T::from_usize_lossy(n);
        let s = (w * w + r * r).sqrt();
        let th = (-l * (s - w)).exp();
        let gth = l * r / s * th;
        let hth = (l * l + l / s) * th;
        // Envelope E = Ωθ relative to Ω: E ≤ θ, |∇E| ≤ c₁θ + |∇θ|,
        // ‖∇²E‖ ≤ c₁θ + 2c₁|∇θ| + ‖∇²θ‖.
        let e0 = th;
        let e1 = c1 * th + gth;
        let e2 = c1 * th + lit::<T>(2.0) * c1 * gth + hth;
        let v = r * e0;
        let j1 = r * e1 + e0 * lit::<T>(2.0).sqrt();
        let j2 = lit::<T>(2.0).sqrt() * r * e2 + lit::<T>(2.0) * lit::<T>(2.0).sqrt() * e1;
        sup = sup.max(v).max(j1).max(j2);
    }
    // Allow for sampling between grid radii.
    sup * lit(1.02)
}
