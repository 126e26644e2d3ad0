// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Numerical forms of the L² approximation estimates relating `h_ε`,
//! `Φ_ε∗δV` and the energy.

use serde::Serialize;

use crate::geometry::{Mat2, Vec2};
use crate::scalar::{lit, Scalar};
use crate::weights::{ScalarField, VectorField};

use super::{first_variation, CurvatureField, ScaledField, VarifoldView};

/// Deliberate fault injected to confirm that a check can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fault {
    None,
    /// Use `−h_ε` in place of `h_ε`.
    FlipCurvature,
    /// Use the negated energy.
    FlipEnergy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub checks: Vec<InequalityCheck>,
    /// Whether `j ≤ ½ε^{−1/6}`, the scale relation the estimates assume.
    pub scale_relation_holds: bool,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn holds(&self, prefix: &str) -> bool {
        self.checks.iter().filter(|c| c.name.starts_with(prefix)).all(|c| c.holds)
    }
}

struct Signed<'a, T> {
    field: &'a CurvatureField<T>,
    sign: T,
}

impl<T: Scalar> VectorField<T> for Signed<'_, T> {
    fn value(&self, x: Vec2<T>) -> Vec2<T> {
        self.field.eval(x).0 * self.sign
    }
    fn jacobian(&self, x: Vec2<T>) -> Mat2<T> {
        self.field.eval(x).1.scale(self.sign)
    }
}

/// Evaluates the four estimates:
///
/// * `pairing`: `|∫h_ε·g d‖V‖ + ∫(Φ_ε∗δV)·g| ≤ ε^{1/4}√E` for each `g`;
/// * `deviation`: `|δV(φh_ε) + E_φ| ≤ ε^{1/4}(E_φ + 1)`;
/// * `domination`: `∫|h_ε|²φ d‖V‖ ≤ (1 + ε^{1/4})E_φ + ε^{1/4}`;
/// * `consistency`: `|∫h_ε·g d‖V‖ + δV(g)| ≤ ε^{1/4}(1 + √E)` for each `g`;
///
/// where `E` is the Ω-weighted energy and `E_φ` its φ-weighted analogue.
/// Each bound carries a slack of ten quadrature tolerances relative to the
/// magnitude of the terms compared.
pub fn inequality_suite<T: Scalar, P: ScalarField<T>, G: VectorField<T>>(
    v: &VarifoldView<T>,
    field: &CurvatureField<T>,
    phi: &P,
    gs: &[G],
    j: u32,
    tolerance: T,
    max_len: T,
    fault: Fault,
) -> InequalityReport {
    let eps = field.epsilon();
    let q = eps.sqrt().sqrt();
    let slack = |scale: T| lit::<T>(10.0) * tolerance * (scale + T::one());
    let sign = if fault == Fault::FlipCurvature { -T::one() } else { T::one() };
    let h = Signed { field, sign };
    let energy = field.energy;
    let e_sign = if fault == Fault::FlipEnergy { -T::one() } else { T::one() };
    let e_phi = field.weighted_energy(phi) * e_sign;
    let mut checks = Vec::new();
    let mut push = |name: String, lhs: T, bound: T| {
        checks.push(InequalityCheck {
            name,
            lhs: lhs.to_f64_lossy(),
            bound: bound.to_f64_lossy(),
            holds: lhs <= bound && lhs.is_finite(),
        });
    };

    for (i, g) in gs.iter().enumerate() {
        let hg = v.integrate(max_len, |p| h.value(p).dot(g.value(p)));
        let fg = field.pair_first_variation(g);
        push(format!("pairing[{i}]"), (hg + fg).abs(), q * energy.sqrt() + slack(hg.abs() + fg.abs()));
    }

    let product = ScaledField { phi, g: &h };
    let dv = first_variation(v, &product, max_len);
    push("deviation".into(), (dv + e_phi).abs(), q * (e_phi + T::one()) + slack(dv.abs() + e_phi.abs()));

    let h2 = v.integrate(max_len, |p| field.eval(p).0.norm2() * phi.value(p));
    push("domination".into(), h2, (T::one() + q) * e_phi + q + slack(h2 + e_phi.abs()));

    for (i, g) in gs.iter().enumerate() {
        let hg = v.integrate(max_len, |p| h.value(p).dot(g.value(p)));
        let dg = first_variation(v, g, max_len);
        push(format!("consistency[{i}]"), (hg + dg).abs(), q * (T::one() + energy.sqrt()) + slack(hg.abs() + dg.abs()));
    }

    let jt = T::from_u32(j).unwrap();
    let scale_relation_holds = jt <= lit::<T>(0.5) * eps.powf(lit(-1.0 / 6.0));
    InequalityReport { checks, scale_relation_holds }
}

impl<T: Scalar> CurvatureField<T> {
    pub fn epsilon(&self) -> T {
        self.kernel_epsilon()
    }
}
