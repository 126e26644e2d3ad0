// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Monitoring functionals evaluated over a finished [`RunTrace`]: the Brakke
//! residual, the localized Huisken functional, density ratios, the Hölder
//! modulus of grain areas and the sphere barrier.

use serde::Serialize;

use crate::deformation::disk_mass;
use crate::error::DiagnosticError;
use crate::flow::{Frame, RunTrace};
use crate::geometry::{segment_disk_interval, Vec2};
use crate::network::{Label, LabeledNetwork, Scanner};
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, Scalar};
use crate::weights::ScalarField;

/// Frame whose time matches `t` to within a quarter step.
pub fn frame_at_time<T: Scalar>(trace: &RunTrace<T>, t: T) -> Result<&Frame<T>, DiagnosticError> {
    let tol = trace.schedule.dt * lit(0.25);
    trace
        .frames
        .iter()
        .find(|f| (f.time - t).abs() <= tol)
        .ok_or(DiagnosticError::OutOfRange(t.to_f64_lossy()))
}

/// `∫_0^1 f(a + s(b − a), s) ds · |b − a|` with `m` Gauss–Legendre panels.
fn segment_integral<T: Scalar>(
    rule: &GaussLegendre<T>,
    a: Vec2<T>,
    b: Vec2<T>,
    m: usize,
    mut f: impl FnMut(Vec2<T>, T) -> T,
) -> T {
    let len = (b - a).norm();
    if len == T::zero() {
        return T::zero();
    }
    rule.composite(T::zero(), T::one(), m.max(1), |s| f(a.lerp(b, s), s)) * len
}

/// `‖V‖(φ)`: the integral of `φ` along every segment.
pub fn varifold_mass<T: Scalar>(net: &LabeledNetwork<T>, phi: &impl ScalarField<T>) -> T {
    let rule = GaussLegendre::<T>::new(6);
    let mut acc = T::zero();
    for (_, a, b) in net.segments() {
        let (pa, pb) = net.segment(a, b);
        acc += segment_integral(&rule, pa, pb, 1, |x, _| phi.value(x));
    }
    acc
}

/// `δ(V, φ)(h) = ∫ (−φ|h|² + ∇φ·h) d‖V‖` with `h` interpolated linearly
/// between vertex values.
pub fn brakke_integrand<T: Scalar>(net: &LabeledNetwork<T>, h: &[Vec2<T>], phi: &impl ScalarField<T>) -> T {
    let rule = GaussLegendre::<T>::new(6);
    let mut acc = T::zero();
    for (_, a, b) in net.segments() {
        let (pa, pb) = net.segment(a, b);
        let (ha, hb) = (h[a], h[b]);
        acc += segment_integral(&rule, pa, pb, 1, |x, s| {
            let v = ha.lerp(hb, s);
            -phi.value(x) * v.norm2() + phi.gradient(x).dot(v)
        });
    }
    acc
}

/// `½∫|∇φ|²/φ d‖V‖`, the bound on `δ(V, φ)(h) + ∫φ|h|²/2`.
fn gradient_budget<T: Scalar>(net: &LabeledNetwork<T>, phi: &impl ScalarField<T>) -> T {
    let rule = GaussLegendre::<T>::new(6);
    let mut acc = T::zero();
    for (_, a, b) in net.segments() {
        let (pa, pb) = net.segment(a, b);
        acc += segment_integral(&rule, pa, pb, 1, |x, _| {
            let v = phi.value(x);
            if v > T::zero() {
                phi.gradient(x).norm2() / v
            } else {
                T::zero()
            }
        });
    }
    acc * lit(0.5)
}

/// Quadrature tolerance charged per unit time in the Brakke slack.
pub const BRAKKE_QUADRATURE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrakkeResidual {
    /// `‖V_{t₂}‖(φ) − ‖V_{t₁}‖(φ)`.
    pub mass_change: f64,
    /// `Σ Δt·δ(V, φ)(h_ε)`.
    pub dissipation: f64,
    /// `mass_change − dissipation`.
    pub residual: f64,
    /// `Σ Δt·(ε^{1/8} + quadrature tolerance)`.
    pub slack: f64,
    /// Upper form: `dissipation ≤ Σ Δt·(2ε^{1/4} + ½∫|∇φ|²/φ)`.
    pub upper_bound: f64,
    pub steps: usize,
}

impl BrakkeResidual {
    pub fn holds(&self) -> bool {
        self.residual <= self.slack
    }

    pub fn upper_holds(&self) -> bool {
        self.dissipation <= self.upper_bound
    }
}

/// Brakke residual of `φ` over `[t₁, t₂]`, using the per-step states of the
/// trace (run with `keep_states`). The velocity `h_ε` recorded on each
/// post-deformation network stands in for the limit mean curvature.
pub fn brakke_residual<T: Scalar>(
    trace: &RunTrace<T>,
    phi: &impl ScalarField<T>,
    t1: T,
    t2: T,
) -> Result<BrakkeResidual, DiagnosticError> {
    if !(t1 < t2) {
        return Err(DiagnosticError::OutOfRange(t2.to_f64_lossy()));
    }
    let f1 = frame_at_time(trace, t1)?;
    let f2 = frame_at_time(trace, t2)?;
    let states: Vec<_> = trace.states.iter().filter(|s| s.step >= f1.step && s.step < f2.step).collect();
    if states.len() != f2.step - f1.step {
        return Err(DiagnosticError::MissingFields);
    }
    let eps = trace.schedule.epsilon;
    let e8 = eps.sqrt().sqrt().sqrt();
    let e4 = eps.sqrt().sqrt();
    let mut dissipation = T::zero();
    let mut slack = T::zero();
    let mut upper = T::zero();
    for s in &states {
        dissipation += s.dt * brakke_integrand(&s.network, &s.velocity, phi);
        slack += s.dt * (e8 + lit(BRAKKE_QUADRATURE_TOL));
        upper += s.dt * (e4 + e4 + gradient_budget(&s.network, phi));
    }
    let mass_change = varifold_mass(&f2.network, phi) - varifold_mass(&f1.network, phi);
    Ok(BrakkeResidual {
        mass_change: mass_change.to_f64_lossy(),
        dissipation: dissipation.to_f64_lossy(),
        residual: (mass_change - dissipation).to_f64_lossy(),
        slack: slack.to_f64_lossy(),
        upper_bound: upper.to_f64_lossy(),
        steps: states.len(),
    })
}

/// Radial cutoff: 1 on `[0, 1]`, 0 beyond 2, two quadratic pieces between.
pub fn huisken_cutoff<T: Scalar>(r: T) -> T {
    let one = T::one();
    let two = lit::<T>(2.0);
    if r <= one {
        one
    } else if r <= lit(1.5) {
        one - two * (r - one) * (r - one)
    } else if r < two {
        two * (two - r) * (two - r)
    } else {
        T::zero()
    }
}

/// `∫ η(|x−y|/R)·ρ_{(y,s)}(x, t) d‖V‖(x)` on one network, where
/// `ρ = (4π(s−t))^{−1/2} exp(−|x−y|²/(4(s−t)))` and `gap = s − t`.
pub fn huisken_density<T: Scalar>(net: &LabeledNetwork<T>, y: Vec2<T>, gap: T, radius: T) -> T {
    let rule = GaussLegendre::<T>::new(8);
    let four_gap = lit::<T>(4.0) * gap;
    let norm = (T::PI() * four_gap).sqrt().recip();
    let panel = (gap.sqrt() * lit(0.25)).min(radius * lit(0.25));
    let reach = radius * lit(2.0);
    let mut acc = T::zero();
    for (_, a, b) in net.segments() {
        let (p0, p1) = net.segment(a, b);
        let pa = net.domain.near(y, p0);
        let pb = pa + (p1 - p0);
        let Some((s0, s1)) = segment_disk_interval(pa, pb, y, reach) else {
            continue;
        };
        let (qa, qb) = (pa.lerp(pb, s0), pa.lerp(pb, s1));
        let len = (qb - qa).norm();
        if len == T::zero() {
            continue;
        }
        let m = (len / panel).ceil().to_usize().unwrap_or(1);
        acc += segment_integral(&rule, qa, qb, m, |x, _| {
            let d2 = (x - y).norm2();
            huisken_cutoff(d2.sqrt() / radius) * (-d2 / four_gap).exp()
        });
    }
    acc * norm
}

/// Huisken functional of the frame at time `t` for the backward heat kernel
/// centered at `(y, s)`.
pub fn huisken_functional<T: Scalar>(
    trace: &RunTrace<T>,
    y: Vec2<T>,
    s: T,
    radius: T,
    t: T,
) -> Result<T, DiagnosticError> {
    if !(t < s) {
        return Err(DiagnosticError::Precondition(format!("kernel time {s} must exceed frame time {t}")));
    }
    let f = frame_at_time(trace, t)?;
    Ok(huisken_density(&f.network, y, s - t, radius))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityCheck {
    /// `F(t₂) − F(t₁)`.
    pub change: f64,
    /// `c₅R⁻²(t₂ − t₁)·sup R⁻¹‖V_{t'}‖(B_{2R}(y))`.
    pub bound: f64,
    pub holds: bool,
}

/// Localized monotonicity over `[t₁, t₂]`, with the supremum taken over the
/// trace frames in that window.
pub fn huisken_monotonicity<T: Scalar>(
    trace: &RunTrace<T>,
    y: Vec2<T>,
    s: T,
    radius: T,
    t1: T,
    t2: T,
    c5: T,
) -> Result<MonotonicityCheck, DiagnosticError> {
    if !(t1 < t2) {
        return Err(DiagnosticError::OutOfRange(t2.to_f64_lossy()));
    }
    let f1 = huisken_functional(trace, y, s, radius, t1)?;
    let f2 = huisken_functional(trace, y, s, radius, t2)?;
    let tol = trace.schedule.dt * lit(0.25);
    let mut sup = T::zero();
    for f in trace.frames.iter().filter(|f| f.time >= t1 - tol && f.time <= t2 + tol) {
        sup = sup.max(disk_mass(&f.network, y, radius + radius) / radius);
    }
    let change = f2 - f1;
    let bound = c5 / (radius * radius) * (t2 - t1) * sup;
    Ok(MonotonicityCheck { change: change.to_f64_lossy(), bound: bound.to_f64_lossy(), holds: change <= bound })
}

/// `‖V‖(B_r(x)) / (2r)`.
pub fn density_ratio<T: Scalar>(net: &LabeledNetwork<T>, x: Vec2<T>, r: T) -> T {
    disk_mass(net, x, r) / (r + r)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityOptions<T> {
    /// Rate `s` in the monotone quantity `exp(sr)·r⁻¹‖V‖(B_r)`.
    pub rate: T,
    /// Lower bound expected of every ratio.
    pub floor: T,
    /// Relative drop tolerated before a pair of radii counts as
    /// non-monotone.
    pub tolerance: T,
}

impl<T: Scalar> Default for DensityOptions<T> {
    fn default() -> Self {
        Self { rate: T::zero(), floor: lit(0.5), tolerance: lit(1e-9) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityRow {
    pub point: [f64; 2],
    pub ratios: Vec<f64>,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityTable {
    pub radii: Vec<f64>,
    pub rows: Vec<DensityRow>,
    pub min_ratio: f64,
    /// Points with a ratio below the floor.
    pub below_floor: usize,
    /// Points where the monotone quantity decreases.
    pub non_monotone: usize,
}

/// Density ratios at every vertex of `net` for increasing `radii`.
pub fn density_ratio_scan<T: Scalar>(net: &LabeledNetwork<T>, radii: &[T], opts: &DensityOptions<T>) -> DensityTable {
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut rows = Vec::with_capacity(net.vertices.len());
    let mut min_ratio = f64::INFINITY;
    let (mut below, mut non_mono) = (0, 0);
    for &x in &net.vertices {
        let mut ratios = Vec::with_capacity(radii.len());
        let mut monotone = true;
        let mut prev: Option<T> = None;
        for &r in &radii {
            let mass = disk_mass(net, x, r);
            let ratio = mass / (r + r);
            let q = (opts.rate * r).exp() * mass / r;
            if let Some(p) = prev {
                if q < p * (T::one() - opts.tolerance) {
                    monotone = false;
                }
            }
            prev = Some(q);
            ratios.push(ratio.to_f64_lossy());
        }
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        min_ratio = min_ratio.min(lo);
        if lo < opts.floor.to_f64_lossy() {
            below += 1;
        }
        if !monotone {
            non_mono += 1;
        }
        rows.push(DensityRow { point: [x.x.to_f64_lossy(), x.y.to_f64_lossy()], ratios, monotone });
    }
    DensityTable {
        radii: radii.iter().map(|r| r.to_f64_lossy()).collect(),
        rows,
        min_ratio,
        below_floor: below,
        non_monotone: non_mono,
    }
}

/// Measure of the symmetric difference of two unions of sorted intervals.
fn interval_symmetric_difference<T: Scalar>(a: &[(T, T)], b: &[(T, T)]) -> T {
    let total = |v: &[(T, T)]| v.iter().fold(T::zero(), |acc, &(x0, x1)| acc + (x1 - x0));
    let (mut i, mut k) = (0, 0);
    let mut common = T::zero();
    while i < a.len() && k < b.len() {
        let lo = a[i].0.max(b[k].0);
        let hi = a[i].1.min(b[k].1);
        if hi > lo {
            common += hi - lo;
        }
        if a[i].1 < b[k].1 {
            i += 1;
        } else {
            k += 1;
        }
    }
    total(a) + total(b) - common - common
}

/// Area of the symmetric difference of `label`'s region between two
/// networks on the same domain, optionally clipped to the disk `B_R(x)`.
pub fn symmetric_difference_area<T: Scalar>(
    a: &LabeledNetwork<T>,
    b: &LabeledNetwork<T>,
    label: Label,
    window: Option<(Vec2<T>, T)>,
) -> T {
    let sa = Scanner::new(a);
    let sb = Scanner::new(b);
    let pick = |sc: &Scanner<'_, T>, y: T, lo: T, hi: T| -> Vec<(T, T)> {
        let mut v: Vec<(T, T)> =
            sc.intervals(y, lo, hi).into_iter().filter(|&(_, _, l)| l == label).map(|(x0, x1, _)| (x0, x1)).collect();
        v.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        v
    };
    let rule = GaussLegendre::<T>::new(4);
    let pts = a.vertices.iter().chain(&b.vertices);
    match window {
        Some((c, r)) => {
            let half_pi = T::FRAC_PI_2();
            let mut breaks = vec![-half_pi, half_pi];
            for &p in pts {
                let q = a.domain.near(c, p);
                let s = (q.y - c.y) / r;
                if s > -T::one() && s < T::one() {
                    breaks.push(s.asin());
                }
            }
            let base = half_pi / lit(16.0);
            // y = c.y + r sin θ, dy = r cos θ dθ.
            integrate_breaks(&rule, breaks, base, |th| {
                let y = c.y + r * th.sin();
                let half = r * th.cos();
                let lo = c.x - half;
                let hi = c.x + half;
                interval_symmetric_difference(&pick(&sa, y, lo, hi), &pick(&sb, y, lo, hi)) * half
            })
        }
        None => {
            let (y0, y1, x0, x1) = match a.domain.bbox() {
                Some(bb) => (bb.min.y, bb.max.y, bb.min.x, bb.max.x),
                None => (T::zero(), T::one(), T::zero(), T::one()),
            };
            let mut breaks = vec![y0, y1];
            breaks.extend(pts.map(|p| p.y).filter(|&y| y > y0 && y < y1));
            let base = (y1 - y0) / lit(64.0);
            integrate_breaks(&rule, breaks, base, |y| {
                interval_symmetric_difference(&pick(&sa, y, x0, x1), &pick(&sb, y, x0, x1))
            })
        }
    }
}

/// Composite Gauss–Legendre integral of `f` between sorted breakpoints,
/// with panels no wider than `base`.
fn integrate_breaks<T: Scalar>(rule: &GaussLegendre<T>, mut breaks: Vec<T>, base: T, mut f: impl FnMut(T) -> T) -> T {
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let mut acc = T::zero();
    for w in breaks.windows(2) {
        let span = w[1] - w[0];
        if span <= T::zero() {
            continue;
        }
        let m = (span / base).ceil().to_usize().unwrap_or(1).max(1);
        acc += rule.composite(w[0], w[1], m, &mut f);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AreaModulus {
    /// `sup g(t, s)/|t − s|^{1/2}` over the frame pairs considered.
    pub modulus: f64,
    /// `(t, s, g(t, s))` for every pair.
    pub pairs: Vec<(f64, f64, f64)>,
}

/// Hölder-½ modulus of `label`'s region over the frames with time at least
/// `t_min`, optionally clipped to `B_R(x)`.
pub fn area_modulus<T: Scalar>(
    trace: &RunTrace<T>,
    label: Label,
    window: Option<(Vec2<T>, T)>,
    t_min: T,
) -> Result<AreaModulus, DiagnosticError> {
    let frames: Vec<&Frame<T>> = trace.frames.iter().filter(|f| f.time >= t_min).collect();
    if frames.len() < 3 {
        return Err(DiagnosticError::Precondition(format!("{} frames after t = {t_min}, need 3", frames.len())));
    }
    let mut pairs = Vec::new();
    let mut modulus = 0.0f64;
    for (i, fa) in frames.iter().enumerate() {
        for fb in &frames[i + 1..] {
            let g = symmetric_difference_area(&fa.network, &fb.network, label, window).to_f64_lossy();
            let dt = (fb.time - fa.time).to_f64_lossy();
            modulus = modulus.max(g / dt.sqrt());
            pairs.push((fa.time.to_f64_lossy(), fb.time.to_f64_lossy(), g));
        }
    }
    Ok(AreaModulus { modulus, pairs })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarrierReport {
    pub pass: bool,
    /// Frames inside `[t, t + r²/2]`.
    pub checked: usize,
    /// Largest mass seen inside the shrinking ball.
    pub worst_mass: f64,
    /// Time of the first frame that breaks the barrier.
    pub first_failure: Option<f64>,
}

/// Checks that no boundary enters `B_{√(r² − 2(t' − t))}(x)` for trace frames
/// `t' ∈ [t, t + r²/2]`, given that `B_r(x)` is empty at time `t`.
pub fn sphere_barrier_check<T: Scalar>(
    trace: &RunTrace<T>,
    x: Vec2<T>,
    r: T,
    t: T,
    tolerance: T,
) -> Result<BarrierReport, DiagnosticError> {
    let start = frame_at_time(trace, t)?;
    let m0 = disk_mass(&start.network, x, r);
    if m0 >= tolerance {
        return Err(DiagnosticError::Precondition(format!("mass {m0} in the initial ball exceeds {tolerance}")));
    }
    let end = t + r * r * lit(0.5);
    let mut report = BarrierReport { pass: true, checked: 0, worst_mass: 0.0, first_failure: None };
    for f in trace.frames.iter().filter(|f| f.time >= start.time && f.time <= end) {
        let rad2 = r * r - lit::<T>(2.0) * (f.time - start.time);
        if rad2 <= T::zero() {
            continue;
        }
        let m = disk_mass(&f.network, x, rad2.sqrt());
        report.checked += 1;
        report.worst_mass = report.worst_mass.max(m.to_f64_lossy());
        if m >= tolerance && report.pass {
            report.pass = false;
            report.first_failure = Some(f.time.to_f64_lossy());
        }
    }
    Ok(report)
}
