// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! The time loop: a Lipschitz deformation followed by motion by smoothed
//! mean curvature, repeated on a fixed schedule.

mod schedule;

pub use schedule::{schedule_params, Mode, Schedule, ScheduleOptions};

use serde::Serialize;

use crate::deformation::{lipschitz_step, MoveKind, StepConfig};
use crate::error::{FlowError, NetworkError};
use crate::geometry::Vec2;
use crate::kernel::Kernel;
use crate::network::{region_areas, remesh, LabeledNetwork};
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, Scalar};
use crate::varifold::{build_varifold_view, smoothed_mean_curvature, QuadratureConfig};
use crate::weights::WeightFunction;

/// Engine settings that are not part of the schedule.
#[derive(Clone, Debug)]
pub struct FlowConfig<T> {
    pub omega: WeightFunction<T>,
    pub quadrature: QuadratureConfig<T>,
    /// Apply the deformation step before each curvature step.
    pub deform: bool,
    pub deformation: StepConfig<T>,
    /// Keep the post-deformation network and vertex velocities of every
    /// step, as needed by the Brakke residual.
    pub keep_states: bool,
    /// Frame cadence in steps; `0` keeps only the first and last frame.
    pub frame_every: usize,
    /// Relative slack added to the per-step inequalities.
    pub tolerance: T,
}

impl<T: Scalar> Default for FlowConfig<T> {
    fn default() -> Self {
        Self {
            omega: WeightFunction::One,
            quadrature: QuadratureConfig::default(),
            deform: true,
            deformation: StepConfig::default(),
            keep_states: false,
            frame_every: 1,
            tolerance: lit(1e-9),
        }
    }
}

/// One inequality evaluated during the run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepCheck {
    pub lhs: f64,
    pub bound: f64,
    pub holds: bool,
}

impl StepCheck {
    fn new<T: Scalar>(lhs: T, bound: T) -> Self {
        Self { lhs: lhs.to_f64_lossy(), bound: bound.to_f64_lossy(), holds: lhs <= bound }
    }
}

/// Outcome of the curvature half of a step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub mass_before: f64,
    pub mass_change: f64,
    pub energy: f64,
    pub max_speed: f64,
    pub max_displacement: f64,
    /// `ΔM/Δt + energy/4 ≤ 3ε^{1/4} + c₁²M/2`.
    pub energy_balance: StepCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepReport {
    pub step: usize,
    /// Time at the end of the step.
    pub time: f64,
    /// Weighted boundary length before the deformation, after it, after
    /// the curvature step and after the optional remesh.
    pub mass_pre: f64,
    pub mass_deformed: f64,
    pub mass_moved: f64,
    pub mass_post: f64,
    pub deformation_decrease: f64,
    pub curvature_change: f64,
    pub remesh_change: f64,
    pub energy: f64,
    pub max_displacement: f64,
    pub moves: MoveCounts,
    /// Area per label; `None` for unbounded regions.
    pub areas: Vec<Option<f64>>,
    /// Deformation never increases the weighted length.
    pub deformation_mass: StepCheck,
    pub energy_balance: StepCheck,
    /// Growth bound `M(l) ≤ M(0) e^{c₁² lΔt/2} + 2ε^{1/8}(e^{c₁² lΔt/2} − 1)/c₁²`.
    pub mass_growth: StepCheck,
    pub violations: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MoveCounts {
    pub junction_split: usize,
    pub interior_removal: usize,
    pub region_collapse: usize,
    pub relaxation: usize,
    pub rejected: usize,
}

#[derive(Clone, Debug)]
pub struct Frame<T> {
    pub step: usize,
    pub time: T,
    pub network: LabeledNetwork<T>,
}

/// Network on which the velocity was evaluated, with the velocity at its
/// vertices.
#[derive(Clone, Debug)]
pub struct StepState<T> {
    pub step: usize,
    pub time: T,
    pub dt: T,
    pub network: LabeledNetwork<T>,
    pub velocity: Vec<Vec2<T>>,
}

#[derive(Clone, Debug)]
pub struct RunTrace<T> {
    pub schedule: Schedule<T>,
    pub frames: Vec<Frame<T>>,
    pub reports: Vec<StepReport>,
    pub states: Vec<StepState<T>>,
    /// Time at which the total mass fell below the extinction threshold.
    pub extinction: Option<T>,
}

impl<T: Scalar> RunTrace<T> {
    pub fn frame_at_step(&self, step: usize) -> Option<&Frame<T>> {
        self.frames.iter().find(|f| f.step == step)
    }

    pub fn last_frame(&self) -> Option<&Frame<T>> {
        self.frames.last()
    }
}

/// Receives frames and reports as the run produces them.
pub trait TraceSink<T> {
    fn frame(&mut self, _frame: &Frame<T>) {}
    fn report(&mut self, _report: &StepReport) {}
}

/// Sink that drops everything.
pub struct NullSink;

impl<T> TraceSink<T> for NullSink {}

/// Evolving state of a run.
#[derive(Clone, Debug)]
pub struct FlowState<T> {
    pub network: LabeledNetwork<T>,
    pub step: usize,
    pub time: T,
    /// Weighted length at step zero.
    pub initial_mass: T,
}

impl<T: Scalar> FlowState<T> {
    pub fn new(network: LabeledNetwork<T>, omega: &WeightFunction<T>) -> Self {
        let initial_mass = weighted_length(&network, omega);
        Self { network, step: 0, time: T::zero(), initial_mass }
    }
}

/// `‖∂𝓔‖(Ω)`: exact length for `Ω ≡ 1`, Gauss–Legendre otherwise.
pub fn weighted_length<T: Scalar>(net: &LabeledNetwork<T>, omega: &WeightFunction<T>) -> T {
    if omega.is_one() {
        return net.length();
    }
    let rule = GaussLegendre::<T>::new(6);
    let mut acc = T::zero();
    for (_, a, b) in net.segments() {
        let (pa, pb) = net.segment(a, b);
        let len = (pb - pa).norm();
        let m = (len / lit(0.02)).ceil().to_usize().unwrap_or(1).max(1);
        acc += rule.composite(T::zero(), T::one(), m, |t| omega.value(pa + (pb - pa) * t)) * len;
    }
    acc
}

/// Change of `‖∂𝓔‖(Ω)` when every vertex moves by `d[v]`, computed from
/// the displacements so that it survives steps below the resolution of
/// the positions.
fn mass_change<T: Scalar>(net: &LabeledNetwork<T>, d: &[Vec2<T>], omega: &WeightFunction<T>) -> T {
    let mut acc = T::zero();
    if omega.is_one() {
        for (_, a, b) in net.segments() {
            let s = net.segment_vector(a, b);
            let ds = d[b] - d[a];
            let s2 = s + ds;
            let den = s2.norm() + s.norm();
            if den > T::zero() {
                acc += (s + s + ds).dot(ds) / den;
            }
        }
        return acc;
    }
    let rule = GaussLegendre::<T>::new(6);
    for (_, a, b) in net.segments() {
        let (pa, pb) = net.segment(a, b);
        let s = pb - pa;
        let ds = d[b] - d[a];
        let s2 = s + ds;
        let (l1, l2) = (s.norm(), s2.norm());
        let dl = if l1 + l2 > T::zero() { (s + s + ds).dot(ds) / (l1 + l2) } else { T::zero() };
        let m = (l1.max(l2) / lit(0.02)).ceil().to_usize().unwrap_or(1).max(1);
        // ∫Ω(new) l₂ − ∫Ω(old) l₁ = ∫[Ω(new) − Ω(old)] l₂ + ∫Ω(old) (l₂ − l₁)
        let dw = rule.composite(T::zero(), T::one(), m, |t| {
            let p = pa + s * t;
            let q = p + (d[a] + (d[b] - d[a]) * t);
            omega.difference(p, q)
        });
        let w = rule.composite(T::zero(), T::one(), m, |t| omega.value(pa + s * t));
        acc += dw * l2 + w * dl;
    }
    acc
}

/// Moves every vertex by `Δt·h_ε(x)`. Anchored ends stay fixed.
pub fn curvature_step<T: Scalar>(
    net: &LabeledNetwork<T>,
    kernel: &Kernel<T>,
    omega: &WeightFunction<T>,
    dt: T,
    quadrature: &QuadratureConfig<T>,
    tolerance: T,
) -> Result<(LabeledNetwork<T>, CurvatureReport, Vec<Vec2<T>>), FlowError> {
    let view = build_varifold_view(net, *omega);
    let field = smoothed_mean_curvature(&view, kernel, quadrature, &net.vertices)?;
    let deg = net.degrees();
    let tol = lit::<T>(1e-9);
    let mut vel = field.h_eps.clone();
    for (v, h) in vel.iter_mut().enumerate() {
        if net.is_anchor(v, deg[v], tol) || deg[v] == 0 {
            *h = Vec2::zero();
        }
    }
    let max_speed = vel.iter().fold(T::zero(), |m, h| m.max(h.norm()));
    let h_min = net.segments().fold(T::infinity(), |m, (_, a, b)| m.min(net.segment_vector(a, b).norm()));
    let product = dt * max_speed;
    if h_min.is_finite() && product > h_min * lit(0.5) {
        return Err(FlowError::StepTooLarge { product: product.to_f64_lossy(), limit: (h_min * lit(0.5)).to_f64_lossy() });
    }
    let disp: Vec<Vec2<T>> = vel.iter().map(|h| *h * dt).collect();
    let mut out = net.clone();
    for (p, d) in out.vertices.iter_mut().zip(&disp) {
        *p = net.domain.wrap(*p + *d);
        if !p.is_finite() {
            return Err(FlowError::NonFinite { step: 0 });
        }
    }
    let mass = weighted_length(net, omega);
    let dm = mass_change(net, &disp, omega);
    let eps = kernel.epsilon;
    let c1 = omega.c1();
    let lhs = dm / dt + field.energy * lit(0.25);
    let bound = lit::<T>(3.0) * eps.sqrt().sqrt() + c1 * c1 * lit(0.5) * mass;
    let slack = tolerance.max(quadrature.tolerance) * (T::one() + field.energy + bound);
    let report = CurvatureReport {
        mass_before: mass.to_f64_lossy(),
        mass_change: dm.to_f64_lossy(),
        energy: field.energy.to_f64_lossy(),
        max_speed: max_speed.to_f64_lossy(),
        max_displacement: product.to_f64_lossy(),
        energy_balance: StepCheck::new(lhs, bound + slack),
    };
    Ok((out, report, vel))
}

/// `M(0) e^{x} + 2ε^{1/8}(e^{x} − 1)/c₁²` with `x = c₁² t / 2`, and its
/// `c₁ → 0` limit `M(0) + ε^{1/8} t`.
pub fn mass_growth_bound<T: Scalar>(m0: T, c1: T, epsilon: T, t: T) -> T {
    let e8 = epsilon.sqrt().sqrt().sqrt();
    let x = c1 * c1 * t * lit(0.5);
    if x == T::zero() {
        return m0 + e8 * t;
    }
    let em1 = x.exp_m1();
    m0 * (em1 + T::one()) + (e8 + e8) * em1 / (c1 * c1)
}

/// One full step: deformation, curvature motion on the deformed network,
/// and a remesh when the cadence says so.
pub fn advance<T: Scalar>(
    state: &FlowState<T>,
    schedule: &Schedule<T>,
    kernel: &Kernel<T>,
    cfg: &FlowConfig<T>,
) -> Result<(FlowState<T>, StepReport, Option<StepState<T>>), FlowError> {
    let omega = &cfg.omega;
    let mass_pre = weighted_length(&state.network, omega);
    let mut counts = MoveCounts::default();
    let (deformed, decrease) = if cfg.deform {
        let out = lipschitz_step(&state.network, schedule.j, omega, &cfg.deformation);
        for m in &out.accepted_moves {
            match m.kind {
                MoveKind::JunctionSplit => counts.junction_split += 1,
                MoveKind::InteriorRemoval => counts.interior_removal += 1,
                MoveKind::SmallRegionCollapse => counts.region_collapse += 1,
                MoveKind::Relaxation => counts.relaxation += 1,
                MoveKind::Identity => {}
            }
        }
        counts.rejected = out.rejected.len();
        let dec = out.length_decrease;
        (out.network, dec)
    } else {
        (state.network.clone(), T::zero())
    };
    let mass_deformed = if decrease == T::zero() { mass_pre } else { weighted_length(&deformed, omega) };
    let deformation_mass = StepCheck::new(mass_deformed, mass_pre);

    let step = state.step;
    let attempt = curvature_step(&deformed, kernel, omega, schedule.dt, &cfg.quadrature, cfg.tolerance);
    let (base, (moved, curv, vel)) = match attempt {
        Ok(r) => (deformed, r),
        Err(FlowError::StepTooLarge { .. }) => {
            let fine = remesh(&deformed, schedule.h_min, schedule.h_max)?;
            let r = curvature_step(&fine, kernel, omega, schedule.dt, &cfg.quadrature, cfg.tolerance)?;
            (fine, r)
        }
        Err(FlowError::NonFinite { .. }) => return Err(FlowError::NonFinite { step }),
        Err(e) => return Err(e),
    };
    let mass_moved = weighted_length(&moved, omega);
    let next_step = step + 1;
    let network = if schedule.remesh_every > 0 && next_step.is_multiple_of(schedule.remesh_every) && !moved.edges.is_empty() {
        remesh(&moved, schedule.h_min, schedule.h_max).map_err(FlowError::Network)?
    } else {
        moved
    };
    let mass_post = weighted_length(&network, omega);
    let time = schedule.dt * T::from_usize_lossy(next_step);
    let growth_bound = mass_growth_bound(state.initial_mass, omega.c1(), schedule.epsilon, time);
    let mass_growth = StepCheck::new(mass_post, growth_bound + cfg.tolerance * state.initial_mass);
    let areas = region_areas(&network).areas.iter().map(|a| a.map(|x| x.to_f64_lossy())).collect();
    let mut violations = Vec::new();
    if !deformation_mass.holds {
        violations.push("deformation_mass".to_string());
    }
    if !curv.energy_balance.holds {
        violations.push("energy_balance".to_string());
    }
    if !mass_growth.holds {
        violations.push("mass_growth".to_string());
    }
    let report = StepReport {
        step: next_step,
        time: time.to_f64_lossy(),
        mass_pre: mass_pre.to_f64_lossy(),
        mass_deformed: mass_deformed.to_f64_lossy(),
        mass_moved: mass_moved.to_f64_lossy(),
        mass_post: mass_post.to_f64_lossy(),
        deformation_decrease: decrease.to_f64_lossy(),
        curvature_change: curv.mass_change,
        remesh_change: (mass_post - mass_moved).to_f64_lossy(),
        energy: curv.energy,
        max_displacement: curv.max_displacement,
        moves: counts,
        areas,
        deformation_mass,
        energy_balance: curv.energy_balance,
        mass_growth,
        violations,
    };
    let kept = cfg.keep_states.then_some(StepState {
        step,
        time: state.time,
        dt: schedule.dt,
        network: base,
        velocity: vel,
    });
    let next = FlowState { network, step: next_step, time, initial_mass: state.initial_mass };
    Ok((next, report, kept))
}

/// Failure with everything produced before it.
#[derive(Debug)]
pub struct RunFailure<T> {
    pub trace: RunTrace<T>,
    pub error: FlowError,
}

/// Prepares a scene for a schedule: remeshes to `[h_min, h_max]`.
pub fn prepare<T: Scalar>(net: &LabeledNetwork<T>, schedule: &Schedule<T>) -> Result<LabeledNetwork<T>, NetworkError> {
    if net.edges.is_empty() {
        return Ok(net.clone());
    }
    remesh(net, schedule.h_min, schedule.h_max)
}

/// Iterates [`advance`] for `schedule.steps` steps or until the weighted
/// length drops below the extinction threshold.
pub fn run<T: Scalar>(
    net: &LabeledNetwork<T>,
    schedule: &Schedule<T>,
    cfg: &FlowConfig<T>,
    sink: &mut dyn TraceSink<T>,
) -> Result<RunTrace<T>, Box<RunFailure<T>>> {
    let mut trace =
        RunTrace { schedule: *schedule, frames: Vec::new(), reports: Vec::new(), states: Vec::new(), extinction: None };
    let fail = |trace: RunTrace<T>, error: FlowError| Box::new(RunFailure { trace, error });
    let kernel = match Kernel::new(schedule.epsilon) {
        Ok(k) => k,
        Err(e) => return Err(fail(trace, e.into())),
    };
    let start = match prepare(net, schedule) {
        Ok(n) => n,
        Err(e) => return Err(fail(trace, e.into())),
    };
    let mut state = FlowState::new(start, &cfg.omega);
    let first = Frame { step: 0, time: T::zero(), network: state.network.clone() };
    sink.frame(&first);
    trace.frames.push(first);
    if state.initial_mass < schedule.extinction {
        trace.extinction = Some(T::zero());
        return Ok(trace);
    }
    for _ in 0..schedule.steps {
        let (next, report, kept) = match advance(&state, schedule, &kernel, cfg) {
            Ok(r) => r,
            Err(e) => return Err(fail(trace, e)),
        };
        sink.report(&report);
        trace.reports.push(report);
        if let Some(s) = kept {
            trace.states.push(s);
        }
        state = next;
        let extinct = weighted_length(&state.network, &cfg.omega) < schedule.extinction;
        let on_cadence = cfg.frame_every > 0 && state.step % cfg.frame_every == 0;
        if on_cadence || extinct || state.step == schedule.steps {
            let f = Frame { step: state.step, time: state.time, network: state.network.clone() };
            sink.frame(&f);
            trace.frames.push(f);
        }
        if extinct {
            trace.extinction = Some(state.time);
            break;
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests;
