// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

use super::*;
use crate::domain::{BBox, Domain};

fn circle_net(r: f64, n: usize) -> LabeledNetwork<f64> {
    let mut net = LabeledNetwork::new(Domain::Plane { bbox: BBox::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0)) }, 2);
    let pts: Vec<Vec2<f64>> =
        (0..n).map(|i| Vec2::from_angle(2.0 * core::f64::consts::PI * i as f64 / n as f64) * r).collect();
    net.add_polyline(&pts, true, 2, 1);
    net
}

fn bands() -> LabeledNetwork<f64> {
    let mut net = LabeledNetwork::new(Domain::Torus, 2);
    let row = |y: f64| (0..64).map(|i| Vec2::new(i as f64 / 64.0, y)).collect::<Vec<_>>();
    net.add_polyline(&row(0.25), true, 1, 2);
    net.add_polyline(&row(0.75), true, 2, 1);
    net
}

fn practical(eps: f64, dt: f64, steps: usize) -> Schedule<f64> {
    let opts = ScheduleOptions { dt: Some(dt), steps, ..ScheduleOptions::default() };
    schedule_params(Mode::Practical, 1, 4, Some(eps), &opts).unwrap()
}

fn mean_radius(net: &LabeledNetwork<f64>) -> f64 {
    net.vertices.iter().map(|p| p.norm()).sum::<f64>() / net.vertices.len() as f64
}

#[test]
fn straight_lines_do_not_move() {
    let net = bands();
    let k = Kernel::new(0.05).unwrap();
    let (moved, rep, _) =
        curvature_step(&net, &k, &WeightFunction::One, 1e-4, &QuadratureConfig::default(), 1e-9).unwrap();
    assert!(rep.max_displacement < 1e-6);
    let d = net.vertices.iter().zip(&moved.vertices).fold(0.0f64, |m, (a, b)| m.max(net.domain.dist(*a, *b)));
    assert!(d < 1e-6);
}

#[test]
fn circle_step_matches_curve_shortening() {
    let net = circle_net(1.0, 256);
    let k = Kernel::new(0.05).unwrap();
    let (moved, rep, _) =
        curvature_step(&net, &k, &WeightFunction::One, 1e-4, &QuadratureConfig::default(), 1e-9).unwrap();
    let dr = mean_radius(&net) - mean_radius(&moved);
    assert!((dr - 1e-4).abs() <= 0.05e-4, "dr = {dr}");
    assert!(rep.energy_balance.holds, "{:?}", rep.energy_balance);
    let direct = moved.length() - net.length();
    assert!((direct - rep.mass_change).abs() < 1e-12);
}

#[test]
fn oversized_step_is_refused() {
    let net = circle_net(1.0, 256);
    let k = Kernel::new(0.05).unwrap();
    let r = curvature_step(&net, &k, &WeightFunction::One, 0.05, &QuadratureConfig::default(), 1e-9);
    assert!(matches!(r, Err(FlowError::StepTooLarge { .. })));
}

#[test]
fn weighted_mass_change_matches_direct_difference() {
    let net = circle_net(0.5, 128);
    let omega = WeightFunction::<f64>::exp_decay();
    let k = Kernel::new(0.05).unwrap();
    let (moved, rep, _) = curvature_step(&net, &k, &omega, 1e-4, &QuadratureConfig::default(), 1e-9).unwrap();
    let direct = weighted_length(&moved, &omega) - weighted_length(&net, &omega);
    assert!((direct - rep.mass_change).abs() < 1e-10 * weighted_length(&net, &omega));
    assert!(rep.energy_balance.holds);
}

#[test]
fn stationary_bands_are_identity() {
    let net = bands();
    let s = practical(0.05, 1e-4, 3);
    let trace = run(&net, &s, &FlowConfig::default(), &mut NullSink).unwrap();
    let last = &trace.last_frame().unwrap().network;
    let first = &trace.frames[0].network;
    let d = first.vertices.iter().zip(&last.vertices).fold(0.0f64, |m, (a, b)| m.max(first.domain.dist(*a, *b)));
    assert!(d < 1e-6);
    assert!(trace.reports.iter().all(|r| r.violations.is_empty() && r.moves == MoveCounts::default()));
}

#[test]
fn zero_steps_keep_initial_frame_only() {
    let s = practical(0.05, 1e-4, 0);
    let trace = run(&circle_net(1.0, 256), &s, &FlowConfig::default(), &mut NullSink).unwrap();
    assert_eq!(trace.frames.len(), 1);
    assert!(trace.reports.is_empty());
}

#[test]
fn mass_bookkeeping_closes() {
    let s = practical(0.05, 1e-4, 12);
    let cfg = FlowConfig { frame_every: 0, ..FlowConfig::default() };
    let trace = run(&circle_net(0.6, 200), &s, &cfg, &mut NullSink).unwrap();
    assert_eq!(trace.reports.len(), 12);
    for r in &trace.reports {
        let sum = r.mass_pre - r.deformation_decrease + r.curvature_change + r.remesh_change;
        assert!((sum - r.mass_post).abs() < 1e-9, "{r:?}");
        assert!(r.violations.is_empty());
        assert!(r.mass_deformed <= r.mass_pre);
    }
    assert_eq!(trace.frames.len(), 2);
}

#[test]
fn runs_are_deterministic() {
    let s = practical(0.05, 1e-4, 5);
    let a = run(&circle_net(0.6, 200), &s, &FlowConfig::default(), &mut NullSink).unwrap();
    let b = run(&circle_net(0.6, 200), &s, &FlowConfig::default(), &mut NullSink).unwrap();
    assert_eq!(a.reports, b.reports);
    for (x, y) in a.frames.iter().zip(&b.frames) {
        assert_eq!(x.network, y.network);
    }
}

#[test]
fn paper_step_is_an_identity_with_checks() {
    let s = schedule_params::<f64>(Mode::Paper, 1, 2, Some(2f64.powi(-12)), &ScheduleOptions { steps: 1, ..ScheduleOptions::default() })
        .unwrap();
    let net = prepare(&circle_net(0.05, 256), &s).unwrap();
    let state = FlowState::new(net.clone(), &WeightFunction::One);
    let k = Kernel::new(s.epsilon).unwrap();
    let (next, rep, _) = advance(&state, &s, &k, &FlowConfig::default()).unwrap();
    assert_eq!(next.network.vertices.len(), net.vertices.len(), "{:?}", rep.moves);
    let moved = net.vertices.iter().zip(&next.network.vertices).fold(0.0f64, |m, (a, b)| m.max((*a - *b).norm()));
    assert!(moved < 1e-60);
    assert!(rep.violations.is_empty(), "{rep:?}");
    assert!(rep.curvature_change < 0.0);
    assert!(rep.energy_balance.lhs < 0.0);
}

#[test]
fn growth_bound_limit() {
    let b0 = mass_growth_bound(2.0, 0.0, 0.0625f64, 0.5);
    assert!((b0 - (2.0 + 0.0625f64.powf(0.125) * 0.5)).abs() < 1e-15);
    let small = mass_growth_bound(2.0, 1e-6, 0.0625f64, 0.5);
    assert!((small - b0).abs() < 1e-9);
}
