// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

use super::*;
use crate::domain::{BBox, Domain};
use crate::error::MoveError;
use crate::network::{validate_partition, ValidationConfig};

fn plane(h: f64) -> Domain<f64> {
    Domain::Plane { bbox: BBox::new(Vec2::new(-h, -h), Vec2::new(h, h)) }
}

fn ray(from: Vec2<f64>, to: Vec2<f64>, n: usize) -> Vec<Vec2<f64>> {
    (0..=n).map(|i| from.lerp(to, i as f64 / n as f64)).collect()
}

/// Four quadrants meeting at the origin, arms reaching the window edge.
fn cross() -> LabeledNetwork<f64> {
    let mut net = LabeledNetwork::new(plane(1.0), 4);
    let o = net.add_vertex(Vec2::zero());
    let arms = [(Vec2::new(1.0, 0.0), 1, 4), (Vec2::new(0.0, 1.0), 2, 1), (Vec2::new(-1.0, 0.0), 3, 2), (Vec2::new(0.0, -1.0), 4, 3)];
    for (dir, l, r) in arms {
        let pts = ray(Vec2::zero(), dir, 20);
        let mut ids = vec![o];
        ids.extend(pts[1..].iter().map(|p| net.add_vertex(*p)));
        net.add_edge(ids, l, r);
    }
    net
}

fn circle(c: Vec2<f64>, r: f64, n: usize) -> Vec<Vec2<f64>> {
    (0..n).map(|i| c + Vec2::from_angle(2.0 * core::f64::consts::PI * i as f64 / n as f64) * r).collect()
}

fn valid(net: &LabeledNetwork<f64>) -> bool {
    let rep = validate_partition(net, &ValidationConfig::default());
    if !rep.is_ok() {
        eprintln!("{rep:?}");
    }
    rep.is_ok()
}

#[test]
fn identity_is_admissible() {
    let net = cross();
    let mv = Move::identity(4);
    assert!(verify_admissible(&net, &net, &mv, 3, &WeightFunction::One).is_accept());
}

#[test]
fn cross_split_reaches_steiner_ratio() {
    let net = cross();
    let out = split_high_order_junction(&net, 0, 1, &WeightFunction::One).unwrap();
    assert_eq!(out.accepted_moves.len(), 1, "{:?}", out.rejected);
    let mv = &out.accepted_moves[0];
    let expect = (1.0 + 3f64.sqrt()) * 2f64.sqrt() / 4.0;
    let ratio = mv.mass_after / mv.mass_before;
    assert!((ratio - expect).abs() < 0.01 * expect, "ratio {ratio}");
    assert!(valid(&out.network));
    let deg = out.network.degrees();
    assert_eq!(deg.iter().filter(|&&d| d == 3).count(), 2);
    assert!(deg.iter().all(|&d| d <= 3));
    let sum: f64 = out.volume_changes.iter().sum();
    assert!(sum.abs() < 1e-15);
    let drop = net.length() - out.network.length();
    assert!((drop - out.length_decrease).abs() < 1e-12);
    assert!(out.delta_j_estimate < 0.0);
}

#[test]
fn triple_junction_is_not_split() {
    let mut net = LabeledNetwork::new(plane(1.0), 3);
    let o = net.add_vertex(Vec2::zero());
    for (k, (l, r)) in [(1, 3), (2, 1), (3, 2)].into_iter().enumerate() {
        let dir = Vec2::from_angle(2.0 * core::f64::consts::PI * k as f64 / 3.0);
        let end = if dir.x.abs() > dir.y.abs() { dir / dir.x.abs() } else { dir / dir.y.abs() };
        let b = net.add_vertex(end);
        net.add_edge(vec![o, b], l, r);
    }
    assert!(matches!(split_high_order_junction(&net, 0, 2, &WeightFunction::One), Err(MoveError::NotApplicable(_))));
}

#[test]
fn oversized_displacement_rejected() {
    let net = cross();
    let j = 4;
    let mut mv = Move::identity(4);
    mv.kind = MoveKind::Relaxation;
    mv.support = Support { center: Vec2::zero(), radius: 0.01 };
    mv.displacement = 2.0 / (j * j) as f64;
    let v = verify_admissible(&net, &net, &mv, j, &WeightFunction::One);
    assert!(matches!(v, Verdict::Reject(Rejection::Displacement { .. })), "{v:?}");
}

#[test]
fn volume_violation_rejected() {
    let mut before = LabeledNetwork::new(plane(3.0), 2);
    before.add_polyline(&circle(Vec2::zero(), 2.0, 256), true, 2, 1);
    let mut after = LabeledNetwork::new(plane(3.0), 2);
    after.add_polyline(&circle(Vec2::zero(), 1.75, 256), true, 2, 1);
    let mut mv = Move::identity(2);
    mv.kind = MoveKind::Relaxation;
    mv.support = Support { center: Vec2::zero(), radius: 2.1 };
    mv.displacement = 0.25;
    let v = verify_admissible(&before, &after, &mv, 2, &WeightFunction::One);
    match v {
        Verdict::Reject(Rejection::Volume { label, change, .. }) => {
            assert!(label == 1 || label == 2);
            assert!((change - core::f64::consts::PI * (4.0 - 1.75 * 1.75)).abs() < 0.01);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn local_decrease_is_required() {
    let mut before = LabeledNetwork::new(Domain::Torus, 2);
    before.add_polyline(&ray(Vec2::new(0.0, 0.5), Vec2::new(0.875, 0.5), 7), false, 1, 2);
    let last = before.vertices.len() - 1;
    before.edges[0].vertices.push(0);
    before.vertices.truncate(last + 1);
    let mut after = before.clone();
    after.vertices[3].y += 1e-3;
    let mut mv = Move::identity(2);
    mv.kind = MoveKind::Relaxation;
    mv.support = Support { center: before.vertices[3], radius: 0.13 };
    mv.displacement = 1e-3;
    let v = verify_admissible(&before, &after, &mv, 1, &WeightFunction::One);
    assert!(matches!(v, Verdict::Reject(Rejection::LocalDecrease { .. })), "{v:?}");
}

/// Horizontal boundary with a hair of length 0.1 hanging into label 1.
fn line_with_hair() -> LabeledNetwork<f64> {
    let mut net = LabeledNetwork::new(plane(1.0), 2);
    let o = net.add_vertex(Vec2::zero());
    let left: Vec<usize> = ray(Vec2::new(-1.0, 0.0), Vec2::zero(), 10)[..10].iter().map(|p| net.add_vertex(*p)).collect();
    let right: Vec<usize> = ray(Vec2::zero(), Vec2::new(1.0, 0.0), 10)[1..].iter().map(|p| net.add_vertex(*p)).collect();
    let hair: Vec<usize> = ray(Vec2::zero(), Vec2::new(0.0, 0.1), 4)[1..].iter().map(|p| net.add_vertex(*p)).collect();
    let mut a = left;
    a.push(o);
    net.add_edge(a, 1, 2);
    let mut b = vec![o];
    b.extend(right);
    net.add_edge(b, 1, 2);
    let mut h = vec![o];
    h.extend(hair);
    net.add_edge(h, 1, 1);
    net
}

#[test]
fn hair_is_removed_without_volume_change() {
    let net = line_with_hair();
    assert!(valid(&net));
    let out = remove_interior_boundary(&net, 2, 1, &WeightFunction::One).unwrap();
    assert!(out.rejected.is_empty(), "{:?}", out.rejected);
    assert!((out.length_decrease - 0.1).abs() < 1e-12);
    assert!((net.length() - out.network.length() - 0.1).abs() < 1e-12);
    assert!(out.volume_changes.iter().all(|v| *v == 0.0));
    assert_eq!(out.network.edges.len(), 1);
    assert!(valid(&out.network));
}

#[test]
fn separating_edge_is_not_removed() {
    let net = line_with_hair();
    assert!(matches!(remove_interior_boundary(&net, 0, 1, &WeightFunction::One), Err(MoveError::NotApplicable(_))));
}

#[test]
fn tiny_grain_collapses() {
    let rho = 1e-3;
    let mut net = LabeledNetwork::new(Domain::Torus, 2);
    net.add_polyline(&circle(Vec2::new(0.5, 0.5), rho, 32), true, 2, 1);
    let out = collapse_small_region(&net, 2, 1, &WeightFunction::One, &CollapseConfig::default()).unwrap();
    assert_eq!(out.accepted_moves.len(), 1, "{:?}", out.rejected);
    let mv = &out.accepted_moves[0];
    assert!(mv.mass_after <= 0.5 * mv.mass_before);
    let perimeter = net.length();
    assert!(out.volume_changes[1].abs() <= perimeter * perimeter);
    assert!((out.volume_changes[1] + out.volume_changes[0]).abs() < 1e-18);
    assert!(out.network.edges.is_empty());
}

#[test]
fn grain_on_a_long_boundary_is_not_small() {
    // Small grain 3 sitting on the boundary between 1 (above) and 2.
    let mut net = LabeledNetwork::new(plane(1.0), 3);
    let ring = circle(Vec2::zero(), 0.01, 32);
    let ids: Vec<usize> = ring.iter().map(|p| net.add_vertex(*p)).collect();
    // Upper arc (angles 0..pi) separates 3 from 1, lower arc from 2.
    let upper: Vec<usize> = ids[..=16].to_vec();
    let mut lower: Vec<usize> = ids[16..].to_vec();
    lower.push(ids[0]);
    net.add_edge(upper, 3, 1);
    net.add_edge(lower, 3, 2);
    let w = net.add_vertex(Vec2::new(-1.0, 0.0));
    let e = net.add_vertex(Vec2::new(1.0, 0.0));
    net.add_edge(vec![w, ids[16]], 1, 2);
    net.add_edge(vec![ids[0], e], 1, 2);
    assert!(valid(&net));
    let res = collapse_small_region(&net, 3, 4, &WeightFunction::One, &CollapseConfig::default());
    // The boundary between 1 and 2 crosses the whole ball.
    assert!(matches!(res, Err(MoveError::NotApplicable(_))), "{res:?}");
}

#[test]
fn kink_relaxes_and_circle_is_left_alone() {
    let mut net = LabeledNetwork::new(Domain::Torus, 2);
    net.add_polyline(&circle(Vec2::new(0.5, 0.5), 0.3, 64), true, 2, 1);
    let out = lipschitz_step(&net, 1, &WeightFunction::One, &StepConfig::default());
    assert!(out.accepted_moves.is_empty());
    assert_eq!(out.network, net);

    let mut kinked = LabeledNetwork::new(Domain::Torus, 2);
    let mut pts: Vec<Vec2<f64>> = (0..40).map(|i| Vec2::new(i as f64 / 40.0, 0.5)).collect();
    pts[20].y += 0.02;
    kinked.add_polyline(&pts, true, 1, 2);
    let mut other: Vec<Vec2<f64>> = (0..40).map(|i| Vec2::new(i as f64 / 40.0, 0.1)).collect();
    other.reverse();
    kinked.add_polyline(&other, true, 1, 2);
    let out = relax_vertex(&kinked, 20, 1, &WeightFunction::One).unwrap();
    assert_eq!(out.accepted_moves.len(), 1, "{:?}", out.rejected);
    let mv = &out.accepted_moves[0];
    assert!((mv.displacement - 0.02).abs() < 1e-12);
    assert!((mv.volume_changes[0] + mv.volume_changes[1]).abs() < 1e-15);
    assert!((mv.volume_changes[0].abs() - 0.5 * 0.05 * 0.02).abs() < 1e-12);
}

#[test]
fn step_handles_cross_and_hair_in_one_pass() {
    let mut net = cross();
    let tip = net.add_vertex(Vec2::new(0.5, 0.45));
    let base = net.vertices.iter().position(|p| *p == Vec2::new(0.5, 0.0)).unwrap();
    let mid = net.add_vertex(Vec2::new(0.5, 0.2));
    // The arm along +x passes through `base`; split it there.
    let arm = net.edges[0].vertices.clone();
    let k = arm.iter().position(|&v| v == base).unwrap();
    net.edges[0].vertices = arm[..=k].to_vec();
    net.add_edge(arm[k..].to_vec(), 1, 4);
    net.add_edge(vec![base, mid, tip], 1, 1);
    assert!(valid(&net));
    let before = net.length();
    let out = lipschitz_step(&net, 1, &WeightFunction::One, &StepConfig::default());
    let kinds: Vec<MoveKind> = out.accepted_moves.iter().map(|m| m.kind).collect();
    assert!(kinds.contains(&MoveKind::InteriorRemoval));
    assert!(kinds.contains(&MoveKind::JunctionSplit));
    assert!(valid(&out.network));
    assert!(out.network.edges.iter().all(|e| !e.is_interior()));
    assert!(out.network.degrees().iter().all(|&d| d <= 3));
    assert!((before - out.network.length() - out.length_decrease).abs() < 1e-12);
}
