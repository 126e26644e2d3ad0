// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

use super::*;
use crate::network::region_areas;

const BANDS: &str = "domain torus\nlabels 2\nline y=0.25 left=1 right=2\nline y=0.75 left=2 right=1\n";

fn angles_at(net: &LabeledNetwork<f64>, v: usize) -> Vec<f64> {
    let ends = net.edge_ends();
    let sorted = net.sorted_ends(v, &ends[v]);
    let k = sorted.len();
    (0..k)
        .map(|i| {
            let d = sorted[(i + 1) % k].0 - sorted[i].0;
            (if d <= 0.0 { d + core::f64::consts::TAU } else { d }).to_degrees()
        })
        .collect()
}

#[test]
fn two_bands() {
    let net: LabeledNetwork<f64> = parse_scene(BANDS).unwrap();
    assert!(net.domain.is_torus());
    assert_eq!(net.edges.len(), 2);
    assert!(net.edges.iter().all(|e| e.is_closed()));
    let areas = region_areas(&net).areas;
    assert!((areas[0].unwrap() - 0.5).abs() < 1e-12);
    assert!((areas[1].unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn voronoi_is_deterministic_and_trivalent() {
    let text = "generator voronoi seeds=8 rng=42";
    let a: LabeledNetwork<f64> = parse_scene(text).unwrap();
    let b: LabeledNetwork<f64> = parse_scene(text).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.n_labels, 8);
    let deg = a.degrees();
    assert!(deg.iter().all(|&d| d == 2 || d == 3), "{deg:?}");
    // Euler on the torus: V − E + F = 0 with E = 3V/2 gives V = 2F.
    assert_eq!(a.junctions().len(), 16);
    let areas = region_areas(&a).areas;
    let total: f64 = areas.iter().map(|x| x.unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    let c: LabeledNetwork<f64> = parse_scene("generator voronoi seeds=8 rng=43").unwrap();
    assert_ne!(a, c);
}

#[test]
fn cross_has_one_quadruple_point() {
    let net: LabeledNetwork<f64> = parse_scene("labels 4\ncross at=(0,0) arms=1").unwrap();
    assert_eq!(net.n_labels, 4);
    let deg = net.degrees();
    assert_eq!(deg.iter().filter(|&&d| d == 4).count(), 1);
    let anchors = (0..net.vertices.len()).filter(|&v| net.is_anchor(v, deg[v], 1e-12)).count();
    assert_eq!(anchors, 4);
    assert!((net.length() - 4.0).abs() < 1e-12);
}

#[test]
fn triple_and_honeycomb_meet_at_120_degrees() {
    let t: LabeledNetwork<f64> = parse_scene("triple at=(0,0) arms=1").unwrap();
    let j = t.junctions();
    assert_eq!(j.len(), 1);
    for a in angles_at(&t, j[0]) {
        assert!((a - 120.0).abs() < 1e-9);
    }
    let h: LabeledNetwork<f64> = parse_scene("generator honeycomb cols=2 rows=2").unwrap();
    assert_eq!(h.n_labels, 4);
    let js = h.junctions();
    assert_eq!(js.len(), 8);
    for v in js {
        for a in angles_at(&h, v) {
            assert!((a - 120.0).abs() < 1e-9, "{a}");
        }
    }
    let areas = region_areas(&h).areas;
    for a in areas {
        assert!((a.unwrap() - 0.25).abs() < 1e-12);
    }
}

#[test]
fn circle_defaults_to_a_256_gon() {
    let net: LabeledNetwork<f64> =
        parse_scene("domain plane box=(-2,-2,2,2)\nlabels 2\ncircle center=(0,0) radius=1 inside=2 outside=1").unwrap();
    assert_eq!(net.vertices.len(), 256);
    assert_eq!(net, generate::unit_circle(256));
}

#[test]
fn positioned_errors() {
    let err = |t: &str| parse_scene::<f64>(t).unwrap_err();
    assert_eq!(
        err("domain torus\nlabels 2\nline y=0.25 left=1 right=3\n"),
        SceneError::Semantic { line: 3, column: 20, message: "unknown label 3; the scene declares 2".into() }
    );
    assert_eq!(
        err("domain torus\nlabels 2\nline y=abc left=1 right=2\n"),
        SceneError::Syntax { line: 3, column: 8, expected: "a number for y".into() }
    );
    assert_eq!(err("domain cylinder"), SceneError::Syntax { line: 1, column: 8, expected: "torus or plane".into() });
    assert_eq!(err("labels 2\nfoo x=1"), SceneError::Syntax { line: 2, column: 1, expected: "a directive".into() });
    assert!(matches!(
        err("domain torus\nlabels 2\nline y=0.25 left=1 right=2 colour=3"),
        SceneError::Semantic { line: 3, column: 28, .. }
    ));
    assert!(matches!(err("labels 2\nedge left=1 right=2 points=(0,0) (1"), SceneError::Syntax { line: 2, .. }));
    assert!(matches!(err("labels 2\nline y=0 left=1 right=2"), SceneError::Semantic { line: 2, .. }));
    // A single band leaves the labels inconsistent across the torus.
    assert!(matches!(err("domain torus\nlabels 2\nline y=0.25 left=1 right=2"), SceneError::Invalid(_)));
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = format!("# two bands\n\n{BANDS}   # trailing\n");
    let a: LabeledNetwork<f64> = parse_scene(&text).unwrap();
    assert_eq!(a, parse_scene::<f64>(BANDS).unwrap());
}

#[test]
fn emit_then_parse_is_identity() {
    for text in [BANDS, "generator voronoi seeds=8 rng=42", "labels 4\ncross at=(0.5,-0.25) arms=1.5", "generator honeycomb"] {
        let net: LabeledNetwork<f64> = parse_scene(text).unwrap();
        let emitted = emit_scene(&net, Some(OmegaKind::Exp));
        let back = parse_scene_file::<f64>(&emitted).unwrap();
        assert_eq!(back.network, canonicalize(&net), "{text}");
        assert_eq!(back.omega, Some(OmegaKind::Exp));
        assert_eq!(emit_scene(&back.network, back.omega), emitted);
    }
}

#[test]
fn single_precision_scenes() {
    let net: LabeledNetwork<f32> = parse_scene("generator voronoi seeds=8 rng=42").unwrap();
    let back: LabeledNetwork<f32> = parse_scene(&emit_scene(&net, None)).unwrap();
    assert_eq!(back, canonicalize(&net));
}

#[test]
fn seed_override_replaces_generator_seed() {
    let a: Scene<f64> = parse_scene_seeded("generator voronoi seeds=8 rng=1", Some(42)).unwrap();
    assert_eq!(a.network, parse_scene::<f64>("generator voronoi seeds=8 rng=42").unwrap());
}

#[test]
fn three_site_voronoi_is_valid() {
    // Few sites make cells large enough to meet their own periodic images.
    for rng in [256455011697242033, 71u64.wrapping_mul(0x9E3779B97F4A7C15)] {
        let net = generate::voronoi::<f64>(3, rng).unwrap();
        assert!(validate_partition(&net, &ValidationConfig::new(1e-9)).is_ok());
    }
}
