// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Property tests over generated inputs.

use std::f64::consts::TAU;

use proptest::prelude::*;

use grainflow::diagnostics::{density_ratio, symmetric_difference_area};
use grainflow::domain::{BBox, Domain};
use grainflow::geometry::{Mat2, Vec2};
use grainflow::kernel::{kernel_normalize, Kernel};
use grainflow::network::{region_areas, validate_partition, ValidationConfig};
use grainflow::quadrature::GaussLegendre;
use grainflow::scene::{canonicalize, emit_scene, generate, parse_scene};
use grainflow::varifold::{build_varifold_view, first_variation};
use grainflow::weights::{AffineField, WeightFunction};

fn plane(h: f64) -> Domain<f64> {
    Domain::Plane { bbox: BBox::new(Vec2::new(-h, -h), Vec2::new(h, h)) }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn kernel_has_unit_mass(eps in 0.02f64..0.9) {
        let k = Kernel::new(eps).unwrap();
        let gl = GaussLegendre::<f64>::new(20);
        let mass = TAU * gl.composite(0.0, 1.0, 2000, |r| r * k.value(Vec2::new(r, 0.0)));
        prop_assert!((mass - 1.0).abs() < 1e-8, "ε = {eps}: {mass}");
        prop_assert!(kernel_normalize(eps).unwrap().0 >= 1.0);
    }

    #[test]
    fn kernel_is_radial(eps in 0.02f64..0.9, r in 0.0f64..1.2, a in 0.0f64..TAU) {
        let k = Kernel::new(eps).unwrap();
        let on_axis = k.value(Vec2::new(r, 0.0));
        let rotated = k.value(Vec2::from_angle(a) * r);
        prop_assert!((on_axis - rotated).abs() <= 1e-12 * (1.0 + on_axis));
    }

    #[test]
    fn radial_first_variation_is_length(
        cx in -1.0f64..1.0, cy in -1.0f64..1.0, r in 0.1f64..2.0, n in 3usize..200,
    ) {
        let net = generate::circle(plane(5.0), 2, Vec2::new(cx, cy), r, n, 2, 1);
        let v = build_varifold_view(&net, WeightFunction::One);
        let g = AffineField { m: Mat2::identity(), b: Vec2::new(0.3, -0.2) };
        let dv = first_variation(&v, &g, 0.1);
        prop_assert!((dv - v.total_mass).abs() <= 1e-12 * v.total_mass);
    }

    #[test]
    fn voronoi_partitions_the_torus(seeds in 3usize..12, rng in any::<u64>()) {
        let net = generate::voronoi::<f64>(seeds, rng).unwrap();
        prop_assert!(validate_partition(&net, &ValidationConfig::new(1e-9)).is_ok());
        let table = region_areas(&net);
        let total: f64 = table.areas.iter().map(|a| a.unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "{total}");
        prop_assert!(net.degrees().iter().all(|&d| d == 2 || d == 3));
    }

    #[test]
    fn emitted_scenes_parse_back(seeds in 3usize..10, rng in any::<u64>()) {
        let net = generate::voronoi::<f64>(seeds, rng).unwrap();
        let text = emit_scene(&net, None);
        let back = parse_scene::<f64>(&text).unwrap();
        prop_assert_eq!(&back, &canonicalize(&net));
        prop_assert_eq!(emit_scene(&back, None), text);
    }

    #[test]
    fn symmetric_difference_is_a_metric(r1 in 0.2f64..1.0, r2 in 0.2f64..1.0, r3 in 0.2f64..1.0) {
        let disk = |r| generate::circle(plane(2.0), 2, Vec2::zero(), r, 128, 2, 1);
        let (a, b, c) = (disk(r1), disk(r2), disk(r3));
        let ab = symmetric_difference_area(&a, &b, 2, None);
        let ba = symmetric_difference_area(&b, &a, 2, None);
        let ac = symmetric_difference_area(&a, &c, 2, None);
        let cb = symmetric_difference_area(&c, &b, 2, None);
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(symmetric_difference_area(&a, &a, 2, None).abs() < 1e-12);
        prop_assert!(ab <= ac + cb + 1e-9);
    }

    #[test]
    fn density_ratio_is_translation_invariant(dx in -0.4f64..0.4, dy in -0.4f64..0.4, r in 0.01f64..0.5) {
        let tri = generate::triple::<f64>(Vec2::zero(), 1.0, 8);
        let moved = generate::triple::<f64>(Vec2::new(dx, dy), 1.0, 8);
        let a = density_ratio(&tri, Vec2::zero(), r);
        let b = density_ratio(&moved, Vec2::new(dx, dy), r);
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!((a - 1.5).abs() < 1e-9);
    }
}
