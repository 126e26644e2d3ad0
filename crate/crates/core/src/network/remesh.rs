// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Resampling of edge chains to segment lengths in `[h_min, h_max]`.

use crate::error::NetworkError;
use crate::network::validate::{validate_partition, ValidationConfig};
use crate::network::LabeledNetwork;
use crate::scalar::{lit, Scalar};

/// Splits long segments at recursive midpoints and removes interior chain
/// vertices next to short segments. Edge endpoints (junctions, free ends,
/// loop joints) are never removed.
pub fn remesh<T: Scalar>(net: &LabeledNetwork<T>, h_min: T, h_max: T) -> Result<LabeledNetwork<T>, NetworkError> {
    let mut out = net.clone();
    split_long(&mut out, h_max);
    merge_short(&mut out, h_min, h_max);
    let weld = h_min * lit(0.25);
    for edge in &out.edges {
        if edge.vertices.len() == 2 {
            let (a, b) = (edge.vertices[0], edge.vertices[1]);
            if out.segment_vector(a, b).norm() < weld {
                return Err(NetworkError::RemeshCollision { a, b });
            }
        }
    }
    out.compact();
    let cfg = ValidationConfig { weld_tol: weld, min_segment: None, max_segment: None, check_regions: false };
    let report = validate_partition(&out, &cfg);
    if report.is_ok() {
        Ok(out)
    } else {
        Err(NetworkError::Invalid(report))
    }
}

fn split_long<T: Scalar>(net: &mut LabeledNetwork<T>, h_max: T) {
    for e in 0..net.edges.len() {
        let old = net.edges[e].vertices.clone();
        let mut chain = Vec::with_capacity(old.len());
        chain.push(old[0]);
        for w in old.windows(2) {
            let (pa, pb) = net.segment(w[0], w[1]);
            let len = (pb - pa).norm();
            let mut pieces = 1usize;
            while len / T::from_usize_lossy(pieces) > h_max && pieces < (1 << 24) {
                pieces *= 2;
            }
            let inv = T::one() / T::from_usize_lossy(pieces);
            for i in 1..pieces {
                let t = T::from_usize_lossy(i) * inv;
                let v = net.add_vertex(pa + (pb - pa) * t);
                chain.push(v);
            }
            chain.push(w[1]);
        }
        net.edges[e].vertices = chain;
    }
}

fn merge_short<T: Scalar>(net: &mut LabeledNetwork<T>, h_min: T, h_max: T) {
    for e in 0..net.edges.len() {
        let vs = net.edges[e].vertices.clone();
        let closed = net.edges[e].is_closed();
        let n = vs.len();
        if n <= 2 {
            continue;
        }
        let min_interior = if closed { 2 } else { 0 };
        let dist = |a: usize, b: usize| net.segment_vector(a, b).norm();
        let mut kept = vec![vs[0]];
        let mut remaining_interior = n - 2;
        for i in 1..n - 1 {
            let last = *kept.last().unwrap();
            let can_drop = (kept.len() - 1) + (remaining_interior - 1) >= min_interior;
            if can_drop && dist(last, vs[i]) < h_min && dist(last, vs[i + 1]) <= h_max {
                remaining_interior -= 1;
                continue;
            }
            kept.push(vs[i]);
            remaining_interior -= 1;
        }
        let end = vs[n - 1];
        if kept.len() >= 2 && kept.len() - 1 > min_interior {
            let last = kept[kept.len() - 1];
            let prev = kept[kept.len() - 2];
            if dist(last, end) < h_min && dist(prev, end) <= h_max {
                kept.pop();
            }
        }
        kept.push(end);
        net.edges[e].vertices = kept;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BBox, Domain};
    use crate::geometry::Vec2;

    fn plane() -> Domain<f64> {
        Domain::Plane { bbox: BBox::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0)) }
    }

    #[test]
    fn unit_segment_in_quarters() {
        let mut n = LabeledNetwork::new(plane(), 1);
        n.add_polyline(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)], false, 1, 1);
        let r = remesh(&n, 0.0625, 0.25).unwrap();
        assert_eq!(r.segment_count(), 4);
    }

    #[test]
    fn octagon_perimeter_kept() {
        let mut n = LabeledNetwork::new(plane(), 2);
        let pts: Vec<_> = (0..8)
            .map(|k| Vec2::from_angle(2.0 * core::f64::consts::PI * k as f64 / 8.0))
            .collect();
        n.add_polyline(&pts, true, 2, 1);
        let r = remesh(&n, 0.025, 0.1).unwrap();
        assert!(r.segments().all(|(_, a, b)| r.segment_vector(a, b).norm() <= 0.1));
        assert!((r.length() - n.length()).abs() < 1e-12);
    }

    #[test]
    fn short_chain_segments_merge() {
        let mut n = LabeledNetwork::new(plane(), 1);
        let pts: Vec<_> = (0..=20).map(|i| Vec2::new(i as f64 * 0.01, 0.0)).collect();
        n.add_polyline(&pts, false, 1, 1);
        let r = remesh(&n, 0.025, 0.1).unwrap();
        assert!(r.segments().all(|(_, a, b)| {
            let l = r.segment_vector(a, b).norm();
            (0.025 - 1e-12..=0.1 + 1e-12).contains(&l)
        }));
        assert_eq!(r.edges[0].first(), 0);
        assert!((r.length() - 0.2).abs() < 1e-12);
    }
}
