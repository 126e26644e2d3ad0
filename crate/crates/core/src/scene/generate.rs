// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic scene generators.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::domain::{BBox, Domain};
use crate::geometry::Vec2;
use crate::network::{Label, LabeledNetwork};
use crate::scalar::{lit, Scalar};

/// Points `p0 + (p1 − p0)·i/n` for `i = 0..=n`.
fn sample<T: Scalar>(p0: Vec2<T>, p1: Vec2<T>, n: usize) -> Vec<Vec2<T>> {
    (0..=n).map(|i| p0.lerp(p1, T::from_usize_lossy(i) / T::from_usize_lossy(n))).collect()
}

/// Regular `n`-gon of radius `r` around `c`, counter-clockwise, with `inside`
/// on its left.
pub fn circle<T: Scalar>(domain: Domain<T>, n_labels: u32, c: Vec2<T>, r: T, n: usize, inside: Label, outside: Label) -> LabeledNetwork<T> {
    let mut net = LabeledNetwork::new(domain, n_labels);
    add_circle(&mut net, c, r, n, inside, outside);
    net
}

pub(crate) fn add_circle<T: Scalar>(net: &mut LabeledNetwork<T>, c: Vec2<T>, r: T, n: usize, inside: Label, outside: Label) {
    let pts: Vec<Vec2<T>> =
        (0..n).map(|i| c + Vec2::from_angle(T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(n)) * r).collect();
    net.add_polyline(&pts, true, inside, outside);
}

/// Unit circle in the window `[−2, 2]²`, grain 2 inside grain 1.
pub fn unit_circle<T: Scalar>(n: usize) -> LabeledNetwork<T> {
    let two = lit::<T>(2.0);
    let bbox = BBox::new(Vec2::new(-two, -two), Vec2::new(two, two));
    circle(Domain::Plane { bbox }, 2, Vec2::zero(), T::one(), n, 2, 1)
}

/// Exit point of the ray `c + s·dir` from the box.
fn ray_to_box<T: Scalar>(c: Vec2<T>, dir: Vec2<T>, bbox: &BBox<T>) -> Vec2<T> {
    let mut s = T::infinity();
    for (d, lo, hi, p) in [(dir.x, bbox.min.x, bbox.max.x, c.x), (dir.y, bbox.min.y, bbox.max.y, c.y)] {
        if d > T::zero() {
            s = s.min((hi - p) / d);
        } else if d < T::zero() {
            s = s.min((lo - p) / d);
        }
    }
    c + dir * s
}

/// Straight arms from a shared center out to the window, at the given
/// angles (ascending). Label `k + 1` fills the sector from `angles[k]` to
/// the next arm.
fn star<T: Scalar>(c: Vec2<T>, bbox: BBox<T>, angles: &[T], n: usize) -> LabeledNetwork<T> {
    let k = angles.len() as u32;
    let mut net = LabeledNetwork::new(Domain::Plane { bbox }, k);
    let center = net.add_vertex(c);
    for (i, &th) in angles.iter().enumerate() {
        let end = ray_to_box(c, Vec2::from_angle(th), &bbox);
        let mut ids = vec![center];
        for p in sample(c, end, n).into_iter().skip(1) {
            ids.push(net.add_vertex(p));
        }
        let i = i as u32;
        net.add_edge(ids, i + 1, if i == 0 { k } else { i });
    }
    net
}

/// Two lines crossing at `c`, with arms of length `arm` reaching the window
/// `c ± arm`. Label `q` fills quadrant `q`.
pub fn cross<T: Scalar>(c: Vec2<T>, arm: T, n: usize) -> LabeledNetwork<T> {
    let bbox = BBox::new(c - Vec2::new(arm, arm), c + Vec2::new(arm, arm));
    let q = T::FRAC_PI_2();
    star(c, bbox, &[T::zero(), q, q + q, q + q + q], n)
}

/// Symmetric triple junction at `c` with arms at 90°, 210° and 330°, each
/// running to the window `c ± arm`.
pub fn triple<T: Scalar>(c: Vec2<T>, arm: T, n: usize) -> LabeledNetwork<T> {
    let bbox = BBox::new(c - Vec2::new(arm, arm), c + Vec2::new(arm, arm));
    let third = T::TAU() / lit(3.0);
    let up = T::FRAC_PI_2();
    star(c, bbox, &[up, up + third, up + third + third], n)
}

/// Vertex ids keyed by position on the unit torus, welding within 1e-9.
struct TorusWelder {
    map: HashMap<(i64, i64), usize>,
}

impl TorusWelder {
    fn new() -> Self {
        Self { map: HashMap::new() }
    }

    fn key<T: Scalar>(p: Vec2<T>) -> (i64, i64) {
        let q = |v: T| {
            let scale = 1e9;
            let k = (v.to_f64_lossy().rem_euclid(1.0) * scale).round() as i64;
            k.rem_euclid(scale as i64)
        };
        (q(p.x), q(p.y))
    }

    fn id<T: Scalar>(&mut self, net: &mut LabeledNetwork<T>, p: Vec2<T>) -> usize {
        let key = Self::key(p);
        // Roundoff may put the same point on either side of a key boundary.
        const M: i64 = 1_000_000_000;
        for dx in -1..=1 {
            for dy in -1..=1 {
                let k = ((key.0 + dx).rem_euclid(M), (key.1 + dy).rem_euclid(M));
                if let Some(&v) = self.map.get(&k) {
                    return v;
                }
            }
        }
        let v = net.add_vertex(p);
        self.map.insert(key, v);
        v
    }
}

/// Periodic hexagonal tiling of the unit torus with `cols` columns (even)
/// and `rows` rows of flat-topped hexagons. All junction angles are 120°;
/// the horizontal edges are stretched so the tiling closes up. Cell
/// `(k, r)` carries label `k·rows + r + 1`.
pub fn honeycomb<T: Scalar>(cols: usize, rows: usize) -> Option<LabeledNetwork<T>> {
    if cols < 2 || !cols.is_multiple_of(2) || rows < 2 {
        return None;
    }
    let sqrt3 = lit::<T>(3.0).sqrt();
    let b = T::one() / (T::from_usize_lossy(rows) * sqrt3);
    let dx = T::one() / T::from_usize_lossy(cols);
    let half = lit::<T>(0.5);
    let a = dx - b * half;
    if a <= T::zero() {
        return None;
    }
    let h = b * sqrt3 * half;
    let n_labels = (cols * rows) as u32;
    let mut net = LabeledNetwork::new(Domain::Torus, n_labels);
    let mut weld = TorusWelder::new();
    let label = |k: isize, r: isize| -> Label {
        let k = k.rem_euclid(cols as isize) as usize;
        let r = r.rem_euclid(rows as isize) as usize;
        (k * rows + r + 1) as Label
    };
    for k in 0..cols as isize {
        let odd = k % 2 == 1;
        for r in 0..rows as isize {
            let c = Vec2::new(dx * T::from_isize(k).unwrap(), (h + h) * T::from_isize(r).unwrap() + if odd { h } else { T::zero() });
            let v0 = c + Vec2::new(a * half + b * half, T::zero());
            let v1 = c + Vec2::new(a * half, h);
            let v2 = c + Vec2::new(-a * half, h);
            let v5 = c + Vec2::new(a * half, -h);
            let me = label(k, r);
            let (upper_right, lower_right) = if odd { (label(k + 1, r + 1), label(k + 1, r)) } else { (label(k + 1, r), label(k + 1, r - 1)) };
            let top = label(k, r + 1);
            for (p, q, other) in [(v5, v0, lower_right), (v0, v1, upper_right), (v1, v2, top)] {
                let i = weld.id(&mut net, p);
                let j = weld.id(&mut net, q);
                net.add_edge(vec![i, j], me, other);
            }
        }
    }
    Some(net)
}

/// Clips the convex polygon `poly` to `{x : (x − m)·n ≤ 0}`, tagging the new
/// side with `tag`. Each side `i` runs from `poly[i]` to `poly[i + 1]`.
fn clip<T: Scalar>(poly: &[(Vec2<T>, usize)], m: Vec2<T>, n: Vec2<T>, tag: usize) -> Vec<(Vec2<T>, usize)> {
    let len = poly.len();
    let mut out = Vec::with_capacity(len + 1);
    for i in 0..len {
        let (p, side) = poly[i];
        let q = poly[(i + 1) % len].0;
        let dp = (p - m).dot(n);
        let dq = (q - m).dot(n);
        let p_in = dp <= T::zero();
        let q_in = dq <= T::zero();
        if p_in {
            out.push((p, side));
        }
        if p_in != q_in {
            let x = p.lerp(q, dp / (dp - dq));
            // Entering the kept side starts the old side; leaving starts the cut.
            out.push((x, if p_in { tag } else { side }));
        }
    }
    out
}

/// Voronoi partition of the unit torus for `seeds` points drawn uniformly
/// from a ChaCha20 stream seeded with `rng`. Cell `i` carries label `i + 1`.
pub fn voronoi<T: Scalar>(seeds: usize, rng: u64) -> Option<LabeledNetwork<T>> {
    if seeds < 3 {
        return None;
    }
    let mut gen = ChaCha20Rng::seed_from_u64(rng);
    let pts: Vec<Vec2<f64>> = (0..seeds).map(|_| Vec2::new(gen.gen::<f64>(), gen.gen::<f64>())).collect();
    voronoi_of(&pts)
}

/// Longest generated segment; keeps every segment well below half the torus.
const MAX_PIECE: f64 = 0.1;

/// Periodic Voronoi partition of the unit torus for the given sites.
pub fn voronoi_of<T: Scalar>(sites: &[Vec2<f64>]) -> Option<LabeledNetwork<T>> {
    let n = sites.len();
    let mut net = LabeledNetwork::new(Domain::Torus, n as u32);
    let mut weld = TorusWelder::new();
    let mut seen: HashMap<(usize, usize, i64, i64), ()> = HashMap::new();
    const NONE: usize = usize::MAX;
    for (i, &s) in sites.iter().enumerate() {
        // The cell lies in the unit square centered at its site.
        let h = 0.5;
        let mut poly: Vec<(Vec2<f64>, usize)> = vec![
            (s + Vec2::new(-h, -h), NONE),
            (s + Vec2::new(h, -h), NONE),
            (s + Vec2::new(h, h), NONE),
            (s + Vec2::new(-h, h), NONE),
        ];
        for (k, &o) in sites.iter().enumerate() {
            for dx in -1..=1 {
                for dy in -1..=1 {
                    // The site's own images bound the cell too; those cuts
                    // are not boundaries and are skipped below.
                    if k == i && dx == 0 && dy == 0 {
                        continue;
                    }
                    let img = o + Vec2::new(dx as f64, dy as f64);
                    let d = img - s;
                    if d.norm() > 1.5 {
                        continue;
                    }
                    poly = clip(&poly, (s + img) * 0.5, d, k);
                }
            }
        }
        if poly.len() < 3 {
            return None;
        }
        let m = poly.len();
        for e in 0..m {
            let (p, other) = poly[e];
            let q = poly[(e + 1) % m].0;
            if other == NONE || other == i {
                continue;
            }
            let to_t = |v: Vec2<f64>| Vec2::new(T::lit(v.x), T::lit(v.y));
            let a = weld.id(&mut net, to_t(p));
            let b = weld.id(&mut net, to_t(q));
            if a == b {
                continue;
            }
            // Two cells may share several sides with the same end vertices;
            // the midpoint tells them apart.
            let mid = TorusWelder::key(to_t((p + q) * 0.5));
            let key = (a.min(b), a.max(b), mid.0 / 1000, mid.1 / 1000);
            if seen.insert(key, ()).is_some() {
                continue;
            }
            let mut ids = vec![a];
            let m = ((q - p).norm() / MAX_PIECE).ceil() as usize;
            for k in 1..m {
                ids.push(net.add_vertex(to_t(p.lerp(q, k as f64 / m as f64))));
            }
            ids.push(b);
            net.add_edge(ids, i as Label + 1, other as Label + 1);
        }
    }
    Some(net)
}
