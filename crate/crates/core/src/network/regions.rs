// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Region queries: horizontal scanlines, point location, face cycles and
//! per-label areas.

use crate::geometry::{segments_intersect, Vec2};
use crate::network::{Label, LabeledNetwork};
use crate::scalar::{lit, Scalar};

#[derive(Clone, Copy, Debug)]
struct Lifted<T> {
    a: Vec2<T>,
    b: Vec2<T>,
    left: Label,
    right: Label,
}

/// A point where a horizontal line crosses the boundary, with the labels
/// immediately before and after it in the direction of increasing x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing<T> {
    pub x: T,
    pub before: Label,
    pub after: Label,
}

/// Horizontal scanline engine. A segment counts as crossing the line `y = Y`
/// when part of it lies strictly below `Y` and it reaches `Y`, so results
/// describe the line at `Y⁻`.
pub struct Scanner<'a, T> {
    net: &'a LabeledNetwork<T>,
    segs: Vec<Lifted<T>>,
    buckets: Vec<Vec<u32>>,
    y0: T,
    bh: T,
    torus: bool,
}

impl<'a, T: Scalar> Scanner<'a, T> {
    pub fn new(net: &'a LabeledNetwork<T>) -> Self {
        let torus = net.domain.is_torus();
        let segs: Vec<Lifted<T>> = net
            .segments()
            .map(|(e, a, b)| {
                let (pa, pb) = net.segment(a, b);
                Lifted { a: pa, b: pb, left: net.edges[e].left, right: net.edges[e].right }
            })
            .collect();
        let nb = (segs.len() / 2).clamp(1, 1 << 16);
        let (y0, y1) = if torus {
            (T::zero(), T::one())
        } else {
            let mut lo = T::infinity();
            let mut hi = T::neg_infinity();
            for s in &segs {
                lo = lo.min(s.a.y.min(s.b.y));
                hi = hi.max(s.a.y.max(s.b.y));
            }
            if segs.is_empty() {
                (T::zero(), T::one())
            } else {
                (lo, hi.max(lo + lit(1e-12)))
            }
        };
        let bh = (y1 - y0) / T::from_usize_lossy(nb);
        let mut buckets = vec![Vec::new(); nb];
        let bucket_of = |y: T| -> i64 { ((y - y0) / bh).floor().to_i64().unwrap_or(0) };
        for (i, s) in segs.iter().enumerate() {
            let lo = s.a.y.min(s.b.y);
            let hi = s.a.y.max(s.b.y);
            let shifts: &[i32] = if torus { &[-1, 0, 1] } else { &[0] };
            for &k in shifts {
                let kk = T::from_i32(k).unwrap();
                let (l, h) = (lo + kk, hi + kk);
                if h < y0 || l > y1 {
                    continue;
                }
                let b0 = bucket_of(l).max(0);
                let b1 = bucket_of(h).min(nb as i64 - 1);
                for b in b0..=b1 {
                    buckets[b as usize].push(i as u32);
                }
            }
        }
        for b in &mut buckets {
            b.dedup();
        }
        Self { net, segs, buckets, y0, bh, torus }
    }

    /// Crossings of the line `y = y` sorted by x. On the torus x lies in
    /// `[0, 1)` and `y` is taken modulo 1.
    pub fn crossings(&self, y: T) -> Vec<Crossing<T>> {
        let y = if self.torus { crate::domain::wrap_unit(y) } else { y };
        let nb = self.buckets.len() as i64;
        if !self.torus && (y < self.y0 || y > self.y0 + self.bh * T::from_i64(nb).unwrap()) {
            return Vec::new();
        }
        let b = ((y - self.y0) / self.bh).floor().to_i64().unwrap_or(0).clamp(0, nb - 1) as usize;
        let mut out = Vec::new();
        let shifts: &[i32] = if self.torus { &[-1, 0, 1] } else { &[0] };
        for &i in &self.buckets[b] {
            let s = &self.segs[i as usize];
            for &k in shifts {
                let kk = T::from_i32(k).unwrap();
                let (ya, yb) = (s.a.y + kk, s.b.y + kk);
                let up = ya < y && y <= yb;
                let down = yb < y && y <= ya;
                if !(up || down) {
                    continue;
                }
                let t = (y - ya) / (yb - ya);
                let mut x = s.a.x + (s.b.x - s.a.x) * t;
                if self.torus {
                    x = crate::domain::wrap_unit(x);
                }
                let (before, after) = if up { (s.left, s.right) } else { (s.right, s.left) };
                out.push(Crossing { x, before, after });
            }
        }
        out.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap_or(core::cmp::Ordering::Equal));
        out
    }

    /// Length of the label's part of the line `y = Y` (torus: the full
    /// period; plane: the span between the outermost crossings).
    pub fn label_measure(&self, y: T, label: Label) -> T {
        let cr = self.crossings(y);
        if cr.is_empty() {
            if self.torus && self.label_at(Vec2::new(T::zero(), y)) == label {
                return T::one();
            }
            return T::zero();
        }
        let mut acc = T::zero();
        for w in cr.windows(2) {
            if w[0].after == label {
                acc += w[1].x - w[0].x;
            }
        }
        if self.torus {
            let last = cr[cr.len() - 1];
            if last.after == label {
                acc += cr[0].x + T::one() - last.x;
            }
        }
        acc
    }

    /// Label of the region containing `p` (assumed off the boundary).
    pub fn label_at(&self, p: Vec2<T>) -> Label {
        let cr = self.crossings(p.y);
        let x = if self.torus { crate::domain::wrap_unit(p.x) } else { p.x };
        if !cr.is_empty() {
            let idx = cr.partition_point(|c| c.x < x);
            if idx == 0 {
                return if self.torus { cr[cr.len() - 1].after } else { cr[0].before };
            }
            return cr[idx - 1].after;
        }
        self.label_by_ray(p)
    }

    /// Labelled pieces `(x0, x1, label)` of the line `y = Y` inside
    /// `[lo, hi]`. On the torus `hi − lo` must not exceed 1; pieces are
    /// reported in the coordinates of `[lo, hi]`.
    pub fn intervals(&self, y: T, lo: T, hi: T) -> Vec<(T, T, Label)> {
        let cr = self.crossings(y);
        let mut out = Vec::new();
        let mut push = |a: T, b: T, l: Label| {
            let (a, b) = (a.max(lo), b.min(hi));
            if b > a {
                out.push((a, b, l));
            }
        };
        if cr.is_empty() {
            let l = self.label_at(Vec2::new((lo + hi) * lit(0.5), y));
            push(lo, hi, l);
            return out;
        }
        if self.torus {
            let n = cr.len();
            let k0 = lo.floor().to_i64().unwrap_or(0) - 1;
            let k1 = hi.floor().to_i64().unwrap_or(0) + 1;
            for k in k0..=k1 {
                let kk = T::from_i64(k).unwrap();
                for i in 0..n {
                    let a = cr[i].x + kk;
                    let b = if i + 1 < n { cr[i + 1].x + kk } else { cr[0].x + kk + T::one() };
                    push(a, b, cr[i].after);
                }
            }
        } else {
            push(T::neg_infinity(), cr[0].x, cr[0].before);
            for w in cr.windows(2) {
                push(w[0].x, w[1].x, w[0].after);
            }
            push(cr[cr.len() - 1].x, T::infinity(), cr[cr.len() - 1].after);
        }
        out
    }

    fn label_by_ray(&self, p: Vec2<T>) -> Label {
        let Some(first) = self.segs.first() else {
            return 1;
        };
        // Aim at a generic point of some segment; the nearest hit decides.
        let target = first.a.lerp(first.b, lit(0.5 + 1.0 / 7.0));
        let target = self.net.domain.near(p, target);
        let mut best: Option<(T, Label)> = None;
        for s in &self.segs {
            let a = self.net.domain.near(p, s.a);
            let b = a + (s.b - s.a);
            if !segments_intersect(p, target, a, b) {
                continue;
            }
            let d = target - p;
            let e = b - a;
            let den = d.cross(e);
            if den == T::zero() {
                continue;
            }
            let t = (a - p).cross(e) / den;
            let side = if e.cross(p - a) > T::zero() { s.left } else { s.right };
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, side));
            }
        }
        best.map_or(1, |(_, l)| l)
    }
}

/// Area of each label inside the closed disk `B_r(c)`, indexed by
/// `label − 1`. Integrates scanline measures in the angle `θ` with
/// `y = c.y + r sin θ`, splitting at the heights of vertices in the disk.
pub fn label_areas_in_disk<T: Scalar>(net: &LabeledNetwork<T>, scanner: &Scanner<'_, T>, c: Vec2<T>, r: T) -> Vec<T> {
    let mut out = vec![T::zero(); net.n_labels as usize];
    let half_pi = T::FRAC_PI_2();
    let mut breaks = vec![-half_pi, half_pi];
    for &p in &net.vertices {
        let q = net.domain.near(c, p);
        let s = (q.y - c.y) / r;
        if s > -T::one() && s < T::one() {
            breaks.push(s.asin());
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    // Base resolution in θ, refined between breakpoints.
    let base = half_pi / lit(16.0);
    let rule = crate::quadrature::GaussLegendre::<T>::new(4);
    for w in breaks.windows(2) {
        let span = w[1] - w[0];
        if span <= T::zero() {
            continue;
        }
        let m = (span / base).ceil().to_usize().unwrap_or(1).max(1);
        let h = span / T::from_usize_lossy(m);
        for k in 0..m {
            let t0 = w[0] + h * T::from_usize_lossy(k);
            for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let th = t0 + h * x;
                let y = c.y + r * th.sin();
                let half = r * th.cos();
                let dy = r * th.cos() * wt * h;
                for (a, b, l) in scanner.intervals(y, c.x - half, c.x + half) {
                    out[l as usize - 1] += (b - a) * dy;
                }
            }
        }
    }
    out
}

/// Per-label areas.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionAreaTable<T> {
    /// Area of label `i + 1`, or `None` when the region is unbounded.
    pub areas: Vec<Option<T>>,
    /// Domain area not assigned to any label (torus only).
    pub residual: T,
}

impl<T: Scalar> RegionAreaTable<T> {
    pub fn area(&self, label: Label) -> Option<T> {
        self.areas.get(label as usize - 1).copied().flatten()
    }

    pub fn infinite_labels(&self) -> Vec<Label> {
        self.areas.iter().enumerate().filter(|(_, a)| a.is_none()).map(|(i, _)| i as Label + 1).collect()
    }
}

/// `−∫ y dx` along a lifted segment, with y reduced into `[0, 1)` on the torus.
fn green_term<T: Scalar>(a: Vec2<T>, b: Vec2<T>, torus: bool) -> T {
    let half = lit::<T>(0.5);
    let flat = |p: Vec2<T>, q: Vec2<T>| -(p.y + q.y) * half * (q.x - p.x);
    if !torus || (b.y >= T::zero() && b.y < T::one()) {
        return flat(a, b);
    }
    let edge = if b.y >= T::one() { T::one() } else { T::zero() };
    let t = (edge - a.y) / (b.y - a.y);
    let c = Vec2::new(a.x + (b.x - a.x) * t, edge);
    let shift = if b.y >= T::one() { -T::one() } else { T::one() };
    let s = Vec2::new(T::zero(), shift);
    flat(a, c) + flat(c + s, b + s)
}

/// Signed-area accumulation over the oriented boundary.
pub fn region_areas<T: Scalar>(net: &LabeledNetwork<T>) -> RegionAreaTable<T> {
    let n = net.n_labels as usize;
    let torus = net.domain.is_torus();
    let mut acc = vec![T::zero(); n];
    let mut seen = vec![false; n];
    for (e, a, b) in net.segments() {
        let (pa, pb) = net.segment(a, b);
        let g = green_term(pa, pb, torus);
        let edge = &net.edges[e];
        let (l, r) = (edge.left as usize - 1, edge.right as usize - 1);
        acc[l] += g;
        acc[r] -= g;
        seen[l] = true;
        seen[r] = true;
    }
    let scanner = Scanner::new(net);
    if torus {
        if net.edges.is_empty() {
            let mut areas = vec![Some(T::zero()); n];
            areas[0] = Some(T::one());
            return RegionAreaTable { areas, residual: T::zero() };
        }
        let cr = scanner.crossings(T::zero());
        let mut measure = vec![T::zero(); n];
        if cr.is_empty() {
            let l = scanner.label_at(Vec2::new(T::zero(), T::zero()));
            measure[l as usize - 1] = T::one();
        } else {
            for w in cr.windows(2) {
                measure[w[0].after as usize - 1] += w[1].x - w[0].x;
            }
            let last = cr[cr.len() - 1];
            measure[last.after as usize - 1] += cr[0].x + T::one() - last.x;
        }
        let areas: Vec<Option<T>> = (0..n).map(|i| Some(acc[i] + measure[i])).collect();
        let total: T = areas.iter().map(|a| a.unwrap()).sum();
        return RegionAreaTable { areas, residual: T::one() - total };
    }
    // Plane.
    let mut infinite = vec![false; n];
    if net.edges.is_empty() {
        infinite[0] = true;
    } else {
        let deg = net.degrees();
        let tol = lit(1e-9);
        for edge in &net.edges {
            for &v in [edge.first(), edge.last()].iter() {
                if net.is_anchor(v, deg[v], tol) {
                    infinite[edge.left as usize - 1] = true;
                    infinite[edge.right as usize - 1] = true;
                }
            }
        }
        // The unbounded face is met before the first crossing of any line
        // through a non-horizontal segment.
        if let Some((pa, pb)) = net
            .segments()
            .map(|(_, a, b)| net.segment(a, b))
            .find(|(pa, pb)| pa.y != pb.y)
        {
            let y = (pa.y + pb.y) * lit(0.5);
            if let Some(c) = scanner.crossings(y).first() {
                infinite[c.before as usize - 1] = true;
            }
        }
    }
    let areas = (0..n).map(|i| if infinite[i] { None } else { Some(acc[i]) }).collect();
    RegionAreaTable { areas, residual: T::zero() }
}

/// A closed walk of half-edges keeping one region on the left.
#[derive(Clone, Debug)]
pub struct FaceCycle {
    pub label: Label,
    /// Vertex sequence; the walk returns from the last vertex to the first.
    pub vertices: Vec<usize>,
}

/// Traces every face cycle. At each vertex the walk continues along the
/// outgoing half-edge immediately clockwise from the reversed arrival.
pub fn face_cycles<T: Scalar>(net: &LabeledNetwork<T>) -> Vec<FaceCycle> {
    let ends = net.edge_ends();
    // Half-edge id: (vertex, slot in the sorted list).
    let sorted: Vec<Vec<(T, crate::network::EdgeEnd)>> =
        (0..net.vertices.len()).map(|v| net.sorted_ends(v, &ends[v])).collect();
    let mut offset = vec![0usize; net.vertices.len() + 1];
    for v in 0..net.vertices.len() {
        offset[v + 1] = offset[v] + sorted[v].len();
    }
    let total = offset[net.vertices.len()];
    // A half-edge is identified by its segment (edge, lower chain position)
    // and direction.
    let key = |e: &crate::network::EdgeEnd| -> (usize, usize, bool) {
        let seg_pos = if e.forward { e.pos } else { e.pos - 1 };
        (e.edge, seg_pos, e.forward)
    };
    let mut slot_of = std::collections::HashMap::with_capacity(total);
    for v in 0..net.vertices.len() {
        for (i, (_, e)) in sorted[v].iter().enumerate() {
            slot_of.insert(key(e), offset[v] + i);
        }
    }
    let mut origin = vec![0usize; total];
    for v in 0..net.vertices.len() {
        for i in offset[v]..offset[v + 1] {
            origin[i] = v;
        }
    }
    let mut visited = vec![false; total];
    let mut cycles = Vec::new();
    for start in 0..total {
        if visited[start] {
            continue;
        }
        let mut h = start;
        let label = sorted[origin[start]][start - offset[origin[start]]].1.left;
        let mut verts = Vec::new();
        loop {
            visited[h] = true;
            let v = origin[h];
            verts.push(v);
            let end = sorted[v][h - offset[v]].1;
            let (seg_pos, fwd) = if end.forward { (end.pos, true) } else { (end.pos - 1, false) };
            let twin = slot_of[&(end.edge, seg_pos, !fwd)];
            let w = origin[twin];
            let k = twin - offset[w];
            let deg = offset[w + 1] - offset[w];
            let next = offset[w] + (k + deg - 1) % deg;
            h = next;
            if h == start || visited[h] {
                break;
            }
        }
        cycles.push(FaceCycle { label, vertices: verts });
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BBox, Domain};

    fn two_bands() -> LabeledNetwork<f64> {
        let mut n = LabeledNetwork::new(Domain::Torus, 2);
        let row = |y: f64| (0..8).map(|i| Vec2::new(i as f64 / 8.0, y)).collect::<Vec<_>>();
        n.add_polyline(&row(0.25), true, 1, 2);
        n.add_polyline(&row(0.75), true, 2, 1);
        n
    }

    #[test]
    fn bands_split_evenly() {
        let t = region_areas(&two_bands());
        assert!((t.area(1).unwrap() - 0.5).abs() < 1e-15);
        assert!((t.area(2).unwrap() - 0.5).abs() < 1e-15);
        assert!(t.residual.abs() < 1e-15);
    }

    #[test]
    fn vertical_bands_split_evenly() {
        let mut n = LabeledNetwork::new(Domain::Torus, 2);
        let col = |x: f64| (0..8).map(|i| Vec2::new(x, i as f64 / 8.0)).collect::<Vec<_>>();
        n.add_polyline(&col(0.25), true, 2, 1);
        n.add_polyline(&col(0.75), true, 1, 2);
        let t = region_areas(&n);
        // Left of an upward line at x = 0.25 is label 2.
        assert!((t.area(2).unwrap() - 0.5).abs() < 1e-15, "{t:?}");
        assert!((t.area(1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_torus_is_one_grain() {
        let n = LabeledNetwork::<f64>::new(Domain::Torus, 1);
        let t = region_areas(&n);
        assert_eq!(t.areas, vec![Some(1.0)]);
    }

    #[test]
    fn disk_across_the_seam() {
        let mut n = LabeledNetwork::new(Domain::Torus, 2);
        let pts: Vec<_> = (0..64)
            .map(|k| {
                let a = 2.0 * core::f64::consts::PI * k as f64 / 64.0;
                Vec2::new(0.95 + 0.2 * a.cos(), 0.02 + 0.2 * a.sin())
            })
            .collect();
        n.add_polyline(&pts, true, 2, 1);
        let t = region_areas(&n);
        let exact = 0.5 * 64.0 * 0.04 * (2.0 * core::f64::consts::PI / 64.0).sin();
        assert!((t.area(2).unwrap() - exact).abs() < 1e-14);
        assert!((t.area(1).unwrap() - (1.0 - exact)).abs() < 1e-14);
    }

    #[test]
    fn plane_outer_label_is_infinite() {
        let bbox = BBox::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0));
        let mut n = LabeledNetwork::new(Domain::Plane { bbox }, 2);
        let sq = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)];
        n.add_polyline(&sq, true, 2, 1);
        let t = region_areas(&n);
        assert_eq!(t.area(2), Some(1.0));
        assert_eq!(t.infinite_labels(), vec![1]);
    }

    #[test]
    fn point_location() {
        let n = two_bands();
        let s = Scanner::new(&n);
        assert_eq!(s.label_at(Vec2::new(0.3, 0.5)), 1);
        assert_eq!(s.label_at(Vec2::new(0.3, 0.9)), 2);
        assert_eq!(s.label_by_ray(Vec2::new(0.3, 0.1)), 2);
    }

    #[test]
    fn square_faces() {
        let bbox = BBox::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0));
        let mut n = LabeledNetwork::new(Domain::Plane { bbox }, 2);
        let sq = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)];
        n.add_polyline(&sq, true, 2, 1);
        let cycles = face_cycles(&n);
        assert_eq!(cycles.len(), 2);
        let inner = cycles.iter().find(|c| c.label == 2).unwrap();
        assert_eq!(inner.vertices.len(), 4);
    }

    #[test]
    fn disk_clipped_areas() {
        let mut n = LabeledNetwork::new(Domain::Torus, 2);
        let pts: Vec<_> = (0..64)
            .map(|i| Vec2::new(0.05, 0.5) + Vec2::from_angle(i as f64 * std::f64::consts::TAU / 64.0) * 0.2)
            .collect();
        n.add_polyline(&pts, true, 2, 1);
        let poly = crate::geometry::polygon_area(&pts);
        let s = Scanner::new(&n);
        let a = label_areas_in_disk(&n, &s, Vec2::new(0.05, 0.5), 0.3);
        assert!((a[1] - poly).abs() < 1e-9, "{} vs {poly}", a[1]);
        assert!((a[0] + a[1] - std::f64::consts::PI * 0.09).abs() < 1e-9);
        // A disk cutting the grain: the label-1 part is the lens outside.
        let b = label_areas_in_disk(&n, &s, Vec2::new(0.95, 0.5), 0.1);
        assert!((b[0] + b[1] - std::f64::consts::PI * 0.01).abs() < 1e-9);
        assert!(b[1] > 0.0 && b[0] > 0.0);
    }
}
