// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Partition invariants.

use core::fmt;
use std::collections::HashMap;

use crate::geometry::segments_intersect;
use crate::network::regions::Scanner;
use crate::network::{LabeledNetwork, SegmentGrid};
use crate::scalar::{lit, Scalar};

#[derive(Clone, Copy, Debug)]
pub struct ValidationConfig<T> {
    /// Minimum distance between distinct vertices.
    pub weld_tol: T,
    pub min_segment: Option<T>,
    pub max_segment: Option<T>,
    /// Check region-label consistency along scanlines.
    pub check_regions: bool,
}

impl<T: Scalar> ValidationConfig<T> {
    pub fn new(weld_tol: T) -> Self {
        Self { weld_tol, min_segment: None, max_segment: None, check_regions: true }
    }

    /// Configuration after remeshing with the given bounds.
    pub fn meshed(h_min: T, h_max: T) -> Self {
        Self {
            weld_tol: h_min * lit(0.25),
            min_segment: Some(h_min),
            max_segment: Some(h_max),
            check_regions: true,
        }
    }
}

impl<T: Scalar> Default for ValidationConfig<T> {
    fn default() -> Self {
        Self::new(lit(1e-9))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    LabelOutOfRange,
    DegenerateEdge,
    NonFinite,
    OutsideBox,
    UnusedVertex,
    JunctionInsideEdge,
    FreeEnd,
    LabelSequence,
    Weld,
    Intersection,
    SegmentLength,
    RegionLabel,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::LabelOutOfRange => "label out of range",
            Self::DegenerateEdge => "degenerate edge",
            Self::NonFinite => "non-finite position",
            Self::OutsideBox => "vertex outside bounding box",
            Self::UnusedVertex => "unused vertex",
            Self::JunctionInsideEdge => "junction inside edge chain",
            Self::FreeEnd => "free end on non-interior edge",
            Self::LabelSequence => "inconsistent labels around junction",
            Self::Weld => "vertices closer than weld tolerance",
            Self::Intersection => "segments intersect",
            Self::SegmentLength => "segment length out of bounds",
            Self::RegionLabel => "region carries two labels",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub vertex: Option<usize>,
    pub edge: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(v) = self.vertex {
            write!(f, " at vertex {v}")?;
        }
        if let Some(e) = self.edge {
            write!(f, " on edge {e}")?;
        }
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Collect(Vec<Violation>);

impl Collect {
    fn push(&mut self, kind: ViolationKind, vertex: Option<usize>, edge: Option<usize>, detail: String) {
        self.0.push(Violation { kind, vertex, edge, detail });
    }
}

/// Checks every partition invariant and lists the violations found.
pub fn validate_partition<T: Scalar>(net: &LabeledNetwork<T>, cfg: &ValidationConfig<T>) -> ValidationReport {
    let mut out = Collect(Vec::new());
    let nv = net.vertices.len();
    if net.n_labels == 0 {
        out.push(ViolationKind::LabelOutOfRange, None, None, "no labels".into());
    }
    let mut structural = true;
    for (e, edge) in net.edges.iter().enumerate() {
        for l in [edge.left, edge.right] {
            if l == 0 || l > net.n_labels {
                out.push(ViolationKind::LabelOutOfRange, None, Some(e), format!("label {l}"));
                structural = false;
            }
        }
        if edge.vertices.len() < 2 || edge.vertices.iter().any(|&v| v >= nv) {
            out.push(ViolationKind::DegenerateEdge, None, Some(e), "bad vertex chain".into());
            structural = false;
            continue;
        }
        if edge.vertices.windows(2).any(|w| w[0] == w[1]) {
            out.push(ViolationKind::DegenerateEdge, None, Some(e), "repeated vertex".into());
            structural = false;
        }
        if edge.is_closed() && edge.vertices.len() < 4 {
            out.push(ViolationKind::DegenerateEdge, None, Some(e), "loop with fewer than 3 segments".into());
        }
    }
    for (v, p) in net.vertices.iter().enumerate() {
        if !p.is_finite() {
            out.push(ViolationKind::NonFinite, Some(v), None, String::new());
            structural = false;
        } else if let Some(b) = net.domain.bbox() {
            if !b.contains(*p, cfg.weld_tol) {
                out.push(ViolationKind::OutsideBox, Some(v), None, String::new());
            }
        }
    }
    if !structural {
        return ValidationReport { violations: out.0 };
    }

    let deg = net.degrees();
    let mut interior_use = vec![0usize; nv];
    for edge in &net.edges {
        let k = edge.vertices.len();
        for &v in &edge.vertices[1..k - 1] {
            interior_use[v] += 1;
        }
    }
    let ends = net.edge_ends();
    for v in 0..nv {
        if deg[v] == 0 {
            out.push(ViolationKind::UnusedVertex, Some(v), None, String::new());
            continue;
        }
        if interior_use[v] > 0 && deg[v] != 2 {
            out.push(ViolationKind::JunctionInsideEdge, Some(v), None, format!("degree {}", deg[v]));
        }
        let sorted = net.sorted_ends(v, &ends[v]);
        if deg[v] == 1 {
            let end = sorted[0].1;
            if end.left != end.right && !net.is_anchor(v, 1, cfg.weld_tol) {
                out.push(ViolationKind::FreeEnd, Some(v), Some(end.edge), String::new());
            }
            continue;
        }
        for k in 0..sorted.len() {
            let cur = sorted[k].1;
            let next = sorted[(k + 1) % sorted.len()].1;
            if cur.left != next.right {
                out.push(
                    ViolationKind::LabelSequence,
                    Some(v),
                    Some(cur.edge),
                    format!("left {} meets right {}", cur.left, next.right),
                );
                break;
            }
        }
    }

    // Vertex welding.
    if cfg.weld_tol > T::zero() {
        let cell = cfg.weld_tol;
        let key = |x: T| (x / cell).floor().to_i64().unwrap_or(0);
        let mut map: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (v, p) in net.vertices.iter().enumerate() {
            map.entry((key(p.x), key(p.y))).or_default().push(v);
        }
        let torus_n = net.domain.is_torus().then(|| (T::one() / cell).ceil().to_i64().unwrap_or(1).max(1));
        for (v, p) in net.vertices.iter().enumerate() {
            let (i, j) = (key(p.x), key(p.y));
            'scan: for di in -1..=1 {
                for dj in -1..=1 {
                    let mut k = (i + di, j + dj);
                    if let Some(n) = torus_n {
                        k = (k.0.rem_euclid(n), k.1.rem_euclid(n));
                    }
                    if let Some(list) = map.get(&k) {
                        for &w in list {
                            if w > v && net.domain.dist(*p, net.vertices[w]) < cfg.weld_tol {
                                out.push(ViolationKind::Weld, Some(v), None, format!("with vertex {w}"));
                                break 'scan;
                            }
                        }
                    }
                }
            }
        }
    }

    // Segment lengths.
    for (e, a, b) in net.segments() {
        let l = net.segment_vector(a, b).norm();
        let too_short = cfg.min_segment.is_some_and(|m| l < m * lit(1.0 - 1e-9));
        let too_long = cfg.max_segment.is_some_and(|m| l > m * lit(1.0 + 1e-9));
        let torus_long = net.domain.is_torus() && l >= lit(0.5);
        if too_short || too_long || torus_long {
            out.push(ViolationKind::SegmentLength, Some(a), Some(e), format!("length {l}"));
        }
    }

    // Intersections.
    let nseg = net.segment_count();
    if nseg > 1 {
        let mean = net.length() / T::from_usize_lossy(nseg);
        let grid = SegmentGrid::build(net, mean.max(cfg.weld_tol).max(lit(1e-12)));
        let mut reported = 0;
        for (i, &(ei, a, b)) in grid.segs.iter().enumerate() {
            let (pa, pb) = net.segment(a, b);
            let lo = crate::geometry::Vec2::new(pa.x.min(pb.x), pa.y.min(pb.y));
            let hi = crate::geometry::Vec2::new(pa.x.max(pb.x), pa.y.max(pb.y));
            for j in grid.query_box(lo, hi) {
                let j = j as usize;
                if j <= i {
                    continue;
                }
                let (ej, c, d) = grid.segs[j];
                let shared = [a, b].iter().filter(|&&x| x == c || x == d).count();
                let bad = match shared {
                    0 => {
                        let pc = net.domain.near(pa, net.vertices[c]);
                        let pd = pc + net.segment_vector(c, d);
                        segments_intersect(pa, pb, pc, pd)
                    }
                    1 => {
                        let v = if a == c || a == d { a } else { b };
                        let p = if v == a { b } else { a };
                        let q = if v == c { d } else { c };
                        let u1 = net.segment_vector(v, p);
                        let u2 = net.segment_vector(v, q);
                        let cr = u1.cross(u2).abs();
                        cr <= lit::<T>(1e-12) * u1.norm() * u2.norm() && u1.dot(u2) > T::zero()
                    }
                    _ => true,
                };
                if bad {
                    out.push(ViolationKind::Intersection, Some(a), Some(ei), format!("with a segment of edge {ej}"));
                    reported += 1;
                }
            }
            if reported > 16 {
                break;
            }
        }
    }

    if cfg.check_regions && out.0.is_empty() {
        check_regions(net, &mut out);
        if out.0.is_empty() {
            // Horizontal boundaries are invisible to horizontal scanlines.
            check_regions(&transposed(net), &mut out);
        }
    }
    ValidationReport { violations: out.0 }
}

/// Mirror image in the diagonal `x = y`. Mirroring reverses orientation, so
/// each edge swaps its labels.
fn transposed<T: Scalar>(net: &LabeledNetwork<T>) -> LabeledNetwork<T> {
    let flip = |p: crate::geometry::Vec2<T>| crate::geometry::Vec2::new(p.y, p.x);
    let mut out = net.clone();
    for p in &mut out.vertices {
        *p = flip(*p);
    }
    if let crate::domain::Domain::Plane { bbox } = &mut out.domain {
        *bbox = crate::domain::BBox::new(flip(bbox.min), flip(bbox.max));
    }
    for e in &mut out.edges {
        core::mem::swap(&mut e.left, &mut e.right);
    }
    out
}

/// Adjacent crossings along scanlines between vertex heights must agree on
/// the label of the interval between them.
fn check_regions<T: Scalar>(net: &LabeledNetwork<T>, out: &mut Collect) {
    if net.edges.is_empty() {
        return;
    }
    let mut ys: Vec<T> = net.vertices.iter().map(|p| p.y).collect();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.dedup();
    let torus = net.domain.is_torus();
    let scanner = Scanner::new(net);
    // Gaps at roundoff level put the scanline on a vertex; the neighbouring
    // gaps sample the same regions.
    let gap = T::epsilon() * lit(64.0);
    let mut lines: Vec<T> =
        ys.windows(2).filter(|w| w[1] - w[0] > gap * w[1].abs().max(T::one())).map(|w| (w[0] + w[1]) * lit(0.5)).collect();
    if torus && !ys.is_empty() {
        lines.push(crate::domain::wrap_unit((ys[ys.len() - 1] + ys[0] + T::one()) * lit(0.5)));
    }
    for y in lines {
        let cr = scanner.crossings(y);
        let k = cr.len();
        if k == 0 {
            continue;
        }
        let pairs = if torus { k } else { k - 1 };
        for i in 0..pairs {
            let (c0, c1) = (cr[i], cr[(i + 1) % k]);
            if c0.after != c1.before {
                out.push(
                    ViolationKind::RegionLabel,
                    None,
                    None,
                    format!("labels {} and {} near y = {}", c0.after, c1.before, y),
                );
                return;
            }
        }
    }
}
