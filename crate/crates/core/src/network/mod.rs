// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Labeled polyline networks encoding open partitions of the plane or torus.
//!
//! Regions are implicit: every edge carries the labels of the grains on its
//! left and right. An edge whose two labels agree is an interior boundary.

mod grid;
pub mod regions;
pub mod remesh;
pub mod validate;

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::geometry::Vec2;
use crate::scalar::Scalar;

pub use grid::SegmentGrid;
pub use regions::{face_cycles, label_areas_in_disk, region_areas, FaceCycle, RegionAreaTable, Scanner};
pub use remesh::remesh;
pub use validate::{validate_partition, ValidationConfig, ValidationReport, Violation, ViolationKind};

/// Grain label, numbered from 1.
pub type Label = u32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    /// Vertex chain. A closed loop repeats its first vertex at the end.
    pub vertices: Vec<usize>,
    pub left: Label,
    pub right: Label,
}

impl Edge {
    pub fn new(vertices: Vec<usize>, left: Label, right: Label) -> Self {
        Self { vertices, left, right }
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.len() > 2 && self.vertices.first() == self.vertices.last()
    }

    pub fn is_interior(&self) -> bool {
        self.left == self.right
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn first(&self) -> usize {
        self.vertices[0]
    }

    pub fn last(&self) -> usize {
        *self.vertices.last().unwrap()
    }
}

/// One outgoing half-edge at a vertex, seen from that vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeEnd {
    pub edge: usize,
    /// Index of the vertex inside the edge chain.
    pub pos: usize,
    /// True when leaving along the chain direction.
    pub forward: bool,
    pub to: usize,
    /// Label on the left of the outgoing direction.
    pub left: Label,
    pub right: Label,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledNetwork<T> {
    pub domain: Domain<T>,
    pub n_labels: u32,
    pub vertices: Vec<Vec2<T>>,
    pub edges: Vec<Edge>,
}

impl<T: Scalar> LabeledNetwork<T> {
    pub fn new(domain: Domain<T>, n_labels: u32) -> Self {
        Self { domain, n_labels, vertices: Vec::new(), edges: Vec::new() }
    }

    pub fn add_vertex(&mut self, p: Vec2<T>) -> usize {
        self.vertices.push(self.domain.wrap(p));
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, vertices: Vec<usize>, left: Label, right: Label) -> usize {
        self.edges.push(Edge::new(vertices, left, right));
        self.edges.len() - 1
    }

    /// Adds a polyline through `pts`; closes it when `closed` is set.
    pub fn add_polyline(&mut self, pts: &[Vec2<T>], closed: bool, left: Label, right: Label) -> usize {
        let mut ids: Vec<usize> = pts.iter().map(|&p| self.add_vertex(p)).collect();
        if closed {
            ids.push(ids[0]);
        }
        self.add_edge(ids, left, right)
    }

    /// Endpoints of the segment `a → b`, with `b` lifted next to `a`.
    #[inline]
    pub fn segment(&self, a: usize, b: usize) -> (Vec2<T>, Vec2<T>) {
        let pa = self.vertices[a];
        (pa, pa + self.domain.delta(pa, self.vertices[b]))
    }

    #[inline]
    pub fn segment_vector(&self, a: usize, b: usize) -> Vec2<T> {
        self.domain.delta(self.vertices[a], self.vertices[b])
    }

    /// All segments as `(edge, a, b)` in storage order.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(e, edge)| edge.vertices.windows(2).map(move |w| (e, w[0], w[1])))
    }

    pub fn segment_count(&self) -> usize {
        self.edges.iter().map(Edge::segment_count).sum()
    }

    /// Total boundary length. Interior boundaries count once.
    pub fn length(&self) -> T {
        let mut acc = T::zero();
        for (_, a, b) in self.segments() {
            acc += self.segment_vector(a, b).norm();
        }
        acc
    }

    /// Number of incident segment ends per vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for (_, a, b) in self.segments() {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Vertices of degree at least three.
    pub fn junctions(&self) -> Vec<usize> {
        self.degrees().iter().enumerate().filter(|(_, &d)| d >= 3).map(|(i, _)| i).collect()
    }

    /// Outgoing half-edges per vertex, unsorted.
    pub fn edge_ends(&self) -> Vec<Vec<EdgeEnd>> {
        let mut ends = vec![Vec::new(); self.vertices.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            let vs = &edge.vertices;
            for pos in 0..vs.len() {
                let v = vs[pos];
                if pos + 1 < vs.len() {
                    ends[v].push(EdgeEnd { edge: e, pos, forward: true, to: vs[pos + 1], left: edge.left, right: edge.right });
                }
                if pos > 0 {
                    ends[v].push(EdgeEnd { edge: e, pos, forward: false, to: vs[pos - 1], left: edge.right, right: edge.left });
                }
            }
        }
        ends
    }

    /// Outgoing half-edges at `v` sorted counter-clockwise by angle.
    pub fn sorted_ends(&self, v: usize, ends: &[EdgeEnd]) -> Vec<(T, EdgeEnd)> {
        let mut out: Vec<(T, EdgeEnd)> =
            ends.iter().map(|&end| (self.segment_vector(v, end.to).angle(), end)).collect();
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
        out
    }

    /// Degree-one vertex on the outline of the plane window.
    pub fn is_anchor(&self, v: usize, degree: usize, tol: T) -> bool {
        match &self.domain {
            Domain::Plane { bbox } => degree == 1 && bbox.on_boundary(self.vertices[v], tol),
            Domain::Torus => false,
        }
    }

    /// Drops edges without segments and vertices no edge references,
    /// keeping the relative order of survivors.
    pub fn compact(&mut self) {
        self.edges.retain(|e| e.vertices.len() >= 2);
        let mut used = vec![false; self.vertices.len()];
        for e in &self.edges {
            for &v in &e.vertices {
                used[v] = true;
            }
        }
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut next = 0;
        let mut kept = Vec::with_capacity(self.vertices.len());
        for (i, &u) in used.iter().enumerate() {
            if u {
                map[i] = next;
                next += 1;
                kept.push(self.vertices[i]);
            }
        }
        self.vertices = kept;
        for e in &mut self.edges {
            for v in &mut e.vertices {
                *v = map[*v];
            }
        }
    }

    /// Joins pairs of distinct edges meeting at a degree-two vertex when the
    /// labels agree, and closes open chains whose two ends meet there.
    pub fn join_chains(&mut self) {
        loop {
            let deg = self.degrees();
            let mut joined = false;
            for v in 0..self.vertices.len() {
                if deg[v] != 2 {
                    continue;
                }
                let touching: Vec<usize> = (0..self.edges.len())
                    .filter(|&e| {
                        let ed = &self.edges[e];
                        !ed.is_closed() && ed.vertices.len() >= 2 && (ed.first() == v || ed.last() == v)
                    })
                    .collect();
                if touching.len() != 2 {
                    continue;
                }
                let (e1, e2) = (touching[0], touching[1]);
                // Orient e1 to end at v and e2 to start at v.
                let mut a = self.edges[e1].clone();
                let mut b = self.edges[e2].clone();
                if a.last() != v {
                    a.vertices.reverse();
                    core::mem::swap(&mut a.left, &mut a.right);
                }
                if b.first() != v {
                    b.vertices.reverse();
                    core::mem::swap(&mut b.left, &mut b.right);
                }
                if a.left != b.left || a.right != b.right {
                    continue;
                }
                a.vertices.extend_from_slice(&b.vertices[1..]);
                self.edges[e1] = a;
                self.edges.remove(e2);
                joined = true;
                break;
            }
            if !joined {
                break;
            }
        }
    }

    pub fn cast<U: Scalar>(&self) -> LabeledNetwork<U> {
        LabeledNetwork {
            domain: self.domain.cast(),
            n_labels: self.n_labels,
            vertices: self.vertices.iter().map(|p| p.cast()).collect(),
            edges: self.edges.clone(),
        }
    }

    /// Rigid translation; wraps on the torus.
    pub fn translated(&self, d: Vec2<T>) -> Self {
        let mut out = self.clone();
        for p in &mut out.vertices {
            *p = out.domain.wrap(*p + d);
        }
        if let Domain::Plane { bbox } = &mut out.domain {
            bbox.min += d;
            bbox.max += d;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BBox;

    fn plane() -> Domain<f64> {
        Domain::Plane { bbox: BBox::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0)) }
    }

    #[test]
    fn unit_segment_length() {
        let mut n = LabeledNetwork::new(plane(), 2);
        n.add_polyline(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)], false, 1, 1);
        assert_eq!(n.length(), 1.0);
        assert_eq!(n.degrees(), vec![1, 1]);
    }

    #[test]
    fn join_restores_single_chain() {
        let mut n = LabeledNetwork::new(plane(), 2);
        let a = n.add_vertex(Vec2::new(0.0, 0.0));
        let b = n.add_vertex(Vec2::new(1.0, 0.0));
        let c = n.add_vertex(Vec2::new(1.0, 1.0));
        n.add_edge(vec![a, b], 1, 2);
        n.add_edge(vec![c, b], 2, 1);
        n.join_chains();
        assert_eq!(n.edges.len(), 1);
        assert_eq!(n.edges[0].vertices, vec![a, b, c]);
    }

    #[test]
    fn compact_renumbers() {
        let mut n = LabeledNetwork::new(plane(), 1);
        n.add_vertex(Vec2::new(5.0, 5.0));
        let a = n.add_vertex(Vec2::new(0.0, 0.0));
        let b = n.add_vertex(Vec2::new(1.0, 0.0));
        n.add_edge(vec![a, b], 1, 1);
        n.compact();
        assert_eq!(n.vertices.len(), 2);
        assert_eq!(n.edges[0].vertices, vec![0, 1]);
    }
}
