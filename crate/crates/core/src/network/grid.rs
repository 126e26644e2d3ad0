// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use crate::geometry::Vec2;
use crate::network::LabeledNetwork;
use crate::scalar::Scalar;

/// Uniform hash grid over the segments of a network. On the torus the cell
/// indices wrap, so queries may use lifted coordinates.
#[derive(Clone, Debug)]
pub struct SegmentGrid<T> {
    cell: T,
    wrap: Option<i64>,
    map: HashMap<(i64, i64), Vec<u32>>,
    /// `(edge, a, b)` for every indexed segment.
    pub segs: Vec<(usize, usize, usize)>,
}

impl<T: Scalar> SegmentGrid<T> {
    pub fn build(net: &LabeledNetwork<T>, cell: T) -> Self {
        let (cell, wrap) = if net.domain.is_torus() {
            let n = (T::one() / cell).floor().to_i64().unwrap_or(1).clamp(1, 1 << 20);
            (T::one() / T::from_i64(n).unwrap(), Some(n))
        } else {
            (cell, None)
        };
        let mut grid = Self { cell, wrap, map: HashMap::new(), segs: net.segments().collect() };
        for (i, &(_, a, b)) in grid.segs.iter().enumerate() {
            let (pa, pb) = net.segment(a, b);
            let lo = Vec2::new(pa.x.min(pb.x), pa.y.min(pb.y));
            let hi = Vec2::new(pa.x.max(pb.x), pa.y.max(pb.y));
            let mut keys = Vec::new();
            grid.cells(lo, hi, &mut keys);
            for k in keys {
                grid.map.entry(k).or_default().push(i as u32);
            }
        }
        grid
    }

    fn index(&self, x: T) -> i64 {
        (x / self.cell).floor().to_i64().unwrap_or(0)
    }

    fn cells(&self, lo: Vec2<T>, hi: Vec2<T>, out: &mut Vec<(i64, i64)>) {
        let (i0, i1) = (self.index(lo.x), self.index(hi.x));
        let (j0, j1) = (self.index(lo.y), self.index(hi.y));
        match self.wrap {
            None => {
                for i in i0..=i1 {
                    for j in j0..=j1 {
                        out.push((i, j));
                    }
                }
            }
            Some(n) => {
                let span = |a: i64, b: i64| if b - a + 1 >= n { (0, n - 1) } else { (a, b) };
                let (i0, i1) = span(i0, i1);
                let (j0, j1) = span(j0, j1);
                for i in i0..=i1 {
                    for j in j0..=j1 {
                        out.push((i.rem_euclid(n), j.rem_euclid(n)));
                    }
                }
                out.sort_unstable();
                out.dedup();
            }
        }
    }

    /// Indices into `segs` of segments whose cells meet the box.
    pub fn query_box(&self, lo: Vec2<T>, hi: Vec2<T>) -> Vec<u32> {
        let mut keys = Vec::new();
        self.cells(lo, hi, &mut keys);
        let mut out = Vec::new();
        for k in keys {
            if let Some(v) = self.map.get(&k) {
                out.extend_from_slice(v);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Candidates for segments meeting the disk `B_r(c)`.
    pub fn query_disk(&self, c: Vec2<T>, r: T) -> Vec<u32> {
        self.query_box(c - Vec2::new(r, r), c + Vec2::new(r, r))
    }
}
