// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Area-reducing Lipschitz deformations: a catalog of local moves, the
//! admissibility verifier and the greedy step that applies them.

mod collapse;
mod relax;
mod removal;
mod split;

pub use collapse::{collapse_small_region, CollapseConfig};
pub use relax::relax_vertex;
pub use removal::remove_interior_boundary;
pub use split::split_high_order_junction;

use serde::Serialize;

use crate::geometry::{polygon_area, segment_disk_interval, Vec2};
use crate::network::{label_areas_in_disk, LabeledNetwork, Scanner};
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, Scalar};
use crate::weights::WeightFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MoveKind {
    JunctionSplit,
    InteriorRemoval,
    SmallRegionCollapse,
    Relaxation,
    Identity,
}

/// Closed disk containing everything a move changes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Support<T> {
    pub center: Vec2<T>,
    pub radius: T,
}

impl<T: Scalar> Support<T> {
    pub fn diameter(&self) -> T {
        self.radius + self.radius
    }

    fn overlaps(&self, o: &Self, net: &LabeledNetwork<T>) -> bool {
        net.domain.dist(self.center, o.center) <= self.radius + o.radius
    }
}

/// One local deformation with its own accounting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Move<T> {
    pub kind: MoveKind,
    pub support: Support<T>,
    /// Bound on `|f(x) − x|`.
    pub displacement: T,
    /// Declared area change per label, indexed by `label − 1`.
    pub volume_changes: Vec<T>,
    /// Boundary length in the support before and after.
    pub mass_before: T,
    pub mass_after: T,
    /// `‖∂𝓔‖(Ω) − ‖∂f⋆𝓔‖(Ω)`.
    pub weighted_decrease: T,
}

impl<T: Scalar> Move<T> {
    pub fn identity(n_labels: u32) -> Self {
        Self {
            kind: MoveKind::Identity,
            support: Support { center: Vec2::zero(), radius: T::zero() },
            displacement: T::zero(),
            volume_changes: vec![T::zero(); n_labels as usize],
            mass_before: T::zero(),
            mass_after: T::zero(),
            weighted_decrease: T::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Rejection {
    Displacement { value: f64, limit: f64 },
    Volume { label: u32, change: f64, limit: f64 },
    LocalDecrease { before: f64, after: f64, limit: f64 },
    WeightedIncrease { before: f64, after: f64 },
    Invalid(String),
}

impl core::fmt::Display for Rejection {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::Displacement { value, limit } => write!(f, "displacement bound: {value:e} > {limit:e}"),
            Self::Volume { label, change, limit } => write!(f, "volume bound: label {label} changes by {change:e} > {limit:e}"),
            Self::LocalDecrease { before, after, limit } => {
                write!(f, "insufficient local decrease: {after:e} > {limit:e} x {before:e}")
            }
            Self::WeightedIncrease { before, after } => write!(f, "weighted mass increases: {before:e} -> {after:e}"),
            Self::Invalid(s) => write!(f, "invalid result: {s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Result of a deformation: the new network and its bookkeeping.
#[derive(Clone, Debug)]
pub struct DeformationOutcome<T> {
    pub network: LabeledNetwork<T>,
    /// `‖∂𝓔‖(Ω) − ‖∂f⋆𝓔‖(Ω) ≥ 0`, summed over accepted moves.
    pub length_decrease: T,
    pub volume_changes: Vec<T>,
    pub accepted_moves: Vec<Move<T>>,
    pub rejected: Vec<(MoveKind, Rejection)>,
    /// Achieved change of the weighted mass, `−length_decrease`.
    pub delta_j_estimate: T,
}

impl<T: Scalar> DeformationOutcome<T> {
    pub fn identity(net: &LabeledNetwork<T>) -> Self {
        Self {
            network: net.clone(),
            length_decrease: T::zero(),
            volume_changes: vec![T::zero(); net.n_labels as usize],
            accepted_moves: Vec::new(),
            rejected: Vec::new(),
            delta_j_estimate: T::zero(),
        }
    }

    fn accept(&mut self, net: LabeledNetwork<T>, mv: Move<T>) {
        self.network = net;
        self.length_decrease += mv.weighted_decrease;
        self.delta_j_estimate = -self.length_decrease;
        for (acc, d) in self.volume_changes.iter_mut().zip(&mv.volume_changes) {
            *acc += *d;
        }
        self.accepted_moves.push(mv);
    }

    fn merge(&mut self, other: DeformationOutcome<T>) {
        self.network = other.network;
        for mv in other.accepted_moves {
            self.length_decrease += mv.weighted_decrease;
            for (acc, d) in self.volume_changes.iter_mut().zip(&mv.volume_changes) {
                *acc += *d;
            }
            self.accepted_moves.push(mv);
        }
        self.delta_j_estimate = -self.length_decrease;
        self.rejected.extend(other.rejected);
    }
}

/// Boundary length inside the closed disk `B_r(c)`.
pub fn disk_mass<T: Scalar>(net: &LabeledNetwork<T>, c: Vec2<T>, r: T) -> T {
    let mut acc = T::zero();
    for (_, a, b) in net.segments() {
        let (pa, pb) = net.segment(a, b);
        let pa2 = net.domain.near(c, pa);
        let pb2 = pa2 + (pb - pa);
        if let Some((t0, t1)) = segment_disk_interval(pa2, pb2, c, r) {
            acc += (pb - pa).norm() * (t1 - t0);
        }
    }
    acc
}

/// `Ω`-weighted boundary length inside the closed disk `B_r(c)`.
pub fn disk_weighted_mass<T: Scalar>(net: &LabeledNetwork<T>, c: Vec2<T>, r: T, omega: &WeightFunction<T>) -> T {
    if omega.is_one() {
        return disk_mass(net, c, r);
    }
    let rule = GaussLegendre::<T>::new(6);
    let mut acc = T::zero();
    for (_, a, b) in net.segments() {
        let (pa, pb) = net.segment(a, b);
        let pa2 = net.domain.near(c, pa);
        let pb2 = pa2 + (pb - pa);
        if let Some((t0, t1)) = segment_disk_interval(pa2, pb2, c, r) {
            let len = (pb - pa).norm() * (t1 - t0);
            if len > T::zero() {
                let q = pa2 + (pb2 - pa2) * t0;
                let e = pa2 + (pb2 - pa2) * t1;
                let m = (len / lit(0.01)).ceil().to_usize().unwrap_or(1).max(1);
                acc += rule.composite(T::zero(), T::one(), m, |t| omega.value(q + (e - q) * t)) * len;
            }
        }
    }
    acc
}

/// Slack for comparisons of quantities that are equal in exact arithmetic.
fn roundoff<T: Scalar>(scale: T) -> T {
    lit::<T>(1e-12) * (T::one() + scale.abs())
}

/// Checks a move against the admissibility conditions with constant `j`:
/// (a) displacement at most `1/j²`; (b) every label's area changes by at
/// most `1/j`, measured inside the support; (c) the boundary length in the
/// support drops by the factor `exp(−j·diam C)`, unless the move is the
/// identity. The `Ω`-weighted length must not increase.
pub fn verify_admissible<T: Scalar>(
    before: &LabeledNetwork<T>,
    after: &LabeledNetwork<T>,
    mv: &Move<T>,
    j: u32,
    omega: &WeightFunction<T>,
) -> Verdict {
    if mv.kind == MoveKind::Identity {
        return Verdict::Accept;
    }
    let jt = T::from_u32(j).unwrap();
    let limit = T::one() / (jt * jt);
    if mv.displacement > limit + roundoff(limit) {
        return Verdict::Reject(Rejection::Displacement { value: mv.displacement.to_f64_lossy(), limit: limit.to_f64_lossy() });
    }
    let c = mv.support.center;
    let r = mv.support.radius;
    let vol_limit = T::one() / jt;
    let sb = Scanner::new(before);
    let sa = Scanner::new(after);
    let ab = label_areas_in_disk(before, &sb, c, r);
    let aa = label_areas_in_disk(after, &sa, c, r);
    for (i, (x, y)) in ab.iter().zip(&aa).enumerate() {
        let measured = (*y - *x).abs();
        let declared = mv.volume_changes.get(i).map_or(T::zero(), |d| d.abs());
        let change = measured.max(declared);
        if change > vol_limit {
            return Verdict::Reject(Rejection::Volume {
                label: i as u32 + 1,
                change: change.to_f64_lossy(),
                limit: vol_limit.to_f64_lossy(),
            });
        }
    }
    let mb = disk_mass(before, c, r);
    let ma = disk_mass(after, c, r);
    let factor = (-jt * mv.support.diameter()).exp();
    if ma > factor * mb {
        return Verdict::Reject(Rejection::LocalDecrease {
            before: mb.to_f64_lossy(),
            after: ma.to_f64_lossy(),
            limit: factor.to_f64_lossy(),
        });
    }
    let wb = disk_weighted_mass(before, c, r, omega);
    let wa = disk_weighted_mass(after, c, r, omega);
    if wa > wb {
        return Verdict::Reject(Rejection::WeightedIncrease { before: wb.to_f64_lossy(), after: wa.to_f64_lossy() });
    }
    Verdict::Accept
}

/// Signed area gained by the region on the left of a path when the path is
/// replaced by another with the same endpoints.
pub(crate) fn path_area_change<T: Scalar>(old: &[Vec2<T>], new: &[Vec2<T>]) -> T {
    let mut poly: Vec<Vec2<T>> = new.to_vec();
    if old.len() > 2 {
        poly.extend(old[1..old.len() - 1].iter().rev());
    }
    polygon_area(&poly)
}

/// Parameters of one deformation pass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepConfig<T> {
    pub collapse: CollapseConfig<T>,
    pub relax: bool,
}

impl<T: Scalar> Default for StepConfig<T> {
    fn default() -> Self {
        Self { collapse: CollapseConfig::default(), relax: true }
    }
}

/// One greedy pass: interior-boundary removal, then small-region collapse,
/// then junction splits, then local relaxation. Each move is verified on
/// the current network and supports of different moves are kept disjoint.
pub fn lipschitz_step<T: Scalar>(
    net: &LabeledNetwork<T>,
    j: u32,
    omega: &WeightFunction<T>,
    cfg: &StepConfig<T>,
) -> DeformationOutcome<T> {
    let mut out = DeformationOutcome::identity(net);
    let mut used: Vec<Support<T>> = Vec::new();

    // Interior boundaries.
    let mut tried: Vec<Vec2<T>> = Vec::new();
    loop {
        let cur = &out.network;
        let Some(e) = cur.edges.iter().position(|ed| {
            ed.is_interior() && !tried.iter().any(|p| *p == cur.vertices[ed.first()])
        }) else {
            break;
        };
        tried.push(cur.vertices[cur.edges[e].first()]);
        let attempt = match remove_interior_boundary(cur, e, j, omega) {
            Ok(o) => o,
            Err(_) => continue,
        };
        if attempt.accepted_moves.iter().any(|m| used.iter().any(|u| u.overlaps(&m.support, cur))) {
            continue;
        }
        used.extend(attempt.accepted_moves.iter().map(|m| m.support));
        out.merge(attempt);
    }

    // Small regions.
    for label in 1..=out.network.n_labels {
        let cur = &out.network;
        if let Ok(o) = collapse_small_region(cur, label, j, omega, &cfg.collapse) {
            let Some(mv) = o.accepted_moves.first() else {
                out.rejected.extend(o.rejected);
                continue;
            };
            if used.iter().any(|u| u.overlaps(&mv.support, cur)) {
                continue;
            }
            used.push(mv.support);
            out.merge(o);
        }
    }

    // High-order junctions, one split per junction and pass.
    let deg = out.network.degrees();
    let mut junctions: Vec<Vec2<T>> =
        deg.iter().enumerate().filter(|(_, &d)| d >= 4).map(|(v, _)| out.network.vertices[v]).collect();
    junctions.dedup();
    for p in junctions {
        let cur = &out.network;
        let Some(v) = cur.vertices.iter().position(|q| *q == p) else { continue };
        match split_high_order_junction(cur, v, j, omega) {
            Ok(o) => {
                let Some(mv) = o.accepted_moves.first() else {
                    out.rejected.extend(o.rejected);
                    continue;
                };
                if used.iter().any(|u| u.overlaps(&mv.support, cur)) {
                    continue;
                }
                used.push(mv.support);
                out.merge(o);
            }
            Err(_) => continue,
        }
    }

    // Relaxation of kinked vertices and unbalanced triple junctions.
    if cfg.relax {
        let mut ends = out.network.edge_ends();
        let mut v = 0;
        while v < out.network.vertices.len() {
            let cur = &out.network;
            let p = cur.vertices[v];
            v += 1;
            if used.iter().any(|u| cur.domain.dist(u.center, p) <= u.radius) {
                continue;
            }
            let Ok(o) = relax::relax_with_ends(cur, &ends[v - 1], v - 1, j, omega) else { continue };
            let Some(mv) = o.accepted_moves.first() else { continue };
            if used.iter().any(|u| u.overlaps(&mv.support, cur)) {
                continue;
            }
            used.push(mv.support);
            out.merge(o);
            ends = out.network.edge_ends();
        }
    }
    out
}

/// True when no segment touching one of `touched` meets another segment
/// of `net` away from shared vertices.
pub(crate) fn crossing_free<T: Scalar>(net: &LabeledNetwork<T>, touched: &[usize]) -> bool {
    let segs: Vec<(usize, usize)> = net.segments().map(|(_, a, b)| (a, b)).collect();
    for &(a, b) in segs.iter().filter(|(a, b)| touched.contains(a) || touched.contains(b)) {
        let (pa, pb) = net.segment(a, b);
        for &(c, d) in &segs {
            if c == a || c == b || d == a || d == b {
                continue;
            }
            let pc = net.domain.near(pa, net.vertices[c]);
            let pd = pc + net.segment_vector(c, d);
            if crate::geometry::segments_intersect(pa, pb, pc, pd) {
                return false;
            }
        }
    }
    true
}

/// Splits every chain passing through `v` so that `v` only occurs at chain
/// ends. Closed loops are rotated to start at `v`.
pub(crate) fn isolate_vertex<T: Scalar>(net: &mut LabeledNetwork<T>, v: usize) {
    let mut extra = Vec::new();
    for edge in &mut net.edges {
        let n = edge.vertices.len();
        if n < 3 {
            continue;
        }
        if edge.is_closed()
            && edge.vertices[0] != v {
                if let Some(k) = edge.vertices[..n - 1].iter().position(|&w| w == v) {
                    let mut ring: Vec<usize> = edge.vertices[..n - 1].to_vec();
                    ring.rotate_left(k);
                    ring.push(v);
                    edge.vertices = ring;
                }
            }
        let n = edge.vertices.len();
        let cuts: Vec<usize> = (1..n - 1).filter(|&i| edge.vertices[i] == v).collect();
        if cuts.is_empty() {
            continue;
        }
        let mut start = 0;
        let mut pieces = Vec::new();
        for &c in &cuts {
            pieces.push(edge.vertices[start..=c].to_vec());
            start = c;
        }
        pieces.push(edge.vertices[start..].to_vec());
        edge.vertices = pieces.remove(0);
        for p in pieces {
            extra.push(crate::network::Edge::new(p, edge.left, edge.right));
        }
    }
    net.edges.extend(extra);
}

/// Minimizes a convex function on `[a, b]` by golden-section search.
pub(crate) fn golden_min<T: Scalar>(mut a: T, mut b: T, f: impl Fn(T) -> T) -> (T, T) {
    let g: T = lit(0.5 * (5f64.sqrt() - 1.0));
    let mut x1 = b - (b - a) * g;
    let mut x2 = a + (b - a) * g;
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * g;
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * g;
            f2 = f(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let fa = f(T::zero().max(a));
    if fa < best.1 {
        best = (a, fa);
    }
    best
}

#[cfg(test)]
mod tests;
