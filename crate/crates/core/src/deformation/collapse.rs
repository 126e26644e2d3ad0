// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Collapsing a small grain into the label that dominates around it.

use super::*;
use crate::error::MoveError;
use crate::network::{face_cycles, Label};

/// Constants of the small-region collapse: `c2` bounds the boundary length
/// in the ball relative to its radius, `c3` bounds the transferred area
/// relative to the squared perimeter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollapseConfig<T> {
    pub c2: T,
    pub c3: T,
}

impl<T: Scalar> Default for CollapseConfig<T> {
    fn default() -> Self {
        Self { c2: lit(0.25), c3: T::one() }
    }
}

struct Crossing<T> {
    angle: T,
    vertex: usize,
    ccw: Label,
    cw: Label,
}

/// Rebuilds `net` with the open disk `B_r(c)` filled by label `fill`.
fn fill_disk<T: Scalar>(net: &LabeledNetwork<T>, c: Vec2<T>, r: T, fill: Label) -> Option<LabeledNetwork<T>> {
    let tol = r * lit(1e-9);
    if net.vertices.iter().any(|p| ((net.domain.delta(c, *p)).norm() - r).abs() <= tol) {
        return None;
    }
    let mut out = LabeledNetwork::new(net.domain, net.n_labels);
    out.vertices = net.vertices.clone();
    let mut crossings: Vec<Crossing<T>> = Vec::new();
    let angle_of = |p: Vec2<T>| (p - c).angle();
    for edge in &net.edges {
        let mut chains: Vec<Vec<usize>> = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        for w in edge.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            let pa = net.domain.near(c, net.vertices[a]);
            let pb = pa + net.segment_vector(a, b);
            let hit = segment_disk_interval(pa, pb, c, r).filter(|(t0, t1)| *t1 - *t0 > lit(1e-12));
            match hit {
                None => {
                    if cur.is_empty() {
                        cur.push(a);
                    }
                    cur.push(b);
                }
                Some((t0, t1)) => {
                    if t0 > T::zero() {
                        let x = pa + (pb - pa) * t0;
                        let id = out.add_vertex(x);
                        if cur.is_empty() {
                            cur.push(a);
                        }
                        cur.push(id);
                        chains.push(core::mem::take(&mut cur));
                        crossings.push(Crossing { angle: angle_of(x), vertex: id, ccw: edge.right, cw: edge.left });
                    }
                    if t1 < T::one() {
                        let x = pa + (pb - pa) * t1;
                        let id = out.add_vertex(x);
                        cur = vec![id, b];
                        crossings.push(Crossing { angle: angle_of(x), vertex: id, ccw: edge.left, cw: edge.right });
                    }
                }
            }
        }
        if !cur.is_empty() {
            chains.push(cur);
        }
        // A closed loop cut open: the last piece continues into the first.
        if edge.is_closed() && chains.len() >= 2 {
            let first = &chains[0];
            let last = chains.last().unwrap();
            if first[0] == edge.vertices[0] && *last.last().unwrap() == edge.vertices[0] {
                let head = chains.remove(0);
                let tail = chains.last_mut().unwrap();
                tail.extend_from_slice(&head[1..]);
            }
        }
        for ch in chains {
            if ch.len() >= 2 {
                out.add_edge(ch, edge.left, edge.right);
            }
        }
    }
    let two_pi = T::PI() + T::PI();
    if crossings.is_empty() {
        let probe = net.domain.wrap(c + Vec2::new(r, T::zero()));
        return (Scanner::new(net).label_at(probe) == fill).then(|| {
            let mut o = out;
            o.compact();
            o
        });
    }
    crossings.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap_or(core::cmp::Ordering::Equal));
    let n = crossings.len();
    let max_step = T::PI() / lit(32.0);
    for k in 0..n {
        let nx = (k + 1) % n;
        let label = crossings[k].ccw;
        if crossings[nx].cw != label {
            return None;
        }
        if label == fill {
            continue;
        }
        let a0 = crossings[k].angle;
        let mut a1 = crossings[nx].angle;
        if a1 <= a0 {
            a1 += two_pi;
        }
        let pieces = ((a1 - a0) / max_step).ceil().to_usize().unwrap_or(1).max(1);
        let mut chain = vec![crossings[k].vertex];
        for i in 1..pieces {
            let t = a0 + (a1 - a0) * T::from_usize_lossy(i) / T::from_usize_lossy(pieces);
            chain.push(out.add_vertex(c + Vec2::from_angle(t) * r));
        }
        chain.push(crossings[nx].vertex);
        out.add_edge(chain, fill, label);
    }
    out.compact();
    out.join_chains();
    Some(out)
}

/// Collapses the grain `label` when it is a small topological disk:
/// contained in `B_{R/2}` with `R = 1/(2j²)`, with at most `c2·R` boundary
/// length in `B_R`. The ball `B_r`, `r ∈ [R/2, R]`, is handed to the label
/// holding the majority of the surrounding annulus.
pub fn collapse_small_region<T: Scalar>(
    net: &LabeledNetwork<T>,
    label: Label,
    j: u32,
    omega: &WeightFunction<T>,
    cfg: &CollapseConfig<T>,
) -> Result<DeformationOutcome<T>, MoveError> {
    let cycles: Vec<_> = face_cycles(net).into_iter().filter(|f| f.label == label).collect();
    if cycles.is_empty() {
        return Err(MoveError::NotApplicable(format!("label {label} has no boundary")));
    }
    if cycles.len() != 1 {
        return Err(MoveError::NotADisk { label });
    }
    let cyc = &cycles[0].vertices;
    let mut pts = Vec::with_capacity(cyc.len());
    let mut p = net.vertices[cyc[0]];
    let mut perimeter = T::zero();
    for i in 0..cyc.len() {
        pts.push(p);
        let d = net.segment_vector(cyc[i], cyc[(i + 1) % cyc.len()]);
        perimeter += d.norm();
        p += d;
    }
    if (p - pts[0]).norm() > lit(1e-9) || polygon_area(&pts) <= T::zero() {
        return Err(MoveError::NotADisk { label });
    }
    let bb = crate::domain::BBox::of_points(pts.iter().copied()).unwrap();
    let c = (bb.min + bb.max) * lit(0.5);
    let jt = T::from_u32(j).unwrap();
    let big_r = T::one() / (lit::<T>(2.0) * jt * jt);
    let spread = pts.iter().fold(T::zero(), |m, q| m.max((*q - c).norm()));
    if spread > big_r * lit(0.5) {
        return Err(MoveError::NotApplicable(format!("label {label} does not fit the collapse ball")));
    }
    if disk_mass(net, c, big_r) > cfg.c2 * big_r {
        return Err(MoveError::NotApplicable(format!("too much boundary around label {label}")));
    }
    let scanner = Scanner::new(net);
    let mut votes = vec![0usize; net.n_labels as usize + 1];
    let mut total = 0usize;
    for ri in 0..5 {
        let rad = big_r * lit(0.55 + 0.1 * ri as f64);
        for ai in 0..32 {
            let t = T::PI() * lit(2.0 * ai as f64 / 32.0 + 0.013 * ri as f64);
            let q = net.domain.wrap(c + Vec2::from_angle(t) * rad);
            let l = scanner.label_at(q);
            if l != label && (l as usize) < votes.len() && l > 0 {
                votes[l as usize] += 1;
            }
            total += 1;
        }
    }
    let (fill, count) = votes.iter().enumerate().max_by_key(|(_, n)| **n).map(|(l, n)| (l as Label, *n)).unwrap();
    if fill == 0 || 2 * count <= total {
        return Err(MoveError::DominanceAmbiguity { label });
    }
    let mut out = DeformationOutcome::identity(net);
    for frac in [0.75, 0.7, 0.8, 0.65, 0.85, 0.6, 0.9] {
        let r = big_r * lit(frac);
        let Some(after) = fill_disk(net, c, r, fill) else { continue };
        let before_areas = label_areas_in_disk(net, &scanner, c, r);
        let mut volume = vec![T::zero(); net.n_labels as usize];
        let mut gained = T::zero();
        for (i, a) in before_areas.iter().enumerate() {
            if i as Label + 1 != fill {
                volume[i] = -*a;
                gained += *a;
            }
        }
        volume[fill as usize - 1] = gained;
        let mb = disk_mass(net, c, r);
        let ma = disk_mass(&after, c, r);
        if ma > mb * lit(0.5) {
            continue;
        }
        let transfer = volume.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        if transfer > cfg.c3 * perimeter * perimeter {
            out.rejected.push((MoveKind::SmallRegionCollapse, Rejection::Invalid("area transfer exceeds c3 times squared perimeter".into())));
            return Ok(out);
        }
        let mv = Move {
            kind: MoveKind::SmallRegionCollapse,
            support: Support { center: c, radius: r },
            displacement: r,
            volume_changes: volume,
            mass_before: mb,
            mass_after: ma,
            weighted_decrease: disk_weighted_mass(net, c, r, omega) - disk_weighted_mass(&after, c, r, omega),
        };
        match verify_admissible(net, &after, &mv, j, omega) {
            Verdict::Accept => out.accept(after, mv),
            Verdict::Reject(rej) => out.rejected.push((MoveKind::SmallRegionCollapse, rej)),
        }
        return Ok(out);
    }
    out.rejected.push((MoveKind::SmallRegionCollapse, Rejection::Invalid("no collapse radius halves the local mass".into())));
    Ok(out)
}
