// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Splitting a junction of degree four or more into two junctions joined by
//! a short bridge.

use super::*;
use crate::error::MoveError;
use crate::geometry::point_segment_distance;
use crate::network::Label;

/// Star length at unit scale after pulling arms `k` and `k + 1` to
/// `s·b` and the rest to `−s·b`.
fn split_length<T: Scalar>(u: &[Vec2<T>], k: usize, b: Vec2<T>, s: T) -> T {
    let d = u.len();
    let k1 = (k + 1) % d;
    let q1 = b * s;
    let mut l = (u[k] - q1).norm() + (u[k1] - q1).norm() + s + s;
    for (i, ui) in u.iter().enumerate() {
        if i != k && i != k1 {
            l += (*ui + q1).norm();
        }
    }
    l
}

/// Best adjacent pair to pull apart: `(k, s, ratio)`, where `ratio` is the
/// length after the split over the length before, at unit scale.
pub(crate) fn best_pair<T: Scalar>(u: &[Vec2<T>], pinched: &[Label]) -> Option<(usize, T, T)> {
    let d = u.len();
    let mut best: Option<(usize, T, T)> = None;
    for k in 0..d {
        let k1 = (k + 1) % d;
        let gap = {
            let a = u[k1].angle() - u[k].angle();
            if a <= T::zero() { a + T::PI() + T::PI() } else { a }
        };
        if gap >= T::PI() {
            continue;
        }
        let b = (u[k] + u[k1]).normalized();
        let (s, l) = golden_min(T::zero(), lit(0.99), |s| split_length(u, k, b, s));
        let ratio = l / T::from_usize_lossy(d);
        let better = match best {
            None => true,
            Some((bk, _, br)) => {
                let tie = lit::<T>(1e-12);
                ratio < br - tie || ((ratio - br).abs() <= tie && pinched[k] < pinched[bk])
            }
        };
        if better {
            best = Some((k, s, ratio));
        }
    }
    best
}

/// Splits the junction `v` (degree at least four) along the adjacent pair
/// of arms whose separation shortens the network most. Returns the
/// identity outcome when no split shortens it.
pub fn split_high_order_junction<T: Scalar>(
    net: &LabeledNetwork<T>,
    v: usize,
    j: u32,
    omega: &WeightFunction<T>,
) -> Result<DeformationOutcome<T>, MoveError> {
    let deg = net.degrees();
    if v >= net.vertices.len() || deg[v] < 4 {
        return Err(MoveError::NotApplicable(format!("vertex {v} has degree {}", deg.get(v).copied().unwrap_or(0))));
    }
    let mut work = net.clone();
    isolate_vertex(&mut work, v);
    let ends = work.edge_ends();
    let sorted = work.sorted_ends(v, &ends[v]);
    let c = work.vertices[v];
    let vecs: Vec<Vec2<T>> = sorted.iter().map(|(_, e)| work.segment_vector(v, e.to)).collect();
    let u: Vec<Vec2<T>> = vecs.iter().map(|x| x.normalized()).collect();
    let pinched: Vec<Label> = sorted.iter().map(|(_, e)| e.left).collect();
    let Some((k, s, ratio)) = best_pair(&u, &pinched) else {
        return Ok(DeformationOutcome::identity(net));
    };
    if ratio >= T::one() - lit(1e-12) {
        return Ok(DeformationOutcome::identity(net));
    }
    let d = u.len();
    let k1 = (k + 1) % d;
    let jt = T::from_u32(j).unwrap();
    let mut rho = T::one() / (lit::<T>(2.0) * jt * jt);
    for x in &vecs {
        rho = rho.min(x.norm() * lit(0.5));
    }
    for (_, a, b) in work.segments() {
        if a == v || b == v {
            continue;
        }
        let pa = work.domain.near(c, work.vertices[a]);
        let pb = pa + work.segment_vector(a, b);
        rho = rho.min(point_segment_distance(c, pa, pb) * lit(0.5));
    }
    rho = rho.min(lit::<T>(0.9) * (-ratio.ln()) / (lit::<T>(2.0) * jt));
    if !(rho > T::zero()) {
        return Err(MoveError::NotApplicable("no room for a split".into()));
    }
    let bis = (u[k] + u[k1]).normalized();
    let q1l = bis * (s * rho);
    let q2l = -q1l;
    let q1 = work.add_vertex(c + q1l);
    let q2 = work.add_vertex(c + q2l);
    let xl = |i: usize| if i == k || i == k1 { q1l } else { q2l };
    let xi = |i: usize| if i == k || i == k1 { q1 } else { q2 };
    let pl: Vec<Vec2<T>> = u.iter().map(|x| *x * rho).collect();
    let pi: Vec<usize> = pl.iter().map(|p| work.add_vertex(c + *p)).collect();

    // Rewire chain ends; back ends first so forward positions stay valid.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by_key(|&i| (sorted[i].1.forward, usize::MAX - sorted[i].1.pos));
    for &i in &order {
        let end = sorted[i].1;
        let chain = &mut work.edges[end.edge].vertices;
        if end.forward {
            chain[0] = xi(i);
            chain.insert(1, pi[i]);
        } else {
            let last = chain.len() - 1;
            chain[last] = xi(i);
            chain.insert(last, pi[i]);
        }
    }
    work.add_edge(vec![q1, q2], sorted[k].1.right, sorted[k1].1.left);

    let mut volume = vec![T::zero(); net.n_labels as usize];
    for i in 0..d {
        let i1 = (i + 1) % d;
        let old = [pl[i1], Vec2::zero(), pl[i]];
        let new = [pl[i1], xl(i1), xl(i), pl[i]];
        let label = sorted[i].1.left as usize;
        volume[label - 1] += path_area_change(&old, &new);
    }
    let mut touched = vec![q1, q2];
    touched.extend(&pi);
    if !crossing_free(&work, &touched) {
        let mut out = DeformationOutcome::identity(net);
        out.rejected.push((MoveKind::JunctionSplit, Rejection::Invalid("split creates a crossing".into())));
        return Ok(out);
    }
    work.compact();
    let mv = Move {
        kind: MoveKind::JunctionSplit,
        support: Support { center: c, radius: rho },
        displacement: rho + rho,
        volume_changes: volume,
        mass_before: disk_mass(net, c, rho),
        mass_after: disk_mass(&work, c, rho),
        weighted_decrease: disk_weighted_mass(net, c, rho, omega) - disk_weighted_mass(&work, c, rho, omega),
    };
    let mut out = DeformationOutcome::identity(net);
    match verify_admissible(net, &work, &mv, j, omega) {
        Verdict::Accept => out.accept(work, mv),
        Verdict::Reject(r) => out.rejected.push((MoveKind::JunctionSplit, r)),
    }
    Ok(out)
}
