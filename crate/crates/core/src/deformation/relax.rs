// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Local relaxation: straightening a kink or moving a triple junction to
//! the Fermat point of its neighbours.

use super::*;
use crate::error::MoveError;
use crate::network::EdgeEnd;

fn fermat_point<T: Scalar>(p: &[Vec2<T>; 3]) -> Option<Vec2<T>> {
    let limit: T = lit(-0.5);
    for i in 0..3 {
        let a = (p[(i + 1) % 3] - p[i]).normalized();
        let b = (p[(i + 2) % 3] - p[i]).normalized();
        if a.dot(b) <= limit {
            return None;
        }
    }
    let mut x = (p[0] + p[1] + p[2]) / lit(3.0);
    for _ in 0..500 {
        let mut num = Vec2::zero();
        let mut den = T::zero();
        for q in p {
            let d = (*q - x).norm();
            if d == T::zero() {
                return None;
            }
            num += *q / d;
            den += T::one() / d;
        }
        let next = num / den;
        let step = (next - x).norm();
        x = next;
        if step <= lit::<T>(1e-15) * (T::one() + x.norm()) {
            break;
        }
    }
    Some(x)
}

/// Relaxes vertex `v` (degree two or three, not anchored) inside the disk
/// spanned by its neighbours. Returns the identity outcome with a recorded
/// rejection when the move is not admissible.
pub fn relax_vertex<T: Scalar>(
    net: &LabeledNetwork<T>,
    v: usize,
    j: u32,
    omega: &WeightFunction<T>,
) -> Result<DeformationOutcome<T>, MoveError> {
    let ends = net.edge_ends();
    relax_with_ends(net, &ends[v], v, j, omega)
}

pub(crate) fn relax_with_ends<T: Scalar>(
    net: &LabeledNetwork<T>,
    ends: &[EdgeEnd],
    v: usize,
    j: u32,
    omega: &WeightFunction<T>,
) -> Result<DeformationOutcome<T>, MoveError> {
    let d = ends.len();
    if d != 2 && d != 3 {
        return Err(MoveError::NotApplicable(format!("vertex {v} has degree {d}")));
    }
    let jt = T::from_u32(j).unwrap();
    let reach = T::one() / (lit::<T>(2.0) * jt * jt);
    let sorted = net.sorted_ends(v, ends);
    let nb: Vec<Vec2<T>> = sorted.iter().map(|(_, e)| net.segment_vector(v, e.to)).collect();
    let r = nb.iter().fold(T::zero(), |m, x| m.max(x.norm()));
    if r > reach {
        return Err(MoveError::NotApplicable("neighbours too far".into()));
    }
    let target = if d == 2 {
        let ab = nb[1] - nb[0];
        let l2 = ab.norm2();
        if l2 == T::zero() {
            return Err(MoveError::NotApplicable("degenerate chord".into()));
        }
        let t = (-nb[0]).dot(ab) / l2;
        if !(t > T::zero() && t < T::one()) {
            return Err(MoveError::NotApplicable("projection outside chord".into()));
        }
        nb[0] + ab * t
    } else {
        fermat_point(&[nb[0], nb[1], nb[2]]).ok_or_else(|| MoveError::NotApplicable("obtuse neighbour triangle".into()))?
    };
    let old_len: T = nb.iter().map(|x| x.norm()).sum();
    let new_len: T = nb.iter().map(|x| (*x - target).norm()).sum();
    // Necessary for the local decrease test, since other boundary inside
    // the disk only adds the same length to both sides.
    let factor = (-jt * (r + r)).exp();
    if new_len > factor * old_len || old_len - new_len <= lit::<T>(1e-12) * old_len {
        return Err(MoveError::NotApplicable("no sufficient decrease".into()));
    }
    if nb.iter().any(|x| (*x - target).norm() <= lit::<T>(1e-9) * r) {
        return Err(MoveError::NotApplicable("vertex would merge with a neighbour".into()));
    }
    let c = net.vertices[v];
    let mut work = net.clone();
    work.vertices[v] = work.domain.wrap(c + target);
    let mut out = DeformationOutcome::identity(net);
    if !crossing_free(&work, &[v]) {
        out.rejected.push((MoveKind::Relaxation, Rejection::Invalid("relaxation creates a crossing".into())));
        return Ok(out);
    }
    let mut volume = vec![T::zero(); net.n_labels as usize];
    for i in 0..d {
        let i1 = (i + 1) % d;
        let old = [nb[i1], Vec2::zero(), nb[i]];
        let new = [nb[i1], target, nb[i]];
        volume[sorted[i].1.left as usize - 1] += path_area_change(&old, &new);
    }
    let mv = Move {
        kind: MoveKind::Relaxation,
        support: Support { center: c, radius: r },
        displacement: target.norm(),
        volume_changes: volume,
        mass_before: disk_mass(net, c, r),
        mass_after: disk_mass(&work, c, r),
        weighted_decrease: disk_weighted_mass(net, c, r, omega) - disk_weighted_mass(&work, c, r, omega),
    };
    match verify_admissible(net, &work, &mv, j, omega) {
        Verdict::Accept => out.accept(work, mv),
        Verdict::Reject(rej) => out.rejected.push((MoveKind::Relaxation, rej)),
    }
    Ok(out)
}
