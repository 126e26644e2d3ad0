// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Deleting an interior boundary by crushing it piece by piece onto its
//! receding end.

use super::*;
use crate::error::MoveError;

/// Removes the interior edge `e` (same label on both sides). Each piece is
/// a separate verified move whose support is centred at the current end of
/// the edge. Stops early, keeping what was removed, when a piece cannot be
/// made admissible.
pub fn remove_interior_boundary<T: Scalar>(
    net: &LabeledNetwork<T>,
    e: usize,
    j: u32,
    omega: &WeightFunction<T>,
) -> Result<DeformationOutcome<T>, MoveError> {
    let Some(edge) = net.edges.get(e) else {
        return Err(MoveError::NotApplicable(format!("no edge {e}")));
    };
    if !edge.is_interior() {
        return Err(MoveError::NotApplicable(format!("edge {e} separates two labels")));
    }
    let mut work = net.clone();
    let deg = work.degrees();
    {
        let ed = &mut work.edges[e];
        if !ed.is_closed() && deg[ed.last()] == 1 && deg[ed.first()] != 1 {
            ed.vertices.reverse();
        }
    }
    let jt = T::from_u32(j).unwrap();
    let piece_max = T::one() / (lit::<T>(2.0) * jt * jt);
    let floor = piece_max * lit(1e-6);
    let mut out = DeformationOutcome::identity(net);
    let mut piece_try = piece_max;
    let rule = GaussLegendre::<T>::new(6);
    while work.edges[e].vertices.len() >= 2 {
        let s = work.edges[e].vertices[0];
        let nx = work.edges[e].vertices[1];
        let ps = work.vertices[s];
        let dv = work.segment_vector(s, nx);
        let len = dv.norm();
        let ell = len.min(piece_try);
        let mut cand = work.clone();
        let tip = ps + dv * (ell / len);
        if ell < len * (T::one() - lit(1e-12)) {
            let m = cand.add_vertex(tip);
            cand.edges[e].vertices[0] = m;
        } else {
            cand.edges[e].vertices.remove(0);
        }
        if cand.edges[e].vertices.len() < 2 {
            cand.edges[e].vertices.clear();
        }
        let weighted = if omega.is_one() {
            ell
        } else {
            rule.composite(T::zero(), T::one(), 4, |t| omega.value(ps + (tip - ps) * t)) * ell
        };
        let mv = Move {
            kind: MoveKind::InteriorRemoval,
            support: Support { center: ps, radius: ell },
            displacement: ell,
            volume_changes: vec![T::zero(); net.n_labels as usize],
            mass_before: disk_mass(&work, ps, ell),
            mass_after: disk_mass(&cand, ps, ell),
            weighted_decrease: weighted,
        };
        match verify_admissible(&work, &cand, &mv, j, omega) {
            Verdict::Accept => {
                out.accept(cand.clone(), mv);
                work = cand;
            }
            Verdict::Reject(r) => {
                piece_try = ell * lit(0.5);
                if piece_try < floor {
                    out.rejected.push((MoveKind::InteriorRemoval, r));
                    break;
                }
            }
        }
    }
    out.network.compact();
    out.network.join_chains();
    Ok(out)
}
