//! Explicit curves inside a piece of a cut surface, built from closed dual walks.
//!
//! An arc between two ends of a piece (punctures or boundary sides) gives the boundary
//! of a regular neighbourhood of the arc and both ends. A non-tree edge of the region
//! graph gives an embedded cycle. Every candidate is normalised by `curve_from_walk`, so
//! only simple essential curves come back; callers still verify what they need.

use crate::cut::CutComplex;
use crate::normal::{curve_from_walk, reverse_walk, vertex_loop, Coords};
use crate::surface::IdealTriangulation;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum End {
    Puncture(usize),
    /// Side of a cut curve: (curve index, side).
    Side(usize, u8),
}

/// Regions of `piece` touching `end`, each with the loop around that end based in the
/// region's triangle, oriented with the piece on its right.
fn end_regions(cx: &CutComplex, piece: usize, end: End) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    match end {
        End::Puncture(v) => {
            for &(r, tri, k) in &cx.puncture_corners {
                if cx.piece_of_region[r] == piece && cx.t.corner_vertex(tri, k) == v {
                    out.push((r, vertex_loop(cx.t, tri, k)));
                }
            }
        }
        End::Side(x, s) => {
            for (r, list) in cx.touches.iter().enumerate() {
                if cx.piece_of_region[r] != piece {
                    continue;
                }
                if let Some(&(_, step, _)) = list.iter().find(|&&(y, _, side)| y == x && side == s) {
                    out.push((r, cx.curve_portion(x, step, step, s == 1, true)));
                }
            }
        }
    }
    out.sort_by_key(|e| e.0);
    out.dedup_by_key(|e| e.0);
    out
}

/// Ends available in a piece.
pub fn ends_of(cx: &CutComplex, piece: usize) -> Vec<End> {
    let p = &cx.pieces[piece];
    let mut out: Vec<End> = p.punctures.iter().map(|&v| End::Puncture(v)).collect();
    out.extend(p.sides.iter().map(|&(x, s)| End::Side(x, s)));
    out
}

/// The curve enclosing `a`, `b` and a shortest arc joining them inside `piece`.
pub fn companion(cx: &CutComplex, piece: usize, a: End, b: End) -> Option<Coords> {
    if a == b {
        return None;
    }
    let ra = end_regions(cx, piece, a);
    let rb = end_regions(cx, piece, b);
    let from: Vec<usize> = ra.iter().map(|e| e.0).collect();
    let to: Vec<usize> = rb.iter().map(|e| e.0).collect();
    let (s, e, gamma) = cx.region_path(&from, &to)?;
    let la = &ra.iter().find(|x| x.0 == s)?.1;
    let lb = &rb.iter().find(|x| x.0 == e)?.1;
    let mut walk = la.clone();
    walk.extend(&gamma);
    walk.extend(lb);
    walk.extend(reverse_walk(cx.t, &gamma));
    curve_from_walk(cx.t, &walk)
}

/// Curves from the fundamental cycles of the region graph of `piece`, sorted, deduplicated.
pub fn cycle_curves(cx: &CutComplex, piece: usize) -> Vec<Coords> {
    let n = cx.n_regions();
    let Some(root) = (0..n).find(|&r| cx.piece_of_region[r] == piece) else { return Vec::new() };
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut order = vec![root];
    let mut q = VecDeque::from([root]);
    while let Some(r) = q.pop_front() {
        for &(nb, slot) in cx.region_neighbors(r) {
            if !seen[nb] {
                seen[nb] = true;
                parent[nb] = Some((r, slot));
                order.push(nb);
                q.push_back(nb);
            }
        }
    }
    let path_to = |mut r: usize| {
        let mut p = Vec::new();
        while let Some((up, slot)) = parent[r] {
            p.push(slot);
            r = up;
        }
        p.reverse();
        p
    };
    let mut out = Vec::new();
    for &r in &order {
        for &(nb, slot) in cx.region_neighbors(r) {
            let back = cx.t.partner(slot);
            if parent[nb] == Some((r, slot)) || parent[r] == Some((nb, back)) {
                continue;
            }
            if (r, slot) > (nb, back) {
                continue;
            }
            let mut walk = path_to(r);
            walk.push(slot);
            walk.extend(reverse_walk(cx.t, &path_to(nb)));
            if let Some(c) = curve_from_walk(cx.t, &walk) {
                out.push(c);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Every companion of a pair of ends plus every cycle curve of `piece`.
pub fn piece_candidates(cx: &CutComplex, piece: usize) -> Vec<Coords> {
    let ends = ends_of(cx, piece);
    let mut out = cycle_curves(cx, piece);
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            out.extend(companion(cx, piece, ends[i], ends[j]));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The curve around punctures `i` and `j` (vertex indices) following a shortest arc.
pub fn pants_curve(t: &IdealTriangulation, i: usize, j: usize) -> Option<Coords> {
    let cx = CutComplex::new(t, &[]).ok()?;
    companion(&cx, 0, End::Puncture(i), End::Puncture(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{is_eventually_nonseparating, is_pants_curve, Subsurface};
    use crate::intersection::intersection_number;
    use crate::surface::{make_surface, standard_triangulation};

    #[test]
    fn pants_curves_on_the_six_punctured_sphere() {
        let t = standard_triangulation(make_surface(0, 6).unwrap()).unwrap();
        let mut seen = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                let c = pants_curve(&t, i, j).unwrap();
                assert!(is_pants_curve(&t, &c, &Subsurface::whole()).unwrap());
                seen.push(c);
            }
        }
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn adjacent_pants_curves_on_four_punctured_sphere_meet_twice() {
        let t = standard_triangulation(make_surface(0, 4).unwrap()).unwrap();
        let a = pants_curve(&t, 0, 1).unwrap();
        let b = pants_curve(&t, 2, 3).unwrap();
        assert_eq!(a, b);
        let c = pants_curve(&t, 1, 2).unwrap();
        assert_eq!(intersection_number(&t, &a, &c), 2);
    }

    #[test]
    fn cycles_find_nonseparating_curves() {
        for (g, n) in [(1, 1), (1, 3), (2, 1)] {
            let t = standard_triangulation(make_surface(g, n).unwrap()).unwrap();
            let cx = CutComplex::new(&t, &[]).unwrap();
            let cs = cycle_curves(&cx, 0);
            assert!(cs
                .iter()
                .any(|c| is_eventually_nonseparating(&t, &[c.clone()], &Subsurface::whole()).unwrap()));
        }
    }

    #[test]
    fn companion_of_boundary_and_puncture_cuts_off_a_pants() {
        let t = standard_triangulation(make_surface(1, 2).unwrap()).unwrap();
        let cx0 = CutComplex::new(&t, &[]).unwrap();
        let x = cycle_curves(&cx0, 0)
            .into_iter()
            .find(|c| is_eventually_nonseparating(&t, &[c.clone()], &Subsurface::whole()).unwrap())
            .unwrap();
        let cx = CutComplex::new(&t, &[x.clone()]).unwrap();
        let c = companion(&cx, 0, End::Side(0, 0), End::Puncture(0)).unwrap();
        let v = Subsurface::on_side(&[x.clone()], 0, 0);
        assert!(v.contains(&t, &c));
        let parts = v.split(&t, &[c], false).unwrap();
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().any(|p| p.is_pants()));
    }
}
