//! Cell decomposition of a surface cut along a disjoint multicurve.
//!
//! The curves split every edge into segments and every triangle into regions: one
//! central region and, at each corner, one region per arc between that arc and the
//! next one towards the corner vertex. Regions glued across edge segments form the
//! pieces, i.e. the components of the complement.

use crate::error::{CoreError, Result};
use crate::normal::{arc_end, corner_counts, is_valid, point_components, side_weights, trace_from, Coords, Step};
use crate::surface::{split, CutComponent, CutSurface, IdealTriangulation, UnionFind};
use std::collections::{HashMap, VecDeque};

/// Where a curve arc touches a region: (curve index, step index in its trace, side).
pub type Touch = (usize, usize, u8);

#[derive(Debug, Clone, Default)]
pub struct PieceInfo {
    pub regions: usize,
    pub segments: usize,
    pub punctures: Vec<usize>,
    /// Curve sides bounding this piece.
    pub sides: Vec<(usize, u8)>,
}

impl PieceInfo {
    /// Euler characteristic with punctures filled in.
    pub fn chi(&self) -> i64 {
        self.punctures.len() as i64 - self.segments as i64 + self.regions as i64
    }
}

#[derive(Debug, Clone)]
pub struct CutComplex<'a> {
    pub t: &'a IdealTriangulation,
    pub curves: Vec<Coords>,
    pub w: Coords,
    sides: Vec<[u32; 3]>,
    corners: Vec<[u32; 3]>,
    region_base: Vec<usize>,
    pub region_triangle: Vec<usize>,
    pub piece_of_region: Vec<usize>,
    pub pieces: Vec<PieceInfo>,
    pub side_piece: Vec<[usize; 2]>,
    pub traces: Vec<Vec<Step>>,
    pub touches: Vec<Vec<Touch>>,
    /// Regions holding a puncture, with the corner `(triangle, k)` it sits at.
    pub puncture_corners: Vec<(usize, usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl<'a> CutComplex<'a> {
    /// Rejects curves that are not pairwise disjoint and distinct essential components.
    pub fn new(t: &'a IdealTriangulation, curves: &[Coords]) -> Result<Self> {
        for c in curves {
            if c.len() != t.n_edges() {
                return Err(CoreError::LengthMismatch { expected: t.n_edges(), got: c.len() });
            }
        }
        for i in 0..curves.len() {
            for j in 0..i {
                if curves[i] == curves[j] {
                    return Err(CoreError::DuplicateComponent);
                }
            }
        }
        let mut w = vec![0u32; t.n_edges()];
        for c in curves {
            for (s, &x) in w.iter_mut().zip(c) {
                *s += x;
            }
        }
        if !is_valid(t, &w) {
            return Err(CoreError::InvalidCoordinates { violations: 1 });
        }
        let (comp, ncomp) = point_components(t, &w);
        if ncomp != curves.len() {
            return Err(CoreError::NotDisjoint);
        }
        // Identify each traced component with an input curve.
        let mut offset = Vec::with_capacity(w.len());
        let mut acc = 0usize;
        for &x in &w {
            offset.push(acc);
            acc += x as usize;
        }
        let mut comp_coords = vec![vec![0u32; w.len()]; ncomp];
        for e in 0..w.len() {
            for p in 0..w[e] as usize {
                comp_coords[comp[offset[e] + p]][e] += 1;
            }
        }
        let mut curve_of_comp = vec![usize::MAX; ncomp];
        for (k, cc) in comp_coords.iter().enumerate() {
            match curves.iter().position(|c| c == cc) {
                Some(i) if !curve_of_comp.contains(&i) => curve_of_comp[k] = i,
                _ => return Err(CoreError::NotDisjoint),
            }
        }

        let sides: Vec<[u32; 3]> = (0..t.n_triangles()).map(|i| side_weights(t, &w, i)).collect();
        let corners: Vec<[u32; 3]> = sides.iter().map(|s| corner_counts(*s)).collect();
        let mut region_base = Vec::with_capacity(t.n_triangles());
        let mut region_triangle = Vec::new();
        for (tri, c) in corners.iter().enumerate() {
            region_base.push(region_triangle.len());
            let n = 1 + (c[0] + c[1] + c[2]) as usize;
            region_triangle.extend(std::iter::repeat(tri).take(n));
        }
        let n_regions = region_triangle.len();

        let mut cx = CutComplex {
            t,
            curves: curves.to_vec(),
            w,
            sides,
            corners,
            region_base,
            region_triangle,
            piece_of_region: Vec::new(),
            pieces: Vec::new(),
            side_piece: Vec::new(),
            traces: Vec::new(),
            touches: vec![Vec::new(); n_regions],
            puncture_corners: Vec::new(),
            adjacency: vec![Vec::new(); n_regions],
        };

        let mut uf = UnionFind::new(n_regions);
        for slot in 0..3 * t.n_triangles() {
            let (tri, i) = split(slot);
            let other = t.partner(slot);
            let (t2, i2) = split(other);
            let width = cx.sides[tri][i];
            for j in 0..=width {
                let a = cx.region_at(tri, i, j);
                let b = cx.region_at(t2, i2, width - j);
                uf.union(a, b);
                if !cx.adjacency[a].contains(&(b, slot)) {
                    cx.adjacency[a].push((b, slot));
                }
            }
        }
        let mut piece_label = HashMap::new();
        cx.piece_of_region = (0..n_regions)
            .map(|r| {
                let root = uf.find(r);
                let next = piece_label.len();
                *piece_label.entry(root).or_insert(next)
            })
            .collect();
        cx.pieces = vec![PieceInfo::default(); piece_label.len()];
        for r in 0..n_regions {
            cx.pieces[cx.piece_of_region[r]].regions += 1;
        }
        for e in 0..t.n_edges() {
            let (tri, i) = split(t.edge_slots(e).0);
            for j in 0..=cx.w[e] {
                let p = cx.piece_of_region[cx.region_at(tri, i, j)];
                cx.pieces[p].segments += 1;
            }
        }
        for v in 0..t.n_vertices() {
            let (tri, k) = t.vertex_corners(v)[0];
            let r = cx.vertex_region(tri, k);
            cx.pieces[cx.piece_of_region[r]].punctures.push(v);
        }
        for tri in 0..t.n_triangles() {
            for k in 0..3 {
                cx.puncture_corners.push((cx.vertex_region(tri, k), tri, k));
            }
        }

        // Trace each curve from its first point and record which regions touch it.
        let mut side_piece = vec![[0usize; 2]; curves.len()];
        let mut traces = vec![Vec::new(); curves.len()];
        for (x, c) in curves.iter().enumerate() {
            let e = c.iter().position(|&v| v > 0).expect("curves are nonempty");
            let q = (0..cx.w[e] as usize).find(|&p| curve_of_comp[comp[offset[e] + p]] == x).unwrap() as u32;
            let (tri, i) = split(t.edge_slots(e).0);
            side_piece[x] = [
                cx.piece_of_region[cx.region_at(tri, i, q)],
                cx.piece_of_region[cx.region_at(tri, i, q + 1)],
            ];
            traces[x] = trace_from(t, &cx.w, e, q);
        }
        for (x, tr) in traces.iter().enumerate() {
            for (si, st) in tr.iter().enumerate() {
                let tri = st.triangle;
                let entry = st.entry_slot % 3;
                let (_, _, k, d) = arc_end(cx.sides[tri], cx.corners[tri], entry, st.entry_own);
                let forward = entry == k;
                // The inner side of an arc around corner k is on the right when it runs k -> k+1.
                let (inner, outer) = if forward { (1u8, 0u8) } else { (0u8, 1u8) };
                let inner_region = cx.corner_region(tri, k, d);
                let outer_region =
                    if d + 1 < cx.corners[tri][k] { cx.corner_region(tri, k, d + 1) } else { cx.region_base[tri] };
                cx.touches[inner_region].push((x, si, inner));
                cx.touches[outer_region].push((x, si, outer));
            }
        }
        for (x, sp) in side_piece.iter().enumerate() {
            cx.pieces[sp[0]].sides.push((x, 0));
            cx.pieces[sp[1]].sides.push((x, 1));
        }
        cx.side_piece = side_piece;
        cx.traces = traces;
        Ok(cx)
    }

    fn corner_region(&self, tri: usize, k: usize, d: u32) -> usize {
        let c = self.corners[tri];
        let before: u32 = c[..k].iter().sum();
        self.region_base[tri] + 1 + (before + d) as usize
    }

    /// Region touching own segment `j` of side `i` of triangle `tri`.
    pub fn region_at(&self, tri: usize, i: usize, j: u32) -> usize {
        let c = self.corners[tri];
        let prev = (i + 2) % 3;
        if j < c[prev] {
            self.corner_region(tri, prev, j)
        } else if j == c[prev] {
            self.region_base[tri]
        } else {
            self.corner_region(tri, i, self.sides[tri][i] - j)
        }
    }

    /// Region containing the vertex at corner `k` of `tri`.
    pub fn vertex_region(&self, tri: usize, k: usize) -> usize {
        if self.corners[tri][k] > 0 {
            self.corner_region(tri, k, 0)
        } else {
            self.region_base[tri]
        }
    }

    pub fn n_regions(&self) -> usize {
        self.region_triangle.len()
    }

    pub fn component(&self, piece: usize) -> CutComponent {
        let info = &self.pieces[piece];
        let b = info.sides.len() as i64;
        let h = (2 - b - info.chi()) / 2;
        let paired =
            (0..self.curves.len()).filter(|&x| self.side_piece[x][0] == piece && self.side_piece[x][1] == piece).count();
        let mut c = CutComponent::new(h as u32, info.punctures.len() as u32, paired as u32, (b as usize - 2 * paired) as u32);
        c.boundary_sources = info.sides.clone();
        c
    }

    /// Union of pieces across the listed curves; returns a class label per piece.
    pub fn merge_across(&self, curves: &[usize]) -> Vec<usize> {
        let mut uf = UnionFind::new(self.pieces.len());
        for &x in curves {
            uf.union(self.side_piece[x][0], self.side_piece[x][1]);
        }
        let mut label = HashMap::new();
        (0..self.pieces.len())
            .map(|p| {
                let r = uf.find(p);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect()
    }

    /// Shortest dual walk inside one piece from a region in `from` to a region in `to`.
    /// Returns (start region, end region, exit slots).
    pub fn region_path(&self, from: &[usize], to: &[usize]) -> Option<(usize, usize, Vec<usize>)> {
        let n = self.n_regions();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut is_target = vec![false; n];
        for &r in to {
            is_target[r] = true;
        }
        let mut q = VecDeque::new();
        let mut starts: Vec<usize> = from.to_vec();
        starts.sort();
        starts.dedup();
        for &r in &starts {
            seen[r] = true;
            q.push_back(r);
        }
        while let Some(r) = q.pop_front() {
            if is_target[r] {
                let mut walk = Vec::new();
                let mut cur = r;
                while let Some((p, slot)) = prev[cur] {
                    walk.push(slot);
                    cur = p;
                }
                walk.reverse();
                return Some((cur, r, walk));
            }
            for &(nb, slot) in &self.adjacency[r] {
                if !seen[nb] {
                    seen[nb] = true;
                    prev[nb] = Some((r, slot));
                    q.push_back(nb);
                }
            }
        }
        None
    }

    pub fn region_neighbors(&self, r: usize) -> &[(usize, usize)] {
        &self.adjacency[r]
    }

    /// Walk along curve `x` starting at trace step `from` and stopping when step `to`
    /// is reached, travelling forwards (`true`) or backwards. A full loop when `from == to`
    /// and `full` is set.
    pub fn curve_portion(&self, x: usize, from: usize, to: usize, forward: bool, full: bool) -> Vec<usize> {
        let tr = &self.traces[x];
        let n = tr.len();
        let mut out = Vec::new();
        let mut i = from;
        loop {
            if i == to && (!full || !out.is_empty()) {
                break;
            }
            if forward {
                out.push(tr[i].exit_slot);
                i = (i + 1) % n;
            } else {
                out.push(tr[i].entry_slot);
                i = (i + n - 1) % n;
            }
        }
        out
    }

    pub fn to_cut_surface(&self) -> CutSurface {
        CutSurface {
            ambient: self.t.sig,
            curve_count: self.curves.len(),
            components: (0..self.pieces.len()).map(|p| self.component(p)).collect(),
        }
    }
}

pub fn cut_along(t: &IdealTriangulation, x: &[Coords]) -> Result<CutSurface> {
    Ok(CutComplex::new(t, x)?.to_cut_surface())
}

/// A curve is essential when neither side bounds a disk or a once-punctured disk.
pub fn is_essential(t: &IdealTriangulation, c: &[u32]) -> bool {
    let cx = match CutComplex::new(t, &[c.to_vec()]) {
        Ok(cx) => cx,
        Err(_) => return false,
    };
    let [a, b] = cx.side_piece[0];
    if a == b {
        return true;
    }
    [a, b].iter().all(|&p| !(cx.pieces[p].chi() == 1 && cx.pieces[p].punctures.len() <= 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::{enumerate_curves, DEFAULT_CURVE_CEILING};
    use crate::surface::{complexity_of, make_surface, standard_triangulation};
    use std::sync::Arc;

    #[test]
    fn empty_cut_is_ambient() {
        let t = standard_triangulation(make_surface(1, 3).unwrap()).unwrap();
        let cs = cut_along(&t, &[]).unwrap();
        assert_eq!(cs.components.len(), 1);
        let c = &cs.components[0];
        assert_eq!((c.h, c.m, c.p, c.u), (1, 3, 0, 0));
    }

    #[test]
    fn peripheral_links_are_inessential() {
        let t = standard_triangulation(make_surface(0, 5).unwrap()).unwrap();
        for v in 0..5 {
            assert!(!is_essential(&t, &t.vertex_link(v)));
        }
    }

    #[test]
    fn additivity_on_small_universe() {
        let t = Arc::new(standard_triangulation(make_surface(1, 2).unwrap()).unwrap());
        let u = enumerate_curves(&t, 2, DEFAULT_CURVE_CEILING).unwrap();
        for c in &u.curves {
            let cs = cut_along(&t, &[c.clone()]).unwrap();
            assert_eq!(cs.total_complexity() + 1, t.sig.xi());
            let b: u32 = cs.components.iter().map(|c| c.boundaries()).sum();
            assert_eq!(b, 2);
            assert!(cs.components.iter().all(|c| complexity_of(c) >= 0));
        }
    }

    #[test]
    fn rejects_bad_multicurves() {
        let t = Arc::new(standard_triangulation(make_surface(0, 4).unwrap()).unwrap());
        let u = enumerate_curves(&t, 1, DEFAULT_CURVE_CEILING).unwrap();
        let a = u.curves[0].clone();
        assert_eq!(cut_along(&t, &[a.clone(), a.clone()]).unwrap_err(), CoreError::DuplicateComponent);
        assert_eq!(cut_along(&t, &[a, u.curves[1].clone()]).unwrap_err(), CoreError::NotDisjoint);
    }
}
