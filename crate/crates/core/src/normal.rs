//! Normal coordinates, arc tracing, dual-graph walks and universe enumeration.

use crate::cut::is_essential;
use crate::error::{CoreError, Result};
use crate::surface::{split, IdealTriangulation, UnionFind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::sync::Arc;

pub type Coords = Vec<u32>;

pub const DEFAULT_CURVE_CEILING: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    Parity,
    TriangleInequality { side: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub triangle: usize,
    pub kind: ViolationKind,
}

pub fn side_weights(t: &IdealTriangulation, w: &[u32], tri: usize) -> [u32; 3] {
    [w[t.edge_of(3 * tri)], w[t.edge_of(3 * tri + 1)], w[t.edge_of(3 * tri + 2)]]
}

pub fn validate_multicurve(t: &IdealTriangulation, w: &[u32]) -> Result<Vec<Violation>> {
    if w.len() != t.n_edges() {
        return Err(CoreError::LengthMismatch { expected: t.n_edges(), got: w.len() });
    }
    let mut out = Vec::new();
    for tri in 0..t.n_triangles() {
        let s = side_weights(t, w, tri);
        if (s[0] + s[1] + s[2]) % 2 == 1 {
            out.push(Violation { triangle: tri, kind: ViolationKind::Parity });
        }
        for i in 0..3 {
            if s[i] > s[(i + 1) % 3] + s[(i + 2) % 3] {
                out.push(Violation { triangle: tri, kind: ViolationKind::TriangleInequality { side: i } });
            }
        }
    }
    Ok(out)
}

pub fn is_valid(t: &IdealTriangulation, w: &[u32]) -> bool {
    matches!(validate_multicurve(t, w), Ok(v) if v.is_empty())
}

/// Arc counts at the three corners; corner `k` lies between side `k` and side `k + 1`.
pub fn corner_counts(s: [u32; 3]) -> [u32; 3] {
    let half = |a: u32, b: u32, c: u32| (a + b - c) / 2;
    [half(s[0], s[1], s[2]), half(s[1], s[2], s[0]), half(s[2], s[0], s[1])]
}

/// The normal arc meeting `side` at own position `p`: returns (other side, its own
/// position, corner, depth). Depth 0 is the arc closest to the corner vertex.
#[inline]
pub fn arc_end(s: [u32; 3], c: [u32; 3], side: usize, p: u32) -> (usize, u32, usize, u32) {
    let prev = (side + 2) % 3;
    if p < c[prev] {
        (prev, s[prev] - 1 - p, prev, p)
    } else {
        let d = s[side] - 1 - p;
        ((side + 1) % 3, d, side, d)
    }
}

/// Position on an edge (forward orientation) from a position in a slot's own orientation.
#[inline]
pub fn edge_pos(t: &IdealTriangulation, slot: usize, own: u32, width: u32) -> u32 {
    if t.is_forward(slot) {
        own
    } else {
        width - 1 - own
    }
}

struct Realization<'a> {
    t: &'a IdealTriangulation,
    w: &'a [u32],
    sides: Vec<[u32; 3]>,
    corners: Vec<[u32; 3]>,
    offset: Vec<usize>,
}

impl<'a> Realization<'a> {
    fn new(t: &'a IdealTriangulation, w: &'a [u32]) -> Self {
        let sides: Vec<[u32; 3]> = (0..t.n_triangles()).map(|i| side_weights(t, w, i)).collect();
        let corners = sides.iter().map(|s| corner_counts(*s)).collect();
        let mut offset = Vec::with_capacity(w.len() + 1);
        let mut acc = 0;
        for &x in w {
            offset.push(acc);
            acc += x as usize;
        }
        offset.push(acc);
        Realization { t, w, sides, corners, offset }
    }

    fn point_id(&self, slot: usize, own: u32) -> usize {
        let e = self.t.edge_of(slot);
        self.offset[e] + edge_pos(self.t, slot, own, self.w[e]) as usize
    }

    /// Follows the arc entered through `slot` at `own`; returns the exit slot and exit position.
    fn cross(&self, slot: usize, own: u32) -> (usize, u32) {
        let (tri, side) = split(slot);
        let (s2, p2, _, _) = arc_end(self.sides[tri], self.corners[tri], side, own);
        (3 * tri + s2, p2)
    }

    fn step_over(&self, exit_slot: usize, own: u32) -> (usize, u32) {
        let e = self.t.edge_of(exit_slot);
        (self.t.partner(exit_slot), self.w[e] - 1 - own)
    }
}

/// Component id for every edge point (indexed by edge offset + forward position).
pub(crate) fn point_components(t: &IdealTriangulation, w: &[u32]) -> (Vec<usize>, usize) {
    let r = Realization::new(t, w);
    let total = *r.offset.last().unwrap();
    let mut uf = UnionFind::new(total);
    for tri in 0..t.n_triangles() {
        let s = r.sides[tri];
        let c = r.corners[tri];
        for k in 0..3 {
            for d in 0..c[k] {
                let a = r.point_id(3 * tri + k, s[k] - 1 - d);
                let b = r.point_id(3 * tri + (k + 1) % 3, d);
                uf.union(a, b);
            }
        }
    }
    let mut labels = HashMap::new();
    let mut comp = vec![0; total];
    for (p, slot) in comp.iter_mut().enumerate() {
        let root = uf.find(p);
        let next = labels.len();
        *slot = *labels.entry(root).or_insert(next);
    }
    (comp, labels.len())
}

/// Connected components of the realised multicurve with multiplicities, sorted by coordinates.
pub fn components_of(t: &IdealTriangulation, w: &[u32]) -> Vec<(Coords, u32)> {
    let (comp, n) = point_components(t, w);
    let mut per: Vec<Coords> = vec![vec![0; w.len()]; n];
    let mut e = 0;
    let mut acc = 0usize;
    for (p, &c) in comp.iter().enumerate() {
        while p >= acc + w[e] as usize {
            acc += w[e] as usize;
            e += 1;
        }
        per[c][e] += 1;
    }
    let mut grouped: HashMap<Coords, u32> = HashMap::new();
    for v in per {
        *grouped.entry(v).or_insert(0) += 1;
    }
    let mut out: Vec<_> = grouped.into_iter().collect();
    out.sort();
    out
}

/// True when `w` realises a single connected curve with multiplicity one.
pub fn is_connected_curve(t: &IdealTriangulation, w: &[u32]) -> bool {
    if w.iter().all(|&x| x == 0) {
        return false;
    }
    point_components(t, w).1 == 1
}

/// Pairwise disjointness of a list of distinct curves via the components of their sum.
pub fn realise_disjointly(t: &IdealTriangulation, curves: &[&[u32]]) -> bool {
    let mut sum = vec![0u32; t.n_edges()];
    for c in curves {
        for (s, &x) in sum.iter_mut().zip(c.iter()) {
            *s += x;
        }
    }
    let comps = components_of(t, &sum);
    if comps.len() != curves.len() || comps.iter().any(|(_, m)| *m != 1) {
        return false;
    }
    let mut want: Vec<&[u32]> = curves.to_vec();
    want.sort();
    comps.iter().zip(want).all(|((c, _), w)| c.as_slice() == w)
}

pub fn add(a: &[u32], b: &[u32]) -> Coords {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// First point of a curve: lowest weighted edge, forward position 0, entered through the
/// forward slot.
pub fn start_slot(t: &IdealTriangulation, w: &[u32]) -> Option<usize> {
    let e = w.iter().position(|&x| x > 0)?;
    Some(t.edge_slots(e).0)
}

/// One step of a traced curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub triangle: usize,
    pub entry_slot: usize,
    pub entry_own: u32,
    pub exit_slot: usize,
    pub exit_own: u32,
}

/// Traces the component of `w` through the point at edge position `edge_pos0` of edge `e`,
/// entering the triangle of the forward slot.
pub fn trace_from(t: &IdealTriangulation, w: &[u32], e: usize, pos: u32) -> Vec<Step> {
    let r = Realization::new(t, w);
    let slot0 = t.edge_slots(e).0;
    let (mut slot, mut own) = (slot0, pos);
    let mut steps = Vec::new();
    loop {
        let (xs, xp) = r.cross(slot, own);
        steps.push(Step { triangle: slot / 3, entry_slot: slot, entry_own: own, exit_slot: xs, exit_own: xp });
        let (ns, np) = r.step_over(xs, xp);
        if ns == slot0 && np == pos {
            break;
        }
        slot = ns;
        own = np;
    }
    steps
}

/// Canonical traversal of a connected curve as a cyclic sequence of exit slots.
pub fn trace_walk(t: &IdealTriangulation, w: &[u32]) -> Vec<usize> {
    match w.iter().position(|&x| x > 0) {
        None => Vec::new(),
        Some(e) => trace_from(t, w, e, 0).iter().map(|s| s.exit_slot).collect(),
    }
}

/// Free cyclic reduction of a closed dual-graph walk.
pub fn reduce_walk(t: &IdealTriangulation, walk: &[usize]) -> Vec<usize> {
    let mut st: Vec<usize> = Vec::with_capacity(walk.len());
    for &s in walk {
        if let Some(&top) = st.last() {
            if t.partner(top) == s {
                st.pop();
                continue;
            }
        }
        st.push(s);
    }
    let (mut i, mut j) = (0usize, st.len());
    while j - i >= 2 && t.partner(st[j - 1]) == st[i] {
        i += 1;
        j -= 1;
    }
    st[i..j].to_vec()
}

pub fn walk_counts(t: &IdealTriangulation, walk: &[usize]) -> Coords {
    let mut w = vec![0; t.n_edges()];
    for &s in walk {
        w[t.edge_of(s)] += 1;
    }
    w
}

pub fn reverse_walk(t: &IdealTriangulation, walk: &[usize]) -> Vec<usize> {
    walk.iter().rev().map(|&s| t.partner(s)).collect()
}

fn cyclic_rotation_of(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|r| (0..a.len()).all(|i| a[(i + r) % a.len()] == b[i]))
}

/// Equality of closed walks up to rotation and reversal.
pub fn same_cycle(t: &IdealTriangulation, a: &[usize], b: &[usize]) -> bool {
    cyclic_rotation_of(a, b) || cyclic_rotation_of(&reverse_walk(t, a), b)
}

/// Reduces a closed walk and, when its free homotopy class contains a simple essential
/// curve, returns that curve's coordinates.
pub fn curve_from_walk(t: &IdealTriangulation, walk: &[usize]) -> Option<Coords> {
    let red = reduce_walk(t, walk);
    if red.is_empty() {
        return None;
    }
    let w = walk_counts(t, &red);
    if !is_valid(t, &w) || !is_connected_curve(t, &w) {
        return None;
    }
    if !same_cycle(t, &trace_walk(t, &w), &red) {
        return None;
    }
    if !is_essential(t, &w) {
        return None;
    }
    Some(w)
}

/// Dual walk around vertex `v` (counter-clockwise), starting at corner `(tri, k)`.
pub fn vertex_loop(t: &IdealTriangulation, tri: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = (tri, k);
    loop {
        out.push(3 * cur.0 + cur.1);
        cur = t.rotate_ccw(cur.0, cur.1);
        if cur == (tri, k) {
            break;
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct CurveUniverse {
    pub tri: Arc<IdealTriangulation>,
    pub max_weight: u32,
    pub curves: Vec<Coords>,
    index: HashMap<Coords, usize>,
}

impl CurveUniverse {
    pub fn from_curves(tri: Arc<IdealTriangulation>, max_weight: u32, mut curves: Vec<Coords>) -> Self {
        curves.sort();
        curves.dedup();
        let index = curves.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        CurveUniverse { tri, max_weight, curves, index }
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn index_of(&self, c: &[u32]) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.curves[i]
    }

    /// Hex SHA-256 over the triangulation fingerprint, weight bound and ordered curves.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.tri.fingerprint().as_bytes());
        h.update(self.max_weight.to_le_bytes());
        for c in &self.curves {
            for x in c {
                h.update(x.to_le_bytes());
            }
            h.update([0xff]);
        }
        hex::encode(h.finalize())
    }
}

/// All essential curves with every weight at most `max_weight`, in lexicographic order.
pub fn enumerate_curves(t: &Arc<IdealTriangulation>, max_weight: u32, ceiling: usize) -> Result<CurveUniverse> {
    if max_weight == 0 {
        return Err(CoreError::Malformed("max weight must be at least 1".into()));
    }
    let tri: &IdealTriangulation = t;
    let ne = tri.n_edges();
    // Each triangle is checked once its highest edge is assigned.
    let mut checks: Vec<Vec<[usize; 3]>> = vec![Vec::new(); ne];
    for k in 0..tri.n_triangles() {
        let es = [tri.edge_of(3 * k), tri.edge_of(3 * k + 1), tri.edge_of(3 * k + 2)];
        checks[*es.iter().max().unwrap()].push(es);
    }
    let found = std::sync::atomic::AtomicUsize::new(0);
    let roots: Vec<u32> = (0..=max_weight).collect();
    let parts: Vec<Result<Vec<Coords>>> = roots
        .par_iter()
        .map(|&first| {
            let mut w = vec![0u32; ne];
            w[0] = first;
            let mut out = Vec::new();
            if !checks[0].iter().all(|&es| triangle_ok(&w, es)) {
                return Ok(out);
            }
            dfs(tri, &checks, max_weight, 1, &mut w, &mut out, &found, ceiling)?;
            Ok(out)
        })
        .collect();
    let mut curves = Vec::new();
    for p in parts {
        curves.extend(p?);
    }
    Ok(CurveUniverse::from_curves(t.clone(), max_weight, curves))
}

fn triangle_ok(w: &[u32], [a, b, c]: [usize; 3]) -> bool {
    let (x, y, z) = (w[a], w[b], w[c]);
    (x + y + z) % 2 == 0 && x <= y + z && y <= x + z && z <= x + y
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    tri: &IdealTriangulation,
    checks: &[Vec<[usize; 3]>],
    max_w: u32,
    e: usize,
    w: &mut Vec<u32>,
    out: &mut Vec<Coords>,
    found: &std::sync::atomic::AtomicUsize,
    ceiling: usize,
) -> Result<()> {
    if e == w.len() {
        if is_connected_curve(tri, w) && is_essential(tri, w) {
            let n = found.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            if n > ceiling {
                return Err(CoreError::BudgetExceeded { what: "curve", limit: ceiling });
            }
            out.push(w.clone());
        }
        return Ok(());
    }
    for v in 0..=max_w {
        w[e] = v;
        if checks[e].iter().all(|&es| triangle_ok(w, es)) {
            dfs(tri, checks, max_w, e + 1, w, out, found, ceiling)?;
        }
    }
    w[e] = 0;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_surface, standard_triangulation};

    fn tri(g: i64, n: i64) -> Arc<IdealTriangulation> {
        Arc::new(standard_triangulation(make_surface(g, n).unwrap()).unwrap())
    }

    fn separating_04(t: &IdealTriangulation) -> Coords {
        // Edges meeting exactly one of vertices 0 and 1.
        (0..t.n_edges())
            .map(|e| {
                let (a, b) = t.edge_endpoints(e);
                ((a < 2) != (b < 2)) as u32
            })
            .collect()
    }

    #[test]
    fn validation_examples() {
        let t = tri(0, 4);
        assert!(validate_multicurve(&t, &[0; 6]).unwrap().is_empty());
        let w = separating_04(&t);
        assert_eq!(w.iter().sum::<u32>(), 4);
        for k in 0..4 {
            let mut s = side_weights(&t, &w, k);
            s.sort();
            assert_eq!(s, [0, 1, 1]);
        }
        assert!(validate_multicurve(&t, &w).unwrap().is_empty());
        let mut single = vec![0; 6];
        single[2] = 1;
        let v = validate_multicurve(&t, &single).unwrap();
        assert_eq!(v.iter().filter(|x| x.kind == ViolationKind::Parity).count(), 2);
        assert_eq!(validate_multicurve(&t, &[0; 5]).unwrap_err().code(), "LENGTH_MISMATCH");
    }

    #[test]
    fn components_examples() {
        let t = tri(0, 4);
        assert!(components_of(&t, &[0; 6]).is_empty());
        let w = separating_04(&t);
        assert_eq!(components_of(&t, &w), vec![(w.clone(), 1)]);
        let doubled: Coords = w.iter().map(|x| 2 * x).collect();
        assert_eq!(components_of(&t, &doubled), vec![(w, 2)]);
    }

    #[test]
    fn walks_reproduce_coordinates() {
        let t = tri(1, 2);
        let u = enumerate_curves(&t, 2, DEFAULT_CURVE_CEILING).unwrap();
        assert!(!u.is_empty());
        for c in &u.curves {
            let walk = trace_walk(&t, c);
            assert_eq!(walk_counts(&t, &walk), *c);
            assert_eq!(reduce_walk(&t, &walk), walk);
            assert_eq!(curve_from_walk(&t, &walk).as_ref(), Some(c));
        }
    }

    #[test]
    fn vertex_loops_are_links() {
        let t = tri(0, 5);
        for v in 0..t.n_vertices() {
            let (a, k) = t.vertex_corners(v)[0];
            let walk = vertex_loop(&t, a, k);
            assert_eq!(walk_counts(&t, &walk), t.vertex_link(v));
            assert!(curve_from_walk(&t, &walk).is_none());
        }
    }

    #[test]
    fn four_punctured_sphere_weight_one() {
        let t = tri(0, 4);
        let u = enumerate_curves(&t, 1, DEFAULT_CURVE_CEILING).unwrap();
        let mut oracle = Vec::new();
        for mask in 0u32..64 {
            let w: Coords = (0..6).map(|i| (mask >> i) & 1).collect();
            if is_valid(&t, &w) && is_connected_curve(&t, &w) && !(0..4).any(|v| t.vertex_link(v) == w) {
                oracle.push(w);
            }
        }
        oracle.sort();
        assert_eq!(u.curves, oracle);
        assert_eq!(u.len(), 3);
    }

    #[test]
    fn enumeration_monotone_and_deterministic() {
        let t = tri(0, 5);
        let a = enumerate_curves(&t, 2, DEFAULT_CURVE_CEILING).unwrap();
        let b = enumerate_curves(&t, 3, DEFAULT_CURVE_CEILING).unwrap();
        assert!(a.curves.iter().all(|c| b.index_of(c).is_some()));
        let c = enumerate_curves(&t, 3, DEFAULT_CURVE_CEILING).unwrap();
        assert_eq!(b.curves, c.curves);
        assert_eq!(b.fingerprint(), c.fingerprint());
    }

    #[test]
    fn ceiling_is_reported() {
        let t = tri(0, 5);
        let err = enumerate_curves(&t, 3, 5).unwrap_err();
        assert_eq!(err.code(), "BUDGET_EXCEEDED");
    }
}
