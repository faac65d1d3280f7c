//! Two multicurves realised together, bigon reduction, and the complement faces.
//!
//! Each multicurve is normal on its own, so its arcs are determined by its coordinates.
//! What remains free is how the points of the two curves interleave along every edge.
//! Inside a triangle two arcs cross exactly when their endpoints alternate around the
//! boundary, so an interleaving fixes the crossing set. Empty bigons are removed by
//! swapping adjacent points along the strip between their two corners; each removal
//! drops two crossings, and a bigon-free overlay realises the intersection number.

use crate::normal::{
    arc_end, corner_counts, edge_pos, point_components, reverse_walk, side_weights, trace_from, vertex_loop, Coords,
    Step,
};
use crate::surface::{split, IdealTriangulation};
use std::collections::HashMap;

/// Deterministic starting interleavings. `InnerA` is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialOrder {
    /// On each edge, read along its forward slot: A arcs of the start corner, B arcs of the
    /// start corner, B arcs of the end corner, A arcs of the end corner.
    InnerA,
    /// Same with the roles of A and B exchanged.
    InnerB,
    /// All A points, then all B points.
    Block,
    /// A and B points alternate while both last.
    Alternate,
}

pub const ALL_ORDERS: [InitialOrder; 4] =
    [InitialOrder::InnerA, InitialOrder::InnerB, InitialOrder::Block, InitialOrder::Alternate];

#[derive(Debug, Clone, Copy)]
struct Chord {
    curve: usize,
    corner: usize,
    depth: u32,
    ends: [u32; 2],
}

#[derive(Debug, Clone)]
pub struct Overlay<'a> {
    pub t: &'a IdealTriangulation,
    pub w: [Coords; 2],
    /// Per edge, merged sequence of (curve, index along the edge in that curve's order).
    tags: Vec<Vec<(usize, u32)>>,
    /// Per curve, per edge, merged index of each point.
    pos: [Vec<Vec<u32>>; 2],
    pub removed_bigons: usize,
}

impl<'a> Overlay<'a> {
    pub fn new(t: &'a IdealTriangulation, a: &[u32], b: &[u32], order: InitialOrder) -> Self {
        let w = [a.to_vec(), b.to_vec()];
        let mut tags = Vec::with_capacity(t.n_edges());
        for e in 0..t.n_edges() {
            let (fs, _) = t.edge_slots(e);
            let (tri, i) = split(fs);
            let start_count = |c: usize| corner_counts(side_weights(t, &w[c], tri))[(i + 2) % 3];
            let (wa, wb) = (w[0][e], w[1][e]);
            let (sa, sb) = (start_count(0), start_count(1));
            let run = |c: usize, lo: u32, hi: u32| (lo..hi).map(move |p| (c, p));
            let seq: Vec<(usize, u32)> = match order {
                InitialOrder::InnerA => run(0, 0, sa).chain(run(1, 0, sb)).chain(run(1, sb, wb)).chain(run(0, sa, wa)).collect(),
                InitialOrder::InnerB => run(1, 0, sb).chain(run(0, 0, sa)).chain(run(0, sa, wa)).chain(run(1, sb, wb)).collect(),
                InitialOrder::Block => run(0, 0, wa).chain(run(1, 0, wb)).collect(),
                InitialOrder::Alternate => {
                    let mut v = Vec::new();
                    let (mut x, mut y) = (0, 0);
                    while x < wa || y < wb {
                        if x < wa {
                            v.push((0, x));
                            x += 1;
                        }
                        if y < wb {
                            v.push((1, y));
                            y += 1;
                        }
                    }
                    v
                }
            };
            tags.push(seq);
        }
        let mut ov = Overlay { t, w, tags, pos: [Vec::new(), Vec::new()], removed_bigons: 0 };
        ov.rebuild_positions();
        ov
    }

    /// Bigon-free overlay from the default interleaving.
    pub fn minimal(t: &'a IdealTriangulation, a: &[u32], b: &[u32]) -> Self {
        Self::minimal_from(t, a, b, InitialOrder::InnerA)
    }

    pub fn minimal_from(t: &'a IdealTriangulation, a: &[u32], b: &[u32], order: InitialOrder) -> Self {
        let mut ov = Self::new(t, a, b, order);
        ov.reduce();
        ov
    }

    fn rebuild_positions(&mut self) {
        for c in 0..2 {
            self.pos[c] = self.w[c].iter().map(|&x| vec![0; x as usize]).collect();
        }
        for (e, seq) in self.tags.iter().enumerate() {
            for (m, &(c, p)) in seq.iter().enumerate() {
                self.pos[c][e][p as usize] = m as u32;
            }
        }
    }

    fn merged_len(&self, e: usize) -> u32 {
        self.tags[e].len() as u32
    }

    /// Merged position of a curve point measured along `slot`'s own direction.
    fn own_merged(&self, c: usize, slot: usize, own: u32) -> u32 {
        let e = self.t.edge_of(slot);
        let m = self.pos[c][e][edge_pos(self.t, slot, own, self.w[c][e]) as usize];
        if self.t.is_forward(slot) {
            m
        } else {
            self.merged_len(e) - 1 - m
        }
    }

    fn side_offsets(&self, tri: usize) -> [u32; 3] {
        let m0 = self.merged_len(self.t.edge_of(3 * tri));
        let m1 = self.merged_len(self.t.edge_of(3 * tri + 1));
        [0, m0, m0 + m1]
    }

    fn perimeter(&self, tri: usize) -> u32 {
        (0..3).map(|i| self.merged_len(self.t.edge_of(3 * tri + i))).sum()
    }

    fn coord(&self, c: usize, tri: usize, side: usize, own: u32) -> u32 {
        self.side_offsets(tri)[side] + self.own_merged(c, 3 * tri + side, own)
    }

    fn chords(&self, tri: usize, c: usize) -> Vec<Chord> {
        let s = side_weights(self.t, &self.w[c], tri);
        let cc = corner_counts(s);
        let mut out = Vec::new();
        for k in 0..3 {
            for d in 0..cc[k] {
                let e0 = self.coord(c, tri, k, s[k] - 1 - d);
                let e1 = self.coord(c, tri, (k + 1) % 3, d);
                out.push(Chord { curve: c, corner: k, depth: d, ends: [e0, e1] });
            }
        }
        out
    }

    pub fn crossings(&self) -> usize {
        (0..self.t.n_triangles())
            .map(|tri| {
                let (a, b) = (self.chords(tri, 0), self.chords(tri, 1));
                a.iter().map(|x| b.iter().filter(|y| interleave(x.ends, y.ends)).count()).sum::<usize>()
            })
            .sum()
    }

    /// Removes empty bigons until none remain.
    pub fn reduce(&mut self) {
        while let Some(swaps) = self.find_bigon() {
            for (e, m) in swaps {
                let seq = &mut self.tags[e];
                seq.swap(m as usize, m as usize + 1);
                for k in [m as usize, m as usize + 1] {
                    let (c, p) = seq[k];
                    self.pos[c][e][p as usize] = k as u32;
                }
            }
            self.removed_bigons += 1;
        }
    }

    /// Adjacent swaps (edge, lower merged index) that cancel one empty bigon.
    fn find_bigon(&self) -> Option<Vec<(usize, u32)>> {
        for tri in 0..self.t.n_triangles() {
            let (ach, bch) = (self.chords(tri, 0), self.chords(tri, 1));
            for x in &ach {
                for y in &bch {
                    if !interleave(x.ends, y.ends) {
                        continue;
                    }
                    for ea in 0..2 {
                        for eb in 0..2 {
                            if let Some(s) = self.strip_from(tri, x, ea, y, eb) {
                                return Some(s);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    fn chord_side_own(&self, tri: usize, ch: &Chord, end: usize) -> (usize, u32) {
        let s = side_weights(self.t, &self.w[ch.curve], tri);
        if end == 0 {
            (ch.corner, s[ch.corner] - 1 - ch.depth)
        } else {
            ((ch.corner + 1) % 3, ch.depth)
        }
    }

    fn strip_from(&self, tri: usize, x: &Chord, ea: usize, y: &Chord, eb: usize) -> Option<Vec<(usize, u32)>> {
        let (sa, mut pa) = self.chord_side_own(tri, x, ea);
        let (sb, mut pb) = self.chord_side_own(tri, y, eb);
        if sa != sb {
            return None;
        }
        let mut slot = 3 * tri + sa;
        let limit: u32 = self.w[0].iter().sum::<u32>() + 1;
        let mut swaps = Vec::new();
        for _ in 0..limit {
            let ma = self.own_merged(0, slot, pa);
            let mb = self.own_merged(1, slot, pb);
            if ma.abs_diff(mb) != 1 {
                return None;
            }
            let e = self.t.edge_of(slot);
            let (la, lb) = (self.pos[0][e][edge_pos(self.t, slot, pa, self.w[0][e]) as usize],
                self.pos[1][e][edge_pos(self.t, slot, pb, self.w[1][e]) as usize]);
            swaps.push((e, la.min(lb)));
            let next = self.t.partner(slot);
            let (t2, i2) = split(next);
            let qa = self.w[0][e] - 1 - pa;
            let qb = self.w[1][e] - 1 - pb;
            let sa2 = side_weights(self.t, &self.w[0], t2);
            let sb2 = side_weights(self.t, &self.w[1], t2);
            let (ja, ra, ka, da) = arc_end(sa2, corner_counts(sa2), i2, qa);
            let (jb, rb, kb, db) = arc_end(sb2, corner_counts(sb2), i2, qb);
            let ca = [self.coord(0, t2, i2, qa), self.coord(0, t2, ja, ra)];
            let cb = [self.coord(1, t2, i2, qb), self.coord(1, t2, jb, rb)];
            if interleave(ca, cb) {
                let same_corner = t2 == tri && ka == x.corner && da == x.depth && kb == y.corner && db == y.depth;
                return if same_corner { None } else { Some(swaps) };
            }
            if ja != jb {
                return None;
            }
            slot = 3 * t2 + ja;
            pa = ra;
            pb = rb;
        }
        None
    }

    /// Full combinatorial arrangement of the two curves (for face walks and arcs).
    pub fn arrangement(&self) -> Arrangement {
        Arrangement::build(self)
    }
}

fn interleave(x: [u32; 2], y: [u32; 2]) -> bool {
    let (lo, hi) = if x[0] < x[1] { (x[0], x[1]) } else { (x[1], x[0]) };
    let inside = |v: u32| lo < v && v < hi;
    inside(y[0]) != inside(y[1])
}

pub fn intersection_number(t: &IdealTriangulation, a: &[u32], b: &[u32]) -> usize {
    Overlay::minimal(t, a, b).crossings()
}

/// One connected component of one of the two curves, traced in its own coordinates.
#[derive(Debug, Clone)]
pub struct Strand {
    pub curve: usize,
    pub steps: Vec<Step>,
    /// Crossings met along the strand, in order: (crossing id, step index).
    pub crossings: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy)]
pub struct Crossing {
    pub triangle: usize,
    /// (strand, index into that strand's crossing list) for curve A and curve B.
    pub on: [(usize, usize); 2],
    /// Whether B's forward direction points to the left of A's forward direction.
    pub b_left: bool,
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    pub strands: Vec<Strand>,
    pub crossings: Vec<Crossing>,
}

fn trace_strands(t: &IdealTriangulation, w: &[u32], curve: usize) -> Vec<Strand> {
    let (comp, n) = point_components(t, w);
    let mut first: Vec<Option<(usize, u32)>> = vec![None; n];
    let mut idx = 0;
    for (e, &x) in w.iter().enumerate() {
        for p in 0..x {
            if first[comp[idx]].is_none() {
                first[comp[idx]] = Some((e, p));
            }
            idx += 1;
        }
    }
    let mut starts: Vec<(usize, u32)> = first.into_iter().map(|f| f.unwrap()).collect();
    starts.sort();
    starts
        .into_iter()
        .map(|(e, p)| Strand { curve, steps: trace_from(t, w, e, p), crossings: Vec::new() })
        .collect()
}

impl Arrangement {
    fn build(ov: &Overlay) -> Self {
        let t = ov.t;
        let mut strands = trace_strands(t, &ov.w[0], 0);
        let a_count = strands.len();
        strands.extend(trace_strands(t, &ov.w[1], 1));
        // Locate every chord's strand and step.
        let mut owner: HashMap<(usize, usize, usize, u32), (usize, usize)> = HashMap::new();
        for (si, st) in strands.iter().enumerate() {
            for (k, step) in st.steps.iter().enumerate() {
                let s = side_weights(t, &ov.w[st.curve], step.triangle);
                let (_, _, corner, depth) = arc_end(s, corner_counts(s), step.entry_slot % 3, step.entry_own);
                owner.insert((st.curve, step.triangle, corner, depth), (si, k));
            }
        }
        let mut crossings = Vec::new();
        // Per (strand, step): list of (crossing id, sort key along the chord).
        let mut along: HashMap<(usize, usize), Vec<(u32, usize)>> = HashMap::new();
        for tri in 0..t.n_triangles() {
            let l = ov.perimeter(tri);
            let (ach, bch) = (ov.chords(tri, 0), ov.chords(tri, 1));
            for x in &ach {
                for y in &bch {
                    if !interleave(x.ends, y.ends) {
                        continue;
                    }
                    let (sa, ka) = owner[&(0, tri, x.corner, x.depth)];
                    let (sb, kb) = owner[&(1, tri, y.corner, y.depth)];
                    let da = directed(ov, 0, &strands[sa].steps[ka]);
                    let db = directed(ov, 1, &strands[sb].steps[kb]);
                    let id = crossings.len();
                    crossings.push(Crossing { triangle: tri, on: [(sa, 0), (sb, 0)], b_left: !in_arc(db[1], da[0], da[1], l) });
                    let key_a = [db[0], db[1]].into_iter().find(|&v| in_arc(v, da[0], da[1], l)).unwrap();
                    let key_b = [da[0], da[1]].into_iter().find(|&v| in_arc(v, db[0], db[1], l)).unwrap();
                    along.entry((sa, ka)).or_default().push(((key_a + l - da[0]) % l, id));
                    along.entry((sb, kb)).or_default().push(((key_b + l - db[0]) % l, id));
                }
            }
        }
        for (si, st) in strands.iter_mut().enumerate() {
            for k in 0..st.steps.len() {
                if let Some(list) = along.get_mut(&(si, k)) {
                    list.sort();
                    for &(_, id) in list.iter() {
                        let slot = if si < a_count { 0 } else { 1 };
                        crossings[id].on[slot] = (si, st.crossings.len());
                        st.crossings.push((id, k));
                    }
                }
            }
        }
        Arrangement { strands, crossings }
    }

    /// Exit slots walked along strand `s` from its `i`-th crossing to its `j`-th crossing,
    /// forwards or backwards. Equal indices give the full loop.
    pub fn strand_walk(&self, t: &IdealTriangulation, s: usize, i: usize, j: usize, forward: bool) -> Vec<usize> {
        let st = &self.strands[s];
        let n = st.steps.len();
        let (from, to) = (st.crossings[i].1, st.crossings[j].1);
        let mut out = Vec::new();
        if forward {
            let wraps = j <= i;
            let mut k = from;
            if wraps || from != to {
                loop {
                    out.push(st.steps[k].exit_slot);
                    k = (k + 1) % n;
                    if k == to {
                        break;
                    }
                }
            }
        } else {
            out = reverse_walk(t, &self.strand_walk(t, s, j, i, true));
        }
        out
    }

    /// Full loop of strand `s` as exit slots, starting at the triangle of step `k`.
    pub fn strand_loop(&self, t: &IdealTriangulation, s: usize, k: usize, forward: bool) -> Vec<usize> {
        let st = &self.strands[s];
        let n = st.steps.len();
        let fwd: Vec<usize> = (0..n).map(|i| st.steps[(k + i) % n].exit_slot).collect();
        if forward {
            fwd
        } else {
            reverse_walk(t, &fwd)
        }
    }

    /// Boundary walks of the complementary faces, each as a cyclic sequence of exit slots.
    /// Requires every strand to meet at least one crossing.
    pub fn face_walks(&self, t: &IdealTriangulation) -> Option<Vec<Vec<usize>>> {
        if self.crossings.is_empty() || self.strands.iter().any(|s| s.crossings.is_empty()) {
            return None;
        }
        // Dart (strand, segment index, forward). Segment i runs from crossing i to i+1.
        let mut seg_base = Vec::new();
        let mut total = 0;
        for s in &self.strands {
            seg_base.push(total);
            total += s.crossings.len();
        }
        let dart = |s: usize, i: usize, fwd: bool| 2 * (seg_base[s] + i) + (!fwd) as usize;
        let decode = |d: usize| {
            let seg = d / 2;
            let s = seg_base.iter().rposition(|&b| b <= seg).unwrap();
            (s, seg - seg_base[s], d % 2 == 0)
        };
        // Outgoing darts at each crossing, counter-clockwise: A+, B_L, A-, B_R.
        let mut rot: Vec<[usize; 4]> = Vec::with_capacity(self.crossings.len());
        for c in &self.crossings {
            let (sa, ia) = c.on[0];
            let (sb, ib) = c.on[1];
            let na = self.strands[sa].crossings.len();
            let nb = self.strands[sb].crossings.len();
            let a_plus = dart(sa, ia, true);
            let a_minus = dart(sa, (ia + na - 1) % na, false);
            let b_plus = dart(sb, ib, true);
            let b_minus = dart(sb, (ib + nb - 1) % nb, false);
            let (bl, br) = if c.b_left { (b_plus, b_minus) } else { (b_minus, b_plus) };
            rot.push([a_plus, bl, a_minus, br]);
        }
        let end_crossing = |d: usize| {
            let (s, i, fwd) = decode(d);
            let n = self.strands[s].crossings.len();
            if fwd {
                self.strands[s].crossings[(i + 1) % n].0
            } else {
                self.strands[s].crossings[i].0
            }
        };
        let n_darts = 2 * total;
        let mut used = vec![false; n_darts];
        let mut faces = Vec::new();
        for d0 in 0..n_darts {
            if used[d0] {
                continue;
            }
            let mut walk = Vec::new();
            let mut d = d0;
            while !used[d] {
                used[d] = true;
                let (s, i, fwd) = decode(d);
                let n = self.strands[s].crossings.len();
                let seg = self.strand_walk(t, s, i, (i + 1) % n, true);
                walk.extend(if fwd { seg } else { reverse_walk(t, &seg) });
                let x = end_crossing(d);
                let rev = d ^ 1;
                let r = &rot[x];
                let p = r.iter().position(|&q| q == rev).expect("reverse dart at crossing");
                d = r[(p + 3) % 4];
            }
            faces.push(walk);
        }
        Some(faces)
    }
}

/// Chord coordinates of a traced step in traversal order (entry, exit).
fn directed(ov: &Overlay, curve: usize, step: &Step) -> [u32; 2] {
    let tri = step.triangle;
    [ov.coord(curve, tri, step.entry_slot % 3, step.entry_own), ov.coord(curve, tri, step.exit_slot % 3, step.exit_own)]
}

fn in_arc(x: u32, u: u32, v: u32, l: u32) -> bool {
    let dx = (x + l - u) % l;
    let dv = (v + l - u) % l;
    dx != 0 && dx < dv
}

/// Classification of one complementary face boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceKind {
    Disk,
    Puncture(usize),
    Essential(Vec<usize>),
}

pub fn classify_walk(t: &IdealTriangulation, walk: &[usize]) -> FaceKind {
    let red = crate::normal::reduce_walk(t, walk);
    if red.is_empty() {
        return FaceKind::Disk;
    }
    for v in 0..t.n_vertices() {
        let (tri, k) = t.vertex_corners(v)[0];
        let link = vertex_loop(t, tri, k);
        if crate::normal::same_cycle(t, &link, &red) {
            return FaceKind::Puncture(v);
        }
    }
    FaceKind::Essential(red)
}

#[derive(Debug, Clone, Default)]
pub struct FaceCensus {
    pub crossings: usize,
    pub disks: usize,
    pub punctured: usize,
    /// Reduced boundary walks that are neither trivial nor peripheral.
    pub essential: Vec<Vec<usize>>,
}

/// Faces of the bigon-free overlay; `None` when the curves can be made disjoint.
pub fn face_census(t: &IdealTriangulation, a: &[u32], b: &[u32]) -> Option<FaceCensus> {
    let ov = Overlay::minimal(t, a, b);
    let crossings = ov.crossings();
    if crossings == 0 {
        return None;
    }
    let walks = ov.arrangement().face_walks(t)?;
    let mut out = FaceCensus { crossings, ..Default::default() };
    for w in walks {
        match classify_walk(t, &w) {
            FaceKind::Disk => out.disks += 1,
            FaceKind::Puncture(_) => out.punctured += 1,
            FaceKind::Essential(r) => out.essential.push(r),
        }
    }
    Some(out)
}

/// Whether every complementary face is a disk or a once-punctured disk.
pub fn fills(t: &IdealTriangulation, a: &[u32], b: &[u32]) -> bool {
    if a == b {
        return false;
    }
    match face_census(t, a, b) {
        None => false,
        Some(c) => {
            let filled = c.essential.is_empty();
            if filled {
                let faces = (c.disks + c.punctured) as i64;
                let chi = c.crossings as i64 - 2 * c.crossings as i64 + faces;
                assert_eq!(chi, 2 - 2 * t.sig.genus as i64, "face count contradicts Euler characteristic");
                assert_eq!(c.punctured, t.n_vertices(), "every puncture lies in exactly one face");
            }
            filled
        }
    }
}

/// A curve disjoint from both `a` and `b`, taken from an essential face boundary.
/// `None` when the pair fills or is disjoint.
pub fn common_neighbor(t: &IdealTriangulation, a: &[u32], b: &[u32]) -> Option<Coords> {
    let c = face_census(t, a, b)?;
    let mut found: Vec<Coords> = c
        .essential
        .iter()
        .filter_map(|w| crate::normal::curve_from_walk(t, w))
        .filter(|x| x.as_slice() != a && x.as_slice() != b)
        .filter(|x| crate::normal::realise_disjointly(t, &[x, a]) && crate::normal::realise_disjointly(t, &[x, b]))
        .collect();
    found.sort();
    found.into_iter().next()
}

/// Filling inside a subsurface whose boundary curves are `boundary`: every face boundary is
/// trivial, peripheral, or parallel to a boundary curve.
pub fn fills_within(t: &IdealTriangulation, a: &[u32], b: &[u32], boundary: &[Coords]) -> bool {
    if a == b {
        return false;
    }
    let Some(c) = face_census(t, a, b) else { return false };
    let walks: Vec<Vec<usize>> = boundary.iter().map(|x| crate::normal::trace_walk(t, x)).collect();
    c.essential.iter().all(|w| walks.iter().any(|x| crate::normal::same_cycle(t, x, w)))
}
