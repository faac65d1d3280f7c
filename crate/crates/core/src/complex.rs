//! Curve graphs over a finite set of curves: spheres, distance estimates, component
//! labels, mod-2 first homology of the flag 2-complex and bounded disk filling.
//!
//! A graph lives in a subsurface (the whole surface by default). In a subsurface of
//! complexity one the curve graph is the Farey graph: vertices are joined when they meet
//! minimally, once on a one-holed torus and twice on a four-holed sphere.

use crate::classify::{c0_edge, is_essentially_nonseparating, Classifier, Subsurface};
use crate::error::{CoreError, Result};
use crate::intersection::{face_census, intersection_number};
use crate::normal::{curve_from_walk, realise_disjointly, Coords};
use crate::surface::{IdealTriangulation, UnionFind};
use crate::surgery::{verify_disk, DiskConstraints, LabeledDisk};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeRule {
    Disjoint,
    C0,
    Good,
}

impl std::str::FromStr for EdgeRule {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disjoint" => Ok(EdgeRule::Disjoint),
            "c0" => Ok(EdgeRule::C0),
            "good" => Ok(EdgeRule::Good),
            other => Err(CoreError::Malformed(format!("unknown edge rule {other:?}"))),
        }
    }
}

impl std::fmt::Display for EdgeRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EdgeRule::Disjoint => "disjoint",
            EdgeRule::C0 => "c0",
            EdgeRule::Good => "good",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CurveGraph {
    pub tri: Arc<IdealTriangulation>,
    pub subsurface: Subsurface,
    pub rule: EdgeRule,
    pub curves: Vec<Coords>,
    pub adj: Vec<Vec<usize>>,
    /// Complexity of the subsurface.
    pub xi: i64,
    /// Intersection number of two adjacent curves in the complexity-one case.
    pub farey_min: usize,
    inter: Vec<u32>,
    index: HashMap<Coords, usize>,
}

impl CurveGraph {
    /// Whole-surface graph.
    pub fn build(tri: Arc<IdealTriangulation>, curves: Vec<Coords>, rule: EdgeRule) -> Result<Self> {
        Self::build_in(tri, Subsurface::whole(), curves, rule)
    }

    pub fn build_in(tri: Arc<IdealTriangulation>, v: Subsurface, mut curves: Vec<Coords>, rule: EdgeRule) -> Result<Self> {
        curves.sort();
        curves.dedup();
        let t: &IdealTriangulation = &tri;
        let part = v.split(t, &[], false)?.remove(0);
        let xi = part.xi();
        let farey_min = if part.genus() >= 1 { 1 } else { 2 };
        let n = curves.len();
        let rows: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| if j <= i { 0 } else { intersection_number(t, &curves[i], &curves[j]) as u32 }).collect())
            .collect();
        let mut inter = vec![0u32; n * n];
        for i in 0..n {
            for j in i + 1..n {
                inter[i * n + j] = rows[i][j];
                inter[j * n + i] = rows[i][j];
            }
        }
        let index = curves.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let mut g = CurveGraph { tri: tri.clone(), subsurface: v, rule, curves, adj: vec![Vec::new(); n], xi, farey_min, inter, index };
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| g.joined(i, j)).collect();
        let keep: Vec<bool> = match rule {
            EdgeRule::Disjoint => vec![true; pairs.len()],
            EdgeRule::C0 => {
                let ens: Vec<bool> = (0..n)
                    .into_par_iter()
                    .map(|i| is_essentially_nonseparating(t, &g.curves[i], &g.subsurface).unwrap_or(false))
                    .collect();
                pairs
                    .par_iter()
                    .map(|&(i, j)| {
                        ens[i] && ens[j] && c0_edge(t, &g.curves[i], &g.curves[j], &g.subsurface).unwrap_or(false)
                    })
                    .collect()
            }
            EdgeRule::Good => {
                let cl = Classifier::new(t);
                let good: Vec<bool> = (0..n).into_par_iter().map(|i| cl.is_good(&[g.curves[i].clone()], &g.subsurface)).collect();
                pairs
                    .par_iter()
                    .map(|&(i, j)| good[i] && good[j] && cl.is_good(&[g.curves[i].clone(), g.curves[j].clone()], &g.subsurface))
                    .collect()
            }
        };
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if keep[k] {
                g.adj[i].push(j);
                g.adj[j].push(i);
            }
        }
        for a in &mut g.adj {
            a.sort();
        }
        Ok(g)
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

    pub fn intersection(&self, i: usize, j: usize) -> usize {
        self.inter[i * self.len() + j] as usize
    }

    /// Adjacency in the curve graph of the subsurface, whatever the rule.
    pub fn joined(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let k = self.intersection(i, j);
        if self.xi == 1 {
            k == self.farey_min
        } else {
            k == 0
        }
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Breadth-first distance from `o` to every vertex; `None` when unreachable.
    pub fn layers(&self, o: usize) -> Vec<Option<u32>> {
        let mut d = vec![None; self.len()];
        d[o] = Some(0);
        let mut q = VecDeque::from([o]);
        while let Some(v) = q.pop_front() {
            let dv = d[v].unwrap();
            for &w in &self.adj[v] {
                if d[w].is_none() {
                    d[w] = Some(dv + 1);
                    q.push_back(w);
                }
            }
        }
        d
    }

    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.tri.fingerprint().as_bytes());
        h.update(self.rule.to_string().as_bytes());
        h.update(serde_json::to_vec(&self.subsurface).expect("subsurface serialises"));
        for c in &self.curves {
            for x in c {
                h.update(x.to_le_bytes());
            }
            h.update([0xff]);
        }
        hex::encode(h.finalize())
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph curves {\n");
        for (i, c) in self.curves.iter().enumerate() {
            s.push_str(&format!("  {i} [label=\"{}\"];\n", coords_label(c)));
        }
        for i in 0..self.len() {
            for &j in &self.adj[i] {
                if i < j {
                    s.push_str(&format!("  {i} -- {j};\n"));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

pub fn coords_label(c: &[u32]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereSlice {
    pub origin: usize,
    pub radius: u32,
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

pub fn sphere(g: &CurveGraph, o: usize, r: u32) -> Result<SphereSlice> {
    if o >= g.len() {
        return Err(CoreError::OriginMissing);
    }
    let d = g.layers(o);
    Ok(slice_of(g, o, r, &d, &[r]))
}

/// Induced subgraph on the vertices whose layer is one of `radii`.
pub fn slice_of(g: &CurveGraph, o: usize, r: u32, d: &[Option<u32>], radii: &[u32]) -> SphereSlice {
    let vertices: Vec<usize> = (0..g.len()).filter(|&v| d[v].is_some_and(|x| radii.contains(&x))).collect();
    let set: HashSet<usize> = vertices.iter().copied().collect();
    let mut edges = Vec::new();
    for &v in &vertices {
        for &w in &g.adj[v] {
            if v < w && set.contains(&w) {
                edges.push((v, w));
            }
        }
    }
    SphereSlice { origin: o, radius: r, vertices, edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub lower: u32,
    /// `None` when no path exists inside the graph.
    pub upper: Option<u32>,
    pub exact: bool,
}

impl DistanceEstimate {
    pub fn exact(d: u32) -> Self {
        DistanceEstimate { lower: d, upper: Some(d), exact: true }
    }

    fn bounded(lower: u32, upper: Option<u32>) -> Self {
        let upper = upper.map(|u| u.max(lower));
        DistanceEstimate { lower, upper, exact: upper == Some(lower) }
    }

    /// Distance to the nearer of two sets: minimum of lower and of upper bounds.
    pub fn min(self, other: Self) -> Self {
        let upper = match (self.upper, other.upper) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self::bounded(self.lower.min(other.lower), upper)
    }
}

/// A curve of `v` disjoint from both `a` and `b`, read off the complementary faces.
pub fn common_neighbor_in(t: &IdealTriangulation, a: &[u32], b: &[u32], v: &Subsurface) -> Option<Coords> {
    let census = face_census(t, a, b)?;
    let mut found: Vec<Coords> = census
        .essential
        .iter()
        .filter_map(|w| curve_from_walk(t, w))
        .filter(|c| c.as_slice() != a && c.as_slice() != b)
        .filter(|c| v.contains(t, c))
        .filter(|c| realise_disjointly(t, &[c, a]) && realise_disjointly(t, &[c, b]))
        .collect();
    found.sort();
    found.into_iter().next()
}

/// Distance in the curve graph of the subsurface. Zero, one and two are certified
/// exactly; three is certified as a lower bound by filling; anything else comes from
/// breadth-first search inside the finite graph and is only an upper bound.
pub fn distance_estimate(g: &CurveGraph, x: usize, y: usize) -> DistanceEstimate {
    if x == y {
        return DistanceEstimate::exact(0);
    }
    if g.joined(x, y) {
        return DistanceEstimate::exact(1);
    }
    let bfs = g.layers(x)[y];
    let t: &IdealTriangulation = &g.tri;
    if g.xi == 1 {
        return DistanceEstimate::bounded(2, bfs);
    }
    if common_neighbor_in(t, &g.curves[x], &g.curves[y], &g.subsurface).is_some() {
        return DistanceEstimate::exact(2);
    }
    assert!(bfs.is_none_or(|d| d >= 3), "a filling pair cannot have a common neighbour");
    DistanceEstimate::bounded(3, bfs)
}

/// The bound `2 log2 i + 2`.
pub fn log_bound(i: usize) -> f64 {
    2.0 * (i as f64).log2() + 2.0
}

/// Component label per listed vertex, numbered in order of first appearance.
pub fn connected_components(g: &CurveGraph, vertices: &[usize]) -> Vec<usize> {
    let pos: HashMap<usize, usize> = vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut uf = UnionFind::new(vertices.len());
    for (k, &v) in vertices.iter().enumerate() {
        for w in &g.adj[v] {
            if let Some(&l) = pos.get(w) {
                uf.union(k, l);
            }
        }
    }
    let mut label = HashMap::new();
    (0..vertices.len())
        .map(|k| {
            let r = uf.find(k);
            let next = label.len();
            *label.entry(r).or_insert(next)
        })
        .collect()
}

pub fn component_count(g: &CurveGraph, vertices: &[usize]) -> usize {
    connected_components(g, vertices).into_iter().max().map_or(0, |m| m + 1)
}

/// Edges and triangles of the flag complex on `vertices`.
pub fn flag_complex(g: &CurveGraph, vertices: &[usize]) -> (Vec<(usize, usize)>, Vec<[usize; 3]>) {
    let set: HashSet<usize> = vertices.iter().copied().collect();
    let mut vs: Vec<usize> = vertices.to_vec();
    vs.sort();
    let mut edges = Vec::new();
    let mut tris = Vec::new();
    for &a in &vs {
        let up: Vec<usize> = g.adj[a].iter().copied().filter(|&b| b > a && set.contains(&b)).collect();
        for (k, &b) in up.iter().enumerate() {
            edges.push((a, b));
            for &c in &up[k + 1..] {
                if g.adjacent(b, c) {
                    tris.push([a, b, c]);
                }
            }
        }
    }
    (edges, tris)
}

/// Rank over the two-element field of a boundary matrix given by sparse columns.
pub fn gf2_rank(columns: Vec<Vec<usize>>) -> usize {
    let mut pivot_of: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut rank = 0;
    for mut col in columns {
        col.sort_unstable();
        loop {
            let Some(&low) = col.last() else { break };
            match pivot_of.get(&low) {
                Some(p) => col = sym_diff(&col, p),
                None => {
                    pivot_of.insert(low, col);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// First Betti number mod 2 of the flag 2-complex on `vertices`.
pub fn h1_rank_mod2(g: &CurveGraph, vertices: &[usize]) -> usize {
    let (edges, tris) = flag_complex(g, vertices);
    let eidx: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let cols: Vec<Vec<usize>> = tris.iter().map(|&[a, b, c]| vec![eidx[&(a, b)], eidx[&(a, c)], eidx[&(b, c)]]).collect();
    let rank2 = gf2_rank(cols);
    let rank1 = vertices.len() - component_count(g, vertices);
    edges.len() - rank1 - rank2
}

/// Interior-vertex predicate for disk filling.
pub type Allowed<'a> = &'a (dyn Fn(usize) -> bool + Sync);

struct Filler<'a> {
    g: &'a CurveGraph,
    allowed: Allowed<'a>,
    labels: Vec<usize>,
    faces: Vec<[usize; 3]>,
    edges: HashSet<(usize, usize)>,
    nodes: usize,
    node_budget: usize,
}

fn ekey(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Filler<'_> {
    fn add_face(&mut self, f: [usize; 3]) -> Vec<(usize, usize)> {
        self.faces.push(f);
        let mut added = Vec::new();
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[0], f[2])] {
            if self.edges.insert(ekey(a, b)) {
                added.push(ekey(a, b));
            }
        }
        added
    }

    fn undo(&mut self, added: Vec<(usize, usize)>) {
        self.faces.pop();
        for e in added {
            self.edges.remove(&e);
        }
    }

    /// Depth-first search for a completion of `frontier` with at most `left` more faces.
    fn search(&mut self, frontier: &mut Vec<usize>, left: usize) -> bool {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return false;
        }
        let n = frontier.len();
        if n == 3 {
            let l: Vec<usize> = frontier.iter().map(|&v| self.labels[v]).collect();
            if left >= 1 && self.g.adjacent(l[0], l[2]) && l[0] != l[2] {
                self.add_face([frontier[0], frontier[1], frontier[2]]);
                return true;
            }
        }
        if left == 0 || n < 3 || left < n - 2 {
            return false;
        }
        // Folds: a face on two consecutive frontier edges.
        for k in 0..n {
            let (u, v, w) = (frontier[(k + n - 1) % n], frontier[k], frontier[(k + 1) % n]);
            let (lu, lw) = (self.labels[u], self.labels[w]);
            if n > 3 && lu != lw && self.g.adjacent(lu, lw) && !self.edges.contains(&ekey(u, w)) {
                let added = self.add_face([u, v, w]);
                frontier.remove(k);
                if self.search(frontier, left - 1) {
                    return true;
                }
                frontier.insert(k, v);
                self.undo(added);
            }
        }
        // Extensions: a new vertex on the first frontier edge.
        if left >= n - 1 {
            let (u, v) = (frontier[0], frontier[1]);
            let (lu, lv) = (self.labels[u], self.labels[v]);
            let on: HashSet<usize> = frontier.iter().map(|&x| self.labels[x]).collect();
            let cands: Vec<usize> = self.g.adj[lu]
                .iter()
                .copied()
                .filter(|&z| self.g.adjacent(lv, z) && !on.contains(&z) && (self.allowed)(z))
                .collect();
            for z in cands {
                let id = self.labels.len();
                self.labels.push(z);
                let added = self.add_face([u, v, id]);
                frontier.insert(1, id);
                if self.search(frontier, left - 1) {
                    return true;
                }
                frontier.remove(1);
                self.undo(added);
                self.labels.pop();
            }
        }
        false
    }
}

/// Search for a disk diagram bounded by `loop_` (graph vertices, cyclic) whose interior
/// vertices satisfy `allowed`, by iterative deepening on the face count. `Ok(None)`
/// means the budget ran out, never that no disk exists.
pub fn fill_loop(g: &CurveGraph, loop_: &[usize], allowed: Allowed, area_budget: usize) -> Result<Option<LabeledDisk>> {
    let n = loop_.len();
    if n < 3 {
        return Err(CoreError::InvalidLoop(format!("loop of length {n}")));
    }
    let distinct: HashSet<usize> = loop_.iter().copied().collect();
    if distinct.len() != n {
        return Err(CoreError::InvalidLoop("loop repeats a vertex".into()));
    }
    for k in 0..n {
        let (a, b) = (loop_[k], loop_[(k + 1) % n]);
        if a >= g.len() || b >= g.len() || !g.adjacent(a, b) {
            return Err(CoreError::InvalidLoop(format!("no edge between positions {k} and {}", (k + 1) % n)));
        }
    }
    for area in (n - 2)..=area_budget {
        let mut f = Filler {
            g,
            allowed,
            labels: loop_.to_vec(),
            faces: Vec::new(),
            edges: (0..n).map(|k| ekey(k, (k + 1) % n)).collect(),
            nodes: 0,
            node_budget: 2_000_000,
        };
        let mut frontier: Vec<usize> = (0..n).collect();
        if f.search(&mut frontier, area) {
            let disk = LabeledDisk { labels: f.labels, good: vec![None; f.faces.len()], faces: f.faces, boundary: (0..n).collect() };
            let cons = DiskConstraints { boundary: Some(loop_.to_vec()), interior_allowed: Some(allowed), ..Default::default() };
            let v = verify_disk(&disk, g, &cons);
            if !v.is_empty() {
                return Err(CoreError::Invariant(format!("disk search produced an invalid disk: {v:?}")));
            }
            return Ok(Some(disk));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::pants_curve;
    use crate::normal::{enumerate_curves, DEFAULT_CURVE_CEILING};
    use crate::surface::{make_surface, standard_triangulation};

    fn graph(g: i64, n: i64, w: u32, rule: EdgeRule) -> CurveGraph {
        let t = Arc::new(standard_triangulation(make_surface(g, n).unwrap()).unwrap());
        let u = enumerate_curves(&t, w, DEFAULT_CURVE_CEILING).unwrap();
        CurveGraph::build(t, u.curves, rule).unwrap()
    }

    #[test]
    fn rules_strengthen_disjointness() {
        let d = graph(0, 5, 2, EdgeRule::Disjoint);
        let c0 = graph(0, 5, 2, EdgeRule::C0);
        let good = graph(0, 5, 2, EdgeRule::Good);
        for i in 0..d.len() {
            for &j in &c0.adj[i] {
                assert!(d.adjacent(i, j));
            }
            for &j in &good.adj[i] {
                assert!(d.adjacent(i, j));
            }
        }
        let t = d.tri.clone();
        let a = d.index_of(&pants_curve(&t, 0, 1).unwrap()).unwrap();
        let b = d.index_of(&pants_curve(&t, 2, 3).unwrap()).unwrap();
        assert!(d.adjacent(a, b) && c0.adjacent(a, b) && !good.adjacent(a, b));
    }

    #[test]
    fn spheres_and_distances_on_six_punctured_sphere() {
        let g = graph(0, 6, 2, EdgeRule::Disjoint);
        let t = g.tri.clone();
        let o = g.index_of(&pants_curve(&t, 0, 1).unwrap()).unwrap();
        let s0 = sphere(&g, o, 0).unwrap();
        assert_eq!(s0.vertices, vec![o]);
        let s1 = sphere(&g, o, 1).unwrap();
        assert!(!s1.vertices.is_empty());
        assert!(s1.vertices.iter().all(|&v| g.intersection(v, o) == 0));
        for &v in &sphere(&g, o, 2).unwrap().vertices {
            assert!(g.intersection(v, o) >= 1);
        }
        let d = g.layers(o);
        for v in 0..g.len() {
            for &w in &g.adj[v] {
                if let (Some(a), Some(b)) = (d[v], d[w]) {
                    assert!(a.abs_diff(b) <= 1);
                }
            }
        }
        let b = g.index_of(&pants_curve(&t, 1, 2).unwrap()).unwrap();
        assert_eq!(distance_estimate(&g, o, b), DistanceEstimate::exact(2));
        assert_eq!(distance_estimate(&g, o, o), DistanceEstimate::exact(0));
        assert!(sphere(&g, g.len(), 0).is_err());
    }

    #[test]
    fn homology_of_small_complexes() {
        assert_eq!(gf2_rank(vec![vec![0, 1], vec![1, 2], vec![0, 2]]), 2);
        let g = graph(0, 5, 2, EdgeRule::Disjoint);
        // Curve graph of the five-punctured sphere at this weight is a union of cycles
        // and trees without triangles.
        let all: Vec<usize> = (0..g.len()).collect();
        let (_, tris) = flag_complex(&g, &all);
        assert!(tris.is_empty());
        let r = h1_rank_mod2(&g, &all);
        assert_eq!(r, g.n_edges() - (g.len() - component_count(&g, &all)));
    }

    #[test]
    fn filling_triangles_and_cones() {
        let g = graph(0, 6, 2, EdgeRule::Disjoint);
        let all = |_: usize| true;
        let (_, tris) = flag_complex(&g, &(0..g.len()).collect::<Vec<_>>());
        let [a, b, c] = tris[0];
        let d = fill_loop(&g, &[a, b, c], &all, 4).unwrap().unwrap();
        assert_eq!(d.faces.len(), 1);
        assert!(fill_loop(&g, &[a, b], &all, 4).is_err());
        // A chordless square around a common neighbour needs the four-face cone.
        let n = g.len();
        let square = (0..n).find_map(|z| {
            let nb = &g.adj[z];
            for &p in nb {
                for &q in nb {
                    for &r in nb {
                        for &s in nb {
                            let cyc = [p, q, r, s];
                            let distinct = cyc.iter().collect::<HashSet<_>>().len() == 4;
                            if distinct
                                && g.adjacent(p, q)
                                && g.adjacent(q, r)
                                && g.adjacent(r, s)
                                && g.adjacent(s, p)
                                && !g.adjacent(p, r)
                                && !g.adjacent(q, s)
                            {
                                return Some(cyc);
                            }
                        }
                    }
                }
            }
            None
        });
        let sq = square.expect("a chordless square with a centre exists");
        let d = fill_loop(&g, &sq, &all, 6).unwrap().unwrap();
        assert_eq!(d.faces.len(), 4);
        assert_eq!(d.interior().len(), 1);
    }
}
