//! Surface signatures, ideal triangulations and cut-surface bookkeeping.
//!
//! Triangles are stored as three sides each. Slot `3t + i` is side `i` of triangle `t`.
//! Side `i` runs counter-clockwise from triangle vertex `i` to vertex `i + 1`, so the
//! interior lies on its left. Corner `k` sits between side `k` and side `k + 1`; it is
//! the vertex at the end of side `k`. Gluings always reverse side direction: position
//! `p` on one slot is position `w - 1 - p` on its partner.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;

pub const TRIANGULATION_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceSig {
    pub genus: u32,
    pub punctures: u32,
}

impl SurfaceSig {
    pub fn xi(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.punctures as i64
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.punctures as i64
    }

    /// Header form used by every report: `g,n,xi`.
    pub fn header(&self) -> String {
        format!("{},{},{}", self.genus, self.punctures, self.xi())
    }
}

pub fn make_surface(g: i64, n: i64) -> Result<SurfaceSig> {
    let reject = |reason| Err(CoreError::RejectSignature { genus: g, punctures: n, reason });
    if g < 0 || n < 0 {
        return reject("negative genus or puncture count");
    }
    if n == 0 {
        return reject("closed surfaces are not supported");
    }
    if (g, n) == (0, 3) {
        return reject("thrice-punctured sphere has an empty curve complex");
    }
    if 3 * g - 3 + n < 1 {
        return reject("complexity must be at least 1");
    }
    Ok(SurfaceSig { genus: g as u32, punctures: n as u32 })
}

/// Cut component `Υ_{h,m,p,u}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutComponent {
    pub h: u32,
    pub m: u32,
    pub p: u32,
    pub u: u32,
    /// One entry per boundary circle: (index of the cutting curve, side 0 or 1).
    pub boundary_sources: Vec<(usize, u8)>,
}

impl CutComponent {
    pub fn new(h: u32, m: u32, p: u32, u: u32) -> Self {
        CutComponent { h, m, p, u, boundary_sources: Vec::new() }
    }

    pub fn boundaries(&self) -> u32 {
        2 * self.p + self.u
    }

    pub fn is_pants(&self) -> bool {
        complexity_of(self) == 0
    }
}

pub fn complexity_of(c: &CutComponent) -> i64 {
    3 * c.h as i64 - 3 + c.m as i64 + 2 * c.p as i64 + c.u as i64
}

/// Genus, punctures and boundary count of the surface obtained by gluing the pairs.
pub fn hat_of(c: &CutComponent) -> (u32, u32, u32) {
    (c.h + c.p, c.m, c.u)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSurface {
    pub ambient: SurfaceSig,
    pub curve_count: usize,
    pub components: Vec<CutComponent>,
}

impl CutSurface {
    pub fn total_complexity(&self) -> i64 {
        self.components.iter().map(complexity_of).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealTriangulation {
    pub sig: SurfaceSig,
    glue: Vec<usize>,
    edge_of_slot: Vec<usize>,
    /// (forward slot, reverse slot); the forward slot is the smaller index.
    edges: Vec<(usize, usize)>,
    vertex_of_corner: Vec<usize>,
    n_vertices: usize,
}

#[derive(Serialize, Deserialize)]
struct TriangulationJson {
    schema: u32,
    genus: u32,
    punctures: u32,
    triangles: usize,
    gluing: Vec<usize>,
}

impl IdealTriangulation {
    /// Builds from a slot involution. Validates the involution, connectivity and Euler count.
    pub fn from_gluing(sig: SurfaceSig, glue: Vec<usize>) -> Result<Self> {
        let slots = glue.len();
        if slots == 0 || slots % 3 != 0 {
            return Err(CoreError::Malformed("slot count must be a positive multiple of 3".into()));
        }
        for (s, &t) in glue.iter().enumerate() {
            if t >= slots || t == s || glue[t] != s {
                return Err(CoreError::Malformed(format!("slot {s} is not properly paired")));
            }
        }
        let mut edges = Vec::with_capacity(slots / 2);
        let mut edge_of_slot = vec![usize::MAX; slots];
        for s in 0..slots {
            if s < glue[s] {
                edge_of_slot[s] = edges.len();
                edge_of_slot[glue[s]] = edges.len();
                edges.push((s, glue[s]));
            }
        }
        let mut uf = UnionFind::new(slots);
        for t in 0..slots / 3 {
            for k in 0..3 {
                let (t2, s2) = split(glue[3 * t + k]);
                uf.union(3 * t + k, 3 * t2 + (s2 + 2) % 3);
            }
        }
        let mut vertex_of_corner = vec![0; slots];
        let mut labels = HashMap::new();
        for c in 0..slots {
            let root = uf.find(c);
            let next = labels.len();
            vertex_of_corner[c] = *labels.entry(root).or_insert(next);
        }
        let n_vertices = labels.len();

        let mut tri_uf = UnionFind::new(slots / 3);
        for s in 0..slots {
            tri_uf.union(s / 3, glue[s] / 3);
        }
        if (0..slots / 3).any(|t| tri_uf.find(t) != tri_uf.find(0)) {
            return Err(CoreError::Malformed("triangulation is disconnected".into()));
        }
        let f = (slots / 3) as i64;
        let e = edges.len() as i64;
        if n_vertices as i64 != sig.punctures as i64
            || n_vertices as i64 - e + f != 2 - 2 * sig.genus as i64
        {
            return Err(CoreError::Malformed("gluing does not realise the stated signature".into()));
        }
        Ok(IdealTriangulation { sig, glue, edge_of_slot, edges, vertex_of_corner, n_vertices })
    }

    pub fn n_triangles(&self) -> usize {
        self.glue.len() / 3
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn partner(&self, slot: usize) -> usize {
        self.glue[slot]
    }

    pub fn edge_of(&self, slot: usize) -> usize {
        self.edge_of_slot[slot]
    }

    pub fn is_forward(&self, slot: usize) -> bool {
        self.edges[self.edge_of_slot[slot]].0 == slot
    }

    pub fn edge_slots(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Vertex at corner `k` of triangle `t`.
    pub fn corner_vertex(&self, t: usize, k: usize) -> usize {
        self.vertex_of_corner[3 * t + k]
    }

    /// Start and end vertices of edge `e`, read along its forward slot.
    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let (t, i) = split(self.edges[e].0);
        (self.corner_vertex(t, (i + 2) % 3), self.corner_vertex(t, i))
    }

    /// Next corner counter-clockwise around the vertex at corner `(t, k)`.
    pub fn rotate_ccw(&self, t: usize, k: usize) -> (usize, usize) {
        let (t2, s2) = split(self.glue[3 * t + k]);
        (t2, (s2 + 2) % 3)
    }

    /// Corners around vertex `v` in counter-clockwise order starting from its lowest corner.
    pub fn vertex_corners(&self, v: usize) -> Vec<(usize, usize)> {
        let start = (0..self.glue.len()).find(|&c| self.vertex_of_corner[c] == v).expect("vertex");
        let mut out = vec![split(start)];
        let mut cur = self.rotate_ccw(start / 3, start % 3);
        while cur != split(start) {
            out.push(cur);
            cur = self.rotate_ccw(cur.0, cur.1);
        }
        out
    }

    /// Normal coordinates of the peripheral curve around vertex `v`.
    pub fn vertex_link(&self, v: usize) -> Vec<u32> {
        let mut w = vec![0; self.n_edges()];
        for (e, slot) in w.iter_mut().enumerate() {
            let (a, b) = self.edge_endpoints(e);
            *slot = (a == v) as u32 + (b == v) as u32;
        }
        w
    }

    pub fn gluing(&self) -> &[usize] {
        &self.glue
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TriangulationJson {
            schema: TRIANGULATION_SCHEMA,
            genus: self.sig.genus,
            punctures: self.sig.punctures,
            triangles: self.n_triangles(),
            gluing: self.glue.clone(),
        })
        .expect("serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: TriangulationJson =
            serde_json::from_str(s).map_err(|e| CoreError::Malformed(e.to_string()))?;
        if j.schema != TRIANGULATION_SCHEMA || j.gluing.len() != 3 * j.triangles {
            return Err(CoreError::Malformed("unsupported triangulation schema".into()));
        }
        let sig = make_surface(j.genus as i64, j.punctures as i64)?;
        Self::from_gluing(sig, j.gluing)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

pub fn split(slot: usize) -> (usize, usize) {
    (slot / 3, slot % 3)
}

/// Canonical triangulation of `Σ_{g,n}`.
///
/// Genus 0: punctures `1..n-1` form a polygon fanned from puncture 1, and puncture 0
/// is coned over the polygon boundary. Positive genus: the `4g`-gon with side word
/// `a₁b₁a₁⁻¹b₁⁻¹…` fanned from its first corner (one vertex), then each further
/// puncture is added by a 1-3 split of triangle `k mod (4g-2)`.
pub fn standard_triangulation(sig: SurfaceSig) -> Result<IdealTriangulation> {
    let sig = make_surface(sig.genus as i64, sig.punctures as i64)?;
    let glue = if sig.genus == 0 { genus_zero_gluing(sig.punctures as usize) } else { polygon_gluing(sig) };
    IdealTriangulation::from_gluing(sig, glue)
}

fn genus_zero_gluing(n: usize) -> Vec<usize> {
    let mut tris: Vec<[usize; 3]> = Vec::new();
    for k in 2..n - 1 {
        tris.push([1, k, k + 1]);
    }
    for k in 1..n {
        let next = if k + 1 == n { 1 } else { k + 1 };
        tris.push([0, next, k]);
    }
    let mut side_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in tris.iter().enumerate() {
        for i in 0..3 {
            side_of.insert((tri[i], tri[(i + 1) % 3]), 3 * t + i);
        }
    }
    let mut glue = vec![0; 3 * tris.len()];
    for (t, tri) in tris.iter().enumerate() {
        for i in 0..3 {
            glue[3 * t + i] = side_of[&(tri[(i + 1) % 3], tri[i])];
        }
    }
    glue
}

fn polygon_gluing(sig: SurfaceSig) -> Vec<usize> {
    let g = sig.genus as usize;
    let base = 4 * g - 2;
    let mut glue = vec![usize::MAX; 3 * base];
    let pair = |glue: &mut Vec<usize>, a: usize, b: usize| {
        glue[a] = b;
        glue[b] = a;
    };
    // Triangle k-1 has corners (P0, Pk, Pk+1); the diagonal P0Pk is side 0 of
    // triangle k-1 and side 2 of triangle k-2.
    for k in 2..=4 * g - 2 {
        pair(&mut glue, 3 * (k - 1), 3 * (k - 2) + 2);
    }
    let polygon_side = |s: usize| -> usize {
        if s == 0 {
            0
        } else if s == 4 * g - 1 {
            3 * (4 * g - 3) + 2
        } else {
            3 * (s - 1) + 1
        }
    };
    for i in 0..g {
        pair(&mut glue, polygon_side(4 * i), polygon_side(4 * i + 2));
        pair(&mut glue, polygon_side(4 * i + 1), polygon_side(4 * i + 3));
    }
    for k in 1..sig.punctures as usize {
        split_triangle(&mut glue, (k - 1) % base);
    }
    glue
}

/// 1-3 move: triangle `t` becomes three triangles around a new vertex.
fn split_triangle(glue: &mut Vec<usize>, t: usize) {
    let t1 = glue.len() / 3;
    let t2 = t1 + 1;
    let tri = [t, t1, t2];
    let old: Vec<usize> = (0..3).map(|j| glue[3 * t + j]).collect();
    glue.extend(std::iter::repeat(usize::MAX).take(6));
    for j in 0..3 {
        let s = 3 * tri[j];
        glue[s] = old[j];
        glue[old[j]] = s;
    }
    for j in 0..3 {
        let a = 3 * tri[j] + 1;
        let b = 3 * tri[(j + 1) % 3] + 2;
        glue[a] = b;
        glue[b] = a;
    }
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
