//! Labelled disk triangulations in the curve graph and the constructive steps that
//! rewrite them: tetrahedron apexes over good triangles, repairs of bad triangles,
//! good edge and triangle completions inside two-holed subsurfaces, diamond paths,
//! cone replacement and the outward pushing pipeline.
//!
//! Every witness is re-verified before an operation reports success.

use crate::classify::{Classifier, Subsurface};
use crate::complex::{fill_loop, Allowed, CurveGraph};
use crate::construct::{companion, cycle_curves, ends_of, piece_candidates, End};
use crate::cut::CutComplex;
use crate::error::{CoreError, Result};
use crate::normal::{realise_disjointly, Coords};
use crate::surface::IdealTriangulation;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};

/// A triangulated disk whose vertices carry curve-graph vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDisk {
    pub labels: Vec<usize>,
    pub faces: Vec<[usize; 3]>,
    /// Disk vertices around the boundary, in order.
    pub boundary: Vec<usize>,
    /// Goodness of each face, when annotated.
    pub good: Vec<Option<bool>>,
}

impl LabeledDisk {
    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[0], f[2])])
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        e.sort();
        e.dedup();
        e
    }

    pub fn boundary_labels(&self) -> Vec<usize> {
        self.boundary.iter().map(|&v| self.labels[v]).collect()
    }

    pub fn interior(&self) -> Vec<usize> {
        let b: HashSet<usize> = self.boundary.iter().copied().collect();
        (0..self.labels.len()).filter(|v| !b.contains(v)).collect()
    }

    /// Annotates every face with its goodness.
    pub fn annotate(&mut self, g: &CurveGraph, cl: &Classifier) {
        self.good = self
            .faces
            .iter()
            .map(|f| Some(cl.is_good(&f.map(|v| g.curves[self.labels[v]].clone()), &g.subsurface)))
            .collect();
    }

    pub fn to_dot(&self, g: &CurveGraph, layers: Option<&[Option<u32>]>) -> String {
        const COLORS: [&str; 6] = ["red", "orange", "gold", "green", "blue", "purple"];
        let mut s = String::from("graph disk {\n");
        for (v, &l) in self.labels.iter().enumerate() {
            let color = layers.and_then(|d| d[l]).map_or("gray", |r| COLORS[r as usize % COLORS.len()]);
            s.push_str(&format!(
                "  {v} [label=\"{}\", color={color}];\n",
                crate::complex::coords_label(&g.curves[l])
            ));
        }
        for (a, b) in self.edges() {
            s.push_str(&format!("  {a} -- {b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Default)]
pub struct DiskConstraints<'a> {
    pub boundary: Option<Vec<usize>>,
    pub interior_allowed: Option<Allowed<'a>>,
    /// Layer of every graph vertex and the inclusive range every disk vertex must lie in.
    pub layers: Option<(&'a [Option<u32>], u32, u32)>,
    pub goodness: Option<&'a Classifier<'a>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskViolation {
    Topology(String),
    BoundaryMismatch,
    /// Disk edge whose labels are not adjacent curves.
    InvalidEdge(usize, usize),
    GoodnessMismatch(usize),
    OutsideAllowed(usize),
    OutsideLayers(usize),
}

fn same_cyclic(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let n = a.len();
    let rev: Vec<usize> = b.iter().rev().copied().collect();
    (0..n).any(|r| (0..n).all(|i| a[(i + r) % n] == b[i]) || (0..n).all(|i| a[(i + r) % n] == rev[i]))
}

fn topology(d: &LabeledDisk) -> Vec<DiskViolation> {
    let bad = |m: String| vec![DiskViolation::Topology(m)];
    let nv = d.labels.len();
    if d.faces.is_empty() {
        return bad("no faces".into());
    }
    if d.good.len() != d.faces.len() {
        return bad("annotation count differs from face count".into());
    }
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    let mut used = vec![false; nv];
    for f in &d.faces {
        if f.iter().any(|&v| v >= nv) || f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
            return bad(format!("degenerate face {f:?}"));
        }
        for &v in f {
            used[v] = true;
        }
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[0], f[2])] {
            *count.entry(if a < b { (a, b) } else { (b, a) }).or_default() += 1;
        }
    }
    if used.iter().any(|&u| !u) {
        return bad("vertex in no face".into());
    }
    if count.values().any(|&c| c > 2) {
        return bad("edge in more than two faces".into());
    }
    let chi = nv as i64 - count.len() as i64 + d.faces.len() as i64;
    if chi != 1 {
        return bad(format!("euler characteristic {chi}"));
    }
    // Boundary edges must form the listed cycle.
    let bedges: HashSet<(usize, usize)> = count.iter().filter(|(_, &c)| c == 1).map(|(&e, _)| e).collect();
    let n = d.boundary.len();
    let listed: HashSet<(usize, usize)> = (0..n)
        .map(|k| {
            let (a, b) = (d.boundary[k], d.boundary[(k + 1) % n]);
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    if n < 3 || listed.len() != n || listed != bedges {
        return bad("boundary edges do not form the listed cycle".into());
    }
    // Vertex links: cycles inside, paths on the boundary.
    let on_boundary: HashSet<usize> = d.boundary.iter().copied().collect();
    for v in 0..nv {
        let mut link: HashMap<usize, Vec<usize>> = HashMap::new();
        for f in d.faces.iter().filter(|f| f.contains(&v)) {
            let o: Vec<usize> = f.iter().copied().filter(|&x| x != v).collect();
            link.entry(o[0]).or_default().push(o[1]);
            link.entry(o[1]).or_default().push(o[0]);
        }
        let ends = link.values().filter(|n| n.len() == 1).count();
        let want = if on_boundary.contains(&v) { 2 } else { 0 };
        if ends != want || link.values().any(|n| n.len() > 2) {
            return bad(format!("link of vertex {v} is not a {}", if want == 0 { "cycle" } else { "path" }));
        }
        let start = *link.keys().min().unwrap();
        let mut seen = HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in &link[&x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != link.len() {
            return bad(format!("link of vertex {v} is disconnected"));
        }
    }
    Vec::new()
}

/// Re-checks topology, edge validity, boundary, goodness annotations and containment.
pub fn verify_disk(d: &LabeledDisk, g: &CurveGraph, c: &DiskConstraints) -> Vec<DiskViolation> {
    let mut out = topology(d);
    if !out.is_empty() {
        return out;
    }
    if d.labels.iter().any(|&l| l >= g.len()) {
        return vec![DiskViolation::Topology("label outside the graph".into())];
    }
    for (a, b) in d.edges() {
        if !g.joined(d.labels[a], d.labels[b]) {
            out.push(DiskViolation::InvalidEdge(a, b));
        }
    }
    if let Some(b) = &c.boundary {
        if !same_cyclic(&d.boundary_labels(), b) {
            out.push(DiskViolation::BoundaryMismatch);
        }
    }
    if let Some(ok) = c.interior_allowed {
        for v in d.interior() {
            if !ok(d.labels[v]) {
                out.push(DiskViolation::OutsideAllowed(v));
            }
        }
    }
    if let Some((layers, lo, hi)) = c.layers {
        for (v, &l) in d.labels.iter().enumerate() {
            if !layers[l].is_some_and(|r| r >= lo && r <= hi) {
                out.push(DiskViolation::OutsideLayers(v));
            }
        }
    }
    if let Some(cl) = c.goodness {
        for (k, f) in d.faces.iter().enumerate() {
            if let Some(claimed) = d.good[k] {
                let curves = f.map(|v| g.curves[d.labels[v]].clone());
                if cl.is_good(&curves, &g.subsurface) != claimed {
                    out.push(DiskViolation::GoodnessMismatch(k));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Success,
    PreconditionUnmet,
    UniverseExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

fn check(name: &str, pass: bool) -> Check {
    Check { name: name.to_string(), pass }
}

fn all_pass(c: &[Check]) -> bool {
    !c.is_empty() && c.iter().all(|x| x.pass)
}

/// Per-layer counts of disk simplices lying entirely in one sphere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerCount {
    pub k: u32,
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub sigma: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusProfile {
    pub rows: Vec<LayerCount>,
}

impl AnnulusProfile {
    pub fn of(d: &LabeledDisk, layers: &[Option<u32>]) -> Self {
        let top = d.labels.iter().filter_map(|&l| layers[l]).max().unwrap_or(0);
        AnnulusProfile { rows: (0..=top).map(|k| counts(d, layers, k)).collect() }
    }

    pub fn sigma(&self, k: u32) -> usize {
        self.rows.iter().find(|r| r.k == k).map_or(0, |r| r.sigma)
    }
}

fn counts(d: &LabeledDisk, layers: &[Option<u32>], k: u32) -> LayerCount {
    let at = |v: usize| layers[d.labels[v]] == Some(k);
    let v = (0..d.labels.len()).filter(|&x| at(x)).count();
    let e = d.edges().iter().filter(|&&(a, b)| at(a) && at(b)).count();
    let f = d.faces.iter().filter(|f| f.iter().all(|&x| at(x))).count();
    LayerCount { k, v, e, f, sigma: v + e + f }
}

/// Result of a constructive step: status, the branch that produced the witness, the
/// witness itself and the re-verification record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurgeryOutcome {
    pub op: String,
    pub status: Status,
    pub branch: Option<String>,
    pub curves: Vec<Coords>,
    pub path: Vec<usize>,
    pub disk: Option<LabeledDisk>,
    pub profile: Option<AnnulusProfile>,
    pub checks: Vec<Check>,
    pub diagnostics: Vec<String>,
    /// Inputs by canonical coordinates.
    pub inputs: Vec<Coords>,
    /// Fingerprint of the universe the layers were computed in.
    pub fingerprint: Option<String>,
}

impl SurgeryOutcome {
    fn new(op: &str) -> Self {
        SurgeryOutcome {
            op: op.to_string(),
            status: Status::UniverseExhausted,
            branch: None,
            curves: Vec::new(),
            path: Vec::new(),
            disk: None,
            profile: None,
            checks: Vec::new(),
            diagnostics: Vec::new(),
            inputs: Vec::new(),
            fingerprint: None,
        }
    }

    fn unmet(op: &str, why: &str) -> Self {
        let mut o = Self::new(op);
        o.status = Status::PreconditionUnmet;
        o.diagnostics.push(why.to_string());
        o
    }

    fn exhausted(op: &str, why: String) -> Self {
        let mut o = Self::new(op);
        o.diagnostics.push(why);
        o
    }

    fn success(op: &str, branch: &str, curves: Vec<Coords>, checks: Vec<Check>) -> Self {
        let mut o = Self::new(op);
        o.status = Status::Success;
        o.branch = Some(branch.to_string());
        o.curves = curves;
        o.checks = checks;
        o
    }

    pub fn is_success(&self) -> bool {
        self.status == Status::Success
    }

    /// Success carries a complete, all-passing verification record.
    pub fn is_sound(&self) -> bool {
        self.status != Status::Success || all_pass(&self.checks)
    }
}

/// Ambient graph, classifier and sphere layers around a fixed origin.
pub struct Ctx<'a> {
    pub g: &'a CurveGraph,
    /// Graph of good edges over the same curves, used when filling with good edges.
    pub good: Option<&'a CurveGraph>,
    pub cl: &'a Classifier<'a>,
    pub origin: usize,
    pub layers: Vec<Option<u32>>,
    pub fingerprint: String,
}

impl<'a> Ctx<'a> {
    pub fn new(g: &'a CurveGraph, good: Option<&'a CurveGraph>, cl: &'a Classifier<'a>, origin: usize) -> Result<Self> {
        if origin >= g.len() {
            return Err(CoreError::OriginMissing);
        }
        if let Some(h) = good {
            if h.curves != g.curves {
                return Err(CoreError::Malformed("good-edge graph is over different curves".into()));
            }
        }
        Ok(Ctx { g, good, cl, origin, layers: g.layers(origin), fingerprint: g.fingerprint() })
    }

    pub fn layer(&self, v: usize) -> Option<u32> {
        self.layers[v]
    }

    fn in_layer(&self, v: usize, lo: u32, hi: u32) -> bool {
        self.layers[v].is_some_and(|l| l >= lo && l <= hi)
    }

    pub fn is_good(&self, vs: &[usize]) -> bool {
        let curves: Vec<Coords> = vs.iter().map(|&v| self.g.curves[v].clone()).collect();
        self.cl.is_good(&curves, &self.g.subsurface)
    }

    fn clique(&self, vs: &[usize]) -> bool {
        (0..vs.len()).all(|i| (i + 1..vs.len()).all(|j| self.g.joined(vs[i], vs[j])))
    }

    fn stamp(&self, mut o: SurgeryOutcome, inputs: &[usize]) -> SurgeryOutcome {
        o.inputs = inputs.iter().map(|&v| self.g.curves[v].clone()).collect();
        o.fingerprint = Some(self.fingerprint.clone());
        o
    }

    fn tri(&self) -> &IdealTriangulation {
        &self.g.tri
    }
}

/// Pieces of `v` cut further along `extra`, with the complex they were read from.
fn pieces_in<'t>(t: &'t IdealTriangulation, v: &Subsurface, extra: &[Coords]) -> Result<(CutComplex<'t>, Vec<usize>)> {
    let mut all = v.cut.clone();
    all.extend(extra.iter().cloned());
    let cx = CutComplex::new(t, &all)?;
    let idx: Vec<usize> = (v.cut.len()..all.len()).collect();
    let class = cx.merge_across(&idx);
    let inside: Vec<usize> = match v.anchor {
        None => (0..cx.pieces.len()).collect(),
        Some((x, s)) => {
            let home = class[cx.side_piece[x][s as usize]];
            (0..cx.pieces.len()).filter(|&p| class[p] == home).collect()
        }
    };
    Ok((cx, inside))
}

fn piece_subsurface(cx: &CutComplex, p: usize) -> Subsurface {
    match cx.pieces[p].sides.iter().min() {
        None => Subsurface::whole(),
        Some(&a) => Subsurface { cut: cx.curves.clone(), anchor: Some(a) },
    }
}

/// The explicit constructions of the proofs inside each non-pants piece, in the order the
/// proofs try them: non-separating curves, pants curves around two punctures, then
/// companions of arcs with an end on a boundary.
fn constructions(t: &IdealTriangulation, v: &Subsurface, extra: &[Coords]) -> Result<Vec<(String, Vec<Coords>)>> {
    let (cx, inside) = pieces_in(t, v, extra)?;
    let mut out: Vec<(String, Vec<Coords>)> = Vec::new();
    for &p in &inside {
        let comp = cx.component(p);
        if crate::surface::complexity_of(&comp) <= 0 {
            continue;
        }
        let sub = piece_subsurface(&cx, p);
        let nonsep: Vec<Coords> = cycle_curves(&cx, p)
            .into_iter()
            .filter(|c| sub.split(t, &[c.clone()], false).map(|ps| ps.len() == 1).unwrap_or(false))
            .collect();
        out.push(("nonseparating".into(), nonsep));
        let ends = ends_of(&cx, p);
        let mut pants = Vec::new();
        let mut arcs = Vec::new();
        for i in 0..ends.len() {
            for j in i + 1..ends.len() {
                let both = matches!((ends[i], ends[j]), (End::Puncture(_), End::Puncture(_)));
                if let Some(c) = companion(&cx, p, ends[i], ends[j]) {
                    if both {
                        pants.push(c);
                    } else {
                        arcs.push(c);
                    }
                }
            }
        }
        out.push(("pants".into(), pants));
        out.push(("arc-companion".into(), arcs));
    }
    for (_, cs) in &mut out {
        cs.sort();
        cs.dedup();
    }
    Ok(out)
}

/// Tries the proof constructions then a scan of the universe, returning the first
/// candidate whose checks all pass.
fn search_universe(
    ctx: &Ctx,
    op: &str,
    cut: &[usize],
    checks: &dyn Fn(usize) -> Vec<Check>,
    scan: &mut dyn Iterator<Item = usize>,
) -> SurgeryOutcome {
    let t = ctx.tri();
    let cut_curves: Vec<Coords> = cut.iter().map(|&v| ctx.g.curves[v].clone()).collect();
    let mut outside = 0usize;
    let mut tried = 0usize;
    if let Ok(branches) = constructions(t, &ctx.g.subsurface, &cut_curves) {
        for (branch, curves) in branches {
            let mut idx: Vec<usize> = Vec::new();
            for c in &curves {
                match ctx.g.index_of(c) {
                    Some(i) => idx.push(i),
                    None => outside += 1,
                }
            }
            idx.sort();
            for w in idx {
                tried += 1;
                let c = checks(w);
                if all_pass(&c) {
                    return SurgeryOutcome::success(op, &branch, vec![ctx.g.curves[w].clone()], c);
                }
            }
        }
    }
    for w in scan {
        tried += 1;
        let c = checks(w);
        if all_pass(&c) {
            return SurgeryOutcome::success(op, "scan", vec![ctx.g.curves[w].clone()], c);
        }
    }
    SurgeryOutcome::exhausted(
        op,
        format!("no candidate verified: {tried} tried, {outside} constructed curves outside the universe"),
    )
}

fn face_checks(ctx: &Ctx, name: &str, faces: &[[usize; 3]]) -> Vec<Check> {
    faces
        .iter()
        .map(|f| check(&format!("{name} ({},{},{}) good", f[0], f[1], f[2]), ctx.clique(f) && ctx.is_good(f)))
        .collect()
}

/// Apex `w` in layer `r + 1` over a good triangle with `x` in layer `r`, making a
/// tetrahedron with good faces.
pub fn find_tetra_apex(ctx: &Ctx, x: usize, y: usize, z: usize, r: u32) -> SurgeryOutcome {
    ctx.stamp(find_tetra_apex_in(ctx, x, y, z, r), &[x, y, z])
}

fn find_tetra_apex_in(ctx: &Ctx, x: usize, y: usize, z: usize, r: u32) -> SurgeryOutcome {
    let op = "find_tetra_apex";
    if ctx.layer(x) != Some(r) || !ctx.in_layer(y, r, r + 1) || !ctx.in_layer(z, r, r + 1) {
        return SurgeryOutcome::unmet(op, "triangle is not in the required layers");
    }
    if !ctx.clique(&[x, y, z]) || !ctx.is_good(&[x, y, z]) {
        return SurgeryOutcome::unmet(op, "not a good triangle");
    }
    let checks = |w: usize| {
        let mut c = vec![
            check("apex in next layer", ctx.layer(w) == Some(r + 1)),
            check("apex distinct", ![x, y, z].contains(&w)),
        ];
        if all_pass(&c) {
            c.extend(face_checks(ctx, "face", &[[w, x, y], [w, x, z], [w, y, z], [x, y, z]]));
        }
        c
    };
    let mut scan = (0..ctx.g.len()).filter(|&w| ctx.layer(w) == Some(r + 1));
    search_universe(ctx, op, &[x, y, z], &checks, &mut scan)
}

/// Apex over `(x, y, z)` making the three triangles through it good, with the apex in
/// one of the given layers.
fn triple_apex(ctx: &Ctx, op: &str, x: usize, y: usize, z: usize, lo: u32, hi: u32) -> SurgeryOutcome {
    let checks = |w: usize| {
        let mut c =
            vec![check("apex layer", ctx.in_layer(w, lo, hi)), check("apex distinct", ![x, y, z].contains(&w))];
        if all_pass(&c) {
            c.extend(face_checks(ctx, "face", &[[w, x, y], [w, x, z], [w, y, z]]));
        }
        c
    };
    let mut scan = (0..ctx.g.len()).filter(|&w| ctx.in_layer(w, lo, hi));
    search_universe(ctx, op, &[x, y, z], &checks, &mut scan)
}

/// Repairs a bad triangle with good edges: `a` in layers `r..=r+1` (layer 1 when `x`
/// is the origin) with `(a,x,y)`, `(a,x,z)`, `(a,y,z)` all good.
pub fn fix_bad_triangle(ctx: &Ctx, x: usize, y: usize, z: usize, r: u32) -> SurgeryOutcome {
    ctx.stamp(fix_bad_triangle_in(ctx, x, y, z, r), &[x, y, z])
}

fn fix_bad_triangle_in(ctx: &Ctx, x: usize, y: usize, z: usize, r: u32) -> SurgeryOutcome {
    let op = "fix_bad_triangle";
    if ctx.layer(x) != Some(r) || !ctx.in_layer(y, r, r + 1) || !ctx.in_layer(z, r, r + 1) {
        return SurgeryOutcome::unmet(op, "triangle is not in the required layers");
    }
    if !ctx.clique(&[x, y, z]) || ![[x, y], [x, z], [y, z]].iter().all(|e| ctx.is_good(e)) {
        return SurgeryOutcome::unmet(op, "edges are not all good");
    }
    if ctx.is_good(&[x, y, z]) {
        return SurgeryOutcome::unmet(op, "triangle is already good");
    }
    let (lo, hi) = if x == ctx.origin { (1, 1) } else { (r, r + 1) };
    triple_apex(ctx, op, x, y, z, lo, hi)
}

/// Replaces a bad triangle `(a, x, y)` with good edges: either one new vertex in the
/// next layer, or a pair `c` in layer `r` and `d` in layer `r + 1`.
pub fn replace_bad_triangle(ctx: &Ctx, a: usize, x: usize, y: usize, r: u32) -> SurgeryOutcome {
    ctx.stamp(replace_bad_triangle_in(ctx, a, x, y, r), &[a, x, y])
}

fn replace_bad_triangle_in(ctx: &Ctx, a: usize, x: usize, y: usize, r: u32) -> SurgeryOutcome {
    let op = "replace_bad_triangle";
    let first = fix_bad_triangle(ctx, x, a, y, r);
    if first.status != Status::Success {
        let mut o = first;
        o.op = op.into();
        return o;
    }
    let c = ctx.g.index_of(&first.curves[0]).expect("witness from the universe");
    if ctx.layer(c) == Some(r + 1) {
        let checks = face_checks(ctx, "triangle", &[[a, c, x], [c, x, y], [a, c, y]]);
        if all_pass(&checks) {
            return SurgeryOutcome::success(op, "single", first.curves, checks);
        }
        return SurgeryOutcome::exhausted(op, "single-vertex repair failed re-verification".into());
    }
    let second = find_tetra_apex(ctx, c, x, y, r);
    if second.status != Status::Success {
        let mut o = second;
        o.op = op.into();
        o.diagnostics.push("repair vertex landed in layer r; no apex over it".into());
        return o;
    }
    let d = ctx.g.index_of(&second.curves[0]).expect("witness from the universe");
    let mut checks = vec![check("c in layer r", ctx.layer(c) == Some(r)), check("d in layer r+1", ctx.layer(d) == Some(r + 1))];
    checks.extend(face_checks(ctx, "triangle", &[[a, c, x], [c, x, y], [a, c, y], [c, x, d], [c, y, d], [d, x, y]]));
    if all_pass(&checks) {
        let mut curves = first.curves;
        curves.extend(second.curves);
        return SurgeryOutcome::success(op, "pair", curves, checks);
    }
    SurgeryOutcome::exhausted(op, "pair repair failed re-verification".into())
}

fn coords_search(
    op: &str,
    branches: Vec<(String, Vec<Coords>)>,
    fallback: Vec<Coords>,
    checks: &dyn Fn(&Coords) -> Vec<Check>,
) -> SurgeryOutcome {
    let mut tried = 0;
    for (branch, cs) in branches.into_iter().chain(std::iter::once(("scan".to_string(), fallback))) {
        for c in cs {
            tried += 1;
            let ck = checks(&c);
            if all_pass(&ck) {
                return SurgeryOutcome::success(op, &branch, vec![c], ck);
            }
        }
    }
    SurgeryOutcome::exhausted(op, format!("no constructed curve verified ({tried} tried)"))
}

/// Every candidate curve of every piece of `v` cut along `extra`.
fn all_piece_candidates(t: &IdealTriangulation, v: &Subsurface, extra: &[Coords]) -> Vec<Coords> {
    let Ok((cx, inside)) = pieces_in(t, v, extra) else { return Vec::new() };
    let mut out: Vec<Coords> = inside.iter().flat_map(|&p| piece_candidates(&cx, p)).collect();
    out.sort();
    out.dedup();
    out
}

fn two_boundary_complexity(t: &IdealTriangulation, v: &Subsurface) -> Result<Option<i64>> {
    let part = v.split(t, &[], false)?.remove(0);
    Ok(if part.b() == 2 { Some(part.xi()) } else { None })
}

/// A partner `a'` in `v` with `{a, a'}` a good edge, for `v` with two boundaries and
/// complexity at least three.
pub fn find_good_edge_partner(t: &IdealTriangulation, cl: &Classifier, a: &[u32], v: &Subsurface) -> SurgeryOutcome {
    let mut o = find_good_edge_partner_in(t, cl, a, v);
    o.inputs = vec![a.to_vec()];
    o
}

fn find_good_edge_partner_in(t: &IdealTriangulation, cl: &Classifier, a: &[u32], v: &Subsurface) -> SurgeryOutcome {
    let op = "find_good_edge_partner";
    let xi = match two_boundary_complexity(t, v) {
        Ok(Some(xi)) => xi,
        Ok(None) => return SurgeryOutcome::unmet(op, "subsurface does not have two boundaries"),
        Err(e) => return SurgeryOutcome::unmet(op, &e.to_string()),
    };
    if xi < 3 {
        return SurgeryOutcome::unmet(op, "subsurface complexity below 3");
    }
    let whole = Subsurface::whole();
    if !v.contains(t, a) || !cl.is_good(&[a.to_vec()], &whole) {
        return SurgeryOutcome::unmet(op, "a is not a good curve of the subsurface");
    }
    let a = a.to_vec();
    let Ok(mut branches) = constructions(t, v, std::slice::from_ref(&a)) else {
        return SurgeryOutcome::unmet(op, "cannot cut along a");
    };
    // Arcs must start on a copy of a.
    let ai = v.cut.len();
    if let Ok((cx, inside)) = pieces_in(t, v, std::slice::from_ref(&a)) {
        let mut arcs = Vec::new();
        for &p in &inside {
            for s in [0u8, 1] {
                if !cx.pieces[p].sides.contains(&(ai, s)) {
                    continue;
                }
                for e in ends_of(&cx, p) {
                    if matches!(e, End::Side(x, _) if x != ai) {
                        arcs.extend(companion(&cx, p, End::Side(ai, s), e));
                    }
                }
            }
        }
        arcs.sort();
        arcs.dedup();
        branches.retain(|(b, _)| b != "arc-companion");
        branches.push(("arc-companion".into(), arcs));
    }
    let fallback = all_piece_candidates(t, v, std::slice::from_ref(&a));
    let checks = |c: &Coords| {
        vec![
            check("in subsurface", v.contains(t, c)),
            check("distinct", *c != a),
            check("disjoint", realise_disjointly(t, &[c, &a])),
            check("good edge", cl.is_good(&[a.clone(), c.clone()], &whole)),
        ]
    };
    coords_search(op, branches, fallback, &checks)
}

/// An apex `c` in `v` with `(a, b, c)` a good triangle, for `v` with two boundaries and
/// complexity at least six.
pub fn find_good_triangle_apex(
    t: &IdealTriangulation,
    cl: &Classifier,
    a: &[u32],
    b: &[u32],
    v: &Subsurface,
) -> SurgeryOutcome {
    let mut o = find_good_triangle_apex_in(t, cl, a, b, v);
    o.inputs = vec![a.to_vec(), b.to_vec()];
    o
}

fn find_good_triangle_apex_in(
    t: &IdealTriangulation,
    cl: &Classifier,
    a: &[u32],
    b: &[u32],
    v: &Subsurface,
) -> SurgeryOutcome {
    let op = "find_good_triangle_apex";
    let xi = match two_boundary_complexity(t, v) {
        Ok(Some(xi)) => xi,
        Ok(None) => return SurgeryOutcome::unmet(op, "subsurface does not have two boundaries"),
        Err(e) => return SurgeryOutcome::unmet(op, &e.to_string()),
    };
    if xi < 6 {
        return SurgeryOutcome::unmet(op, "subsurface complexity below 6");
    }
    let whole = Subsurface::whole();
    let (a, b) = (a.to_vec(), b.to_vec());
    if !v.contains(t, &a) || !v.contains(t, &b) || a == b || !realise_disjointly(t, &[&a, &b]) {
        return SurgeryOutcome::unmet(op, "a and b are not disjoint curves of the subsurface");
    }
    if !cl.is_good(&[a.clone(), b.clone()], &whole) {
        return SurgeryOutcome::unmet(op, "a, b is not a good edge");
    }
    let pair = [a.clone(), b.clone()];
    let Ok(mut branches) = constructions(t, v, &pair) else {
        return SurgeryOutcome::unmet(op, "cannot cut along a and b");
    };
    branches.retain(|(name, _)| name != "arc-companion");
    let fallback = all_piece_candidates(t, v, &pair);
    let checks = |c: &Coords| {
        vec![
            check("in subsurface", v.contains(t, c)),
            check("distinct", *c != a && *c != b),
            check("disjoint", realise_disjointly(t, &[c, &a]) && realise_disjointly(t, &[c, &b])),
            check("good triangle", cl.is_good(&[a.clone(), b.clone(), c.clone()], &whole)),
        ]
    };
    coords_search(op, branches, fallback, &checks)
}

/// Path `a = v0, ..., vp = b` in layer `r + 1` with every `(v_i, v_{i+1}, x)` and
/// `(v_i, v_{i+1}, y)` a good triangle, by breadth-first search.
pub fn diamond_path(ctx: &Ctx, a: usize, b: usize, x: usize, y: usize, r: u32) -> SurgeryOutcome {
    ctx.stamp(diamond_path_in(ctx, a, b, x, y, r), &[a, b, x, y])
}

fn diamond_path_in(ctx: &Ctx, a: usize, b: usize, x: usize, y: usize, r: u32) -> SurgeryOutcome {
    let op = "diamond_path";
    if ctx.layer(a) != Some(r + 1) || ctx.layer(b) != Some(r + 1) || ctx.layer(x) != Some(r) || !ctx.in_layer(y, r, r + 1)
    {
        return SurgeryOutcome::unmet(op, "vertices are not in the required layers");
    }
    for t in [[a, x, y], [b, x, y]] {
        if !ctx.clique(&t) || !ctx.is_good(&t) {
            return SurgeryOutcome::unmet(op, "end triangles are not good");
        }
    }
    let usable = |v: usize| ctx.layer(v) == Some(r + 1) && v != x && v != y && ctx.g.joined(v, x) && ctx.g.joined(v, y);
    let step_ok = |u: usize, v: usize| ctx.g.joined(u, v) && ctx.is_good(&[u, v, x]) && ctx.is_good(&[u, v, y]);
    let mut prev: HashMap<usize, usize> = HashMap::new();
    let mut q = VecDeque::from([a]);
    let mut seen = HashSet::from([a]);
    while let Some(u) = q.pop_front() {
        if u == b {
            break;
        }
        for &v in &ctx.g.adj[u] {
            if !seen.contains(&v) && usable(v) && step_ok(u, v) {
                seen.insert(v);
                prev.insert(v, u);
                q.push_back(v);
            }
        }
    }
    if !seen.contains(&b) {
        return SurgeryOutcome::exhausted(op, format!("{} vertices reached, b not among them", seen.len()));
    }
    let mut path = vec![b];
    while let Some(&p) = prev.get(path.last().unwrap()) {
        path.push(p);
    }
    path.reverse();
    let mut checks = vec![check("ends", path[0] == a && *path.last().unwrap() == b)];
    checks.push(check("layer", path.iter().all(|&v| ctx.layer(v) == Some(r + 1))));
    for w in path.windows(2) {
        checks.extend(face_checks(ctx, "triangle", &[[w[0], w[1], x], [w[0], w[1], y]]));
    }
    let mut o = if all_pass(&checks) || path.len() == 1 {
        let mut o = SurgeryOutcome::success(op, "search", path.iter().map(|&v| ctx.g.curves[v].clone()).collect(), checks);
        if path.len() == 1 {
            o.checks = vec![check("trivial path", a == b)];
        }
        o
    } else {
        SurgeryOutcome::exhausted(op, "path failed re-verification".into())
    };
    o.path = path;
    o
}

/// Fills the link of `z` by a disk in layer `r + 1` inside the complement of `z`.
pub fn cone_replace(ctx: &Ctx, z: usize, link: &[usize], r: u32, area_budget: usize) -> SurgeryOutcome {
    ctx.stamp(cone_replace_in(ctx, z, link, r, area_budget), &[&[z], link].concat())
}

fn cone_replace_in(ctx: &Ctx, z: usize, link: &[usize], r: u32, area_budget: usize) -> SurgeryOutcome {
    let op = "cone_replace";
    if ctx.layer(z) != Some(r) || link.iter().any(|&v| ctx.layer(v) != Some(r + 1)) || link.len() < 3 {
        return SurgeryOutcome::unmet(op, "cone is not in the required layers");
    }
    let n = link.len();
    for k in 0..n {
        let f = [link[k], link[(k + 1) % n], z];
        if !ctx.clique(&f) || !ctx.is_good(&f) {
            return SurgeryOutcome::unmet(op, "cone triangle is not good");
        }
    }
    let graph = ctx.good.unwrap_or(ctx.g);
    let allowed = |v: usize| ctx.layer(v) == Some(r + 1) && ctx.g.joined(v, z);
    let disk = match fill_loop(graph, link, &allowed, area_budget) {
        Ok(Some(d)) => d,
        Ok(None) => return SurgeryOutcome::exhausted(op, format!("no disk within {area_budget} faces")),
        Err(e) => return SurgeryOutcome::unmet(op, &e.to_string()),
    };
    finish_disk(ctx, op, "fill", disk, link, Some((r + 1, r + 1)), Some(&allowed))
}

fn finish_disk(
    ctx: &Ctx,
    op: &str,
    branch: &str,
    mut disk: LabeledDisk,
    boundary: &[usize],
    layer_range: Option<(u32, u32)>,
    allowed: Option<Allowed>,
) -> SurgeryOutcome {
    disk.annotate(ctx.g, ctx.cl);
    let cons = DiskConstraints {
        boundary: Some(boundary.to_vec()),
        interior_allowed: allowed,
        layers: layer_range.map(|(lo, hi)| (ctx.layers.as_slice(), lo, hi)),
        goodness: Some(ctx.cl),
    };
    let violations = verify_disk(&disk, ctx.g, &cons);
    let checks = vec![check("verify_disk", violations.is_empty())];
    let mut o = if violations.is_empty() {
        SurgeryOutcome::success(op, branch, Vec::new(), checks)
    } else {
        let mut o = SurgeryOutcome::exhausted(op, format!("disk failed verification: {violations:?}"));
        o.checks = checks;
        o
    };
    o.profile = Some(AnnulusProfile::of(&disk, &ctx.layers));
    o.path = disk.boundary_labels();
    o.disk = Some(disk);
    o
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PushBudgets {
    /// Face budget for every disk search.
    pub area: usize,
    /// How far outside the loop's layer the first filling may go.
    pub width: u32,
}

impl Default for PushBudgets {
    fn default() -> Self {
        PushBudgets { area: 8, width: 2 }
    }
}

/// Working disk with a growing vertex set; vertices dropped from every face are
/// compacted away at the end.
struct Work {
    d: LabeledDisk,
}

impl Work {
    fn add_vertex(&mut self, label: usize) -> usize {
        self.d.labels.push(label);
        self.d.labels.len() - 1
    }

    fn replace_faces(&mut self, remove: &[usize], add: &[[usize; 3]]) {
        let mut rm: Vec<usize> = remove.to_vec();
        rm.sort_unstable_by(|a, b| b.cmp(a));
        for i in rm {
            self.d.faces.remove(i);
        }
        self.d.faces.extend_from_slice(add);
        self.d.good = vec![None; self.d.faces.len()];
    }

    fn faces_with(&self, vs: &[usize]) -> Vec<usize> {
        (0..self.d.faces.len()).filter(|&i| vs.iter().all(|v| self.d.faces[i].contains(v))).collect()
    }

    /// Link of an interior vertex as a cycle.
    fn link_cycle(&self, z: usize) -> Option<Vec<usize>> {
        let mut nb: HashMap<usize, Vec<usize>> = HashMap::new();
        for &i in &self.faces_with(&[z]) {
            let o: Vec<usize> = self.d.faces[i].iter().copied().filter(|&x| x != z).collect();
            nb.entry(o[0]).or_default().push(o[1]);
            nb.entry(o[1]).or_default().push(o[0]);
        }
        let start = *nb.keys().min()?;
        let mut cyc = vec![start];
        let mut prev = usize::MAX;
        loop {
            let cur = *cyc.last().unwrap();
            let next = *nb[&cur].iter().find(|&&x| x != prev)?;
            if next == start {
                break;
            }
            prev = cur;
            cyc.push(next);
            if cyc.len() > nb.len() {
                return None;
            }
        }
        (cyc.len() == nb.len()).then_some(cyc)
    }

    fn compact(&mut self) {
        let mut used = vec![false; self.d.labels.len()];
        for f in &self.d.faces {
            for &v in f {
                used[v] = true;
            }
        }
        let mut map = vec![usize::MAX; used.len()];
        let mut labels = Vec::new();
        for (v, &u) in used.iter().enumerate() {
            if u {
                map[v] = labels.len();
                labels.push(self.d.labels[v]);
            }
        }
        self.d.labels = labels;
        for f in &mut self.d.faces {
            *f = f.map(|v| map[v]);
        }
        self.d.boundary = self.d.boundary.iter().map(|&v| map[v]).collect();
    }
}

fn layer_counts(ctx: &Ctx, w: &Work, k: u32) -> LayerCount {
    counts(&w.d, &ctx.layers, k)
}

/// Pushes a loop in layer `r` off the inner layers: repair to good edges, fill with good
/// edges, then remove faces, edges and vertices lying in each layer `k <= r - 3`.
pub fn push_loop(ctx: &Ctx, gamma: &[usize], budgets: PushBudgets) -> SurgeryOutcome {
    ctx.stamp(push_loop_in(ctx, gamma, budgets), gamma)
}

fn push_loop_in(ctx: &Ctx, gamma: &[usize], budgets: PushBudgets) -> SurgeryOutcome {
    let op = "push_loop";
    let n = gamma.len();
    let Some(r) = gamma.first().and_then(|&v| ctx.layer(v)) else {
        return SurgeryOutcome::unmet(op, "empty loop or vertex outside the universe component");
    };
    if n < 3 || gamma.iter().any(|&v| ctx.layer(v) != Some(r)) {
        return SurgeryOutcome::unmet(op, "loop is not embedded in a single layer");
    }
    if gamma.iter().collect::<HashSet<_>>().len() != n || (0..n).any(|k| !ctx.g.joined(gamma[k], gamma[(k + 1) % n])) {
        return SurgeryOutcome::unmet(op, "not an embedded edge loop");
    }
    let Some(good_graph) = ctx.good else {
        return SurgeryOutcome::unmet(op, "good-edge graph not supplied");
    };
    let mut diag = Vec::new();
    // Phase 0: good vertices, then good edges, by strips of triangles outside the loop.
    let mut w = Work { d: LabeledDisk { labels: gamma.to_vec(), faces: Vec::new(), boundary: (0..n).collect(), good: Vec::new() } };
    let mut frontier: Vec<usize> = (0..n).collect();
    let near: HashSet<usize> = gamma.iter().flat_map(|&v| {
        let mut s = vec![v];
        s.extend(ctx.g.adj[v].iter().copied());
        s
    }).collect();
    let mut i = 0;
    while i < frontier.len() {
        let m = frontier.len();
        let (p, q, nx) = (frontier[(i + m - 1) % m], frontier[i], frontier[(i + 1) % m]);
        let (lp, lq, ln) = (w.d.labels[p], w.d.labels[q], w.d.labels[nx]);
        if !ctx.is_good(&[lq]) {
            let on: HashSet<usize> = frontier.iter().map(|&v| w.d.labels[v]).collect();
            let pick = (0..ctx.g.len()).find(|&c| {
                !on.contains(&c)
                    && ctx.g.joined(c, lq)
                    && ctx.g.joined(c, lp)
                    && ctx.g.joined(c, ln)
                    && ctx.is_good(&[lp, c])
                    && ctx.is_good(&[c, ln])
            });
            let Some(c) = pick else {
                let mut o = SurgeryOutcome::exhausted(op, format!("phase 0: no replacement for bad vertex {lq}"));
                o.diagnostics.extend(diag);
                return o;
            };
            let id = w.add_vertex(c);
            w.d.faces.push([p, q, id]);
            w.d.faces.push([q, nx, id]);
            frontier[i] = id;
            diag.push(format!("phase 0: replaced bad vertex {lq} by {c}"));
        }
        i += 1;
    }
    let mut i = 0;
    while i < frontier.len() {
        let m = frontier.len();
        let (u, v) = (frontier[i], frontier[(i + 1) % m]);
        let (lu, lv) = (w.d.labels[u], w.d.labels[v]);
        if !ctx.is_good(&[lu, lv]) {
            let on: HashSet<usize> = frontier.iter().map(|&x| w.d.labels[x]).collect();
            let pick = near.iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().chain(0..ctx.g.len()).find(|&c| {
                !on.contains(&c) && ctx.g.joined(c, lu) && ctx.g.joined(c, lv) && ctx.is_good(&[lu, c]) && ctx.is_good(&[c, lv])
            });
            let Some(c) = pick else {
                let mut o = SurgeryOutcome::exhausted(op, format!("phase 0: no bridge over bad edge ({lu},{lv})"));
                o.diagnostics.extend(diag);
                return o;
            };
            let id = w.add_vertex(c);
            w.d.faces.push([u, v, id]);
            frontier.insert(i + 1, id);
            diag.push(format!("phase 0: bridged bad edge ({lu},{lv}) through {c}"));
        }
        i += 1;
    }
    // Phases 1 and 2: a disk with good edges, filled in the good-edge graph.
    let inner: Vec<usize> = frontier.iter().map(|&v| w.d.labels[v]).collect();
    let hi = r + budgets.width;
    let allowed = |v: usize| ctx.layer(v).is_some_and(|l| l <= hi);
    let filled = match fill_loop(good_graph, &inner, &allowed, budgets.area) {
        Ok(Some(d)) => d,
        Ok(None) => {
            let mut o = SurgeryOutcome::exhausted(op, format!("phase 1: no good-edge disk within {} faces", budgets.area));
            o.diagnostics.extend(diag);
            return o;
        }
        Err(e) => {
            let mut o = SurgeryOutcome::exhausted(op, format!("phase 1: {e}"));
            o.diagnostics.extend(diag);
            return o;
        }
    };
    let mut map: Vec<usize> = Vec::with_capacity(filled.labels.len());
    for (k, &l) in filled.labels.iter().enumerate() {
        if k < frontier.len() {
            map.push(frontier[k]);
        } else {
            map.push(w.add_vertex(l));
        }
    }
    w.d.faces.extend(filled.faces.iter().map(|f| f.map(|v| map[v])));
    diag.push(format!("phase 1: filled with {} faces", filled.faces.len()));
    // Phase 3: clear the layers below r - 2, innermost first.
    if r >= 3 {
        for k in 0..=(r - 3) {
            if let Err(why) = clear_layer(ctx, &mut w, k, budgets, &mut diag) {
                let mut o = match why {
                    Stop::Failed(msg) => SurgeryOutcome::exhausted(op, msg),
                    Stop::Invariant(msg) => {
                        let mut o = SurgeryOutcome::exhausted(op, msg.clone());
                        o.checks.push(check(&format!("monotone progress: {msg}"), false));
                        o
                    }
                };
                o.diagnostics.extend(diag);
                w.compact();
                w.d.good = vec![None; w.d.faces.len()];
                o.profile = Some(AnnulusProfile::of(&w.d, &ctx.layers));
                o.disk = Some(w.d);
                return o;
            }
        }
    }
    w.compact();
    w.d.good = vec![None; w.d.faces.len()];
    let used = w.d.labels.iter().filter_map(|&l| ctx.layer(l)).max().unwrap_or(r).saturating_sub(r);
    diag.push(format!("annulus width used: {used} of {}", budgets.width));
    let mut o = finish_disk(ctx, op, "pipeline", w.d, gamma, None, None);
    let prof = o.profile.clone().unwrap();
    let clear = (0..r.saturating_sub(2)).all(|k| prof.sigma(k) == 0);
    o.checks.push(check("inner layers clear", clear));
    if !clear {
        o.status = Status::UniverseExhausted;
    }
    o.diagnostics.extend(diag);
    o
}

enum Stop {
    Failed(String),
    Invariant(String),
}

fn clear_layer(ctx: &Ctx, w: &mut Work, k: u32, b: PushBudgets, diag: &mut Vec<String>) -> std::result::Result<(), Stop> {
    let in_k = |w: &Work, v: usize| ctx.layer(w.d.labels[v]) == Some(k);
    // Faces.
    loop {
        let Some(fi) = (0..w.d.faces.len()).find(|&i| w.d.faces[i].iter().all(|&v| in_k(w, v))) else { break };
        let before = layer_counts(ctx, w, k).f;
        let [x, y, z] = w.d.faces[fi];
        let (lx, ly, lz) = (w.d.labels[x], w.d.labels[y], w.d.labels[z]);
        let o = triple_apex(ctx, "push_face", lx, ly, lz, k, k + 1);
        if !o.is_success() {
            return Err(Stop::Failed(format!("faces of layer {k}: no repair vertex over ({lx},{ly},{lz})")));
        }
        let a = ctx.g.index_of(&o.curves[0]).unwrap();
        if ctx.layer(a) == Some(k + 1) {
            let wa = w.add_vertex(a);
            w.replace_faces(&[fi], &[[wa, x, y], [wa, x, z], [wa, y, z]]);
        } else {
            let mut apex = Vec::new();
            for t in [[a, lx, ly], [a, lx, lz], [a, ly, lz]] {
                let o = find_tetra_apex(ctx, t[0], t[1], t[2], k);
                if !o.is_success() {
                    return Err(Stop::Failed(format!("faces of layer {k}: no tetrahedron apex")));
                }
                apex.push(ctx.g.index_of(&o.curves[0]).unwrap());
            }
            let wa = w.add_vertex(a);
            let (pa, pb, pc) = (w.add_vertex(apex[0]), w.add_vertex(apex[1]), w.add_vertex(apex[2]));
            w.replace_faces(
                &[fi],
                &[
                    [pa, x, y],
                    [pa, wa, y],
                    [pa, wa, x],
                    [pb, x, z],
                    [pb, x, wa],
                    [pb, wa, z],
                    [pc, y, z],
                    [pc, wa, y],
                    [pc, wa, z],
                ],
            );
        }
        let after = layer_counts(ctx, w, k).f;
        if after >= before {
            return Err(Stop::Invariant(format!("face count in layer {k} did not drop ({before} -> {after})")));
        }
        diag.push(format!("layer {k}: pushed a face off ({before} -> {after})"));
    }
    // Edges.
    loop {
        let edges = w.d.edges();
        let Some(&(x, y)) = edges.iter().find(|&&(a, b)| in_k(w, a) && in_k(w, b)) else { break };
        let before = layer_counts(ctx, w, k).e;
        let fs = w.faces_with(&[x, y]);
        if fs.len() != 2 {
            return Err(Stop::Failed(format!("edges of layer {k}: edge on the boundary")));
        }
        let third = |w: &Work, f: usize| *w.d.faces[f].iter().find(|&&v| v != x && v != y).unwrap();
        let (mut a, mut bb) = (third(w, fs[0]), third(w, fs[1]));
        let (lx, ly) = (w.d.labels[x], w.d.labels[y]);
        let mut remove = fs.clone();
        let mut extra: Vec<[usize; 3]> = Vec::new();
        for side in [0, 1] {
            let t = if side == 0 { a } else { bb };
            let lt = w.d.labels[t];
            if ctx.is_good(&[lt, lx, ly]) {
                continue;
            }
            let o = triple_apex(ctx, "push_edge_repair", lt, lx, ly, k + 1, k + 1);
            if !o.is_success() {
                return Err(Stop::Failed(format!("edges of layer {k}: cannot repair a bad triangle")));
            }
            let c = w.add_vertex(ctx.g.index_of(&o.curves[0]).unwrap());
            extra.push([c, t, x]);
            extra.push([c, t, y]);
            if side == 0 {
                a = c;
            } else {
                bb = c;
            }
        }
        let (la, lb) = (w.d.labels[a], w.d.labels[bb]);
        let o = if x == usize::MAX { unreachable!() } else { diamond_path(ctx, la, lb, lx, ly, k) };
        if !o.is_success() || o.path.len() < 2 {
            return Err(Stop::Failed(format!("edges of layer {k}: no diamond path")));
        }
        let mut ids = vec![a];
        for &v in &o.path[1..o.path.len() - 1] {
            ids.push(w.add_vertex(v));
        }
        ids.push(bb);
        for p in ids.windows(2) {
            extra.push([x, p[0], p[1]]);
            extra.push([y, p[0], p[1]]);
        }
        remove.sort();
        w.replace_faces(&remove, &extra);
        let after = layer_counts(ctx, w, k).e;
        if after >= before {
            return Err(Stop::Invariant(format!("edge count in layer {k} did not drop ({before} -> {after})")));
        }
        diag.push(format!("layer {k}: pushed an edge off ({before} -> {after})"));
    }
    // Vertices.
    loop {
        let boundary: HashSet<usize> = w.d.boundary.iter().copied().collect();
        let Some(z) = (0..w.d.labels.len()).find(|&v| !boundary.contains(&v) && in_k(w, v) && !w.faces_with(&[v]).is_empty())
        else {
            break;
        };
        let before = layer_counts(ctx, w, k).v;
        let Some(mut link) = w.link_cycle(z) else {
            return Err(Stop::Failed(format!("vertices of layer {k}: link is not a cycle")));
        };
        let lz = w.d.labels[z];
        // Make every cone triangle good by inserting repair vertices in the next layer.
        let mut i = 0;
        while i < link.len() {
            let (p, q) = (link[i], link[(i + 1) % link.len()]);
            let (lp, lq) = (w.d.labels[p], w.d.labels[q]);
            if !ctx.is_good(&[lz, lp, lq]) {
                let o = triple_apex(ctx, "push_vertex_repair", lz, lp, lq, k + 1, k + 1);
                if !o.is_success() {
                    return Err(Stop::Failed(format!("vertices of layer {k}: cannot repair a bad cone triangle")));
                }
                let c = w.add_vertex(ctx.g.index_of(&o.curves[0]).unwrap());
                let f = w.faces_with(&[z, p, q]);
                w.replace_faces(&f, &[[c, p, q], [c, p, z], [c, q, z]]);
                link.insert(i + 1, c);
            }
            i += 1;
        }
        let labels: Vec<usize> = link.iter().map(|&v| w.d.labels[v]).collect();
        let o = cone_replace(ctx, lz, &labels, k, b.area);
        if !o.is_success() {
            return Err(Stop::Failed(format!("vertices of layer {k}: cone not refilled")));
        }
        let cone = o.disk.unwrap();
        let mut map = Vec::new();
        for (j, &l) in cone.labels.iter().enumerate() {
            map.push(if j < link.len() { link[j] } else { w.add_vertex(l) });
        }
        let star = w.faces_with(&[z]);
        let add: Vec<[usize; 3]> = cone.faces.iter().map(|f| f.map(|v| map[v])).collect();
        w.replace_faces(&star, &add);
        let after = layer_counts(ctx, w, k).v
            - (0..w.d.labels.len()).filter(|&v| in_k(w, v) && w.faces_with(&[v]).is_empty()).count();
        if after >= before {
            return Err(Stop::Invariant(format!("vertex count in layer {k} did not drop ({before} -> {after})")));
        }
        diag.push(format!("layer {k}: pushed a vertex off ({before} -> {after})"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{flag_complex, EdgeRule};
    use crate::normal::{enumerate_curves, DEFAULT_CURVE_CEILING};
    use crate::surface::{make_surface, standard_triangulation};
    use std::sync::Arc;

    fn graphs(g: i64, n: i64, w: u32) -> (CurveGraph, CurveGraph) {
        let t = Arc::new(standard_triangulation(make_surface(g, n).unwrap()).unwrap());
        let u = enumerate_curves(&t, w, DEFAULT_CURVE_CEILING).unwrap();
        let d = CurveGraph::build(t.clone(), u.curves.clone(), EdgeRule::Disjoint).unwrap();
        let good = CurveGraph::build(t, u.curves, EdgeRule::Good).unwrap();
        (d, good)
    }

    fn good_origin(g: &CurveGraph, cl: &Classifier) -> usize {
        (0..g.len()).find(|&v| cl.is_good(&[g.curves[v].clone()], &g.subsurface)).unwrap()
    }

    fn triangles(g: &CurveGraph) -> Vec<[usize; 3]> {
        flag_complex(g, &(0..g.len()).collect::<Vec<_>>()).1
    }

    /// Independent re-check of a triangle: pairwise disjoint and good.
    fn good_triangle(g: &CurveGraph, cl: &Classifier, f: [usize; 3]) -> bool {
        let t = &g.tri;
        let c = f.map(|v| g.curves[v].clone());
        realise_disjointly(t, &[&c[0], &c[1], &c[2]]) && cl.is_good(&c, &Subsurface::whole())
    }

    #[test]
    fn verify_disk_flags_bad_edges_and_layers() {
        let (g, _) = graphs(0, 6, 2);
        let cl = Classifier::new(&g.tri);
        let all = |_: usize| true;
        let [a, b, c] = triangles(&g)[0];
        let mut d = fill_loop(&g, &[a, b, c], &all, 4).unwrap().unwrap();
        assert!(verify_disk(&d, &g, &DiskConstraints::default()).is_empty());
        let layers = g.layers(a);
        let c1 = DiskConstraints { layers: Some((&layers, 1, 1)), ..Default::default() };
        assert!(verify_disk(&d, &g, &c1).iter().any(|v| matches!(v, DiskViolation::OutsideLayers(_))));
        let far = (0..g.len()).find(|&v| g.intersection(v, b) > 0 && g.joined(v, c)).unwrap();
        let ia = d.labels.iter().position(|&l| l == a).unwrap();
        d.labels[ia] = far;
        assert!(verify_disk(&d, &g, &DiskConstraints::default())
            .iter()
            .any(|v| matches!(v, DiskViolation::InvalidEdge(_, _))));
        let mut e = fill_loop(&g, &[a, b, c], &all, 4).unwrap().unwrap();
        e.annotate(&g, &cl);
        e.good[0] = e.good[0].map(|x| !x);
        let c2 = DiskConstraints { goodness: Some(&cl), ..Default::default() };
        assert_eq!(verify_disk(&e, &g, &c2), vec![DiskViolation::GoodnessMismatch(0)]);
    }

    #[test]
    fn triangle_repairs_on_genus_two() {
        let (g, good) = graphs(2, 2, 2);
        let cl = Classifier::new(&g.tri);
        let o = good_origin(&g, &cl);
        let ctx = Ctx::new(&g, Some(&good), &cl, o).unwrap();
        let tris = triangles(&g);
        let mut apexes = 0;
        for &f in tris.iter().filter(|f| f.contains(&o)) {
            let rest: Vec<usize> = f.iter().copied().filter(|&v| v != o).collect();
            let (x, y, z) = (o, rest[0], rest[1]);
            let out = find_tetra_apex(&ctx, x, y, z, 0);
            assert!(out.is_sound());
            if !good_triangle(&g, &cl, [x, y, z]) {
                assert_eq!(out.status, Status::PreconditionUnmet);
                continue;
            }
            if out.is_success() {
                let w = g.index_of(&out.curves[0]).unwrap();
                assert_eq!(ctx.layer(w), Some(1));
                for t in [[w, x, y], [w, x, z], [w, y, z]] {
                    assert!(good_triangle(&g, &cl, t));
                }
                assert_eq!(out.fingerprint.as_deref(), Some(ctx.fingerprint.as_str()));
                apexes += 1;
            }
            if apexes >= 5 {
                break;
            }
        }
        assert!(apexes > 0);

        // Bad triangles with good edges through the origin repair into the first sphere.
        let good_edge = |a: usize, b: usize| cl.is_good(&[g.curves[a].clone(), g.curves[b].clone()], &g.subsurface);
        let bad: Vec<[usize; 3]> = tris
            .iter()
            .copied()
            .filter(|f| good_edge(f[0], f[1]) && good_edge(f[0], f[2]) && good_edge(f[1], f[2]))
            .filter(|f| !good_triangle(&g, &cl, *f))
            .collect();
        assert!(!bad.is_empty());
        let mut fixed = 0;
        for f in bad.iter().filter(|f| f.contains(&o)).take(5) {
            let rest: Vec<usize> = f.iter().copied().filter(|&v| v != o).collect();
            let out = fix_bad_triangle(&ctx, o, rest[0], rest[1], 0);
            assert!(out.is_sound());
            if out.is_success() {
                let a = g.index_of(&out.curves[0]).unwrap();
                assert_eq!(ctx.layer(a), Some(1));
                for t in [[a, o, rest[0]], [a, o, rest[1]], [a, rest[0], rest[1]]] {
                    assert!(good_triangle(&g, &cl, t));
                }
                fixed += 1;
            }
        }
        let mut branches = HashSet::new();
        for f in bad.iter().take(40) {
            let mut f = *f;
            f.sort_by_key(|&v| ctx.layer(v));
            let r = ctx.layer(f[0]).unwrap();
            if ctx.layer(f[2]) > Some(r + 1) {
                continue;
            }
            let out = replace_bad_triangle(&ctx, f[1], f[0], f[2], r);
            assert!(out.is_sound());
            if out.is_success() {
                let cs: Vec<usize> = out.curves.iter().map(|c| g.index_of(c).unwrap()).collect();
                let (a, x, y) = (f[1], f[0], f[2]);
                let c = cs[0];
                let mut want = vec![[a, c, x], [c, x, y], [a, c, y]];
                if let Some(&d) = cs.get(1) {
                    want.extend([[c, x, d], [c, y, d], [d, x, y]]);
                }
                assert!(want.iter().all(|&t| good_triangle(&g, &cl, t)));
                branches.insert(out.branch.unwrap());
            }
        }
        assert!(fixed > 0 && !branches.is_empty(), "fixed {fixed}, branches {branches:?}");
        // A good triangle is not a repair target.
        let gt = tris.iter().find(|f| f.contains(&o) && good_triangle(&g, &cl, **f)).unwrap();
        let rest: Vec<usize> = gt.iter().copied().filter(|&v| v != o).collect();
        assert_eq!(fix_bad_triangle(&ctx, o, rest[0], rest[1], 0).status, Status::PreconditionUnmet);
    }

    #[test]
    fn diamonds_cones_and_pushes() {
        let (g, good) = graphs(2, 2, 2);
        let cl = Classifier::new(&g.tri);
        let o = good_origin(&g, &cl);
        let ctx = Ctx::new(&g, Some(&good), &cl, o).unwrap();
        let tris = triangles(&g);
        let gt = |f: [usize; 3]| good_triangle(&g, &cl, f);
        // Trivial diamonds: a = b and a adjacent to b.
        let f = tris
            .iter()
            .copied()
            .find(|f| f.contains(&o) && gt(*f) && f.iter().all(|&v| v == o || ctx.layer(v) == Some(1)))
            .unwrap();
        let rest: Vec<usize> = f.iter().copied().filter(|&v| v != o).collect();
        let (a, y) = (rest[0], rest[1]);
        let d0 = diamond_path(&ctx, a, a, o, y, 0);
        assert!(d0.is_success() && d0.path == vec![a]);
        let b = (0..g.len())
            .find(|&b| b != a && b != y && g.joined(a, b) && gt([b, o, y]) && gt([a, b, o]) && gt([a, b, y]))
            .filter(|&b| ctx.layer(b) == Some(1));
        if let Some(b) = b {
            let d1 = diamond_path(&ctx, a, b, o, y, 0);
            assert!(d1.is_success() && d1.path == vec![a, b]);
        }

        // Cones: a link triangle fills with one face; a four-cycle with a common allowed
        // neighbour fills by its cone.
        let mut tri_cone = false;
        let mut square_cone = false;
        for z in 0..g.len() {
            let Some(r) = ctx.layer(z) else { continue };
            let nb: Vec<usize> = g.adj[z].iter().copied().filter(|&v| ctx.layer(v) == Some(r + 1)).collect();
            let ok = |p: usize, q: usize| g.joined(p, q) && good.joined(p, q) && gt([p, q, z]);
            if !tri_cone {
                if let Some(t) = tris.iter().find(|t| t.iter().all(|v| nb.contains(v)) && ok(t[0], t[1]) && ok(t[1], t[2]) && ok(t[0], t[2])) {
                    let out = cone_replace(&ctx, z, t, r, 4);
                    assert!(out.is_success(), "{:?}", out.diagnostics);
                    assert_eq!(out.disk.unwrap().faces.len(), 1);
                    tri_cone = true;
                }
            }
            if !square_cone {
                for &c in &nb {
                    let ring: Vec<usize> = nb.iter().copied().filter(|&v| v != c && ok(v, c)).collect();
                    let found = ring.iter().find_map(|&p| {
                        ring.iter().find_map(|&q| {
                            ring.iter().find_map(|&s| {
                                ring.iter().find_map(|&u| {
                                    let cyc = [p, q, s, u];
                                    let distinct = cyc.iter().collect::<HashSet<_>>().len() == 4;
                                    (distinct
                                        && ok(p, q)
                                        && ok(q, s)
                                        && ok(s, u)
                                        && ok(u, p)
                                        && !good.joined(p, s)
                                        && !good.joined(q, u))
                                        .then_some(cyc)
                                })
                            })
                        })
                    });
                    if let Some(cyc) = found {
                        let out = cone_replace(&ctx, z, &cyc, r, 6);
                        assert!(out.is_success(), "{:?}", out.diagnostics);
                        let d = out.disk.unwrap();
                        assert_eq!((d.faces.len(), d.interior().len()), (4, 1));
                        square_cone = true;
                        break;
                    }
                }
            }
            if tri_cone && square_cone {
                break;
            }
        }
        assert!(tri_cone && square_cone, "{tri_cone} {square_cone}");

        // A triangle in one sphere pushes with the inner layers already clear.
        let top = ctx.layers.iter().flatten().copied().max().unwrap();
        let t = tris.iter().find(|t| t.iter().all(|&v| ctx.layer(v) == Some(top))).unwrap();
        let out = push_loop(&ctx, t, PushBudgets::default());
        assert!(out.is_success(), "{:?}", out.diagnostics);
        let prof = out.profile.unwrap();
        assert!((0..top.saturating_sub(2)).all(|k| prof.sigma(k) == 0));
        assert_eq!(prof, AnnulusProfile::of(out.disk.as_ref().unwrap(), &ctx.layers));
        // Not a loop in one sphere.
        assert_eq!(push_loop(&ctx, &[o, a, y], PushBudgets::default()).status, Status::PreconditionUnmet);
    }

    #[test]
    fn tiny_universe_runs_out() {
        let (g, good) = graphs(2, 2, 1);
        let cl = Classifier::new(&g.tri);
        let o = good_origin(&g, &cl);
        let ctx = Ctx::new(&g, Some(&good), &cl, o).unwrap();
        let statuses: HashSet<Status> = triangles(&g)
            .iter()
            .filter(|f| f.contains(&o))
            .map(|f| {
                let rest: Vec<usize> = f.iter().copied().filter(|&v| v != o).collect();
                let out = find_tetra_apex(&ctx, o, rest[0], rest[1], 0);
                assert!(out.is_sound());
                if out.status == Status::UniverseExhausted {
                    assert!(!out.diagnostics.is_empty());
                }
                out.status
            })
            .collect();
        assert!(statuses.contains(&Status::UniverseExhausted), "{statuses:?}");
    }
}
