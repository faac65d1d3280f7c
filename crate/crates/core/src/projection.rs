//! Subsurface projection, distances between projections, and a scan for pairs whose
//! geodesics all cut a fixed subsurface.

use crate::classify::Subsurface;
use crate::complex::{distance_estimate, CurveGraph, DistanceEstimate, EdgeRule};
use crate::cut::CutComplex;
use crate::error::{CoreError, Result};
use crate::intersection::{intersection_number, Overlay};
use crate::normal::{add, curve_from_walk, reverse_walk, walk_counts, Coords};
use crate::surface::IdealTriangulation;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub target: Subsurface,
    pub source: Coords,
    pub curves: Vec<Coords>,
    /// Arcs of the source lying in the target.
    pub arcs: usize,
}

/// Curves of `v` obtained by surgering the arcs of `c` in `v` along the boundary.
pub fn project(t: &IdealTriangulation, c: &[u32], v: &Subsurface) -> Result<ProjectionResult> {
    let mut res = ProjectionResult { target: v.clone(), source: c.to_vec(), curves: Vec::new(), arcs: 0 };
    if v.cut.iter().any(|x| x.as_slice() == c) {
        return Ok(res);
    }
    if v.cut.is_empty() || v.cut.iter().all(|x| intersection_number(t, c, x) == 0) {
        if v.contains(t, c) {
            res.curves.push(c.to_vec());
        }
        return Ok(res);
    }
    let cx = CutComplex::new(t, &v.cut)?;
    let (ax, aside) = v.anchor.expect("nonempty cut has an anchor");
    let home = cx.side_piece[ax][aside as usize];
    let in_v = |x: usize, s: u8| cx.side_piece[x][s as usize] == home;

    let sum = v.cut.iter().skip(1).fold(v.cut[0].clone(), |a, b| add(&a, b));
    let ov = Overlay::minimal(t, c, &sum);
    let arr = ov.arrangement();
    let mut curve_of_strand = vec![usize::MAX; arr.strands.len()];
    for (s, st) in arr.strands.iter().enumerate() {
        if st.curve == 1 {
            let w = walk_counts(t, &st.steps.iter().map(|x| x.exit_slot).collect::<Vec<_>>());
            curve_of_strand[s] = v.cut.iter().position(|x| *x == w).ok_or_else(|| {
                CoreError::Malformed("overlay strand matches no cut curve".into())
            })?;
        }
    }
    let cs = arr.strands.iter().position(|s| s.curve == 0).expect("source curve is traced");
    let m = arr.strands[cs].crossings.len();
    let mut out = Vec::new();
    for k in 0..m {
        let k1 = (k + 1) % m;
        let (ca, cb) = (arr.strands[cs].crossings[k].0, arr.strands[cs].crossings[k1].0);
        let (xa_s, xa_i) = arr.crossings[ca].on[1];
        let (xb_s, xb_i) = arr.crossings[cb].on[1];
        let (xa, xb) = (curve_of_strand[xa_s], curve_of_strand[xb_s]);
        // Leaving a crossing the source lies on the side its direction points to.
        let sa: u8 = if arr.crossings[ca].b_left { 1 } else { 0 };
        let sb: u8 = if arr.crossings[cb].b_left { 0 } else { 1 };
        if !in_v(xa, sa) {
            continue;
        }
        debug_assert!(in_v(xb, sb), "an arc ends in the piece it starts in");
        res.arcs += 1;
        let gamma = arr.strand_walk(t, cs, k, k1, true);
        let step_a = arr.strands[xa_s].crossings[xa_i].1;
        let step_b = arr.strands[xb_s].crossings[xb_i].1;
        if (xa, sa) == (xb, sb) {
            for fwd in [true, false] {
                let mut walk = gamma.clone();
                walk.extend(arr.strand_walk(t, xa_s, xb_i, xa_i, fwd));
                out.extend(curve_from_walk(t, &walk));
            }
        } else {
            let mut walk = arr.strand_loop(t, xa_s, step_a, sa == 1);
            walk.extend(&gamma);
            walk.extend(arr.strand_loop(t, xb_s, step_b, sb == 1));
            walk.extend(reverse_walk(t, &gamma));
            out.extend(curve_from_walk(t, &walk));
        }
    }
    out.sort();
    out.dedup();
    out.retain(|x| v.contains(t, x));
    res.curves = out;
    Ok(res)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsurfaceDistance {
    /// One of the projections is empty.
    Infinite,
    Finite(DistanceEstimate),
}

impl SubsurfaceDistance {
    pub fn upper(&self) -> Option<u32> {
        match self {
            SubsurfaceDistance::Infinite => None,
            SubsurfaceDistance::Finite(d) => d.upper,
        }
    }

    pub fn lower(&self) -> Option<u32> {
        match self {
            SubsurfaceDistance::Infinite => None,
            SubsurfaceDistance::Finite(d) => Some(d.lower),
        }
    }
}

/// Curve graph of `v` over the ambient curves lying in `v` plus `extra`.
pub fn subsurface_graph(tri: Arc<IdealTriangulation>, v: &Subsurface, ambient: &[Coords], extra: &[Coords]) -> Result<CurveGraph> {
    let t: &IdealTriangulation = &tri;
    let mut curves: Vec<Coords> = ambient.par_iter().filter(|c| v.contains(t, c)).cloned().collect();
    curves.extend(extra.iter().cloned());
    CurveGraph::build_in(tri.clone(), v.clone(), curves, EdgeRule::Disjoint)
}

/// Minimum distance between the projections of `a` and `b`, measured in `gv`, which must
/// contain every projected curve.
pub fn subsurface_distance(gv: &CurveGraph, pa: &ProjectionResult, pb: &ProjectionResult) -> SubsurfaceDistance {
    if pa.curves.is_empty() || pb.curves.is_empty() {
        return SubsurfaceDistance::Infinite;
    }
    let mut best: Option<DistanceEstimate> = None;
    for x in &pa.curves {
        for y in &pb.curves {
            let (i, j) = (gv.index_of(x).expect("projection in graph"), gv.index_of(y).expect("projection in graph"));
            let d = distance_estimate(gv, i, j);
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    SubsurfaceDistance::Finite(best.unwrap())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BgitRow {
    pub a: usize,
    pub b: usize,
    pub distance: u32,
    pub geodesics: u64,
    pub all_cut: bool,
    pub d_v: Option<SubsurfaceDistance>,
    pub budget_exceeded: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BgitReport {
    pub rows: Vec<BgitRow>,
    pub path_budget: u64,
    pub sample_size: usize,
    /// Largest certified lower bound on d_V among pairs whose geodesics all cut V.
    pub max_lower: Option<u32>,
    pub max_upper: Option<u32>,
}

/// Projections of every curve of `g` to `v`, and the curve graph of `v` containing them.
pub fn project_all(g: &CurveGraph, v: &Subsurface) -> Result<(Vec<ProjectionResult>, CurveGraph)> {
    let t: &IdealTriangulation = &g.tri;
    let projections: Vec<ProjectionResult> =
        g.curves.par_iter().map(|c| project(t, c, v)).collect::<Result<Vec<_>>>()?;
    let extra: Vec<Coords> = projections.iter().flat_map(|p| p.curves.iter().cloned()).collect();
    let gv = subsurface_graph(g.tri.clone(), v, &g.curves, &extra)?;
    Ok((projections, gv))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DisjointPairBound {
    pub bound: u32,
    /// Disjoint pairs of the universe both of which cut the subsurface.
    pub pairs: usize,
    /// Pairs whose distance upper bound is within the bound.
    pub certified: usize,
    /// Pairs whose certified lower bound exceeds the bound.
    pub violations: Vec<(usize, usize)>,
    /// Pairs with neither: upper bound above the bound, or no path inside the graph.
    pub inconclusive: Vec<(usize, usize)>,
    pub max_upper: Option<u32>,
}

/// Checks that disjoint curves have projections to `v` at most `bound` apart.
pub fn disjoint_pair_bound(g: &CurveGraph, v: &Subsurface, bound: u32) -> Result<DisjointPairBound> {
    let (projections, gv) = project_all(g, v)?;
    let n = g.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| g.intersection(i, j) == 0)
        .filter(|&(i, j)| !projections[i].curves.is_empty() && !projections[j].curves.is_empty())
        .collect();
    let dists: Vec<SubsurfaceDistance> =
        pairs.par_iter().map(|&(i, j)| subsurface_distance(&gv, &projections[i], &projections[j])).collect();
    let mut out = DisjointPairBound {
        bound,
        pairs: pairs.len(),
        certified: 0,
        violations: Vec::new(),
        inconclusive: Vec::new(),
        max_upper: None,
    };
    for (&p, d) in pairs.iter().zip(&dists) {
        match (d.lower(), d.upper()) {
            (_, Some(u)) if u <= bound => out.certified += 1,
            (Some(l), _) if l > bound => out.violations.push(p),
            _ => out.inconclusive.push(p),
        }
        if let Some(u) = d.upper() {
            out.max_upper = Some(out.max_upper.map_or(u, |m| m.max(u)));
        }
    }
    Ok(out)
}

/// For each pair, checks whether every geodesic inside `g` meets only curves cutting `v`
/// and, if so, records the subsurface distance.
pub fn bgit_scan(g: &CurveGraph, v: &Subsurface, pairs: &[(usize, usize)], path_budget: u64) -> Result<BgitReport> {
    let (projections, gv) = project_all(g, v)?;
    let misses: Vec<bool> = projections.iter().map(|p| p.curves.is_empty()).collect();
    let rows: Vec<BgitRow> = pairs
        .par_iter()
        .filter_map(|&(a, b)| {
            let da = g.layers(a);
            let dist = da[b]?;
            let db = g.layers(b);
            // Count geodesics through the layered DAG, saturating.
            let mut order: Vec<usize> = (0..g.len()).filter(|&x| da[x].is_some() && db[x].is_some()).collect();
            order.retain(|&x| da[x].unwrap() + db[x].unwrap() == dist);
            order.sort_by_key(|&x| da[x].unwrap());
            let mut count = vec![0u64; g.len()];
            count[a] = 1;
            for &x in &order {
                for &y in &g.adj[x] {
                    if da[y] == da[x].map(|d| d + 1) && db[y].is_some() && da[y].unwrap() + db[y].unwrap() == dist {
                        count[y] = count[y].saturating_add(count[x]);
                    }
                }
            }
            let geodesics = count[b];
            let budget_exceeded = geodesics > path_budget;
            let all_cut = order.iter().all(|&x| !misses[x]);
            let d_v = if all_cut && !budget_exceeded {
                Some(subsurface_distance(&gv, &projections[a], &projections[b]))
            } else {
                None
            };
            Some(BgitRow { a, b, distance: dist, geodesics, all_cut, d_v, budget_exceeded })
        })
        .collect();
    let max_lower = rows.iter().filter_map(|r| r.d_v.and_then(|d| d.lower())).max();
    let max_upper = rows.iter().filter_map(|r| r.d_v.and_then(|d| d.upper())).max();
    Ok(BgitReport { rows, path_budget, sample_size: pairs.len(), max_lower, max_upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::is_eventually_nonseparating;
    use crate::cut::is_essential;
    use crate::normal::{enumerate_curves, DEFAULT_CURVE_CEILING};
    use crate::surface::{make_surface, standard_triangulation};

    #[test]
    fn projections_to_complement_of_nonseparating_curve() {
        let t = Arc::new(standard_triangulation(make_surface(1, 2).unwrap()).unwrap());
        let u = enumerate_curves(&t, 3, DEFAULT_CURVE_CEILING).unwrap();
        let x = u
            .curves
            .iter()
            .find(|c| is_eventually_nonseparating(&t, &[c.to_vec()], &Subsurface::whole()).unwrap())
            .unwrap()
            .clone();
        let v = Subsurface::on_side(&[x.clone()], 0, 0);
        assert!(project(&t, &x, &v).unwrap().curves.is_empty());
        let mut twice = 0;
        for c in &u.curves {
            let k = intersection_number(&t, c, &x);
            let p = project(&t, c, &v).unwrap();
            if k == 0 && c != &x {
                assert_eq!(p.curves, vec![c.clone()]);
            }
            if k >= 1 {
                assert!(!p.curves.is_empty(), "{c:?} meets x {k} times but projects to nothing");
                assert_eq!(p.arcs, k);
            }
            if k == 2 {
                twice += 1;
            }
            for y in &p.curves {
                assert!(is_essential(&t, y));
                assert_eq!(intersection_number(&t, y, &x), 0);
            }
        }
        assert!(twice > 0);
    }

    #[test]
    fn disjoint_curves_project_close_together() {
        let t = Arc::new(standard_triangulation(make_surface(1, 2).unwrap()).unwrap());
        let u = enumerate_curves(&t, 2, DEFAULT_CURVE_CEILING).unwrap();
        let g = CurveGraph::build(t.clone(), u.curves.clone(), EdgeRule::Disjoint).unwrap();
        let x = (0..g.len())
            .find(|&i| is_eventually_nonseparating(&t, &[g.curves[i].clone()], &Subsurface::whole()).unwrap())
            .unwrap();
        let v = Subsurface::on_side(&[g.curves[x].clone()], 0, 0);
        let r = disjoint_pair_bound(&g, &v, 4).unwrap();
        assert!(r.pairs > 0);
        assert!(r.violations.is_empty() && r.inconclusive.is_empty(), "{r:?}");
        let pairs: Vec<(usize, usize)> = (0..g.len()).flat_map(|a| (a + 1..g.len()).map(move |b| (a, b))).take(200).collect();
        let rep = bgit_scan(&g, &v, &pairs, 1000).unwrap();
        for row in &rep.rows {
            if let Some(SubsurfaceDistance::Finite(d)) = row.d_v {
                assert!(row.all_cut && d.upper.is_none_or(|u| u >= d.lower));
            }
        }
    }
}
