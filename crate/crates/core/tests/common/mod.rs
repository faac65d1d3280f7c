#![allow(dead_code)]

use curvecx::normal::Coords;
use curvecx::surface::{make_surface, standard_triangulation, IdealTriangulation};
use std::sync::Arc;

pub fn tri(g: i64, n: i64) -> Arc<IdealTriangulation> {
    Arc::new(standard_triangulation(make_surface(g, n).unwrap()).unwrap())
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive slopes (p, q) with |p|, |q| <= bound, one representative per ± pair.
pub fn slopes(bound: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for q in 0..=bound {
        for p in -bound..=bound {
            if gcd(p, q) != 1 || (q == 0 && p != 1) {
                continue;
            }
            out.push((p, q));
        }
    }
    out
}

fn det(a: (i64, i64), b: (i64, i64)) -> u32 {
    (a.0 * b.1 - a.1 * b.0).unsigned_abs() as u32
}

/// Once-punctured torus from the square with sides a = (1,0), b = (0,1) and the
/// diagonal (1,1): the weight on an edge is the determinant with its direction.
pub fn torus_slope(t: &IdealTriangulation, s: (i64, i64)) -> Coords {
    let mut w = vec![0; 3];
    w[t.edge_of(0)] = det(s, (1, 0));
    w[t.edge_of(1)] = det(s, (0, 1));
    w[t.edge_of(2)] = det(s, (1, 1));
    w
}

/// Four-punctured sphere (tetrahedron): each pair of opposite edges gets one of the
/// directions (1,0), (0,1), (1,1), in order of the pair's lowest edge.
pub fn sphere4_slope(t: &IdealTriangulation, s: (i64, i64)) -> Coords {
    let mut classes: Vec<[usize; 2]> = Vec::new();
    for e in 0..t.n_edges() {
        let (a, b) = t.edge_endpoints(e);
        for f in e + 1..t.n_edges() {
            let (c, d) = t.edge_endpoints(f);
            if a != c && a != d && b != c && b != d {
                classes.push([e, f]);
            }
        }
    }
    assert_eq!(classes.len(), 3);
    let dirs = [(1, 0), (0, 1), (1, 1)];
    let mut w = vec![0; 6];
    for (cl, d) in classes.iter().zip(dirs) {
        for &e in cl {
            w[e] = det(s, d);
        }
    }
    w
}

pub fn slope_det(a: (i64, i64), b: (i64, i64)) -> usize {
    det(a, b) as usize
}

/// Two-holed subsurface cut off by `cut`, and the curves of it that are good in the whole
/// surface, in coordinate order.
pub struct TwoHoled {
    pub t: Arc<IdealTriangulation>,
    pub v: curvecx::classify::Subsurface,
    pub good: Vec<Coords>,
}

fn two_holed(t: Arc<IdealTriangulation>, cut: Vec<Coords>) -> TwoHoled {
    use curvecx::classify::{Classifier, Subsurface};
    use curvecx::construct::piece_candidates;
    use curvecx::cut::CutComplex;
    let v = (0..cut.len())
        .flat_map(|x| [0u8, 1].map(|s| Subsurface::on_side(&cut, x, s)))
        .find(|v| {
            let p = v.split(&t, &[], false).unwrap();
            p.len() == 1 && p[0].b() == 2
        })
        .expect("a side with two boundaries");
    let cx = CutComplex::new(&t, &v.cut).unwrap();
    let (x, s) = v.anchor.unwrap();
    let mut cands = piece_candidates(&cx, cx.side_piece[x][s as usize]);
    cands.sort();
    cands.dedup();
    let cl = Classifier::new(&t);
    let whole = Subsurface::whole();
    let good = cands.into_iter().filter(|c| v.contains(&t, c) && cl.is_good(&[c.clone()], &whole)).collect();
    TwoHoled { t, v, good }
}

/// Complement of the pants curves around punctures {1,2} and {3,4} on a sphere.
pub fn sphere_minus_two_pants(n: i64) -> TwoHoled {
    use curvecx::construct::pants_curve;
    let t = tri(0, n);
    let cut = vec![pants_curve(&t, 0, 1).unwrap(), pants_curve(&t, 2, 3).unwrap()];
    two_holed(t, cut)
}

/// Complement of the first non-separating candidate curve of the whole surface.
pub fn minus_nonseparating(g: i64, n: i64) -> TwoHoled {
    use curvecx::classify::{is_eventually_nonseparating, Subsurface};
    use curvecx::construct::piece_candidates;
    use curvecx::cut::CutComplex;
    let t = tri(g, n);
    let cx = CutComplex::new(&t, &[]).unwrap();
    let mut cands = piece_candidates(&cx, 0);
    cands.sort();
    let x = cands
        .into_iter()
        .find(|c| is_eventually_nonseparating(&t, &[c.clone()], &Subsurface::whole()).unwrap())
        .unwrap();
    two_holed(t, vec![x])
}

/// Fixed instance lists for the edge-partner and triangle-apex constructions: every good
/// curve (resp. good disjoint pair) of each listed subsurface, capped per surface.
pub struct LemmaInstances {
    pub edges: Vec<(String, Arc<TwoHoled>, Coords)>,
    pub triangles: Vec<(String, Arc<TwoHoled>, Coords, Coords)>,
}

pub fn lemma_instances() -> LemmaInstances {
    use curvecx::classify::{Classifier, Subsurface};
    use curvecx::normal::realise_disjointly;
    let mut edges = Vec::new();
    for (name, s) in [("S0,9 minus two pants curves", sphere_minus_two_pants(9)), ("S2,3 minus a non-separating curve", minus_nonseparating(2, 3))] {
        let s = Arc::new(s);
        for a in s.good.iter().take(12) {
            edges.push((name.to_string(), s.clone(), a.clone()));
        }
    }
    let mut triangles = Vec::new();
    for (name, s) in [
        ("S0,11 minus two pants curves", sphere_minus_two_pants(11)),
        ("S2,4 minus a non-separating curve", minus_nonseparating(2, 4)),
        ("S4,1 minus a non-separating curve", minus_nonseparating(4, 1)),
    ] {
        let s = Arc::new(s);
        let cl = Classifier::new(&s.t);
        let mut k = 0;
        'pairs: for i in 0..s.good.len() {
            for j in i + 1..s.good.len() {
                let (a, b) = (&s.good[i], &s.good[j]);
                if realise_disjointly(&s.t, &[a, b]) && cl.is_good(&[a.clone(), b.clone()], &Subsurface::whole()) {
                    triangles.push((name.to_string(), s.clone(), a.clone(), b.clone()));
                    k += 1;
                    if k == 6 {
                        break 'pairs;
                    }
                }
            }
        }
    }
    LemmaInstances { edges, triangles }
}
