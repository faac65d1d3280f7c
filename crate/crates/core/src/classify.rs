//! Subsurfaces of a cut, and the predicates on curves and simplices inside them.
//!
//! A subsurface is named by the multicurve that cuts it out together with one side of
//! one of those curves lying in it; the empty cut names the whole surface. Everything
//! is computed on the ambient triangulation by cutting along the union of the naming
//! multicurve and the curves under test.

use crate::cut::CutComplex;
use crate::error::{CoreError, Result};
use crate::normal::{realise_disjointly, Coords};
use crate::surface::{CutComponent, IdealTriangulation, UnionFind};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Mutex;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subsurface {
    pub cut: Vec<Coords>,
    /// A side (curve index into `cut`, side) bounding the component; `None` for the whole surface.
    pub anchor: Option<(usize, u8)>,
}

/// One component of a subsurface cut along further curves. Sides index the concatenation
/// of the subsurface's cut curves and the extra curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub chi: i64,
    pub punctures: Vec<usize>,
    pub sides: Vec<(usize, u8)>,
}

impl Part {
    pub fn b(&self) -> i64 {
        self.sides.len() as i64
    }

    pub fn genus(&self) -> i64 {
        (2 - self.b() - self.chi) / 2
    }

    pub fn xi(&self) -> i64 {
        3 * self.genus() - 3 + self.punctures.len() as i64 + self.b()
    }

    pub fn is_pants(&self) -> bool {
        self.xi() == 0
    }

    pub fn to_component(&self) -> CutComponent {
        let mut paired = 0;
        for &(x, s) in &self.sides {
            if s == 0 && self.sides.contains(&(x, 1)) {
                paired += 1;
            }
        }
        let mut c = CutComponent::new(
            self.genus() as u32,
            self.punctures.len() as u32,
            paired,
            (self.b() as u32) - 2 * paired,
        );
        c.boundary_sources = self.sides.clone();
        c
    }
}

impl Subsurface {
    pub fn whole() -> Self {
        Subsurface { cut: Vec::new(), anchor: None }
    }

    /// Every component of the complement of `x`, anchored at its lowest bounding side.
    pub fn components_of(t: &IdealTriangulation, x: &[Coords]) -> Result<Vec<Subsurface>> {
        if x.is_empty() {
            return Ok(vec![Self::whole()]);
        }
        let cx = CutComplex::new(t, x)?;
        Ok(cx
            .pieces
            .iter()
            .map(|p| {
                let anchor = *p.sides.iter().min().expect("a piece next to a cut curve has a side");
                Subsurface { cut: x.to_vec(), anchor: Some(anchor) }
            })
            .collect())
    }

    /// The component of `Σ ∖ x` lying on `side` of curve `x[curve]`.
    pub fn on_side(x: &[Coords], curve: usize, side: u8) -> Self {
        Subsurface { cut: x.to_vec(), anchor: Some((curve, side)) }
    }

    /// Parts of this subsurface cut along `y`. With `glue` set, parts are joined across
    /// cut curves having both sides in the subsurface, giving the glued surface minus `y`.
    pub fn split(&self, t: &IdealTriangulation, y: &[Coords], glue: bool) -> Result<Vec<Part>> {
        let n = self.cut.len();
        let mut all = self.cut.clone();
        all.extend(y.iter().cloned());
        if all.is_empty() {
            let info = CutComplex::new(t, &[])?;
            let p = &info.pieces[0];
            return Ok(vec![Part { chi: p.chi(), punctures: p.punctures.clone(), sides: Vec::new() }]);
        }
        let cx = CutComplex::new(t, &all)?;
        let y_idx: Vec<usize> = (n..all.len()).collect();
        let class = cx.merge_across(&y_idx);
        let inside: Vec<bool> = match self.anchor {
            None => vec![true; cx.pieces.len()],
            Some((x, s)) => {
                let home = class[cx.side_piece[x][s as usize]];
                class.iter().map(|&c| c == home).collect()
            }
        };
        let mut uf = UnionFind::new(cx.pieces.len());
        let mut glued = vec![false; all.len()];
        if glue {
            for x in 0..n {
                let [a, b] = cx.side_piece[x];
                if inside[a] && inside[b] {
                    uf.union(a, b);
                    glued[x] = true;
                }
            }
        }
        let mut parts: Vec<Part> = Vec::new();
        let mut label: HashMap<usize, usize> = HashMap::new();
        for (p, info) in cx.pieces.iter().enumerate() {
            if !inside[p] {
                continue;
            }
            let root = uf.find(p);
            let k = *label.entry(root).or_insert_with(|| {
                parts.push(Part { chi: 0, punctures: Vec::new(), sides: Vec::new() });
                parts.len() - 1
            });
            parts[k].chi += info.chi();
            parts[k].punctures.extend(info.punctures.iter().copied());
            parts[k].sides.extend(info.sides.iter().copied().filter(|&(x, _)| !glued[x]));
        }
        for p in &mut parts {
            p.punctures.sort();
            p.sides.sort();
        }
        Ok(parts)
    }

    /// The subsurface itself as a cut component.
    pub fn component(&self, t: &IdealTriangulation) -> Result<CutComponent> {
        Ok(self.split(t, &[], false)?.remove(0).to_component())
    }

    pub fn xi(&self, t: &IdealTriangulation) -> Result<i64> {
        Ok(self.split(t, &[], false)?[0].xi())
    }

    /// Whether `c` is a curve of this subsurface: disjoint from and distinct from the cut,
    /// and lying on the anchored side.
    pub fn contains(&self, t: &IdealTriangulation, c: &[u32]) -> bool {
        if self.cut.iter().any(|x| x.as_slice() == c) {
            return false;
        }
        if self.cut.is_empty() {
            return true;
        }
        let mut all: Vec<&[u32]> = self.cut.iter().map(|x| x.as_slice()).collect();
        all.push(c);
        if !realise_disjointly(t, &all) {
            return false;
        }
        let mut curves = self.cut.clone();
        curves.push(c.to_vec());
        let Ok(cx) = CutComplex::new(t, &curves) else { return false };
        let class = cx.merge_across(&[self.cut.len()]);
        let (x, s) = self.anchor.expect("nonempty cut has an anchor");
        class[cx.side_piece[self.cut.len()][0]] == class[cx.side_piece[x][s as usize]]
    }

    /// Cut curves with at least one side in this subsurface.
    pub fn boundary_curves(&self, t: &IdealTriangulation) -> Result<Vec<Coords>> {
        if self.cut.is_empty() {
            return Ok(Vec::new());
        }
        let part = self.split(t, &[], false)?.remove(0);
        let mut idx: Vec<usize> = part.sides.iter().map(|&(x, _)| x).collect();
        idx.dedup();
        Ok(idx.into_iter().map(|x| self.cut[x].clone()).collect())
    }
}

/// Bounds a genus-0 part with exactly two punctures and no other boundary.
pub fn is_pants_curve(t: &IdealTriangulation, c: &[u32], v: &Subsurface) -> Result<bool> {
    let n = v.cut.len();
    let parts = v.split(t, &[c.to_vec()], false)?;
    Ok(parts.iter().any(|p| p.genus() == 0 && p.punctures.len() == 2 && p.sides.len() == 1 && p.sides[0].0 == n))
}

/// Cutting the glued surface along `y` leaves it connected.
pub fn is_eventually_nonseparating(t: &IdealTriangulation, y: &[Coords], v: &Subsurface) -> Result<bool> {
    Ok(v.split(t, y, true)?.len() == 1)
}

pub fn is_essentially_nonseparating(t: &IdealTriangulation, c: &[u32], v: &Subsurface) -> Result<bool> {
    Ok(is_eventually_nonseparating(t, &[c.to_vec()], v)? || is_pants_curve(t, c, v)?)
}

/// Edge of the essentially non-separating graph: the glued surface minus both curves has
/// at most one non-pants component.
pub fn c0_edge(t: &IdealTriangulation, a: &[u32], b: &[u32], v: &Subsurface) -> Result<bool> {
    if !is_essentially_nonseparating(t, a, v)? || !is_essentially_nonseparating(t, b, v)? {
        return Err(CoreError::PreconditionVertex);
    }
    let parts = v.split(t, &[a.to_vec(), b.to_vec()], true)?;
    Ok(parts.iter().filter(|p| !p.is_pants()).count() <= 1)
}

/// The same edge relation through its three listed cases: jointly eventually
/// non-separating; one of the two is a pants curve; or the pair cobounds a genus-0 part
/// whose only other end is a single puncture.
pub fn c0_edge_by_cases(t: &IdealTriangulation, a: &[u32], b: &[u32], v: &Subsurface) -> Result<bool> {
    if !is_essentially_nonseparating(t, a, v)? || !is_essentially_nonseparating(t, b, v)? {
        return Err(CoreError::PreconditionVertex);
    }
    let pair = [a.to_vec(), b.to_vec()];
    if is_eventually_nonseparating(t, &pair, v)? {
        return Ok(true);
    }
    if is_pants_curve(t, a, v)? || is_pants_curve(t, b, v)? {
        return Ok(true);
    }
    let n = v.cut.len();
    let parts = v.split(t, &pair, false)?;
    Ok(parts.iter().any(|p| {
        p.genus() == 0
            && p.punctures.len() == 1
            && p.sides.len() == 2
            && p.sides.iter().any(|&(x, _)| x == n)
            && p.sides.iter().any(|&(x, _)| x == n + 1)
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonPants {
    None,
    Unique(Part),
    NotUnique(Vec<Part>),
}

pub fn unique_non_pants(t: &IdealTriangulation, v: &Subsurface, y: &[Coords]) -> Result<NonPants> {
    let mut np: Vec<Part> = v.split(t, y, false)?.into_iter().filter(|p| !p.is_pants()).collect();
    Ok(match np.len() {
        0 => NonPants::None,
        1 => NonPants::Unique(np.remove(0)),
        _ => NonPants::NotUnique(np),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodnessVerdict {
    pub verdict: bool,
    /// First failing subsimplex (indices into the input) and its non-pants parts.
    pub witness: Option<(Vec<usize>, Vec<Part>)>,
}

/// Memoising classifier over one triangulation.
pub struct Classifier<'a> {
    pub t: &'a IdealTriangulation,
    memo: Mutex<HashMap<(Subsurface, Vec<Coords>), bool>>,
}

impl<'a> Classifier<'a> {
    pub fn new(t: &'a IdealTriangulation) -> Self {
        Classifier { t, memo: Mutex::new(HashMap::new()) }
    }

    fn unique(&self, v: &Subsurface, y: &[Coords]) -> Result<(bool, Vec<Part>)> {
        let mut key_y = y.to_vec();
        key_y.sort();
        let key = (v.clone(), key_y);
        if let Some(&ok) = self.memo.lock().unwrap().get(&key) {
            if ok {
                return Ok((true, Vec::new()));
            }
        }
        let res = unique_non_pants(self.t, v, y)?;
        let (ok, parts) = match res {
            NonPants::Unique(_) => (true, Vec::new()),
            NonPants::None => (false, Vec::new()),
            NonPants::NotUnique(p) => (false, p),
        };
        self.memo.lock().unwrap().insert(key, ok);
        Ok((ok, parts))
    }

    /// Every nonempty subsimplex leaves a unique non-pants in `v`.
    pub fn is_good_simplex(&self, x: &[Coords], v: &Subsurface) -> Result<GoodnessVerdict> {
        let k = x.len();
        let mut masks: Vec<u32> = (1..(1u32 << k)).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        for m in masks {
            let idx: Vec<usize> = (0..k).filter(|i| m & (1 << i) != 0).collect();
            let sub: Vec<Coords> = idx.iter().map(|&i| x[i].clone()).collect();
            let (ok, parts) = self.unique(v, &sub)?;
            if !ok {
                return Ok(GoodnessVerdict { verdict: false, witness: Some((idx, parts)) });
            }
        }
        Ok(GoodnessVerdict { verdict: true, witness: None })
    }

    pub fn is_good(&self, x: &[Coords], v: &Subsurface) -> bool {
        self.is_good_simplex(x, v).map(|g| g.verdict).unwrap_or(false)
    }
}

/// Exhaustive checks relating goodness and the essentially non-separating graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropCheck {
    /// Curves good in the whole surface are essentially non-separating in the complement
    /// of a vertex or good edge.
    GoodVerticesInC0,
    /// Edges of the essentially non-separating graph of such a complement are good.
    C0EdgesGood,
    /// The three-case edge relation agrees with the at-most-one-non-pants relation.
    C0CasesAgree,
}

impl PropCheck {
    pub const ALL: [PropCheck; 3] = [PropCheck::GoodVerticesInC0, PropCheck::C0EdgesGood, PropCheck::C0CasesAgree];
}

impl std::str::FromStr for PropCheck {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "good-vertices" => Ok(PropCheck::GoodVerticesInC0),
            "c0-edges" => Ok(PropCheck::C0EdgesGood),
            "c0-cases" => Ok(PropCheck::C0CasesAgree),
            _ => Err(CoreError::Malformed(format!("unknown check {s:?}"))),
        }
    }
}

/// What the complement `Υ = Σ ∖ X` means in the checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reading {
    /// All of `Σ ∖ X`, with the two sides of every curve of `X` paired, so that gluing
    /// the pairs gives back `Σ`.
    Complement,
    /// Each component separately, pairing only sides lying in the same component.
    Component,
}

impl std::str::FromStr for Reading {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complement" => Ok(Reading::Complement),
            "component" => Ok(Reading::Component),
            _ => Err(CoreError::Malformed(format!("unknown reading {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropViolation {
    pub subsurface: Subsurface,
    pub curves: Vec<Coords>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropReport {
    pub check: PropCheck,
    pub reading: Reading,
    /// Multicurves cut along: single curves and good edges, plus the empty cut for the
    /// edge-relation comparison.
    pub cuts: usize,
    pub subsurfaces: usize,
    /// Curves or pairs tested.
    pub checked: usize,
    pub violations: Vec<PropViolation>,
}

/// Runs `check` over the universe `curves`, cutting along every curve and every good
/// edge of the universe.
///
/// Under [`Reading::Complement`] the glued complement is the whole surface, so the
/// predicates are evaluated there on the curves missing `X`; a pants curve inside the
/// complement is a pants curve of the whole surface and conversely.
pub fn run_prop_check(
    t: &IdealTriangulation,
    curves: &[Coords],
    check: PropCheck,
    reading: Reading,
    cl: &Classifier,
) -> Result<PropReport> {
    use rayon::prelude::*;
    let whole = Subsurface::whole();
    let n = curves.len();
    let good: Vec<bool> = curves.par_iter().map(|c| cl.is_good(std::slice::from_ref(c), &whole)).collect();
    let mut cuts: Vec<Vec<Coords>> = Vec::new();
    if check == PropCheck::C0CasesAgree {
        cuts.push(Vec::new());
    }
    cuts.extend(curves.iter().map(|c| vec![c.clone()]));
    let edges: Vec<Vec<Coords>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let (good, whole) = (&good, &whole);
            (i + 1..n).filter_map(move |j| {
                let pair = vec![curves[i].clone(), curves[j].clone()];
                (good[i] && good[j] && realise_disjointly(t, &[&curves[i], &curves[j]]) && cl.is_good(&pair, whole))
                    .then_some(pair)
            })
        })
        .collect();
    cuts.extend(edges);
    let per_cut: Vec<(usize, usize, Vec<PropViolation>)> = cuts
        .par_iter()
        .map(|x| -> Result<(usize, usize, Vec<PropViolation>)> {
            let mut checked = 0;
            let mut bad = Vec::new();
            let subs = match reading {
                Reading::Component => Subsurface::components_of(t, x)?,
                Reading::Complement => vec![Subsurface::whole()],
            };
            for v in &subs {
                let inside: Vec<usize> = (0..n)
                    .filter(|&i| {
                        !x.contains(&curves[i])
                            && match reading {
                                Reading::Component => v.contains(t, &curves[i]),
                                Reading::Complement => x.iter().all(|y| realise_disjointly(t, &[y, &curves[i]])),
                            }
                    })
                    .collect();
                let ens: Vec<bool> =
                    inside.iter().map(|&i| is_essentially_nonseparating(t, &curves[i], v)).collect::<Result<_>>()?;
                match check {
                    PropCheck::GoodVerticesInC0 => {
                        for (k, &i) in inside.iter().enumerate() {
                            if good[i] {
                                checked += 1;
                                if !ens[k] {
                                    bad.push(PropViolation { subsurface: v.clone(), curves: vec![curves[i].clone()] });
                                }
                            }
                        }
                    }
                    PropCheck::C0EdgesGood | PropCheck::C0CasesAgree => {
                        for p in 0..inside.len() {
                            for q in p + 1..inside.len() {
                                let (a, b) = (&curves[inside[p]], &curves[inside[q]]);
                                if !ens[p] || !ens[q] || !realise_disjointly(t, &[a, b]) {
                                    continue;
                                }
                                checked += 1;
                                let edge = c0_edge(t, a, b, v)?;
                                let ok = if check == PropCheck::C0EdgesGood {
                                    !edge || cl.is_good(&[a.clone(), b.clone()], &whole)
                                } else {
                                    edge == c0_edge_by_cases(t, a, b, v)?
                                };
                                if !ok {
                                    bad.push(PropViolation { subsurface: v.clone(), curves: vec![a.clone(), b.clone()] });
                                }
                            }
                        }
                    }
                }
            }
            Ok((subs.len(), checked, bad))
        })
        .collect::<Result<_>>()?;
    let mut report = PropReport { check, reading, cuts: cuts.len(), subsurfaces: 0, checked: 0, violations: Vec::new() };
    for (s, c, v) in per_cut {
        report.subsurfaces += s;
        report.checked += c;
        report.violations.extend(v);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::{enumerate_curves, DEFAULT_CURVE_CEILING};
    use crate::surface::{make_surface, standard_triangulation};
    use std::sync::Arc;

    #[test]
    fn whole_surface_is_its_own_non_pants() {
        let t = standard_triangulation(make_surface(0, 6).unwrap()).unwrap();
        match unique_non_pants(&t, &Subsurface::whole(), &[]).unwrap() {
            NonPants::Unique(p) => assert_eq!((p.genus(), p.punctures.len(), p.b()), (0, 6, 0)),
            other => panic!("{other:?}"),
        }
        let c = Classifier::new(&t);
        assert!(c.is_good_simplex(&[], &Subsurface::whole()).unwrap().verdict);
    }

    #[test]
    fn nonseparating_curves_on_torus_with_two_punctures() {
        let t = Arc::new(standard_triangulation(make_surface(1, 2).unwrap()).unwrap());
        let u = enumerate_curves(&t, 2, DEFAULT_CURVE_CEILING).unwrap();
        let mut nonsep = 0;
        for c in &u.curves {
            let v = Subsurface::whole();
            let ens = is_eventually_nonseparating(&t, &[c.clone()], &v).unwrap();
            let parts = v.split(&t, &[c.clone()], false).unwrap();
            assert_eq!(ens, parts.len() == 1);
            if ens {
                nonsep += 1;
                assert!(!is_pants_curve(&t, c, &v).unwrap());
                assert_eq!(parts[0].to_component(), {
                    let mut k = CutComponent::new(0, 2, 1, 0);
                    k.boundary_sources = vec![(0, 0), (0, 1)];
                    k
                });
            }
        }
        assert!(nonsep > 0);
    }

    #[test]
    fn good_vertices_and_the_two_readings_of_the_complement() {
        let t = Arc::new(standard_triangulation(make_surface(1, 3).unwrap()).unwrap());
        let u = enumerate_curves(&t, 2, DEFAULT_CURVE_CEILING).unwrap();
        let cl = Classifier::new(&t);
        let whole = run_prop_check(&t, &u.curves, PropCheck::GoodVerticesInC0, Reading::Complement, &cl).unwrap();
        assert!(whole.checked > 0 && whole.violations.is_empty());
        // Per component, a pair of non-separating curves that together separate leaves a
        // twice-punctured annulus in which a curve non-separating in the surface separates.
        let parts = run_prop_check(&t, &u.curves, PropCheck::GoodVerticesInC0, Reading::Component, &cl).unwrap();
        assert!(!parts.violations.is_empty());
        for v in &parts.violations {
            assert_eq!(v.subsurface.cut.len(), 2);
            let p = v.subsurface.split(&t, &[], false).unwrap().remove(0);
            assert_eq!((p.genus(), p.punctures.len(), p.b()), (0, 2, 2));
            assert!(p.sides[0].0 != p.sides[1].0);
            for x in &v.subsurface.cut {
                assert!(is_eventually_nonseparating(&t, &[x.clone()], &Subsurface::whole()).unwrap());
            }
            assert!(is_eventually_nonseparating(&t, &v.curves, &Subsurface::whole()).unwrap());
        }
    }
}
