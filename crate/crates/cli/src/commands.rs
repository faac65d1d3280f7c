use crate::config::{Command, ExperimentConfig, Format};
use crate::error::CliError;
use crate::universe::{self, parse_coords, parse_multicurve, CacheStatus};
use curvecx::classify::{run_prop_check, Classifier, PropCheck, Reading, Subsurface};
use curvecx::complex::{component_count, fill_loop, flag_complex, h1_rank_mod2, slice_of, CurveGraph, EdgeRule};
use curvecx::cut::is_essential;
use curvecx::normal::{is_connected_curve, is_valid, Coords};
use curvecx::projection::{bgit_scan, disjoint_pair_bound, project};
use curvecx::surgery::{push_loop, verify_disk, Ctx, DiskConstraints, PushBudgets, Status};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub enum Output {
    Report {
        fingerprint: String,
        result: Value,
        summary: String,
        /// Set when a cross-check failed; the report is still written.
        invariant: Option<String>,
    },
    Raw {
        text: String,
        summary: String,
    },
}

fn report(fingerprint: String, result: impl Serialize, summary: String) -> Output {
    Output::Report { fingerprint, result: serde_json::to_value(result).expect("report serialises"), summary, invariant: None }
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Output, CliError> {
    match cmd {
        Command::Enumerate => enumerate(cfg),
        Command::Graph => graph(cfg),
        Command::Sphere => sphere(cfg),
        Command::Census => census(cfg),
        Command::Classify => classify(cfg),
        Command::Project => project_cmd(cfg),
        Command::Bgit => bgit(cfg),
        Command::Push => push(cfg),
        Command::Fill => fill(cfg),
    }
}

fn enumerate(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let l = universe::load(cfg)?;
    let n = l.universe.len();
    let status = match l.cache {
        CacheStatus::Written => "cache written",
        CacheStatus::HitVerified => "cache hit, fingerprint verified",
    };
    let summary = format!("{n} curves on S{},{} with weights <= {}; {status}", cfg.surface.0, cfg.surface.1, cfg.max_weight);
    let fp = l.universe.fingerprint();
    Ok(report(fp, json!({ "curves": n, "cache": l.cache, "path": l.path }), summary))
}

fn build(cfg: &ExperimentConfig, rule: EdgeRule) -> Result<(CurveGraph, String), CliError> {
    let l = universe::load(cfg)?;
    let fp = l.universe.fingerprint();
    Ok((CurveGraph::build(l.tri, l.universe.curves, rule)?, fp))
}

fn graph(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let (g, fp) = build(cfg, cfg.edge_rule)?;
    let summary = format!("{} vertices, {} edges ({} rule)", g.len(), g.n_edges(), cfg.edge_rule);
    if cfg.format == Format::Dot {
        return Ok(Output::Raw { text: g.to_dot(), summary });
    }
    let result = json!({
        "edge_rule": cfg.edge_rule,
        "vertices": g.len(),
        "edges": g.n_edges(),
        "curves": g.curves,
        "adjacency": g.adj,
    });
    Ok(report(fp, result, summary))
}

fn sphere(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let (g, fp) = build(cfg, cfg.edge_rule)?;
    let o = universe::origin(&g.tri, &universe_of(&g), &cfg.origin)?;
    let d = g.layers(o);
    let s = slice_of(&g, o, cfg.radius, &d, &[cfg.radius]);
    let comps = component_count(&g, &s.vertices);
    let result = json!({
        "origin": g.curves[o],
        "radius": cfg.radius,
        "vertices": s.vertices.iter().map(|&v| &g.curves[v]).collect::<Vec<_>>(),
        "edges": s.edges,
        "components": comps,
        "h1_rank": h1_rank_mod2(&g, &s.vertices),
    });
    Ok(report(fp, result, format!("S_{}: {} vertices, {} components", cfg.radius, s.vertices.len(), comps)))
}

fn universe_of(g: &CurveGraph) -> curvecx::normal::CurveUniverse {
    curvecx::normal::CurveUniverse::from_curves(g.tri.clone(), 0, g.curves.clone())
}

#[derive(Serialize)]
struct CensusRow {
    radii: Vec<u32>,
    vertices: usize,
    edges: usize,
    components: usize,
    h1_rank: usize,
}

fn census(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let (g, fp) = build(cfg, cfg.edge_rule)?;
    let o = universe::origin(&g.tri, &universe_of(&g), &cfg.origin)?;
    let d = g.layers(o);
    let row = |radii: &[u32]| {
        let s = slice_of(&g, o, radii[0], &d, radii);
        CensusRow {
            radii: radii.to_vec(),
            vertices: s.vertices.len(),
            edges: s.edges.len(),
            components: component_count(&g, &s.vertices),
            h1_rank: h1_rank_mod2(&g, &s.vertices),
        }
    };
    let rows: Vec<CensusRow> = (0..=cfg.radius).map(|r| row(&[r])).collect();
    let unions: Vec<CensusRow> = (0..=cfg.radius.min(3)).map(|r| row(&[r, r + 1])).collect();
    let s1_connected = rows.get(1).map(|r| r.vertices > 0 && r.components == 1);
    let max_layer = d.iter().flatten().max().copied();
    let unreached = d.iter().filter(|x| x.is_none()).count();
    let summary = format!(
        "origin {:?}: {} radii, max layer {:?}, S_1 connected: {:?}",
        g.curves[o],
        rows.len(),
        max_layer,
        s1_connected
    );
    let result = json!({
        "origin": g.curves[o],
        "max_weight": cfg.max_weight,
        "edge_rule": cfg.edge_rule,
        "max_layer": max_layer,
        "unreached": unreached,
        "s1_connected": s1_connected,
        "rows": rows,
        "unions": unions,
    });
    Ok(report(fp, result, summary))
}

fn classify(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let l = universe::load(cfg)?;
    let checks: Vec<PropCheck> = match cfg.check.as_str() {
        "all" => PropCheck::ALL.to_vec(),
        s => vec![s.parse()?],
    };
    let readings = match cfg.reading.as_str() {
        "both" => vec![Reading::Complement, Reading::Component],
        s => vec![s.parse()?],
    };
    let cl = Classifier::new(&l.tri);
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut invariant = None;
    for &c in &checks {
        for &r in &readings {
            let rep = run_prop_check(&l.tri, &l.universe.curves, c, r, &cl)?;
            lines.push(format!("{} ({}): {} violations in {} checked", name_of(c), name_of(r), rep.violations.len(), rep.checked));
            if c == PropCheck::C0CasesAgree && !rep.violations.is_empty() {
                invariant = Some(format!("the two edge relations disagree on {} pairs", rep.violations.len()));
            }
            let examples: Vec<_> = rep.violations.iter().take(20).collect();
            rows.push(json!({
                "check": c,
                "reading": r,
                "cuts": rep.cuts,
                "subsurfaces": rep.subsurfaces,
                "checked": rep.checked,
                "violations": rep.violations.len(),
                "examples": examples,
            }));
        }
    }
    let fp = l.universe.fingerprint();
    let Output::Report { fingerprint, result, summary, .. } = report(fp, json!({ "checks": rows }), lines.join("\n")) else {
        unreachable!()
    };
    Ok(Output::Report { fingerprint, result, summary, invariant })
}

fn name_of(x: impl Serialize) -> String {
    serde_json::to_value(x).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn subsurface(cfg: &ExperimentConfig, t: &curvecx::surface::IdealTriangulation) -> Result<Subsurface, CliError> {
    let cut = parse_multicurve(cfg.subsurface_from.as_deref().ok_or_else(|| CliError::Config("--subsurface-from is required".into()))?)?;
    for c in &cut {
        check_curve(t, c)?;
    }
    let (x, s) = match cfg.side.as_deref() {
        None => (0, 0),
        Some(s) => {
            let (a, b) = s.split_once(':').ok_or_else(|| CliError::Config(format!("side {s:?}: expected curve:side")))?;
            let p = |v: &str| v.trim().parse::<usize>().map_err(|_| CliError::Config(format!("side {s:?}: expected integers")));
            (p(a)?, p(b)?)
        }
    };
    if cut.is_empty() || x >= cut.len() || s > 1 {
        return Err(CliError::Config("side must name a cutting curve and side 0 or 1".into()));
    }
    Ok(Subsurface::on_side(&cut, x, s as u8))
}

fn check_curve(t: &curvecx::surface::IdealTriangulation, c: &[u32]) -> Result<(), CliError> {
    if c.len() != t.n_edges() {
        return Err(curvecx::CoreError::LengthMismatch { expected: t.n_edges(), got: c.len() }.into());
    }
    if !is_valid(t, c) || !is_connected_curve(t, c) || !is_essential(t, c) {
        return Err(CliError::Config(format!("{c:?} is not an essential simple closed curve")));
    }
    Ok(())
}

fn project_cmd(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let t = universe::triangulation(cfg)?;
    let c = parse_coords(cfg.curve.as_deref().ok_or_else(|| CliError::Config("--curve is required".into()))?)?;
    check_curve(&t, &c)?;
    let v = subsurface(cfg, &t)?;
    let p = project(&t, &c, &v)?;
    let summary = format!("{} arcs, {} projected curves", p.arcs, p.curves.len());
    Ok(report(t.fingerprint(), p, summary))
}

fn default_subsurface(g: &CurveGraph) -> Result<Subsurface, CliError> {
    let o = universe::origin(&g.tri, &universe_of(g), "first-nonseparating")?;
    Ok(Subsurface::on_side(&[g.curves[o].clone()], 0, 0))
}

fn bgit(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let (g, fp) = build(cfg, EdgeRule::Disjoint)?;
    let v = match cfg.subsurface_from {
        Some(_) => subsurface(cfg, &g.tri)?,
        None => default_subsurface(&g)?,
    };
    let bound = disjoint_pair_bound(&g, &v, 4)?;
    let n = g.len();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    pairs.shuffle(&mut rng);
    pairs.truncate(cfg.samples);
    let scan = bgit_scan(&g, &v, &pairs, cfg.path_budget)?;
    let all_cut = scan.rows.iter().filter(|r| r.all_cut).count();
    let summary = format!(
        "disjoint pairs: {} checked, {} certified within 4, {} violations, {} inconclusive; sampled {} pairs, {} with every geodesic cutting V, max d_V in [{:?}, {:?}]",
        bound.pairs,
        bound.certified,
        bound.violations.len(),
        bound.inconclusive.len(),
        scan.sample_size,
        all_cut,
        scan.max_lower,
        scan.max_upper
    );
    let result = json!({ "subsurface": v, "disjoint_pairs": bound, "scan": scan });
    Ok(report(fp, result, summary))
}

/// Triangles and chordless squares inside one sphere.
fn sphere_loops(g: &CurveGraph, layer: &[usize], cap: usize) -> Vec<Vec<usize>> {
    let (_, tris) = flag_complex(g, layer);
    let mut loops: Vec<Vec<usize>> = tris.iter().map(|t| t.to_vec()).collect();
    let set: std::collections::HashSet<usize> = layer.iter().copied().collect();
    'outer: for &a in layer {
        for &b in g.adj[a].iter().filter(|&&b| b > a && set.contains(&b)) {
            for &c in g.adj[b].iter().filter(|&&c| c > a && c != b && set.contains(&c) && !g.adjacent(a, c)) {
                for &d in g.adj[c].iter().filter(|&&d| d > b && set.contains(&d) && g.adjacent(d, a) && !g.adjacent(b, d)) {
                    loops.push(vec![a, b, c, d]);
                    if loops.len() >= cap {
                        break 'outer;
                    }
                }
            }
        }
    }
    loops
}

fn push(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let l = universe::load(cfg)?;
    let fp = l.universe.fingerprint();
    let g = CurveGraph::build(l.tri.clone(), l.universe.curves.clone(), EdgeRule::Disjoint)?;
    let good = CurveGraph::build(l.tri.clone(), l.universe.curves.clone(), EdgeRule::Good)?;
    let cl = Classifier::new(&l.tri);
    let o = universe::origin(&l.tri, &l.universe, &cfg.origin)?;
    let ctx = Ctx::new(&g, Some(&good), &cl, o)?;
    let layer: Vec<usize> = (0..g.len()).filter(|&v| ctx.layer(v) == Some(cfg.radius)).collect();
    let mut loops = sphere_loops(&g, &layer, 100_000);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    loops.shuffle(&mut rng);
    loops.truncate(cfg.samples);
    let budgets = PushBudgets { area: cfg.area_budget, width: cfg.width };
    let outcomes: Vec<_> = loops.par_iter().map(|gamma| push_loop(&ctx, gamma, budgets)).collect();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for o in &outcomes {
        *counts.entry(name_of(o.status)).or_default() += 1;
    }
    let unsound = outcomes.iter().filter(|o| !o.is_sound()).count();
    let summary = format!("{} loops in S_{} (of {} available): {:?}", outcomes.len(), cfg.radius, layer.len(), counts);
    let result = json!({
        "origin": g.curves[o],
        "radius": cfg.radius,
        "layer_size": layer.len(),
        "status_counts": counts,
        "transcripts": outcomes,
    });
    let invariant = (unsound > 0).then(|| format!("{unsound} successes failed re-verification"));
    let successes = outcomes.iter().filter(|o| o.status == Status::Success).count();
    debug_assert!(successes <= outcomes.len());
    Ok(Output::Report { fingerprint: fp, result, summary, invariant })
}

fn fill(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let (g, fp) = build(cfg, cfg.edge_rule)?;
    let cs: Vec<Coords> =
        parse_multicurve(cfg.loop_.as_deref().ok_or_else(|| CliError::Config("--loop is required".into()))?)?;
    let idx: Vec<usize> = cs
        .iter()
        .map(|c| g.index_of(c).ok_or_else(|| curvecx::CoreError::InvalidLoop(format!("{c:?} is not in the universe"))))
        .collect::<Result<_, _>>()?;
    let all = |_: usize| true;
    match fill_loop(&g, &idx, &all, cfg.area_budget)? {
        None => {
            let summary = format!("no disk within {} faces (not a proof that none exists)", cfg.area_budget);
            Ok(report(fp, json!({ "found": false, "area_budget": cfg.area_budget }), summary))
        }
        Some(d) => {
            let cons = DiskConstraints { boundary: Some(idx.clone()), ..Default::default() };
            let violations = verify_disk(&d, &g, &cons);
            if !violations.is_empty() {
                return Err(CliError::Invariant(format!("returned disk fails verification: {violations:?}")));
            }
            let summary = format!("disk with {} faces, {} interior vertices", d.faces.len(), d.interior().len());
            if cfg.format == Format::Dot {
                return Ok(Output::Raw { text: d.to_dot(&g, None), summary });
            }
            Ok(report(fp, json!({ "found": true, "disk": d }), summary))
        }
    }
}
