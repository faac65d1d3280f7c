mod common;

use common::{lemma_instances, minus_nonseparating, sphere_minus_two_pants};
use curvecx::classify::{is_eventually_nonseparating, Classifier, Subsurface};
use curvecx::cut::is_essential;
use curvecx::normal::realise_disjointly;
use curvecx::surgery::{find_good_edge_partner, find_good_triangle_apex, Status};

#[test]
fn edge_partners_verify_independently() {
    let inst = lemma_instances();
    assert!(inst.edges.len() >= 10);
    let whole = Subsurface::whole();
    let mut branches = std::collections::BTreeSet::new();
    for (name, s, a) in &inst.edges {
        let cl = Classifier::new(&s.t);
        let out = find_good_edge_partner(&s.t, &cl, a, &s.v);
        assert_eq!(out.status, Status::Success, "{name}: {:?}", out.diagnostics);
        let c = &out.curves[0];
        assert!(is_essential(&s.t, c) && s.v.contains(&s.t, c) && c != a);
        assert!(realise_disjointly(&s.t, &[a, c]));
        // A fresh classifier, so no memo is shared with the construction.
        assert!(Classifier::new(&s.t).is_good(&[a.clone(), c.clone()], &whole));
        branches.insert(out.branch.unwrap());
    }
    assert!(branches.contains("pants") && branches.contains("nonseparating"), "{branches:?}");
}

#[test]
fn genus_case_gives_nonseparating_partner() {
    let s = minus_nonseparating(2, 3);
    let cl = Classifier::new(&s.t);
    let out = find_good_edge_partner(&s.t, &cl, &s.good[0], &s.v);
    assert_eq!(out.branch.as_deref(), Some("nonseparating"));
    assert!(is_eventually_nonseparating(&s.t, &out.curves, &Subsurface::whole()).unwrap());
}

#[test]
fn triangle_apexes_verify_independently() {
    let inst = lemma_instances();
    assert!(inst.triangles.len() >= 10);
    for (name, s, a, b) in &inst.triangles {
        let cl = Classifier::new(&s.t);
        let out = find_good_triangle_apex(&s.t, &cl, a, b, &s.v);
        assert_eq!(out.status, Status::Success, "{name}: {:?}", out.diagnostics);
        let c = &out.curves[0];
        assert!(s.v.contains(&s.t, c) && c != a && c != b);
        assert!(realise_disjointly(&s.t, &[a, b, c]));
        assert!(Classifier::new(&s.t).is_good(&[a.clone(), b.clone(), c.clone()], &Subsurface::whole()));
    }
}

#[test]
fn low_complexity_is_refused() {
    // Complexity 4 and 5 subsurfaces are below the triangle-apex bound.
    for s in [sphere_minus_two_pants(9), minus_nonseparating(2, 3)] {
        let cl = Classifier::new(&s.t);
        let out = find_good_triangle_apex(&s.t, &cl, &s.good[0], &s.good[1], &s.v);
        assert_eq!(out.status, Status::PreconditionUnmet);
    }
    // Complexity 2: the sphere with seven punctures minus two pants curves.
    let s = sphere_minus_two_pants(7);
    let cl = Classifier::new(&s.t);
    let out = find_good_edge_partner(&s.t, &cl, &s.good[0], &s.v);
    assert_eq!(out.status, Status::PreconditionUnmet);
}
