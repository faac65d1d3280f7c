mod common;

use common::*;
use curvecx::cut::cut_along;
use curvecx::intersection::intersection_number;
use curvecx::normal::{add, components_of, enumerate_curves, is_connected_curve, is_valid, Coords, DEFAULT_CURVE_CEILING};
use curvecx::surface::IdealTriangulation;
use proptest::prelude::*;
use std::sync::{Arc, OnceLock};

fn primitive(bound: i64) -> impl Strategy<Value = (i64, i64)> {
    (-bound..=bound, 0..=bound).prop_filter("primitive slope", |&(p, q)| gcd(p, q) == 1 && (q > 0 || p == 1))
}

type Universe = (Arc<IdealTriangulation>, Vec<Coords>);

fn sphere5() -> &'static Universe {
    static U: OnceLock<Universe> = OnceLock::new();
    U.get_or_init(|| {
        let t = tri(0, 5);
        let cs = enumerate_curves(&t, 2, DEFAULT_CURVE_CEILING).unwrap().curves;
        (t, cs)
    })
}

fn genus_one() -> &'static Universe {
    static U: OnceLock<Universe> = OnceLock::new();
    U.get_or_init(|| {
        let t = tri(1, 2);
        let cs = enumerate_curves(&t, 2, DEFAULT_CURVE_CEILING).unwrap().curves;
        (t, cs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn torus_slopes_beyond_the_oracle_range(a in primitive(40), b in primitive(40)) {
        let t = tri(1, 1);
        let (x, y) = (torus_slope(&t, a), torus_slope(&t, b));
        prop_assert!(is_valid(&t, &x) && is_connected_curve(&t, &x));
        prop_assert_eq!(intersection_number(&t, &x, &y), slope_det(a, b));
    }

    #[test]
    fn four_punctured_sphere_slopes(a in primitive(25), b in primitive(25)) {
        let t = tri(0, 4);
        let (x, y) = (sphere4_slope(&t, a), sphere4_slope(&t, b));
        prop_assert_eq!(intersection_number(&t, &x, &y), 2 * slope_det(a, b));
    }

    #[test]
    fn intersection_is_symmetric_and_even_on_spheres(i in 0usize..1000, j in 0usize..1000) {
        let (t, cs) = sphere5();
        let (a, b) = (&cs[i % cs.len()], &cs[j % cs.len()]);
        let k = intersection_number(t, a, b);
        prop_assert_eq!(k, intersection_number(t, b, a));
        prop_assert_eq!(k % 2, 0);
        prop_assert_eq!(k == 0 && a != b, curvecx::normal::realise_disjointly(t, &[a, b]));
    }

    #[test]
    fn disjoint_sums_split_back(i in 0usize..1000, j in 0usize..1000) {
        let (t, cs) = genus_one();
        let (a, b) = (&cs[i % cs.len()], &cs[j % cs.len()]);
        prop_assume!(a != b && intersection_number(t, a, b) == 0);
        let mut parts: Vec<Coords> = components_of(t, &add(a, b)).into_iter().map(|(c, m)| { assert_eq!(m, 1); c }).collect();
        parts.sort();
        let mut want = vec![a.clone(), b.clone()];
        want.sort();
        prop_assert_eq!(parts, want);
    }

    #[test]
    fn cutting_removes_one_unit_of_complexity_per_curve(i in 0usize..1000, j in 0usize..1000) {
        let (t, cs) = genus_one();
        let (a, b) = (&cs[i % cs.len()], &cs[j % cs.len()]);
        let x: Vec<Coords> = if a != b && intersection_number(t, a, b) == 0 { vec![a.clone(), b.clone()] } else { vec![a.clone()] };
        let s = cut_along(t, &x).unwrap();
        prop_assert_eq!(s.total_complexity() + x.len() as i64, t.sig.xi());
    }
}
