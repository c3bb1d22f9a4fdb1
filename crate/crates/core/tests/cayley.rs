mod common;

use bscope_core::cayley::{
    act, build_ball, estimate_ball_size, on_geodesic, parse_group_spec, sphere, word_norm,
    CayleyBall, GroupElement, GroupSpec, WordMetric, DEFAULT_CAP,
};
use bscope_core::Error;
use common::{free_ball, free_dist, free_norm, l1, lattice_bfs};
use proptest::prelude::*;

fn spec(s: &str) -> GroupSpec {
    parse_group_spec(s).unwrap()
}

fn el(spec: &GroupSpec, s: &str) -> GroupElement {
    spec.parse_element(s).unwrap()
}

fn z2() -> GroupSpec {
    spec("zd:2:gens=(1,0),(0,1)")
}

#[test]
fn parse_examples() {
    let f = spec("free:2");
    assert_eq!(
        f,
        GroupSpec::Free {
            rank: 2,
            gens: None
        }
    );
    let z = z2();
    assert_eq!(z.rank(), 2);
    let gens: Vec<String> = z.generators().iter().map(|g| g.to_string()).collect();
    for v in ["(1,0)", "(-1,0)", "(0,1)", "(0,-1)"] {
        assert!(gens.contains(&v.to_string()), "{v} missing from {gens:?}");
    }
    assert_eq!(gens.len(), 4);
    match parse_group_spec("zd:2:gens=(2,0),(0,2)") {
        Err(Error::Parse { pos, .. }) => assert!(pos >= 10),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn parse_rejects_malformed() {
    for bad in [
        "",
        "free",
        "free:0",
        "free:x",
        "zd:0:gens=(1)",
        "zd:2:gens=(1,0)",
        "zd:2:gens=(1,0),(0,0)",
        "zd:2:gens=(1,0,0),(0,1)",
        "hyp:2",
        "free:2:gens=aa,b",
    ] {
        assert!(
            matches!(parse_group_spec(bad), Err(Error::Parse { .. })),
            "{bad} accepted"
        );
    }
    assert!(parse_group_spec("zd:2:gens=(2,1),(1,1)").is_ok());
    assert!(parse_group_spec("free:2:gens=a,b,ab").is_ok());
}

#[test]
fn canonical_text_round_trips() {
    for s in [
        "free:3",
        "zd:2:gens=(1,0),(0,1)",
        "zd:2:gens=(1,0),(0,1),(1,1),(1,-1)",
        "free:2:gens=a,b,ab",
    ] {
        let g = spec(s);
        assert_eq!(spec(&g.to_string()), g);
    }
}

#[test]
fn build_ball_examples() {
    assert_eq!(build_ball(&spec("free:2"), 2).unwrap().len(), 17);
    assert_eq!(build_ball(&z2(), 3).unwrap().len(), 25);
    for s in [spec("free:2"), z2()] {
        let b = build_ball(&s, 0).unwrap();
        assert_eq!(b.elements(), &[s.identity()]);
    }
}

#[test]
fn cap_is_a_resource_error() {
    match build_ball(&spec("free:9"), 12) {
        Err(Error::ResourceCap { cap, .. }) => assert_eq!(cap, DEFAULT_CAP),
        other => panic!("expected cap error, got {other:?}"),
    }
    assert!(matches!(
        CayleyBall::with_cap(&spec("free:2"), 6, 100),
        Err(Error::ResourceCap { cap: 100, .. })
    ));
}

#[test]
fn word_norm_examples() {
    let f = spec("free:2");
    assert!(matches!(
        word_norm(&f, &el(&f, "abA"), 2),
        Err(Error::OutOfWindow { .. })
    ));
    assert_eq!(word_norm(&f, &el(&f, "abA"), 3).unwrap(), 3);
    let king = spec("zd:2:gens=(1,0),(0,1),(1,1),(1,-1)");
    assert_eq!(word_norm(&king, &el(&king, "(3,2)"), 5).unwrap(), 3);
    assert_eq!(word_norm(&king, &king.identity(), 0).unwrap(), 0);
    assert!(matches!(
        word_norm(&king, &el(&king, "(3,2)"), 2),
        Err(Error::OutOfWindow { .. })
    ));
}

#[test]
fn act_examples() {
    let f = spec("free:2");
    assert_eq!(act(&f, &el(&f, "a"), &el(&f, "Ab")).unwrap(), el(&f, "b"));
    let z = z2();
    assert_eq!(
        act(&z, &el(&z, "(1,0)"), &el(&z, "(3,2)")).unwrap(),
        el(&z, "(4,2)")
    );
    for (s, x) in [(&f, "abA"), (&z, "(3,-2)")] {
        assert_eq!(act(s, &s.identity(), &el(s, x)).unwrap(), el(s, x));
    }
    assert!(matches!(
        act(&f, &el(&f, "a"), &el(&z, "(1,0)")),
        Err(Error::Domain(_))
    ));
}

#[test]
fn sphere_examples() {
    let f = spec("free:2");
    let b = build_ball(&f, 2).unwrap();
    let mut s1: Vec<String> = sphere(&b, 1)
        .unwrap()
        .iter()
        .map(|g| g.to_string())
        .collect();
    s1.sort();
    assert_eq!(s1, ["A", "B", "a", "b"]);
    assert_eq!(sphere(&build_ball(&z2(), 3).unwrap(), 2).unwrap().len(), 8);
    assert_eq!(sphere(&b, 0).unwrap(), vec![f.identity()]);
    assert!(matches!(sphere(&b, 3), Err(Error::OutOfWindow { .. })));
}

#[test]
fn on_geodesic_examples() {
    let z = z2();
    let p = |s: &str| el(&z, s);
    assert!(on_geodesic(&z, &p("(4,0)"), &p("(0,4)"), &p("(2,2)"), 8).unwrap());
    let f = spec("free:2");
    let w = |s: &str| el(&f, s);
    assert!(!on_geodesic(&f, &w("aa"), &w("bb"), &w("ab"), 4).unwrap());
    assert!(on_geodesic(&f, &w("aa"), &w("bb"), &w("aa"), 4).unwrap());
}

#[test]
fn ball_sizes_match_closed_forms() {
    for k in 1..=3u64 {
        for r in 0..=5u32 {
            let expected: u64 = 1 + (1..=r).map(|i| 2 * k * (2 * k - 1).pow(i - 1)).sum::<u64>();
            let s = spec(&format!("free:{k}"));
            assert_eq!(
                build_ball(&s, r).unwrap().len() as u64,
                expected,
                "free:{k} r={r}"
            );
            assert!(estimate_ball_size(&s, r) >= expected as u128);
        }
    }
    for r in 0..=8u32 {
        let r64 = r as usize;
        assert_eq!(
            build_ball(&z2(), r).unwrap().len(),
            2 * r64 * r64 + 2 * r64 + 1
        );
    }
}

#[test]
fn free_bfs_agrees_with_reduced_words() {
    for k in [2, 3] {
        let s = spec(&format!("free:{k}"));
        let ball = build_ball(&s, 5).unwrap();
        let words = free_ball(k, 5);
        assert_eq!(ball.len(), words.len());
        for (g, &n) in ball.elements().iter().zip(ball.norms()) {
            assert_eq!(n as i64, free_norm(&word_text(g)));
        }
    }
    let s = spec("free:2");
    let m = WordMetric::new(&s, 10).unwrap();
    let words = free_ball(2, 4);
    for u in &words {
        for v in &words {
            let d = m.dist(&el(&s, or_e(u)), &el(&s, or_e(v))).unwrap();
            assert_eq!(d as i64, free_dist(u, v), "{u} {v}");
        }
    }
}

fn word_text(g: &GroupElement) -> String {
    if g.is_identity() {
        String::new()
    } else {
        g.to_string()
    }
}

fn or_e(w: &str) -> &str {
    if w.is_empty() {
        "e"
    } else {
        w
    }
}

#[test]
fn lattice_norms_match_bfs_oracle() {
    let sets: [&[(i64, i64)]; 3] = [
        &[(1, 0), (0, 1)],
        &[(1, 0), (0, 1), (1, 1), (1, -1)],
        &[(2, 1), (1, 1)],
    ];
    for gens in sets {
        let text = gens
            .iter()
            .map(|(a, b)| format!("({a},{b})"))
            .collect::<Vec<_>>()
            .join(",");
        let s = spec(&format!("zd:2:gens={text}"));
        let ball = build_ball(&s, 5).unwrap();
        let oracle = lattice_bfs(gens, 5);
        assert_eq!(ball.len(), oracle.len(), "{text}");
        for (g, &n) in ball.elements().iter().zip(ball.norms()) {
            let v = g.as_vector().unwrap();
            assert_eq!(oracle[&(v[0], v[1])], n as i64);
        }
    }
}

#[test]
fn ball_norm_invariants() {
    for s in [spec("free:2"), z2(), spec("free:2:gens=a,b,ab")] {
        let ball = build_ball(&s, 4).unwrap();
        let m = WordMetric::new(&s, 5).unwrap();
        assert_eq!(ball.norms()[0], 0);
        for (g, &n) in ball.elements().iter().zip(ball.norms()) {
            assert!(n <= 4);
            for gen in s.generators() {
                assert!(m.norm(&s.multiply(g, &gen).unwrap()).unwrap() <= n + 1);
            }
        }
    }
}

#[test]
fn ball_json_shape() {
    let j = build_ball(&spec("free:2"), 1).unwrap().to_json();
    assert_eq!(j["spec"], "free:2");
    assert_eq!(j["radius"], 1);
    assert_eq!(
        j["elements"][0],
        serde_json::json!({"id": 0, "repr": "e", "norm": 0})
    );
    assert_eq!(j["elements"].as_array().unwrap().len(), 5);
}

#[test]
fn translation_and_base_change_exhaustive() {
    for s in [spec("free:2"), z2()] {
        let ball = build_ball(&s, 2).unwrap();
        let m = WordMetric::new(&s, 8).unwrap();
        let pts = ball.elements();
        for g in pts {
            for x in pts {
                let gx = s.multiply(g, x).unwrap();
                for y in pts {
                    let gy = s.multiply(g, y).unwrap();
                    assert_eq!(m.dist(&gx, &gy).unwrap(), m.dist(x, y).unwrap());
                    assert_eq!(
                        m.product_based(&gx, &gy, g).unwrap(),
                        m.product(x, y).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn z2_metric_is_l1() {
    let s = z2();
    let m = WordMetric::new(&s, 12).unwrap();
    let pts = common::z2_ball(3);
    for &p in &pts {
        for &q in &pts {
            let d = m
                .dist(
                    &el(&s, &format!("({},{})", p.0, p.1)),
                    &el(&s, &format!("({},{})", q.0, q.1)),
                )
                .unwrap();
            assert_eq!(d as i64, l1(p, q));
        }
    }
}

fn word_strategy() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![Just('a'), Just('A'), Just('b'), Just('B')],
        0..8,
    )
    .prop_map(|v| v.into_iter().collect())
}

proptest! {
    #[test]
    fn free_translation_invariance(g in word_strategy(), x in word_strategy(), y in word_strategy()) {
        let s = spec("free:2");
        let m = WordMetric::new(&s, 64).unwrap();
        let (g, x, y) = (el(&s, or_e(&g)), el(&s, or_e(&x)), el(&s, or_e(&y)));
        let (gx, gy) = (s.multiply(&g, &x).unwrap(), s.multiply(&g, &y).unwrap());
        prop_assert_eq!(m.dist(&gx, &gy).unwrap(), m.dist(&x, &y).unwrap());
        prop_assert_eq!(m.product_based(&gx, &gy, &g).unwrap(), m.product(&x, &y).unwrap());
    }

    #[test]
    fn free_distance_matches_oracle(x in word_strategy(), y in word_strategy()) {
        let s = spec("free:2");
        let m = WordMetric::new(&s, 64).unwrap();
        prop_assert_eq!(m.dist(&el(&s, or_e(&x)), &el(&s, or_e(&y))).unwrap() as i64, free_dist(&x, &y));
    }

    #[test]
    fn lattice_translation_invariance(g in (-4i64..5, -4i64..5), x in (-4i64..5, -4i64..5), y in (-4i64..5, -4i64..5)) {
        let s = spec("zd:2:gens=(1,0),(0,1),(1,1)");
        let m = WordMetric::new(&s, 40).unwrap();
        let v = |p: (i64, i64)| GroupElement::Vector(vec![p.0, p.1]);
        let (g, x, y) = (v(g), v(x), v(y));
        let (gx, gy) = (s.multiply(&g, &x).unwrap(), s.multiply(&g, &y).unwrap());
        prop_assert_eq!(m.dist(&gx, &gy).unwrap(), m.dist(&x, &y).unwrap());
        prop_assert_eq!(m.product_based(&gx, &gy, &g).unwrap(), m.product(&x, &y).unwrap());
    }
}
