mod common;

use bscope_core::boundary::{
    continuity_probe, converges_to_infinity, extended_product, geodesic_layer, gromov_equiv,
    horofunction_profile, metric_equiv, quotient_partition, witness_large_horofunction,
    BoundarySample, EquivMode, MetricVerdict, Operand,
};
use bscope_core::cayley::{build_ball, parse_group_spec, GroupElement, GroupSpec, WordMetric};
use bscope_core::exact::{int, Exact};
use bscope_core::rays::{parse_ray_spec, RaySpec};
use bscope_core::{Error, HalfExact};
use common::{free_dist, free_norm, l1, pow};
use proptest::prelude::*;

fn f2() -> GroupSpec {
    parse_group_spec("free:2").unwrap()
}

fn z2() -> GroupSpec {
    parse_group_spec("zd:2:gens=(1,0),(0,1)").unwrap()
}

fn f2_metric() -> WordMetric {
    WordMetric::new(&f2(), 200).unwrap()
}

fn free_sample(m: &WordMetric, label: &str, ray: &str, h: u32) -> BoundarySample {
    let r = parse_ray_spec(m.spec(), ray).unwrap();
    BoundarySample::from_ray(m, label, &r, h).unwrap()
}

fn words(m: &WordMetric, label: &str, ws: impl IntoIterator<Item = String>) -> BoundarySample {
    let pts = ws
        .into_iter()
        .map(|w| m.spec().parse_element(&w).unwrap())
        .collect();
    BoundarySample::new(m, label, pts).unwrap()
}

fn vecs(m: &WordMetric, label: &str, f: impl Fn(i64) -> (i64, i64), h: i64) -> BoundarySample {
    let pts = (1..=h).map(|n| {
        let (a, b) = f(n);
        GroupElement::Vector(vec![a, b])
    });
    BoundarySample::new(m, label, pts.collect()).unwrap()
}

fn half(v: i64) -> HalfExact {
    HalfExact::from_value(int(v))
}

fn el(m: &WordMetric, s: &str) -> GroupElement {
    m.spec().parse_element(s).unwrap()
}

#[test]
fn convergence_examples() {
    let m = f2_metric();
    let s = free_sample(&m, "a", "free:|a", 30);
    let c = converges_to_infinity(&s, int(10), &m).unwrap();
    assert!(c.passes());
    assert_eq!(c.values, (1..=30).map(half).collect::<Vec<_>>());
    assert_eq!(c.first_pass, Some(10));

    let z = WordMetric::new(&z2(), 60).unwrap();
    let x = vecs(&z, "x", |n| (n, 0), 30);
    let c = converges_to_infinity(&x, int(10), &z).unwrap();
    assert!(c.passes());
    assert_eq!(c.values, (1..=30).map(half).collect::<Vec<_>>());

    let alt = (0..10)
        .map(|i| if i % 2 == 0 { "e" } else { "a" })
        .map(String::from)
        .collect::<Vec<_>>();
    let pts = alt.iter().map(|w| el(&m, w)).collect();
    assert!(matches!(
        BoundarySample::new(&m, "alt", pts),
        Err(Error::Construction(_))
    ));
    let pts = (0..10)
        .map(|i| el(&m, if i % 2 == 0 { "a" } else { "aa" }))
        .collect();
    assert!(matches!(
        BoundarySample::new(&m, "alt", pts),
        Err(Error::Construction(_))
    ));
}

#[test]
fn gromov_equiv_examples() {
    let z = WordMetric::new(&z2(), 100).unwrap();
    let x = vecs(&z, "x", |n| (n, 0), 30);
    let y = vecs(&z, "y", |n| (0, n), 30);
    let w = vecs(&z, "z", |n| (n, n), 30);
    let xz = gromov_equiv(&x, &w, int(10), &z, EquivMode::SingleIndex).unwrap();
    assert!(xz.passes());
    assert_eq!(xz.values, (1..=30).map(half).collect::<Vec<_>>());
    for n in 1..=30i64 {
        // oracle: ½(|x| + |z| - d(x,z)) in L1
        let p = (l1((n, 0), (0, 0)) + l1((n, n), (0, 0)) - l1((n, 0), (n, n))) / 2;
        assert_eq!(p, n);
    }
    let xy = gromov_equiv(&x, &y, int(10), &z, EquivMode::SingleIndex).unwrap();
    assert!(!xy.passes());
    assert!(xy.values.iter().all(|v| v.is_zero()));
    let xx = gromov_equiv(&x, &x, int(10), &z, EquivMode::SingleIndex).unwrap();
    assert!(xx.passes());
    assert_eq!(xx.values, (1..=30).map(half).collect::<Vec<_>>());
}

#[test]
fn gromov_equiv_preconditions() {
    let m = f2_metric();
    let short = free_sample(&m, "short", "free:|b", 8);
    let a = free_sample(&m, "a", "free:|a", 40);
    match gromov_equiv(&a, &short, int(10), &m, EquivMode::SingleIndex) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("short"), "{msg}"),
        other => panic!("expected precondition error, got {other:?}"),
    }
    let z = WordMetric::new(&z2(), 10).unwrap();
    let x = vecs(&z, "x", |n| (n, 0), 4);
    assert!(matches!(
        gromov_equiv(&a, &x, int(1), &m, EquivMode::SingleIndex),
        Err(Error::Domain(_))
    ));
}

#[test]
fn double_index_mode() {
    let m = f2_metric();
    let a = free_sample(&m, "a", "free:|a", 30);
    let ab = free_sample(&m, "ab", "free:|ab", 30);
    let b = free_sample(&m, "a.b", "free:a|b", 30);
    let single = gromov_equiv(&a, &a, int(10), &m, EquivMode::SingleIndex).unwrap();
    let double = gromov_equiv(&a, &a, int(10), &m, EquivMode::DoubleIndex).unwrap();
    assert!(single.passes() && double.passes());
    assert_eq!(double.values, (1..=30).map(half).collect::<Vec<_>>());
    let c = gromov_equiv(&ab, &b, int(1), &m, EquivMode::DoubleIndex).unwrap();
    let mut expected = vec![half(2); 30];
    expected[0] = half(1);
    assert_eq!(c.values, expected);
}

#[test]
fn profile_examples() {
    let m = f2_metric();
    let s = free_sample(&m, "a", "free:|a", 30);
    for k in 1..=8usize {
        let probes = [
            el(&m, &pow("a", k)),
            el(&m, &format!("{}b", pow("a", k))),
            el(&m, "b"),
        ];
        let p = horofunction_profile(&s, &probes, None, &m).unwrap();
        let got: Vec<(Exact, usize)> = p.entries.iter().map(|e| (e.value, e.index)).collect();
        assert_eq!(
            got,
            [(int(k as i64), k), (int(k as i64 - 1), k), (int(-1), 1)]
        );
        // oracle: |x| - d(x, z) at the last point
        let x = pow("a", 30);
        assert_eq!(
            p.entries[1].value,
            int(free_norm(&x) - free_dist(&x, &format!("{}b", pow("a", k))))
        );
    }
    let p = horofunction_profile(&s, &[f2().identity()], None, &m).unwrap();
    assert_eq!((p.entries[0].value, p.entries[0].index), (int(0), 1));

    let z = WordMetric::new(&z2(), 60).unwrap();
    let x = vecs(&z, "x", |n| (n, 0), 30);
    let p = horofunction_profile(&x, &[el(&z, "(1,0)")], None, &z).unwrap();
    assert_eq!(p.entries[0].value, int(1));
}

#[test]
fn metric_equiv_examples() {
    let m = f2_metric();
    let probes = build_ball(&f2(), 3).unwrap().elements().to_vec();
    let a = free_sample(&m, "a", "free:|a", 30);
    let ab = words(&m, "ab", (1..=30).map(|n| format!("{}b", pow("a", n))));
    let r = metric_equiv(&a, &ab, &probes, None, &m).unwrap();
    assert!(r.is_equivalent());
    for k in 1..=2 {
        let z = el(&m, &format!("{}b", pow("a", k)));
        let row = r.table.iter().find(|d| d.probe == z).unwrap();
        assert_eq!((row.a, row.b), (int(k as i64 - 1), int(k as i64 - 1)));
    }
    let b = free_sample(&m, "b", "free:|b", 30);
    let r = metric_equiv(&a, &b, &[el(&m, "a")], None, &m).unwrap();
    assert_eq!(r.result, MetricVerdict::NotEquivalent);
    assert_eq!((r.table[0].a, r.table[0].b), (int(1), int(-1)));
    assert!(metric_equiv(&a, &a, &probes, None, &m)
        .unwrap()
        .is_equivalent());

    let short = free_sample(&m, "short", "free:|a", 6);
    let far = el(&m, &pow("a", 5));
    let r = metric_equiv(&short, &short, std::slice::from_ref(&far), None, &m).unwrap();
    assert_eq!(
        r.result,
        MetricVerdict::Inconclusive {
            unstable: vec![far]
        }
    );
}

#[test]
fn lemma_witness_examples() {
    let m = f2_metric();
    let s = free_sample(&m, "a", "free:|a", 40);
    let w = witness_large_horofunction(&s, int(10), Exact::new(1, 2), &m).unwrap();
    assert_eq!(w.z, el(&m, &pow("a", 11)));
    assert_eq!((w.r, w.bound), (11, int(11)));
    assert_eq!(w.indices, (11..=40).collect::<Vec<_>>());
    assert!(w.replay(&s, &m).unwrap());

    let w = witness_large_horofunction(&s, int(0), Exact::new(1, 2), &m).unwrap();
    assert_eq!((w.z.clone(), w.r), (el(&m, "a"), 1));

    let z = WordMetric::new(&z2(), 80).unwrap();
    for diag in [
        vecs(&z, "diag", |n| (n, n), 30),
        vecs(&z, "stair", |n| ((n + 1) / 2, n / 2), 40),
    ] {
        let w = witness_large_horofunction(&diag, int(5), Exact::new(1, 2), &z).unwrap();
        let v = w.z.as_vector().unwrap();
        assert!(v[0] >= 0 && v[1] >= 0 && v[0] + v[1] == 6, "{}", w.z);
        assert_eq!(w.bound, int(6));
        assert!(w.replay(&diag, &z).unwrap());
    }

    assert!(matches!(
        witness_large_horofunction(&s, int(10), int(1), &m),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        witness_large_horofunction(
            &s,
            int(10),
            Exact::new(1, 2),
            &WordMetric::new(&f2(), 8).unwrap()
        ),
        Err(Error::OutOfWindow { .. })
    ));
    let short = free_sample(&m, "short", "free:|a", 12);
    assert!(matches!(
        witness_large_horofunction(&short, int(10), Exact::new(1, 2), &m),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn lemma_witness_inconclusive_without_recurrence() {
    // x_n = a^n b^n / b^n a^n alternating: geodesics never share a sphere point
    let m = f2_metric();
    let pts = (1..=30).map(|n| {
        let w = if n % 2 == 0 {
            format!("{}{}", pow("a", n), pow("b", n))
        } else {
            format!("{}{}", pow("b", n), pow("a", n))
        };
        el(&m, &w)
    });
    let s = BoundarySample::new(&m, "zig", pts.collect()).unwrap();
    let r = witness_large_horofunction(&s, int(0), Exact::new(1, 2), &m);
    assert!(
        matches!(r, Err(Error::Precondition(_)) | Err(Error::Inconclusive(_))),
        "{r:?}"
    );
}

#[test]
fn geodesic_layer_matches_sphere_scan() {
    for (spec, r_max) in [
        (z2(), 5u32),
        (f2(), 4),
        (parse_group_spec("free:2:gens=a,b,ab").unwrap(), 4),
    ] {
        let ball = build_ball(&spec, r_max).unwrap();
        let m = WordMetric::new(&spec, 2 * r_max).unwrap();
        for x in ball.elements() {
            let nx = m.norm(x).unwrap();
            for r in 0..=nx {
                let brute: Vec<GroupElement> = ball
                    .sphere(r)
                    .unwrap()
                    .iter()
                    .filter(|y| r + m.dist(y, x).unwrap() == nx)
                    .cloned()
                    .collect();
                let got: Vec<GroupElement> =
                    geodesic_layer(&m, x, r).unwrap().into_iter().collect();
                let mut brute = brute;
                brute.sort();
                assert_eq!(got, brute, "{x} r={r}");
            }
        }
    }
}

#[test]
fn quotient_examples() {
    let m = f2_metric();
    let probes = build_ball(&f2(), 3).unwrap().elements().to_vec();
    let a = free_sample(&m, "a^n", "free:|a", 40);
    let ab = words(&m, "a^n b", (1..=40).map(|n| format!("{}b", pow("a", n))));
    let b = free_sample(&m, "b^n", "free:|b", 40);
    let abn = free_sample(&m, "(ab)^n", "free:|ab", 40);
    let q = quotient_partition(
        &[a.clone(), ab, b, abn],
        int(10),
        &probes,
        None,
        &m,
        EquivMode::SingleIndex,
    )
    .unwrap();
    assert_eq!(
        q.classes.unwrap(),
        vec![
            vec!["a^n".to_string(), "a^n b".into()],
            vec!["b^n".into()],
            vec!["(ab)^n".into()]
        ]
    );
    assert!(q.refinement_violations.is_empty());
    assert!(q.transitivity_violations.is_empty());

    let q = quotient_partition(&[a], int(10), &probes, None, &m, EquivMode::SingleIndex).unwrap();
    assert_eq!(q.classes.unwrap(), vec![vec!["a^n".to_string()]]);

    let z = WordMetric::new(&z2(), 104).unwrap();
    let zp = build_ball(&z2(), 2).unwrap().elements().to_vec();
    let x = vecs(&z, "x", |n| (n, 0), 50);
    let y = vecs(&z, "y", |n| (0, n), 50);
    let w = vecs(&z, "z", |n| (n, n), 50);
    let q = quotient_partition(&[x, y, w], int(20), &zp, None, &z, EquivMode::SingleIndex).unwrap();
    assert!(q.classes.is_none());
    assert_eq!(q.transitivity_violations.len(), 1);
    let v = &q.transitivity_violations[0];
    assert_eq!(
        (v.x.as_str(), v.y.as_str(), v.via.as_str()),
        ("x", "y", "z")
    );
}

#[test]
fn extended_product_examples() {
    let m = f2_metric();
    let a = free_sample(&m, "a", "free:|a", 30);
    let b = el(&m, "b");
    let p = extended_product(Operand::Sample(&a), Operand::Point(&b), &m).unwrap();
    assert_eq!((p.estimate, p.exact), (HalfExact::ZERO, false));
    let abn = free_sample(&m, "ab", "free:a|b", 30);
    let p = extended_product(Operand::Sample(&a), Operand::Sample(&abn), &m).unwrap();
    assert_eq!(p.estimate, half(1));
    assert!(p.tail_stable);
    let p = extended_product(Operand::Sample(&a), Operand::Sample(&a), &m).unwrap();
    for mm in [5, 10, 15] {
        assert!(p.certificate(int(mm)).passes());
    }
    let p = extended_product(
        Operand::Point(&el(&m, "ab")),
        Operand::Point(&el(&m, "aba")),
        &m,
    )
    .unwrap();
    assert_eq!((p.estimate, p.exact), (half(2), true));
}

#[test]
fn extended_product_is_a_tree_product_on_rays() {
    let m = f2_metric();
    let rays = [
        "free:|a",
        "free:|b",
        "free:a|b",
        "free:ab|a",
        "free:|ab",
        "free:aB|A",
        "free:b|A",
        "free:aa|b",
    ];
    let samples: Vec<BoundarySample> = rays.iter().map(|r| free_sample(&m, r, r, 40)).collect();
    let p = |i: usize, j: usize| {
        extended_product(
            Operand::Sample(&samples[i]),
            Operand::Sample(&samples[j]),
            &m,
        )
        .unwrap()
        .estimate
    };
    for i in 0..samples.len() {
        for j in 0..samples.len() {
            for k in 0..samples.len() {
                if i != j {
                    assert!(
                        p(i, j) >= p(i, k).min(p(j, k)),
                        "{} {} {}",
                        rays[i],
                        rays[j],
                        rays[k]
                    );
                }
            }
        }
    }
}

#[test]
fn continuity_examples() {
    let m = f2_metric();
    let probes = build_ball(&f2(), 6).unwrap();
    let omega = free_sample(&m, "a", "free:|a", 40);
    let omegas: Vec<BoundarySample> = (1..=4)
        .map(|j| free_sample(&m, &format!("w{j}"), &format!("free:{}|b", pow("a", j)), 40))
        .collect();
    let rows = continuity_probe(&omegas, &omega, &probes, int(10), &m).unwrap();
    for (j, row) in rows.iter().enumerate() {
        let j = j as u32 + 1;
        assert_eq!(row.agreement_radius, j);
        assert_eq!(row.product.estimate, half(j as i64));
    }
    let rows = continuity_probe(
        &[omega.clone(), omega.clone()],
        &omega,
        &probes,
        int(10),
        &m,
    )
    .unwrap();
    for row in rows {
        assert_eq!(row.agreement_radius, 6);
        assert!(row.product_certificate.passes());
    }
    let off: Vec<BoundarySample> = (1..=3)
        .map(|j| free_sample(&m, &format!("b{j}"), &format!("free:{}|a", pow("b", j)), 40))
        .collect();
    for row in continuity_probe(&off, &omega, &probes, int(10), &m).unwrap() {
        assert_eq!(row.product.estimate, HalfExact::ZERO);
        assert_eq!(row.agreement_radius, 0);
    }
}

#[test]
fn corollary_one_at_scale() {
    let z = WordMetric::new(&z2(), 70).unwrap();
    let m = f2_metric();
    let cases: Vec<(&WordMetric, BoundarySample)> = vec![
        (&z, vecs(&z, "x", |n| (n, 0), 30)),
        (&z, vecs(&z, "stair", |n| ((n + 1) / 2, n / 2), 30)),
        (&z, vecs(&z, "diag", |n| (n, -n), 30)),
        (&m, free_sample(&m, "a", "free:|a", 30)),
        (&m, free_sample(&m, "abB", "free:aB|Ab", 30)),
    ];
    for (metric, s) in cases {
        let r = 5;
        let probes = build_ball(metric.spec(), r).unwrap().elements().to_vec();
        let p = horofunction_profile(&s, &probes, None, metric).unwrap();
        assert!(p.unstable().is_empty(), "{}", s.label);
        assert!(converges_to_infinity(&s, int(r as i64 - 1), metric)
            .unwrap()
            .passes());
    }
}

fn tail_strategy() -> impl Strategy<Value = (String, String)> {
    ("[aAbB]{0,3}", "[aAbB]{1,3}")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn certificates_are_monotone_and_key_inequality_holds(a in tail_strategy(), b in tail_strategy()) {
        let m = f2_metric();
        let (Ok(ra), Ok(rb)) = (RaySpec::free_tail(m.spec(), &a.0, &a.1), RaySpec::free_tail(m.spec(), &b.0, &b.1)) else {
            return Ok(());
        };
        let (Ok(sa), Ok(sb)) = (BoundarySample::from_ray(&m, "a", &ra, 16), BoundarySample::from_ray(&m, "b", &rb, 16)) else {
            return Ok(());
        };
        for mode in [EquivMode::SingleIndex, EquivMode::DoubleIndex] {
            if let Ok(c) = gromov_equiv(&sa, &sb, int(1), &m, mode) {
                prop_assert!(c.is_monotone());
            }
        }
        prop_assert!(converges_to_infinity(&sa, int(3), &m).unwrap().is_monotone());
        let probes = build_ball(&f2(), 2).unwrap();
        for (x, y) in sa.points().iter().zip(sb.points()) {
            let p = m.product(x, y).unwrap().value();
            for z in probes.elements() {
                let rhs = (m.horofunction(z, x).unwrap() + m.horofunction(z, y).unwrap()) / 2;
                prop_assert!(p >= rhs);
            }
        }
    }

    #[test]
    fn corollary_two_on_perturbed_tails(prefix in "[aAbB]{0,3}", period in "[aAbB]{1,2}", tail in "[aAbB]{1,2}", shift in 0usize..3) {
        let m = f2_metric();
        let Ok(ray) = RaySpec::free_tail(m.spec(), &prefix, &period) else { return Ok(()) };
        let h = 40;
        let base: Vec<GroupElement> = (1..=h + 8).map(|t| ray.point_at(t).unwrap()).collect();
        let a = BoundarySample::new(&m, "a", base[..h as usize].to_vec()).unwrap();
        let t = m.spec().parse_element(&tail).unwrap();
        let moved: Vec<GroupElement> = base[shift..shift + h as usize].iter().map(|x| m.spec().multiply(x, &t).unwrap()).collect();
        let Ok(b) = BoundarySample::new(&m, "b", moved) else { return Ok(()) };
        let probes = build_ball(&f2(), 4).unwrap().elements().to_vec();
        let r = metric_equiv(&a, &b, &probes, None, &m).unwrap();
        if r.is_equivalent() {
            for mm in 1..=4 {
                prop_assert!(gromov_equiv(&a, &b, int(mm), &m, EquivMode::SingleIndex).unwrap().passes());
            }
        }
    }
}
