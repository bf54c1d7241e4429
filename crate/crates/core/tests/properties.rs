use folmetlab::config::{ExperimentConfig, ExperimentType, PointsSpec, SequenceSpec};
use folmetlab::eta::{eta_estimate, EtaOptions};
use folmetlab::foliation::{FieldPreset, PolyVectorField};
use folmetlab::geometry::{DomainExpr, Point};
use folmetlab::planar::{density_annulus, density_disc, pushforward_consistency_check, Cover};
use folmetlab::rng::SeedStream;
use folmetlab::Complex64;
use proptest::prelude::*;

fn complex_in(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| Complex64::from_polar(m, t))
}

fn point2(r: f64) -> impl Strategy<Value = Point> {
    prop::collection::vec(-r..r, 4).prop_map(|v| Point::from_re_im(&v).unwrap())
}

fn domain2() -> impl Strategy<Value = DomainExpr> {
    let leaf = prop_oneof![
        (point2(1.0), 0.2..2.0f64, 0.2..2.0f64)
            .prop_map(|(c, a, b)| DomainExpr::polydisc(c, vec![a, b]).unwrap()),
        (point2(1.0), 0.2..2.0f64).prop_map(|(c, r)| DomainExpr::ball(c, r).unwrap()),
        (point2(1.0), point2(1.0), 0.1..0.8f64).prop_map(|(a, b, r)| DomainExpr::tube(a, b, r).unwrap()),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| DomainExpr::union(vec![a, b]).unwrap()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| DomainExpr::intersection(vec![a, b]).unwrap()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| DomainExpr::difference(a, b).unwrap()),
            (inner, 0.0..0.5f64).prop_map(|(a, e)| DomainExpr::thickening(a, e).unwrap()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn disc_density_decreases_with_radius(q in complex_in(0.95), grow in 0.01..3.0f64) {
        let small = density_disc(q, 1.0).unwrap().value;
        let big = density_disc(q, 1.0 + grow).unwrap().value;
        prop_assert!(small >= big);
    }

    #[test]
    fn annulus_dominates_its_outer_disc(inner in 0.05..0.5f64, t in 0.05..0.95f64, angle in 0.0..6.28f64) {
        let m = inner + t * (1.0 - inner);
        let q = Complex64::from_polar(m, angle);
        let a = density_annulus(q, inner, 1.0).unwrap().value;
        let d = density_disc(q, 1.0).unwrap().value;
        prop_assert!(a >= d * (1.0 - 1e-12));
    }

    #[test]
    fn covers_are_local_isometries(z in complex_in(0.85), r in 0.5..3.0f64, k in 0usize..4) {
        let cover = match k {
            0 => Cover::Identity,
            1 => Cover::Scaled { radius: r },
            2 => Cover::Exponential { radius: r },
            _ => Cover::Annular { inner: 0.3 * r, outer: r },
        };
        let res = pushforward_consistency_check(&cover, z).unwrap();
        let scale = density_disc(z, 1.0).unwrap().value;
        prop_assert!(res <= 1e-8 * scale, "{res}");
    }

    #[test]
    fn sdf_is_one_lipschitz(d in domain2(), a in point2(2.5), b in point2(2.5)) {
        let gap = (d.sdf_at(a.coords()) - d.sdf_at(b.coords())).abs();
        prop_assert!(gap <= a.distance(&b) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn seed_children_are_stable_and_distinct(seed in any::<u64>(), a in "[a-z]{1,8}", b in "[a-z]{1,8}") {
        let s = SeedStream::new(seed);
        prop_assert_eq!(s.child(&a), s.child(&a));
        if a != b {
            prop_assert_ne!(s.child(&a), s.child(&b));
        }
    }

    #[test]
    fn eta_grows_with_the_domain(x in -0.9..0.9f64, y in -0.9..0.9f64, grow in 0.05..2.0f64) {
        prop_assume!(x.abs() + y.abs() > 0.05);
        let field = PolyVectorField::preset(FieldPreset::Radial(2));
        let p = Point::real(&[x, y]);
        let opts = EtaOptions::default();
        let inner = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let outer = DomainExpr::centered_polydisc(&[1.0 + grow, 1.0 + grow]).unwrap();
        let a = eta_estimate(&field, &p, &inner, &opts).unwrap();
        let b = eta_estimate(&field, &p, &outer, &opts).unwrap();
        prop_assert!(a.value() <= b.value() + 1e-12);
    }

    #[test]
    fn config_text_round_trips(
        h in 0.001..0.5f64,
        tol in 1e-6..1e-1f64,
        seed in any::<u32>(),
        schedule in prop::collection::btree_set(1usize..500, 1..6),
        pts in prop::collection::vec(prop::collection::vec(-0.9..0.9f64, 4), 1..5),
    ) {
        let mut cfg = ExperimentConfig::new(ExperimentType::Pointwise);
        cfg.field = Some(PolyVectorField::preset(FieldPreset::Radial(2)));
        cfg.sequence = Some(SequenceSpec::Family { name: "arm_bidisc".into(), j_max: 8, m_max: 8 });
        cfg.points = Some(PointsSpec::List(pts.iter().map(|v| Point::from_re_im(v).unwrap()).collect()));
        cfg.schedule = schedule.into_iter().collect();
        cfg.h = h;
        cfg.tol = tol;
        cfg.seed = seed as u64;
        let text = cfg.to_config_string();
        let back = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
