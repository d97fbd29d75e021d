use loewner::lifting::evolution_map;
use loewner::topology::{circle, winding_number};
use loewner::{ChainSpec, CheckRecord, CPoint, Complex64, CoverSpec, NormKind, ValidationReport};
use proptest::prelude::*;

fn disk_point(r: f64, theta: f64) -> CPoint {
    CPoint::scalar(Complex64::from_polar(r, theta))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_homogeneous(
        re in prop::collection::vec(-1.0f64..1.0, 3),
        im in prop::collection::vec(-1.0f64..1.0, 3),
        k in -5.0f64..5.0,
    ) {
        let p = CPoint::new(re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect()).unwrap();
        for kind in [NormKind::Euclidean, NormKind::Sup] {
            let lhs = p.scale_re(k).norm(kind);
            let rhs = k.abs() * p.norm(kind);
            prop_assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + rhs));
        }
        prop_assert!(p.norm(NormKind::Sup) <= p.norm(NormKind::Euclidean) + 1e-15);
    }

    #[test]
    fn deck_maps_preserve_the_cover(
        t in 0.0f64..2.0,
        k in -3i64..=3,
        r in 0.0f64..0.9,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let cover = CoverSpec::annulus(t);
        let deck = cover.deck(&[k]).unwrap();
        let z = disk_point(r, theta);
        let gz = deck.apply(&z).unwrap();
        // Deep in the horn the evaluation is ill-conditioned; stay clear.
        prop_assume!(1.0 - gz.norm(NormKind::Euclidean) > 1e-5);
        let fz = cover.eval(&z).unwrap();
        let fgz = cover.eval(&gz).unwrap();
        prop_assert!(fgz.dist(&fz) <= 1e-9 * (1.0 + fz.norm(NormKind::Euclidean)));
    }

    #[test]
    fn evolution_maps_obey_schwarz(
        s in 0.0f64..1.5,
        dt in 0.05f64..1.5,
        r in 0.0f64..0.9,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let chain = ChainSpec::annulus();
        let z = disk_point(r, theta);
        let w = evolution_map(&chain, s, s + dt, &z, 1e-12).unwrap();
        prop_assert!(w.norm(NormKind::Euclidean) <= r + 1e-12);
    }

    #[test]
    fn evolution_maps_compose(
        s in 0.0f64..1.0,
        d1 in 0.05f64..0.8,
        d2 in 0.05f64..0.8,
        r in 0.0f64..0.85,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let chain = ChainSpec::annulus();
        let (u, t) = (s + d1, s + d1 + d2);
        let z = disk_point(r, theta);
        let direct = evolution_map(&chain, s, t, &z, 1e-12).unwrap();
        let mid = evolution_map(&chain, s, u, &z, 1e-12).unwrap();
        let via = evolution_map(&chain, u, t, &mid, 1e-12).unwrap();
        prop_assert!(direct.dist(&via) <= 1e-8);
    }

    #[test]
    fn winding_numbers_add(
        a in -4i64..=4,
        b in -4i64..=4,
        radius in 0.2f64..3.0,
    ) {
        let c = Complex64::new(0.0, 0.0);
        let la = circle(c, radius, a, 64).unwrap();
        let lb = circle(c, radius, b, 64).unwrap();
        prop_assert_eq!(winding_number(&la, c).unwrap(), a);
        prop_assert_eq!(winding_number(&la.concat(&lb).unwrap(), c).unwrap(), a + b);
        prop_assert_eq!(winding_number(&la.reverse(), c).unwrap(), -a);
    }

    #[test]
    fn reports_round_trip_through_json(
        seed in any::<u64>(),
        checks in prop::collection::vec(
            ("[a-z]{1,12}", 0usize..1000, 0.0f64..1.0, 1e-15f64..1.0),
            0..6,
        ),
    ) {
        let mut report = ValidationReport::new("annulus", seed);
        for (name, n, res, tol) in checks {
            let mut rec = CheckRecord::new(name, tol);
            for j in 0..n {
                rec.push(Ok(res * j as f64 / n as f64));
            }
            report.push(rec);
        }
        let json = report.to_json();
        let back = ValidationReport::from_json(&json).unwrap();
        prop_assert_eq!(&back, &report);
        prop_assert_eq!(back.to_json(), json);
    }
}
