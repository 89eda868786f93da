use proptest::prelude::*;

use psicoord::hexagon::{lengths_from_theta, r_from_theta, theta_from_r};
use psicoord::psi::pair_sum;
use psicoord::triangulation::samples;
use psicoord::{
    build_complex, build_polytope, cosh_power_integral, forward_map, invert, mass,
    EnumerationOptions, GluingSpec, HexGeometry, Lambda, Metric, SolveOptions, Verdict,
};

fn lam(v: f64) -> Lambda {
    Lambda::new(v).unwrap()
}

fn relabel(spec: &GluingSpec, perm: &[usize], rot: &[usize]) -> GluingSpec {
    let g = spec
        .gluings
        .iter()
        .map(|[a, b]| {
            let f = |s: &psicoord::triangulation::Slot| {
                (perm[s.hexagon], (s.slot + rot[s.hexagon]) % 3)
            };
            [f(a), f(b)]
        })
        .collect();
    GluingSpec::new(spec.hexagon_count, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lengths_survive_round_trip(l in prop::array::uniform3(0.01f64..10.0)) {
        let g = HexGeometry::from_lengths(l).unwrap();
        let back = lengths_from_theta(g.theta).unwrap();
        for i in 0..3 {
            prop_assert!((back[i] - l[i]).abs() <= 1e-9 * l[i]);
        }
        let t = theta_from_r(r_from_theta(g.theta)).unwrap();
        for (a, b) in t.iter().zip(g.theta) {
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }
    }

    #[test]
    fn integral_is_increasing_and_bounded(l in -6.0f64..-0.05, x in 0.0f64..40.0, dx in 1e-3f64..1.0) {
        let m = mass(lam(l));
        let a = cosh_power_integral(lam(l), x).unwrap();
        let b = cosh_power_integral(lam(l), x + dx).unwrap();
        prop_assert!(b >= a);
        prop_assert!(b <= m * (1.0 + 1e-12));
    }

    #[test]
    fn pair_sum_is_positive(l in -12.0f64..3.0, a in 1e-4f64..5.0, x in -60.0f64..60.0) {
        prop_assert!(pair_sum(lam(l), a, x).unwrap() > 0.0);
    }

    #[test]
    fn invariant_ignores_labelling(
        lengths in prop::collection::vec(0.2f64..3.0, 6),
        perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
        rot in prop::collection::vec(0usize..3, 4),
        l in -3.0f64..2.0,
    ) {
        let spec = samples::tetrahedral();
        let c = build_complex(&spec).unwrap();
        let d = build_complex(&relabel(&spec, &perm, &rot)).unwrap();
        let m = Metric::new(lengths).unwrap();
        let a = forward_map(&c, &m, lam(l)).unwrap();
        let b = forward_map(&d, &m, lam(l)).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn images_lie_inside(lengths in prop::collection::vec(0.05f64..6.0, 6), l in -4.0f64..2.0) {
        let c = build_complex(&samples::tetrahedral()).unwrap();
        let system = build_polytope(&c, lam(l), &EnumerationOptions::default());
        let z = forward_map(&c, &Metric::new(lengths).unwrap(), lam(l)).unwrap();
        prop_assert_eq!(system.check_membership(&z, 0.0).unwrap().verdict, Verdict::Inside);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn solution_does_not_depend_on_start(
        target in prop::collection::vec(0.2f64..3.0, 3),
        start in prop::collection::vec(0.2f64..3.0, 3),
        l in prop::sample::select(vec![-3.0, -1.0, -0.5, 0.0, 2.0]),
    ) {
        let c = build_complex(&samples::pair_of_pants()).unwrap();
        let z = forward_map(&c, &Metric::new(target.clone()).unwrap(), lam(l)).unwrap();
        let a = invert(&c, &z, lam(l), &SolveOptions::default()).unwrap();
        let opts = SolveOptions { initial: Some(Metric::new(start).unwrap()), ..SolveOptions::default() };
        let b = invert(&c, &z, lam(l), &opts).unwrap();
        for ((x, y), t) in a.metric.lengths().iter().zip(b.metric.lengths()).zip(&target) {
            prop_assert!((x - y).abs() < 2e-8);
            prop_assert!((x - t).abs() < 1e-8);
        }
    }
}
