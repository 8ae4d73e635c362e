use heisenberg_hardy::domains::{characteristic_point, hardy_weight, nearest_facet, partition_cell, WeightAggregation};
use heisenberg_hardy::fields::{lambda_apply, Polynomial};
use heisenberg_hardy::hardy::{boundary_sign_terms, c_alpha, jensen_split, optimal_alpha, sharp_constant, superadditivity_gap};
use heisenberg_hardy::heis::{dilate, frame_pairings, group_compose, horizontal_gradient, left_translate_field};
use heisenberg_hardy::metrics::{cc_distance, kaplan_distance, kaplan_gauge};
use heisenberg_hardy::quadrature::{integrate, Region};
use heisenberg_hardy::{AxisBox, Domain, HalfSpace, HorizontalVector, Point, Polytope, QuadratureSpec, SolverConfig, WeightSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point(n: usize, scale: f64) -> impl Strategy<Value = Point> {
    prop::collection::vec(-scale..scale, 2 * n + 1).prop_map(|c| Point::from_coords(c).unwrap())
}

fn triple() -> impl Strategy<Value = (Point, Point, Point)> {
    (1usize..4).prop_flat_map(|n| (point(n, 5.0), point(n, 5.0), point(n, 5.0)))
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

proptest! {
    #[test]
    fn composition_is_associative((a, b, c) in triple()) {
        let l = group_compose(&group_compose(&a, &b).unwrap(), &c).unwrap();
        let r = group_compose(&a, &group_compose(&b, &c).unwrap()).unwrap();
        prop_assert!(close(l.coords(), r.coords(), 1e-12));
    }

    #[test]
    fn inverse_is_two_sided((a, _, _) in triple()) {
        let inv = a.inverse();
        for e in [group_compose(&a, &inv).unwrap(), group_compose(&inv, &a).unwrap()] {
            prop_assert!(e.coords().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn dilation_is_an_automorphism((a, b, _) in triple(), s in 0.05..20.0f64) {
        let l = dilate(s, &group_compose(&a, &b).unwrap()).unwrap();
        let r = group_compose(&dilate(s, &a).unwrap(), &dilate(s, &b).unwrap()).unwrap();
        prop_assert!(close(l.coords(), r.coords(), 1e-11));
    }

    #[test]
    fn gauge_is_homogeneous_and_symmetric((a, _, _) in triple(), s in 0.05..20.0f64) {
        let g = kaplan_gauge(&a);
        prop_assert!((kaplan_gauge(&dilate(s, &a).unwrap()) - s * g).abs() <= 1e-12 * (1.0 + s * g));
        prop_assert!((kaplan_gauge(&a.inverse()) - g).abs() <= 1e-12 * (1.0 + g));
    }

    #[test]
    fn kaplan_distance_is_left_invariant((g, p, q) in triple()) {
        let d = kaplan_distance(&p, &q).unwrap();
        let dg = kaplan_distance(&group_compose(&g, &p).unwrap(), &group_compose(&g, &q).unwrap()).unwrap();
        prop_assert!((d - dg).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn lambda_is_a_complex_structure(v in prop::collection::vec(-10.0..10.0f64, 1..5)) {
        let v: Vec<f64> = v.iter().chain(v.iter().rev()).copied().collect();
        let lv = lambda_apply(&v);
        prop_assert!(lv.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>().abs() <= 1e-12);
        prop_assert!(lambda_apply(&lv).iter().zip(&v).all(|(a, b)| *a == -*b));
    }

    #[test]
    fn frame_commutes_with_left_translation(seed in any::<u64>(), (g, p, _) in (1usize..3).prop_flat_map(|n| (point(n, 1.0), point(n, 1.0), Just(())))) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = Polynomial::random(&mut rng, p.coords().len(), 3);
        let moved = horizontal_gradient(&left_translate_field(u.clone(), g.clone()), &p).unwrap();
        let direct = horizontal_gradient(&u, &group_compose(&g, &p).unwrap()).unwrap();
        prop_assert!(close(&moved.to_flat(), &direct.to_flat(), 1e-6));
    }

    #[test]
    fn weight_scales_under_dilation(
        (p, s) in (point(1, 2.0), 0.2..5.0f64),
        exponent in 2.0..5.0f64,
        l2 in any::<bool>(),
    ) {
        prop_assume!(p.t() > 1e-2);
        let domain: Domain = HalfSpace::new(vec![0.0, 0.0, 1.0], 0.0).unwrap().into();
        let agg = if l2 { WeightAggregation::L2Conjecture } else { WeightAggregation::PerComponent };
        let spec = WeightSpec::new(exponent, agg).unwrap();
        let w = hardy_weight(&domain, &spec, &p).unwrap();
        let ws = hardy_weight(&domain, &spec, &dilate(s, &p).unwrap()).unwrap();
        prop_assert!((ws - s.powf(-exponent) * w).abs() <= 1e-10 * (1.0 + ws));
    }

    #[test]
    fn characteristic_point_is_on_the_boundary(nu in prop::collection::vec(-1.0..1.0f64, 5), d in -2.0..2.0f64) {
        prop_assume!(nu[4].abs() > 0.05);
        let (h, _) = HalfSpace::normalized(nu, d).unwrap();
        let xi = characteristic_point(&h).unwrap();
        prop_assert!(h.signed_distance(xi.coords()).abs() <= 1e-12);
        prop_assert!(frame_pairings(xi.coords(), h.normal()).norm() <= 1e-12);
    }

    #[test]
    fn nearest_facet_cell_contains_the_point(c in prop::collection::vec(0.01..0.99f64, 3)) {
        let cube = Polytope::unit_cube(1);
        let p = Point::from_coords(c.clone()).unwrap();
        let k = nearest_facet(&cube, &p).unwrap();
        prop_assert!(partition_cell(&cube, k).unwrap().contains(&c));
    }

    #[test]
    fn gauss_rule_is_exact_on_polynomials(
        coeffs in prop::collection::vec(-3.0..3.0f64, 1..16),
        lo in -2.0..0.0f64,
        width in 0.1..3.0f64,
    ) {
        let hi = lo + width;
        let f = |x: &[f64]| coeffs.iter().rev().fold(0.0, |acc, c| acc * x[0] + c);
        let exact: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (hi.powi(k as i32 + 1) - lo.powi(k as i32 + 1)) / (k as f64 + 1.0))
            .sum();
        let region = Region::boxed(AxisBox::new(vec![lo], vec![hi]));
        let v = integrate(f, &region, &QuadratureSpec::gauss(8)).unwrap();
        prop_assert!((v.value - exact).abs() <= 1e-11 * (1.0 + exact.abs()));
    }

    #[test]
    fn superadditivity(v in prop::collection::vec(-3.0..3.0f64, 2..9), p in 2.0..8.0f64) {
        let n = v.len() / 2;
        let hv = HorizontalVector { a: v[..n].to_vec(), b: v[n..2 * n].to_vec() };
        prop_assert!(superadditivity_gap(&hv, p).unwrap() >= -1e-12 * (1.0 + hv.norm().powf(p)));
    }

    #[test]
    fn jensen_bound(xa in prop::collection::vec((0.0..5.0f64, 0.05..5.0f64), 1..8), alpha in 1.0..6.0f64) {
        let (x, a): (Vec<f64>, Vec<f64>) = xa.into_iter().unzip();
        let j = jensen_split(&x, &a, alpha).unwrap();
        prop_assert!(j.bound >= x.iter().sum::<f64>().powf(alpha) * (1.0 - 1e-12));
    }

    #[test]
    fn boundary_terms_are_nonnegative(a in 0.0..20.0f64, b in 0.0..20.0f64, p in 2.0..10.0f64) {
        prop_assert!(boundary_sign_terms(a, b, p).unwrap() >= 0.0);
    }

    #[test]
    fn optimal_alpha_dominates(p in 2.0..12.0f64, alpha in -3.0..1.0f64) {
        let (_, c) = optimal_alpha(p).unwrap();
        prop_assert!(c_alpha(alpha, p) <= c + 1e-14);
        prop_assert!((c - sharp_constant(p).unwrap()).abs() <= 1e-14);
        prop_assert!(c > 0.0 && c < (-1.0f64).exp());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn cc_distance_symmetric_and_homogeneous((p, q) in (point(1, 1.0), point(1, 1.0)), s in 0.5..2.0f64) {
        let cfg = SolverConfig::default();
        let d = cc_distance(&p, &q, &cfg).unwrap().distance;
        let back = cc_distance(&q, &p, &cfg).unwrap().distance;
        let scaled = cc_distance(&dilate(s, &p).unwrap(), &dilate(s, &q).unwrap(), &cfg).unwrap().distance;
        prop_assert!((d - back).abs() <= 2e-3);
        prop_assert!((scaled - s * d).abs() <= 2e-3 * (1.0 + s));
    }
}
