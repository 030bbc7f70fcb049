use proptest::prelude::*;

use convexma::affine::AffineFunctional;
use convexma::complex::linearity_complex;
use convexma::io::JsonArtifact;
use convexma::measure::{ma_measure, ma_measure_by_definition, mixed_ma, subdifferential, AtomicMeasure};
use convexma::pa::PAConvexFunction;
use convexma::poly::{PiecewisePolynomial, Polynomial};
use convexma::polytope::simplex_volume;
use convexma::rational::{int, rat, Rational, RationalPoint};
use convexma::solver1d::{solve_1d, Anchor};
use convexma::{convex_hull, Polytope};

fn affine(n: usize) -> impl Strategy<Value = AffineFunctional> {
    (prop::collection::vec(-2i64..=2, n), -2i64..=2)
        .prop_map(|(s, c)| AffineFunctional::new(s.into_iter().map(int).collect(), int(c)))
}

fn pa(n: usize) -> impl Strategy<Value = PAConvexFunction> {
    prop::collection::vec(affine(n), 1..=6)
        .prop_map(move |ps| PAConvexFunction::new(ps, Polytope::cube(n, &int(-2), &int(2))).unwrap())
}

fn point2() -> impl Strategy<Value = RationalPoint> {
    (-6i64..=6, -6i64..=6, 1i64..=3).prop_map(|(x, y, d)| RationalPoint::new(vec![rat(x, d), rat(y, d)]))
}

fn ratio() -> impl Strategy<Value = Rational> {
    (1i64..=5, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn homogeneity(h in pa(2), t in ratio()) {
        let mu = ma_measure(&h).unwrap();
        prop_assert_eq!(ma_measure(&h.scale(&t).unwrap()).unwrap(), mu.scale(&(&t * &t)).unwrap());
    }

    #[test]
    fn affine_invariance(h in pa(2), a in affine(2)) {
        prop_assert_eq!(ma_measure(&h.add_affine(&a)).unwrap(), ma_measure(&h).unwrap());
    }

    #[test]
    fn dual_route_matches_definition(h in pa(2)) {
        prop_assert_eq!(ma_measure(&h).unwrap(), ma_measure_by_definition(&h).unwrap());
    }

    #[test]
    fn dual_route_matches_definition_3d(h in pa(3)) {
        prop_assert_eq!(ma_measure(&h).unwrap(), ma_measure_by_definition(&h).unwrap());
    }

    #[test]
    fn translation_step(h in pa(2)) {
        for (u, _) in ma_measure(&h).unwrap().atoms() {
            let centred = subdifferential(&h.recentered(u), &RationalPoint::origin(2)).unwrap();
            prop_assert_eq!(subdifferential(&h, u).unwrap(), centred);
        }
    }

    #[test]
    fn mixed_symmetry_and_diagonal(g in pa(2), h in pa(2)) {
        prop_assert_eq!(mixed_ma(&[g.clone(), h.clone()]).unwrap(), mixed_ma(&[h.clone(), g.clone()]).unwrap());
        prop_assert_eq!(mixed_ma(&[h.clone(), h.clone()]).unwrap(), ma_measure(&h).unwrap());
    }

    #[test]
    fn linearity_complex_ignores_affine_shift(h in pa(2), a in affine(2)) {
        let c = linearity_complex(&h).unwrap();
        prop_assert_eq!(linearity_complex(&h.add_affine(&a)).unwrap().signature(), c.signature());
    }

    #[test]
    fn refinement_commutes(g in pa(2), h in pa(2)) {
        let (a, b) = (linearity_complex(&g).unwrap(), linearity_complex(&h).unwrap());
        prop_assert_eq!(a.common_refinement(&b).unwrap().signature(), b.common_refinement(&a).unwrap().signature());
    }

    #[test]
    fn hull_round_trip_and_triangulations(pts in prop::collection::vec(point2(), 1..10)) {
        let p = convex_hull(&pts).unwrap();
        prop_assert_eq!(&convex_hull(p.vertices()).unwrap(), &p);
        prop_assert_eq!(&Polytope::from_halfspaces(2, &p.inequalities()).unwrap(), &p);
        let a: Rational = p.triangulate(false).iter().map(simplex_volume).sum();
        let b: Rational = p.triangulate(true).iter().map(simplex_volume).sum();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a, p.volume());
        for v in p.vertices() {
            prop_assert!(p.contains(v));
        }
    }

    #[test]
    fn json_round_trips(h in pa(2)) {
        let h2 = PAConvexFunction::from_json(&h.to_json()).unwrap();
        prop_assert_eq!(&h2, &h);
        let mu = ma_measure(&h).unwrap();
        prop_assert_eq!(AtomicMeasure::from_json(&mu.to_json()).unwrap(), mu);
    }

    #[test]
    fn polynomial_division(a in prop::collection::vec(-5i64..=5, 0..6), b in prop::collection::vec(-5i64..=5, 1..4)) {
        let a = Polynomial::new(a.into_iter().map(int).collect());
        let b = Polynomial::new(b.into_iter().map(int).collect());
        prop_assume!(!b.is_zero());
        let (q, r) = a.divrem(&b);
        prop_assert_eq!(q * b.clone() + r.clone(), a);
        prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
    }

    #[test]
    fn square_free_product(roots in prop::collection::vec((-3i64..=3, 1usize..=3), 1..4)) {
        let f = roots.iter().fold(Polynomial::constant(int(1)), |acc, &(r, k)| {
            (0..k).fold(acc, |acc, _| acc * Polynomial::new(vec![int(-r), int(1)]))
        });
        let parts = f.square_free_decomposition();
        let back = parts.iter().enumerate().fold(Polynomial::constant(int(1)), |acc, (i, p)| {
            (0..=i).fold(acc, |acc, _| acc * p.clone())
        });
        prop_assert_eq!(back, f);
    }

    #[test]
    fn solver_identity(c in prop::collection::vec(-3i64..=3, 1..4), k in 0i64..=4, deg_s in 1u64..=3, x in 0i64..=4) {
        let p = Polynomial::new(c.into_iter().map(int).collect());
        let f = p.clone() * p + Polynomial::constant(int(k));
        let f = PiecewisePolynomial::single(int(0), int(1), f).unwrap();
        let s = solve_1d(&f, deg_s, &Anchor::new(rat(x, 4), int(1), int(2))).unwrap();
        prop_assert_eq!(s.phi.pieces()[0].nth_derivative(2).scale(&int(deg_s as i64)), f.pieces()[0].clone());
        prop_assert_eq!(s.phi.eval(&rat(x, 4)), Some(int(1)));
    }
}
