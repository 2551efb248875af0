use proptest::prelude::*;

use slicereg::evaluation::{eval, t_map, t_map_with_floor};
use slicereg::{leibniz_residual, slice_decompose, QSeries, Quaternion, UnitImaginary};

fn quaternion(scale: f64) -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-1.0..=1.0f64).prop_map(move |a| Quaternion::new(a[0], a[1], a[2], a[3]) * scale)
}

fn series(order: usize) -> impl Strategy<Value = QSeries> {
    prop::collection::vec(quaternion(1.0), order + 1).prop_map(|c| QSeries::new(c).unwrap())
}

fn point_in_ball(radius: f64) -> impl Strategy<Value = Quaternion> {
    quaternion(1.0).prop_map(move |q| {
        if q.norm() > 1.0 {
            q / q.norm() * radius
        } else {
            q * radius
        }
    })
}

fn max_diff(a: &QSeries, b: &QSeries) -> f64 {
    (a - b).max_coeff_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn multiplication_is_associative(a in quaternion(3.0), b in quaternion(3.0), c in quaternion(3.0)) {
        let scale = (a.norm() * b.norm() * c.norm()).max(f64::MIN_POSITIVE);
        prop_assert!(((a * b) * c - a * (b * c)).norm() <= 1e-13 * scale);
    }

    #[test]
    fn conjugation_reverses_products(a in quaternion(3.0), b in quaternion(3.0)) {
        let scale = (a.norm() * b.norm()).max(f64::MIN_POSITIVE);
        prop_assert!(((a * b).conj() - b.conj() * a.conj()).norm() <= 1e-13 * scale);
        prop_assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn modulus_is_multiplicative(a in quaternion(3.0), b in quaternion(3.0)) {
        let expected = a.norm() * b.norm();
        prop_assert!(((a * b).norm() - expected).abs() <= 1e-13 * expected.max(f64::MIN_POSITIVE));
        prop_assert!((a.norm().powi(2) - (a * a.conj()).re()).abs() <= 1e-14 * a.norm_sqr().max(1.0));
    }

    #[test]
    fn inverse_round_trip(dir in quaternion(1.0), exponent in -6.0..6.0f64) {
        prop_assume!(dir.norm() > 1e-3);
        let q = dir / dir.norm() * 10f64.powf(exponent);
        let r = q.inv().unwrap();
        prop_assert!((q * r - Quaternion::ONE).norm() <= 8.0 * f64::EPSILON);
    }

    #[test]
    fn slice_coordinates_round_trip(q in quaternion(5.0)) {
        prop_assume!(q.im_norm() >= 1e-6);
        let p = slice_decompose(q, UnitImaginary::J);
        prop_assert!(p.y >= 0.0);
        prop_assert!((p.reconstitute() - q).norm() <= 1e-14 * q.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn star_product_is_associative(f in series(16), g in series(16), h in series(16)) {
        // components in [-1, 1] give |an| <= 2; rescale to |an| <= 1
        let (f, g, h) = (f.scale_real(0.5), g.scale_real(0.5), h.scale_real(0.5));
        prop_assert!(max_diff(&f.star(&g).star(&h), &f.star(&g.star(&h))) <= 1e-12);
    }

    #[test]
    fn conjugate_reverses_star(f in series(16), g in series(16)) {
        let lhs = f.star(&g).regular_conjugate();
        let rhs = g.regular_conjugate().star(&f.regular_conjugate());
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12);
        prop_assert_eq!(f.regular_conjugate().regular_conjugate(), f);
    }

    #[test]
    fn symmetrization_is_real_and_commutes(f in series(16)) {
        let s = f.symmetrization();
        let other = f.regular_conjugate().star(&f);
        prop_assert!(max_diff(&s, &other) <= 1e-12);
        prop_assert!(s.coeffs().iter().all(|c| c.im_norm() <= 1e-12));
    }

    #[test]
    fn leibniz_rule_holds(f in series(16), g in series(16)) {
        prop_assert!(leibniz_residual(&f, &g) <= 1e-12);
    }

    #[test]
    fn subseries_and_compose_are_exact(f in series(20), n0 in 1usize..7) {
        let round = f.subseries(n0).compose_power(n0);
        for n in 0..=round.order() {
            let expected = if n % n0 == 0 { f.coeffs()[n] } else { Quaternion::ZERO };
            prop_assert_eq!(round.coeffs()[n], expected);
        }
    }

    #[test]
    fn t_map_preserves_sphere(f in series(12), q in point_in_ball(0.95)) {
        if let Ok(t) = t_map(&f, q) {
            prop_assert!((t.norm() - q.norm()).abs() <= 1e-12);
            prop_assert!((t.re() - q.re()).abs() <= 1e-12);
        }
    }

    #[test]
    fn t_maps_are_mutually_inverse(f in series(12), q in point_in_ball(0.9)) {
        // stay well away from zero sets, where the conjugation is ill-conditioned
        let fc = f.regular_conjugate();
        if let Ok(t) = t_map_with_floor(&f, q, 0.1) {
            prop_assume!(eval(&f, t).norm() > 0.1);
            let back = t_map(&fc, t).unwrap();
            prop_assert!((back - q).norm() <= 1e-10);
        }
    }

    #[test]
    fn json_round_trip(f in series(6)) {
        let text = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<QSeries>(&text).unwrap(), f);
    }
}
