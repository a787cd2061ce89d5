use kakeya_core::curves::{
    curve_point, curve_tangent, intersect_curves, locus_dichotomy_test, locus_generating_curve, locus_point,
    CurveFamily, CurveParams, Height,
};
use kakeya_core::numeric::{Matrix, Rational};
use kakeya_core::rat;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-8i64..=8, 1i64..=8).prop_map(|(p, q)| rat(p, q))
}

fn small() -> impl Strategy<Value = f64> {
    -0.45f64..0.45
}

fn family_f64() -> impl Strategy<Value = CurveFamily<f64>> {
    prop::collection::vec(small(), 4).prop_map(|v| CurveFamily::new(Matrix::from_vec(2, v).unwrap()))
}

fn family_rat() -> impl Strategy<Value = CurveFamily<Rational>> {
    prop::collection::vec(rational(), 4).prop_map(|v| CurveFamily::new(Matrix::from_vec(2, v).unwrap()))
}

fn params_rat() -> impl Strategy<Value = CurveParams<Rational>> {
    (prop::collection::vec(rational(), 2), prop::collection::vec(rational(), 2)).prop_map(|(y, w)| CurveParams::new(y, w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tangent_matches_finite_difference(
        f in family_f64(),
        y in prop::collection::vec(small(), 2),
        w in prop::collection::vec(small(), 2),
        t in -0.99f64..0.99,
    ) {
        let p = CurveParams::new(y, w);
        let h = 1e-6;
        let a = curve_point(&f, &p, &(t + h)).unwrap();
        let b = curve_point(&f, &p, &(t - h)).unwrap();
        let tan = curve_tangent(&f, &p, &t);
        for i in 0..3 {
            prop_assert!(((a[i] - b[i]) / (2.0 * h) - tan[i]).abs() <= 1e-6);
        }
    }

    #[test]
    fn intersections_coincide_exactly(f in family_rat(), p1 in params_rat(), p2 in params_rat(), t in rational()) {
        // force a common point at height t when t is in the support
        let mut p2 = p2;
        if t <= rat(1, 1) && t >= rat(-1, 1) {
            let a = f.slice_point(&p1, &t);
            let cy = f.c.mul_vec(&p2.y).unwrap();
            p2.omega = (0..2).map(|i| a[i].clone() + t.clone() * p2.y[i].clone() + t.clone() * t.clone() * cy[i].clone()).collect();
        }
        match intersect_curves(&f, &p1, &p2) {
            Ok(hs) => {
                for h in hs {
                    if let Height::Exact(s) = h {
                        prop_assert_eq!(curve_point(&f, &p1, &s).unwrap(), curve_point(&f, &p2, &s).unwrap());
                    }
                }
            }
            Err(kakeya_core::Error::IdenticalCurves) => prop_assert_eq!(&p1, &p2),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn locus_points_hit_both_curves(
        f in family_rat(),
        y0 in prop::collection::vec(rational(), 2),
        t0 in rational(),
        u in rational(),
        s in rational(),
    ) {
        prop_assume!(u != s);
        let Ok(g) = locus_generating_curve(&f, &y0, &t0, &u, &s) else { return Ok(()) };
        // meets the axis T_0(0) at height s
        prop_assert!(f.slice_point(&g, &s).iter().all(|x| *x == rat(0, 1)));
        let at_s = locus_point(&f, &y0, &t0, &u, &s, &s).unwrap();
        prop_assert!(at_s[..2].iter().all(|x| *x == rat(0, 1)));
        // meets the second curve, ω₀ = t₀(I + t₀C)y₀ with direction y₀, at height u
        let id = Matrix::<Rational>::identity(2);
        let w0: Vec<Rational> = (&id + &f.c.scale(&t0)).mul_vec(&y0).unwrap().into_iter().map(|x| x * t0.clone()).collect();
        let second = CurveParams::new(y0.clone(), w0);
        let at_u = locus_point(&f, &y0, &t0, &u, &s, &u).unwrap();
        prop_assert_eq!(&at_u[..2], &f.slice_point(&second, &u)[..]);
    }

    #[test]
    fn square_zero_locus_is_one_parameter(
        a in -1.0f64..1.0,
        b in -1.0f64..1.0,
        y0 in prop::collection::vec(-1.0f64..1.0, 2),
        t0 in -0.9f64..0.9,
        seed in any::<u64>(),
    ) {
        // C = a·[[b, 1], [−b², −b]] squares to zero
        let c = Matrix::from_rows(vec![vec![a * b, a], vec![-a * b * b, -a * b]]).unwrap();
        prop_assume!(y0.iter().any(|x| x.abs() > 0.1));
        let rep = locus_dichotomy_test(&CurveFamily::new(c), &y0, t0, 50, seed).unwrap();
        prop_assert!(rep.omega_one_param, "residual {}", rep.max_line_residual);
    }
}
